#include "relbgk/phase_space.hpp"

#include "relbgk/errors.hpp"
#include "relbgk/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace relbgk {

std::string_view to_string(QuadratureRule rule) noexcept
{
    switch (rule) {
    case QuadratureRule::UniformTrapezoid:
        return "uniform-trapezoid";
    case QuadratureRule::GaussLegendreTensor:
        return "gauss-legendre-tensor";
    case QuadratureRule::GaussLegendreSinh:
        return "gauss-legendre-sinh";
    }
    return "unknown";
}

QuadratureRule parse_quadrature_rule(std::string_view name)
{
    for (auto rule : {QuadratureRule::UniformTrapezoid, QuadratureRule::GaussLegendreTensor,
                      QuadratureRule::GaussLegendreSinh}) {
        if (to_string(rule) == name) {
            return rule;
        }
    }
    throw ConfigError("unknown quadrature rule '" + std::string(name) + "'");
}

std::string_view to_string(SpatialMode mode) noexcept
{
    return mode == SpatialMode::Homogeneous ? "homogeneous" : "slab";
}

void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights)
{
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) {
                break;
            }
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        nodes[n / 2] = 0.0;
    }
}

MomentumGrid::MomentumGrid(double q_max, int nodes_per_axis, QuadratureRule rule)
    : q_max_(q_max), per_axis_(nodes_per_axis), rule_(rule)
{
    if (!(q_max > 0.0) || !std::isfinite(q_max)) {
        throw ConfigError("grid: q_max must be positive and finite");
    }
    if (nodes_per_axis < 4) {
        throw ConfigError("grid: nodes_per_axis must be at least 4");
    }
    const int n = nodes_per_axis;
    switch (rule) {
    case QuadratureRule::UniformTrapezoid: {
        const double h = 2.0 * q_max / (n - 1);
        axis_.resize(n);
        axis_weights_.assign(n, h);
        for (int i = 0; i < n; ++i) {
            axis_[i] = -q_max + i * h;
        }
        axis_weights_.front() = axis_weights_.back() = 0.5 * h;
        break;
    }
    case QuadratureRule::GaussLegendreTensor: {
        gauss_legendre(n, axis_, axis_weights_);
        for (int i = 0; i < n; ++i) {
            axis_[i] *= q_max;
            axis_weights_[i] *= q_max;
        }
        break;
    }
    case QuadratureRule::GaussLegendreSinh: {
        std::vector<double> t;
        gauss_legendre(n, t, axis_weights_);
        const double alpha = std::asinh(q_max);
        axis_.resize(n);
        for (int i = 0; i < n; ++i) {
            axis_[i] = std::sinh(alpha * t[i]);
            axis_weights_[i] *= alpha * std::cosh(alpha * t[i]);
        }
        break;
    }
    }

    const std::size_t total = static_cast<std::size_t>(n) * n * n;
    nodes_.reserve(total);
    weights_.reserve(total);
    energies_.reserve(total);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const Vec3 q{axis_[i], axis_[j], axis_[k]};
                nodes_.push_back(q);
                weights_.push_back(axis_weights_[i] * axis_weights_[j] * axis_weights_[k]);
                energies_.push_back(shell_energy(q));
            }
        }
    }

    for (double beta : {1.0, 2.0, 4.0}) {
        CompensatedSum acc;
        for (std::size_t i = 0; i < total; ++i) {
            acc.add(weights_[i] * std::exp(-beta * energies_[i]));
        }
        calibration_.push_back({beta, partition_m(beta), acc.value()});
    }
}

double MomentumGrid::certified_tolerance() const noexcept
{
    double worst = 1e-13;
    for (const auto &c : calibration_) {
        worst = std::max(worst, c.defect());
    }
    return worst;
}

GridPtr build_grid(double q_max, int nodes_per_axis, QuadratureRule rule, bool force)
{
    auto grid = std::make_shared<const MomentumGrid>(q_max, nodes_per_axis, rule);
    const double defect = grid->unit_defect();
    if (!force && !(defect <= kCalibrationLimit)) {
        std::ostringstream msg;
        msg.precision(3);
        msg << "grid calibration failed: relative defect " << std::scientific << defect
            << " against M(1) exceeds " << kCalibrationLimit << " (q_max=" << q_max
            << ", nodes_per_axis=" << nodes_per_axis << ", rule=" << to_string(rule) << ")";
        throw ConfigError(msg.str());
    }
    return grid;
}

double required_q_max(double beta, double speed, double tail)
{
    if (!(beta > 0.0) || !(tail > 0.0) || !(speed >= 0.0)) {
        throw DomainError("required_q_max: invalid arguments");
    }
    const double cap = std::max(1.0, speed);
    const double log_m = log_partition_m(beta);
    auto excess = [&](double r) { return std::log(residual_phi(r, cap, beta)) - log_m - std::log(tail); };
    double hi = 1.0;
    while (excess(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e12) {
            throw DomainError("required_q_max: no finite box reaches the tail target");
        }
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return hi;
}

SpatialGrid SpatialGrid::slab(double length, int cells)
{
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw ConfigError("slab: length must be positive");
    }
    if (cells < 1) {
        throw ConfigError("slab: cells must be at least 1");
    }
    return {SpatialMode::Slab, length, cells};
}

Distribution::Distribution(GridPtr grid, SpatialGrid space)
    : grid_(std::move(grid)), space_(space)
{
    if (!grid_) {
        throw ConfigError("distribution: null momentum grid");
    }
    if (space_.mode == SpatialMode::Homogeneous && space_.cells != 1) {
        throw ConfigError("distribution: homogeneous mode has exactly one cell");
    }
    values_.assign(static_cast<std::size_t>(space_.cells) * grid_->size(), 0.0);
}

double Distribution::min_value() const noexcept
{
    return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

double l1_distance(const MomentumGrid &grid, std::span<const double> a, std::span<const double> b)
{
    const auto &w = grid.weights();
    CompensatedSum acc;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc.add(w[i] * std::fabs(a[i] - b[i]));
    }
    return acc.value();
}

} // namespace relbgk
