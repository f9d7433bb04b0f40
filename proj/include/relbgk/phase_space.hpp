#pragma once

#include "relbgk/numerics.hpp"
#include "relbgk/types.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace relbgk {

enum class QuadratureRule {
    UniformTrapezoid,
    GaussLegendreTensor,
    /// Gauss-Legendre in t with q = sinh(alpha t), alpha = asinh(q_max). Nodes
    /// cluster near the origin where exp(-beta q0) varies fastest.
    GaussLegendreSinh,
};

[[nodiscard]] std::string_view to_string(QuadratureRule rule) noexcept;
[[nodiscard]] QuadratureRule parse_quadrature_rule(std::string_view name);

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights);

struct CalibrationEntry {
    double beta{};
    double reference{}; ///< M(beta)
    double measured{};  ///< sum w exp(-beta q0)
    [[nodiscard]] double defect() const noexcept { return std::fabs(measured - reference) / reference; }
};

/// Tensorized momentum grid on [-q_max, q_max]^3. Immutable after build.
class MomentumGrid {
public:
    MomentumGrid(double q_max, int nodes_per_axis, QuadratureRule rule);

    [[nodiscard]] double q_max() const noexcept { return q_max_; }
    [[nodiscard]] int nodes_per_axis() const noexcept { return per_axis_; }
    [[nodiscard]] QuadratureRule rule() const noexcept { return rule_; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

    [[nodiscard]] const std::vector<Vec3> &nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<double> &weights() const noexcept { return weights_; }
    [[nodiscard]] const std::vector<double> &energies() const noexcept { return energies_; }
    [[nodiscard]] const std::vector<double> &axis() const noexcept { return axis_; }
    [[nodiscard]] const std::vector<double> &axis_weights() const noexcept { return axis_weights_; }

    /// Calibration against M(beta) for beta in {1, 2, 4}.
    [[nodiscard]] const std::vector<CalibrationEntry> &calibration() const noexcept { return calibration_; }
    [[nodiscard]] double unit_defect() const noexcept { return calibration_.front().defect(); }
    /// Largest calibration defect, floored at 1e-13.
    [[nodiscard]] double certified_tolerance() const noexcept;

private:
    double q_max_;
    int per_axis_;
    QuadratureRule rule_;
    std::vector<double> axis_;
    std::vector<double> axis_weights_;
    std::vector<Vec3> nodes_;
    std::vector<double> weights_;
    std::vector<double> energies_;
    std::vector<CalibrationEntry> calibration_;
};

using GridPtr = std::shared_ptr<const MomentumGrid>;

/// Calibration defect above which build_grid refuses the grid.
inline constexpr double kCalibrationLimit = 1e-6;

/// Builds and calibrates a grid. Throws ConfigError carrying the measured
/// defect when the beta = 1 calibration exceeds kCalibrationLimit, unless forced.
[[nodiscard]] GridPtr build_grid(double q_max, int nodes_per_axis, QuadratureRule rule, bool force = false);

/// Smallest box half-width q_max with Phi(q_max; max(1,|u|), beta) / M(beta)
/// below `tail`; a conservative box size for the Juttner J(., beta, u).
[[nodiscard]] double required_q_max(double beta, double speed, double tail = 1e-10);

enum class SpatialMode { Homogeneous, Slab };

[[nodiscard]] std::string_view to_string(SpatialMode mode) noexcept;

struct SpatialGrid {
    SpatialMode mode = SpatialMode::Homogeneous;
    double length = 1.0;
    int cells = 1;

    [[nodiscard]] static SpatialGrid homogeneous() noexcept { return {}; }
    [[nodiscard]] static SpatialGrid slab(double length, int cells);

    /// Cell volume; the homogeneous cell has unit volume.
    [[nodiscard]] double dx() const noexcept { return length / cells; }
    [[nodiscard]] double center(int i) const noexcept { return (i + 0.5) * dx(); }
    friend bool operator==(const SpatialGrid &, const SpatialGrid &) = default;
};

/// Phase density on (cell, momentum node), stored cell-major.
class Distribution {
public:
    Distribution(GridPtr grid, SpatialGrid space);

    [[nodiscard]] const MomentumGrid &grid() const noexcept { return *grid_; }
    [[nodiscard]] const GridPtr &grid_ptr() const noexcept { return grid_; }
    [[nodiscard]] const SpatialGrid &space() const noexcept { return space_; }
    [[nodiscard]] int cells() const noexcept { return space_.cells; }
    [[nodiscard]] std::size_t nodes() const noexcept { return grid_->size(); }

    [[nodiscard]] std::span<double> cell(int i) noexcept { return {values_.data() + offset(i), nodes()}; }
    [[nodiscard]] std::span<const double> cell(int i) const noexcept { return {values_.data() + offset(i), nodes()}; }

    [[nodiscard]] std::vector<double> &values() noexcept { return values_; }
    [[nodiscard]] const std::vector<double> &values() const noexcept { return values_; }

    [[nodiscard]] double min_value() const noexcept;

private:
    [[nodiscard]] std::size_t offset(int i) const noexcept { return static_cast<std::size_t>(i) * nodes(); }

    GridPtr grid_;
    SpatialGrid space_;
    std::vector<double> values_;
};

/// sum_i w_i weight(i) f_i with compensated summation in node order.
template <class WeightFn>
[[nodiscard]] double quadrature(const MomentumGrid &grid, std::span<const double> f, WeightFn &&weight)
{
    const auto &w = grid.weights();
    CompensatedSum acc;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] != 0.0) {
            acc.add(w[i] * weight(i) * f[i]);
        }
    }
    return acc.value();
}

[[nodiscard]] inline double integrate(const MomentumGrid &grid, std::span<const double> f)
{
    return quadrature(grid, f, [](std::size_t) { return 1.0; });
}

/// L1(dq) distance between two cells on the same grid.
[[nodiscard]] double l1_distance(const MomentumGrid &grid, std::span<const double> a, std::span<const double> b);

} // namespace relbgk
