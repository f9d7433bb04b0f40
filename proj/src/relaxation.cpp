#include "relbgk/relaxation.hpp"

#include "relbgk/errors.hpp"
#include "relbgk/numerics.hpp"
#include "relbgk/specfun.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace relbgk {

TruncationParams TruncationParams::from_beta_sup(double beta_sup)
{
    if (!(beta_sup > 1.0) || !std::isfinite(beta_sup)) {
        throw DomainError("truncation: beta_sup must exceed 1, got " + std::to_string(beta_sup));
    }
    return {beta_sup, 1.0 / beta_sup, beta_sup, beta_sup * beta_sup};
}

double TruncationParams::cutoff(double radius) const noexcept
{
    return cutoff_profile(radius / R);
}

double juttner_eval(const JuttnerParams &p, const Vec3 &q)
{
    if (p.n <= 0.0) {
        return 0.0;
    }
    const double q0 = shell_energy(q);
    return std::exp(std::log(p.n) - log_partition_m(p.beta) - p.beta * contract_velocity(p.u, q, q0));
}

void fill_juttner(const MomentumGrid &grid, const JuttnerParams &p, std::span<double> out)
{
    if (p.n <= 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    const double log_pref = std::log(p.n) - log_partition_m(p.beta);
    const double u0 = p.u0();
    const auto &nodes = grid.nodes();
    const auto &q0 = grid.energies();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::exp(log_pref - p.beta * (u0 * q0[i] - p.u.dot(nodes[i])));
    }
}

ThermoFields project_equilibrium(const MomentumGrid &grid, std::span<const double> f, std::span<double> out,
                                 const FieldOptions &opts)
{
    const ThermoFields fields = thermo_fields(grid, f, opts);
    if (fields.vacuum) {
        std::fill(out.begin(), out.end(), 0.0);
    } else {
        fill_juttner(grid, fields.juttner(), out);
    }
    return fields;
}

std::vector<double> project_equilibrium(const MomentumGrid &grid, std::span<const double> f)
{
    std::vector<double> out(f.size());
    project_equilibrium(grid, f, out);
    return out;
}

TruncatedFields truncate_fields(const ThermoFields &fields, const TruncationParams &params)
{
    TruncatedFields t;
    t.beta = std::clamp(fields.beta, params.beta_inf, params.beta_sup);
    const double speed = fields.u.norm();
    t.u = speed <= params.L ? fields.u : (params.L / speed) * fields.u;
    return t;
}

ThermoFields truncated_relax(const MomentumGrid &grid, std::span<const double> f, const TruncationParams &params,
                             std::span<double> out, const FieldOptions &opts)
{
    const ThermoFields fields = thermo_fields(grid, f, opts);
    if (fields.vacuum) {
        std::fill(out.begin(), out.end(), 0.0);
        return fields;
    }
    const TruncatedFields t = truncate_fields(fields, params);
    const double log_pref = std::log(fields.n) - std::log(truncated_partition_m(t.beta, params.R));
    const double u0 = t.u0();
    const auto &nodes = grid.nodes();
    const auto &q0 = grid.energies();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double phi = params.cutoff(nodes[i].norm());
        out[i] = phi == 0.0 ? 0.0 : phi * std::exp(log_pref - t.beta * (u0 * q0[i] - t.u.dot(nodes[i])));
    }
    return fields;
}

std::vector<double> truncated_relax(const MomentumGrid &grid, std::span<const double> f,
                                    const TruncationParams &params)
{
    std::vector<double> out(f.size());
    truncated_relax(grid, f, params, out);
    return out;
}

JuttnerParams equilibrium_from_invariants(double m0, const Vec3 &m_vec, double m_e)
{
    if (!std::isfinite(m0) || !std::isfinite(m_e) || !std::isfinite(m_vec.norm())) {
        throw NoSolutionError("equilibrium_from_invariants: non-finite moments");
    }
    if (!(m0 > 0.0) || !(m_e > m0) || !(m_vec.norm() < m_e)) {
        std::ostringstream msg;
        msg << "equilibrium_from_invariants: moments not realizable (m0=" << m0 << ", |m|=" << m_vec.norm()
            << ", m_e=" << m_e << ")";
        throw NoSolutionError(msg.str());
    }

    // enthalpy per particle h = Psi + 1/beta = 4/beta + K1/K2
    auto enthalpy = [](double b) { return 4.0 / b + ratio_k1k2(b); };
    auto enthalpy_slope = [](double b) { return -4.0 / (b * b) + ratio_k1k2_derivative(b); };

    auto residual = [&](double b, const Vec3 &u) {
        const double h = enthalpy(b);
        const double u0 = std::sqrt(1.0 + u.norm2());
        Eigen::Vector4d r;
        r(0) = (m0 * h * u.x - m_vec.x) / m_e;
        r(1) = (m0 * h * u.y - m_vec.y) / m_e;
        r(2) = (m0 * h * u.z - m_vec.z) / m_e;
        r(3) = (m0 * (h * u0 - 1.0 / (b * u0)) - m_e) / m_e;
        return r;
    };

    // rest-frame guess: m_e/m0 ~ Psi(beta)
    const double ratio = m_e / m0;
    double beta = 1.5 / (ratio - 1.0) + 3.0 / ratio;
    Vec3 u = (1.0 / (m0 * enthalpy(beta))) * m_vec;

    Eigen::Vector4d r = residual(beta, u);
    double norm = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < 200; ++it) {
        if (norm <= 1e-14) {
            return {m0 / std::sqrt(1.0 + u.norm2()), beta, u};
        }
        const double h = enthalpy(beta);
        const double dh = enthalpy_slope(beta);
        const double u0 = std::sqrt(1.0 + u.norm2());
        const std::array<double, 3> uc{u.x, u.y, u.z};
        Eigen::Matrix4d jac = Eigen::Matrix4d::Zero();
        for (int i = 0; i < 3; ++i) {
            jac(i, i) = m0 * h / m_e;
            jac(i, 3) = m0 * dh * uc[i] / m_e;
            jac(3, i) = m0 * (h * uc[i] / u0 + uc[i] / (beta * u0 * u0 * u0)) / m_e;
        }
        jac(3, 3) = m0 * (dh * u0 + 1.0 / (beta * beta * u0)) / m_e;
        const Eigen::Vector4d step = jac.fullPivLu().solve(-r);

        double lambda = 1.0;
        bool improved = false;
        for (int halving = 0; halving <= 60; ++halving, lambda *= 0.5) {
            const double b_try = beta + lambda * step(3);
            if (!(b_try > 0.0)) {
                continue;
            }
            const Vec3 u_try = u + lambda * Vec3{step(0), step(1), step(2)};
            const Eigen::Vector4d r_try = residual(b_try, u_try);
            const double n_try = r_try.lpNorm<Eigen::Infinity>();
            if (n_try < norm) {
                beta = b_try;
                u = u_try;
                r = r_try;
                norm = n_try;
                improved = true;
                break;
            }
        }
        if (!improved) {
            break;
        }
    }
    if (norm <= 1e-11) {
        return {m0 / std::sqrt(1.0 + u.norm2()), beta, u};
    }
    std::ostringstream msg;
    msg << "equilibrium_from_invariants: Newton stagnated with scaled residual " << norm << " at beta=" << beta
        << ", |u|=" << u.norm();
    throw ConvergenceError(msg.str());
}

ConservativeSolve conservative_equilibrium(const MomentumGrid &grid, std::span<const double> f,
                                           std::span<const double> c, const JuttnerParams &guess)
{
    const auto &nodes = grid.nodes();
    const auto &w = grid.weights();
    const auto &q0 = grid.energies();
    const std::size_t count = f.size();

    // targets and row scales
    std::array<CompensatedSum, 5> target_acc{};
    std::array<CompensatedSum, 5> scale_acc{};
    for (std::size_t i = 0; i < count; ++i) {
        if (f[i] == 0.0) {
            continue;
        }
        const double wf = w[i] * c[i] * f[i];
        const std::array<double, 5> psi{1.0, nodes[i].x, nodes[i].y, nodes[i].z, q0[i]};
        for (int k = 0; k < 5; ++k) {
            target_acc[k].add(wf * psi[k]);
            scale_acc[k].add(wf * std::fabs(psi[k]));
        }
    }
    Eigen::Matrix<double, 5, 1> target, scale;
    for (int k = 0; k < 5; ++k) {
        target(k) = target_acc[k].value();
        scale(k) = 1.0 / std::max(scale_acc[k].value(), 1e-300);
    }
    // momentum rows share one scale so rotations do not change the metric
    const double mom_scale = std::min({scale(1), scale(2), scale(3)});
    scale(1) = scale(2) = scale(3) = mom_scale;

    struct Eval {
        Eigen::Matrix<double, 5, 1> r;
        Eigen::Matrix<double, 5, 5> jac;
        double norm;
    };
    auto evaluate = [&](double log_n, double beta, const Vec3 &u, bool with_jac) {
        const double log_pref = log_n - log_partition_m(beta);
        const double u0 = std::sqrt(1.0 + u.norm2());
        const double big_psi = psi(beta);
        std::array<CompensatedSum, 5> m{};
        std::array<CompensatedSum, 25> jm{};
        for (std::size_t i = 0; i < count; ++i) {
            const Vec3 &q = nodes[i];
            const double uq = u0 * q0[i] - u.dot(q);
            const double g = std::exp(log_pref - beta * uq);
            const double wg = w[i] * c[i] * g;
            if (wg == 0.0) {
                continue;
            }
            const std::array<double, 5> psi_q{1.0, q.x, q.y, q.z, q0[i]};
            for (int k = 0; k < 5; ++k) {
                m[k].add(wg * psi_q[k]);
            }
            if (with_jac) {
                const std::array<double, 5> dg{1.0, big_psi - uq, -beta * (u.x * q0[i] / u0 - q.x),
                                               -beta * (u.y * q0[i] / u0 - q.y), -beta * (u.z * q0[i] / u0 - q.z)};
                for (int k = 0; k < 5; ++k) {
                    for (int j = 0; j < 5; ++j) {
                        jm[k * 5 + j].add(wg * psi_q[k] * dg[j]);
                    }
                }
            }
        }
        Eval e;
        for (int k = 0; k < 5; ++k) {
            e.r(k) = (m[k].value() - target(k)) * scale(k);
            for (int j = 0; j < 5 && with_jac; ++j) {
                e.jac(k, j) = jm[k * 5 + j].value() * scale(k);
            }
        }
        e.norm = e.r.lpNorm<Eigen::Infinity>();
        return e;
    };

    double log_n = std::log(guess.n);
    double beta = guess.beta;
    Vec3 u = guess.u;
    Eval cur = evaluate(log_n, beta, u, true);
    ConservativeSolve out;
    int it = 0;
    for (; it < 50 && cur.norm > 1e-15; ++it) {
        const Eigen::Matrix<double, 5, 1> step = cur.jac.fullPivLu().solve(-cur.r);
        double lambda = 1.0;
        bool improved = false;
        for (int halving = 0; halving <= 40; ++halving, lambda *= 0.5) {
            const double b_try = beta + lambda * step(1);
            if (!(b_try > 0.0)) {
                continue;
            }
            const double ln_try = log_n + lambda * step(0);
            const Vec3 u_try = u + lambda * Vec3{step(2), step(3), step(4)};
            const Eval trial = evaluate(ln_try, b_try, u_try, false);
            if (trial.norm < cur.norm) {
                log_n = ln_try;
                beta = b_try;
                u = u_try;
                cur = evaluate(log_n, beta, u, true);
                improved = true;
                break;
            }
        }
        if (!improved) {
            break;
        }
    }
    out.params = {std::exp(log_n), beta, u};
    out.residual = cur.norm;
    out.iterations = it;
    return out;
}

double StabilityConstants::velocity_factor() const noexcept
{
    return 1.0 + 2.0 * std::sqrt(1.0 + 4.0 * params.R * params.R) * std::sqrt(1.0 + params.L * params.L);
}

double StabilityConstants::c1(double q0) const noexcept
{
    const double R = params.R;
    return 2.0 * std::sqrt(1.0 + 4.0 * R * R) +
           velocity_factor() * (2.0 * R * c2 * mt_inf / mt_sup + params.beta_sup * q0);
}

double StabilityConstants::envelope(double radius) const noexcept
{
    return params.cutoff(radius) / mt_sup * std::exp(-params.beta_inf * radius / (3.0 * params.L));
}

StabilityConstants stability_constants(const TruncationParams &params)
{
    StabilityConstants s;
    s.params = params;
    s.c2 = inverse_ratio_lipschitz(params.beta_inf, params.beta_sup);
    s.mt_inf = truncated_partition_m(params.beta_inf, params.R);
    s.mt_sup = truncated_partition_m(params.beta_sup, params.R);
    auto integrand = [&s](double r) {
        const double q0 = std::sqrt(1.0 + r * r);
        return 4.0 * std::numbers::pi * r * r * s.c1(q0) * s.envelope(r) / q0;
    };
    using boost::math::quadrature::gauss_kronrod;
    s.c3 = gauss_kronrod<double, 15>::integrate(integrand, 0.0, params.R, 20, 1e-13) +
           gauss_kronrod<double, 15>::integrate(integrand, params.R, 2.0 * params.R, 20, 1e-13);
    return s;
}

} // namespace relbgk
