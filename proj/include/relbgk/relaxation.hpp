#pragma once

#include "relbgk/moments.hpp"
#include "relbgk/phase_space.hpp"
#include "relbgk/types.hpp"

#include <span>
#include <vector>

namespace relbgk {

/// Regularization triple coupled to a single parameter: R = beta_sup^2,
/// L = beta_sup, beta_inf = 1/beta_sup.
struct TruncationParams {
    double beta_sup = 2.0;
    double beta_inf = 0.5;
    double L = 2.0;
    double R = 4.0;

    [[nodiscard]] static TruncationParams from_beta_sup(double beta_sup);

    /// phi(q) = phi0(|q| / R).
    [[nodiscard]] double cutoff(double radius) const noexcept;
};

/// J(n, beta, u) at one momentum, evaluated in log form.
[[nodiscard]] double juttner_eval(const JuttnerParams &p, const Vec3 &q);

/// Writes J(p) on every grid node into out.
void fill_juttner(const MomentumGrid &grid, const JuttnerParams &p, std::span<double> out);

/// J_f on the grid. Vacuum cells give a zero cell. Returns the fields of f.
ThermoFields project_equilibrium(const MomentumGrid &grid, std::span<const double> f, std::span<double> out,
                                 const FieldOptions &opts = {});

[[nodiscard]] std::vector<double> project_equilibrium(const MomentumGrid &grid, std::span<const double> f);

struct TruncatedFields {
    double beta{};
    Vec3 u{};
    [[nodiscard]] double u0() const noexcept { return std::sqrt(1.0 + u.norm2()); }
};

/// beta clamped to [beta_inf, beta_sup] and |u| capped at L, direction kept.
[[nodiscard]] TruncatedFields truncate_fields(const ThermoFields &fields, const TruncationParams &params);

/// J~[f] = phi n_f / M~(beta~) exp(-beta~ u~_mu q^mu) on the grid; zero for vacuum.
ThermoFields truncated_relax(const MomentumGrid &grid, std::span<const double> f, const TruncationParams &params,
                             std::span<double> out, const FieldOptions &opts = {});

[[nodiscard]] std::vector<double> truncated_relax(const MomentumGrid &grid, std::span<const double> f,
                                                  const TruncationParams &params);

/// Global equilibrium carrying the conserved totals int f dq = m0,
/// int q f dq = m_vec, int q0 f dq = m_e (closed-form Juttner moments).
[[nodiscard]] JuttnerParams equilibrium_from_invariants(double m0, const Vec3 &m_vec, double m_e);

struct ConservativeSolve {
    JuttnerParams params;
    double residual{}; ///< scaled max-norm of the moment mismatch
    int iterations{};
};

/// The Juttner G with sum_i w_i c_i psi(q_i) (G_i - f_i) = 0 for psi in
/// {1, q, q0}. With c = 1 - exp(-dt/q0) the exponential relaxation step
/// a f + c G conserves the discrete totals exactly and log G lies in the
/// span of the collision invariants. Newton from `guess`.
[[nodiscard]] ConservativeSolve conservative_equilibrium(const MomentumGrid &grid, std::span<const double> f,
                                                         std::span<const double> c, const JuttnerParams &guess);

/// Constants of the Lipschitz estimate for J~.
struct StabilityConstants {
    TruncationParams params;
    double c2{};     ///< sup of the derivative of the inverse Bessel ratio on [beta_inf, beta_sup]
    double mt_inf{}; ///< M~(beta_inf)
    double mt_sup{}; ///< M~(beta_sup)
    double c3{};     ///< int C1 phi / M~(beta_sup) exp(-beta_inf |q| / 3L) dq/q0

    [[nodiscard]] double c1(double q0) const noexcept;
    /// phi(q) / M~(beta_sup) exp(-beta_inf |q| / 3L)
    [[nodiscard]] double envelope(double radius) const noexcept;
    /// 1 + 2 sqrt(1 + 4R^2) sqrt(1 + L^2)
    [[nodiscard]] double velocity_factor() const noexcept;
};

[[nodiscard]] StabilityConstants stability_constants(const TruncationParams &params);

} // namespace relbgk
