#pragma once

// Modified Bessel functions K1/K2, relativistic partition functions, the
// cutoff residuals and the temperature inversion. Everything here is a pure
// function of its arguments.

namespace relbgk {

/// Evaluation window of the unscaled Bessel functions.
inline constexpr double kBesselBetaMin = 1e-3;
inline constexpr double kBesselBetaMax = 700.0;

/// Seams of the piecewise evaluation: power series below, adaptive
/// quadrature between, exponentially scaled asymptotic series above.
inline constexpr double kSeriesSeam = 2.0;
inline constexpr double kAsymptoticSeam = 20.0;

/// K_order(beta) for order in {1, 2} and beta in [1e-3, 700].
[[nodiscard]] double bessel_k(int order, double beta);

/// e^beta * K_order(beta); valid for every beta > 0.
[[nodiscard]] double bessel_k_scaled(int order, double beta);

/// K1/K2, strictly increasing from 0 (beta -> 0) to 1 (beta -> inf).
[[nodiscard]] double ratio_k1k2(double beta);

/// d/dbeta (K1/K2) = r^2 + 3 r / beta - 1.
[[nodiscard]] double ratio_k1k2_derivative(double beta);

/// Inverse of ratio_k1k2 on [0, 1); invert_ratio(0) = 0.
[[nodiscard]] double invert_ratio(double r);

/// M(beta) = integral of exp(-beta q0) over R^3 = 4 pi K2(beta) / beta.
[[nodiscard]] double partition_m(double beta);

/// log M(beta); finite for every beta > 0.
[[nodiscard]] double log_partition_m(double beta);

/// Radial cutoff profile phi0: 1 on s <= 1, 0 on s >= 2, quintic smoothstep
/// between (C2 at both ends).
[[nodiscard]] double cutoff_profile(double s) noexcept;

/// M~(beta) = integral of phi0(|q|/R) exp(-beta q0) dq.
[[nodiscard]] double truncated_partition_m(double beta, double cutoff_radius);

/// Psi(beta) = 3/beta + K1/K2 (mean energy per particle at rest).
[[nodiscard]] double psi(double beta);

/// Phi(R; L, beta) = integral over |q| >= R of exp(-beta |q| / (3L)).
[[nodiscard]] double residual_phi(double radius, double velocity_cap, double beta);

/// Lambda(R; beta) = integral over |q| >= R of exp(-beta |q|).
[[nodiscard]] double residual_lambda(double radius, double beta);

/// sup over [beta_lo, beta_hi] of the derivative of the inverse Bessel ratio.
[[nodiscard]] double inverse_ratio_lipschitz(double beta_lo, double beta_hi);

/// The three additive pieces of the entropy-growth coefficient C_b with
/// R = beta_sup^2, L = beta_sup and the temperature inside Phi pinned to
/// beta_inf = 1/beta_sup.
struct EntropyBoundTerms {
    double temperature_term{}; ///< 4 / beta_sup
    double lambda_term{};      ///< 2 Lambda(2R; beta_sup) / M(beta_sup)
    double phi_term{};         ///< 2 Phi(R; L, beta_inf) / M(beta_sup)

    [[nodiscard]] double total() const noexcept { return temperature_term + lambda_term + phi_term; }
};

[[nodiscard]] EntropyBoundTerms entropy_bound_cb_terms(double beta_sup);
[[nodiscard]] double entropy_bound_cb(double beta_sup);

struct BesselEval {
    double beta{};
    double k1{};
    double k2{};
    double ratio{};
    bool scaled{}; ///< k1, k2 carry an implicit e^{-beta}
};

/// Both Bessel functions at once; scaled when beta exceeds the unscaled window.
[[nodiscard]] BesselEval evaluate_bessel(double beta);

struct PartitionEval {
    double beta{};
    double m{};
    double m_trunc{};
};

[[nodiscard]] PartitionEval evaluate_partition(double beta, double cutoff_radius);

} // namespace relbgk
