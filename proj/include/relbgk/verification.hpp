#pragma once

#include "relbgk/phase_space.hpp"
#include "relbgk/relaxation.hpp"
#include "relbgk/solver.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace relbgk {

struct LemmaReport {
    std::string lemma;
    int trials = 0;
    double worst_margin = 0.0; ///< min over checks of (bound - measured)
    int failures = 0;
    std::uint64_t seed = 0;
    double slack = 0.0; ///< additive slack applied to every check
    bool supplementary = false; ///< extra report beyond the nine listed inequalities

    [[nodiscard]] bool passed() const noexcept { return failures == 0; }
};

struct LemmaSuiteConfig {
    int trials = 100;
    std::uint64_t seed = 7;
    TruncationParams params = TruncationParams::from_beta_sup(2.0);
    /// Momentum box; 0 picks max(2R, 64) so that the projections J_f of the
    /// ensemble are resolved as well as the compactly supported data.
    double q_max = 0.0;
    int nodes_per_axis = 48;
    QuadratureRule rule = QuadratureRule::GaussLegendreSinh;
    unsigned threads = 0;
    int huanho_points_per_axis = 100; ///< lattice is points^2 in (|x|+|q|, g)
};

/// Randomized certification of the quantitative inequalities. Order of the
/// returned reports: lipmoments, lm:stab, lm:, lcomp, l:5, entropymin,
/// scalaruq, Jtrick, Huanho, then the supplementary reports.
[[nodiscard]] std::vector<LemmaReport> lemma_suite(const LemmaSuiteConfig &config);

/// Random nonnegative cell: 1-4 Juttner bumps (beta in [0.8, 10], |u| <= 1.5,
/// n in [0.1, 5]) plus optional indicator blobs, masked to |q| <= 2R.
void random_ensemble_member(const MomentumGrid &grid, const TruncationParams &params, std::mt19937_64 &rng,
                            std::span<double> out);

struct SweepRow {
    double beta_sup{};
    double cauchy{};     ///< L1(dq dx) distance to the next finer run; NaN on the last row
    double jtilde_gap{}; ///< ||J~[f] - J[f]|| in L1(dq/q0 dx) at t_end
    double mass_defect{};
    double energy_defect{};
    double cb{};
    double min_f{}; ///< smallest value of f over every step of the run
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool cauchy_decreasing = false;
    bool gap_decreasing = false;
    bool cb_decreasing = false;
};

/// Runs the truncated scheme for each beta_sup from the same initial datum.
/// The grid must cover 2R of the largest beta_sup.
[[nodiscard]] SweepResult epsilon_sweep(const Distribution &initial, const SolverConfig &base,
                                        const std::vector<double> &beta_sups);

} // namespace relbgk
