#pragma once

#include "relbgk/diagnostics.hpp"
#include "relbgk/moments.hpp"
#include "relbgk/phase_space.hpp"
#include "relbgk/relaxation.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace relbgk {

enum class OperatorMode { Exact, Truncated };
enum class Interpolation { Linear, Cubic };

[[nodiscard]] std::string_view to_string(OperatorMode mode) noexcept;
[[nodiscard]] std::string_view to_string(Interpolation interp) noexcept;

struct PicardConfig {
    bool enabled = false;
    double tol = 1e-12;
    int max_iter = 50;
};

struct SolverConfig {
    double dt = 0.0;
    double t_end = 0.0;
    OperatorMode mode = OperatorMode::Exact;
    TruncationParams truncation{};
    PicardConfig picard{};
    Interpolation interpolation = Interpolation::Linear;
    int snapshot_every = 0; ///< 0 disables cadence snapshots
    unsigned threads = 1;   ///< 0 = hardware concurrency

    /// Throws ConfigError on the first violated constraint.
    void validate() const;
};

struct EventLog {
    std::int64_t clamp_events = 0;      ///< Bessel-ratio clamps
    std::int64_t fallback_events = 0;   ///< conservative solve fell back to J_f
    double removed_mass = 0.0;          ///< mass zeroed outside |q| <= 2R at start
    int max_picard_iterations = 0;
};

struct SimulationState {
    double t = 0.0;
    Distribution f;
    std::int64_t step = 0;
    EventLog events;
};

/// Semi-Lagrangian advection f(x, q) <- f(x - (q_x/q0) dt, q) on the periodic
/// slab. Identity in homogeneous mode.
void transport_step(Distribution &f, double dt, Interpolation interp, unsigned threads = 1);

/// Exponential relaxation f <- e^{-dt/q0} f + (1 - e^{-dt/q0}) G per cell.
/// Exact mode: G is the conservative Juttner (see conservative_equilibrium);
/// truncated mode: G = J~[f], or the Picard fixed point when enabled.
EventLog relax_step(Distribution &f, double dt, const SolverConfig &config);

struct PicardResult {
    std::vector<double> g;
    int iterations = 0;
    std::vector<double> changes; ///< L1(dq) change of each iterate
    std::vector<double> ratios;  ///< changes[k] / changes[k-1]
};

/// Iterates g <- a f + c (J~[f] + J~[g]) / 2 from g = f_prev until the L1(dq)
/// change is at most tol. Throws ConvergenceError after max_iter.
[[nodiscard]] PicardResult picard_solve(const MomentumGrid &grid, std::span<const double> f_prev, double dt,
                                        const TruncationParams &params, double tol, int max_iter,
                                        const FieldOptions &opts = {});

struct RunHooks {
    std::function<void(const SimulationState &)> snapshot;   ///< cadence snapshots
    std::function<void(const SimulationState &)> on_failure; ///< state dump before rethrow
};

struct RunResult {
    SimulationState state;
    std::vector<DiagnosticsRecord> series;
    std::vector<GrowthMargins> margins;
};

/// Strang-split evolution transport(dt/2) relax(dt) transport(dt/2) up to
/// t_end; the last step is shortened to land on t_end.
[[nodiscard]] RunResult run(Distribution initial, const SolverConfig &config, const RunHooks &hooks = {});

/// Zeroes f outside |q| <= 2R and returns the removed mass.
double enforce_support(Distribution &f, const TruncationParams &params);

} // namespace relbgk
