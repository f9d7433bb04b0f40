#include "relbgk/solver.hpp"

#include "relbgk/errors.hpp"
#include "relbgk/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

namespace relbgk {

std::string_view to_string(OperatorMode mode) noexcept
{
    return mode == OperatorMode::Exact ? "exact" : "truncated";
}

std::string_view to_string(Interpolation interp) noexcept
{
    return interp == Interpolation::Linear ? "linear" : "cubic";
}

void SolverConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ConfigError("solver: dt must be positive");
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw ConfigError("solver: t_end must be nonnegative");
    }
    if (picard.enabled) {
        if (mode != OperatorMode::Truncated) {
            throw ConfigError("solver: Picard iteration requires the truncated operator");
        }
        if (!(picard.tol > 0.0)) {
            throw ConfigError("solver: Picard tol must be positive");
        }
        if (picard.max_iter < 1) {
            throw ConfigError("solver: Picard max_iter must be at least 1");
        }
    }
    if (mode == OperatorMode::Truncated) {
        (void)TruncationParams::from_beta_sup(truncation.beta_sup);
    }
    if (snapshot_every < 0) {
        throw ConfigError("solver: snapshot_every must be nonnegative");
    }
}

void transport_step(Distribution &f, double dt, Interpolation interp, unsigned threads)
{
    const auto &space = f.space();
    if (space.mode == SpatialMode::Homogeneous || dt == 0.0) {
        return;
    }
    const int cells = space.cells;
    const std::size_t stride = f.nodes();
    const double inv_dx = 1.0 / space.dx();
    const auto &nodes = f.grid().nodes();
    const auto &q0 = f.grid().energies();
    auto &values = f.values();

    parallel_for(stride, threads, [&](std::size_t node) {
        const double shift = nodes[node].x / q0[node] * dt * inv_dx;
        if (shift == 0.0) {
            return;
        }
        std::vector<double> column(cells);
        for (int c = 0; c < cells; ++c) {
            column[c] = values[c * stride + node];
        }
        auto at = [&](long j) {
            long m = j % cells;
            if (m < 0) {
                m += cells;
            }
            return column[static_cast<std::size_t>(m)];
        };
        const double floor_shift = std::floor(-shift);
        const double theta = -shift - floor_shift;
        const long base = static_cast<long>(floor_shift);
        for (int c = 0; c < cells; ++c) {
            const long j = c + base;
            double v;
            if (interp == Interpolation::Linear) {
                v = (1.0 - theta) * at(j) + theta * at(j + 1);
            } else {
                const double t = theta;
                const double wm = -t * (t - 1.0) * (t - 2.0) / 6.0;
                const double w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
                const double w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
                const double w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
                v = wm * at(j - 1) + w0 * at(j) + w1 * at(j + 1) + w2 * at(j + 2);
                v = std::max(v, 0.0);
            }
            values[c * stride + node] = v;
        }
    });
}

namespace {

FieldOptions solver_field_options()
{
    FieldOptions opts;
    opts.policy = InconsistencyPolicy::Clamp;
    return opts;
}

struct CellEvents {
    bool clamped = false;
    bool fallback = false;
    int picard_iterations = 0;
};

CellEvents relax_exact_cell(const MomentumGrid &grid, std::span<double> f, double dt)
{
    CellEvents ev;
    const std::size_t n = f.size();
    const auto &q0 = grid.energies();
    const ThermoFields fields = thermo_fields(grid, std::span<const double>(f), solver_field_options());
    ev.clamped = fields.clamped;
    if (fields.vacuum) {
        for (std::size_t i = 0; i < n; ++i) {
            f[i] *= std::exp(-dt / q0[i]);
        }
        return ev;
    }
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = -std::expm1(-dt / q0[i]);
    }
    const ConservativeSolve solve = conservative_equilibrium(grid, std::span<const double>(f), c, fields.juttner());
    JuttnerParams target = solve.params;
    if (!(solve.residual <= 1e-10) || !std::isfinite(target.beta)) {
        target = fields.juttner();
        ev.fallback = true;
    }
    std::vector<double> g(n);
    fill_juttner(grid, target, g);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = (1.0 - c[i]) * f[i] + c[i] * g[i];
    }
    return ev;
}

CellEvents relax_truncated_cell(const MomentumGrid &grid, std::span<double> f, double dt,
                                const SolverConfig &config)
{
    CellEvents ev;
    const std::size_t n = f.size();
    const auto &q0 = grid.energies();
    if (config.picard.enabled) {
        PicardResult res = picard_solve(grid, std::span<const double>(f), dt, config.truncation, config.picard.tol,
                                        config.picard.max_iter, solver_field_options());
        std::copy(res.g.begin(), res.g.end(), f.begin());
        ev.picard_iterations = res.iterations;
        return ev;
    }
    std::vector<double> g(n);
    const ThermoFields fields =
        truncated_relax(grid, std::span<const double>(f), config.truncation, g, solver_field_options());
    ev.clamped = fields.clamped;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = -std::expm1(-dt / q0[i]);
        f[i] = (1.0 - c) * f[i] + c * g[i];
    }
    return ev;
}

} // namespace

EventLog relax_step(Distribution &f, double dt, const SolverConfig &config)
{
    const int cells = f.cells();
    std::vector<CellEvents> events(cells);
    parallel_for(static_cast<std::size_t>(cells), config.threads, [&](std::size_t c) {
        auto cell = f.cell(static_cast<int>(c));
        events[c] = config.mode == OperatorMode::Exact ? relax_exact_cell(f.grid(), cell, dt)
                                                       : relax_truncated_cell(f.grid(), cell, dt, config);
    });
    EventLog log;
    for (const auto &ev : events) {
        log.clamp_events += ev.clamped ? 1 : 0;
        log.fallback_events += ev.fallback ? 1 : 0;
        log.max_picard_iterations = std::max(log.max_picard_iterations, ev.picard_iterations);
    }
    return log;
}

PicardResult picard_solve(const MomentumGrid &grid, std::span<const double> f_prev, double dt,
                          const TruncationParams &params, double tol, int max_iter, const FieldOptions &opts)
{
    if (!(tol > 0.0) || max_iter < 1) {
        throw ConfigError("picard_solve: tol must be positive and max_iter at least 1");
    }
    const std::size_t n = f_prev.size();
    const auto &q0 = grid.energies();
    std::vector<double> a(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = -std::expm1(-dt / q0[i]);
        a[i] = 1.0 - c[i];
    }
    std::vector<double> source_f(n);
    truncated_relax(grid, f_prev, params, source_f, opts);

    PicardResult res;
    std::vector<double> g(f_prev.begin(), f_prev.end());
    std::vector<double> source_g(n), next(n);
    for (int it = 1; it <= max_iter; ++it) {
        truncated_relax(grid, g, params, source_g, opts);
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = a[i] * f_prev[i] + c[i] * 0.5 * (source_f[i] + source_g[i]);
        }
        const double change = l1_distance(grid, next, g);
        if (!res.changes.empty()) {
            const double prev = res.changes.back();
            res.ratios.push_back(prev > 0.0 ? change / prev : 0.0);
        }
        res.changes.push_back(change);
        g.swap(next);
        res.iterations = it;
        if (change <= tol) {
            res.g = std::move(g);
            return res;
        }
    }
    std::ostringstream msg;
    msg << "picard_solve: no convergence to " << tol << " in " << max_iter << " iterations; ratios:";
    for (double r : res.ratios) {
        msg << ' ' << r;
    }
    throw ConvergenceError(msg.str());
}

double enforce_support(Distribution &f, const TruncationParams &params)
{
    const auto &grid = f.grid();
    const auto &nodes = grid.nodes();
    const auto &w = grid.weights();
    const double limit = 2.0 * params.R;
    CompensatedSum removed;
    for (int c = 0; c < f.cells(); ++c) {
        auto cell = f.cell(c);
        for (std::size_t i = 0; i < cell.size(); ++i) {
            if (cell[i] != 0.0 && nodes[i].norm() > limit) {
                removed.add(w[i] * cell[i]);
                cell[i] = 0.0;
            }
        }
    }
    return f.space().dx() * removed.value();
}

RunResult run(Distribution initial, const SolverConfig &config, const RunHooks &hooks)
{
    config.validate();
    if (initial.min_value() < 0.0) {
        throw DomainError("run: initial distribution has negative values");
    }
    EventLog events;
    if (config.mode == OperatorMode::Truncated) {
        const double need = 2.0 * config.truncation.R;
        if (initial.grid().q_max() < need) {
            std::ostringstream msg;
            msg << "run: truncated operator needs q_max >= 2R = " << need << ", grid has " << initial.grid().q_max();
            throw ConfigError(msg.str());
        }
        events.removed_mass = enforce_support(initial, config.truncation);
    }

    RunResult result{SimulationState{0.0, std::move(initial), 0, events}, {}, {}};
    SimulationState &state = result.state;
    const GrowthTracker growth(state.f);
    const Totals baseline = compute_totals(state.f, config.threads);
    result.series.push_back(make_record(0, 0.0, baseline, baseline, nullptr, 0));
    result.margins.push_back(growth.margins(state.f, 0.0));

    const double steps_real = config.t_end / config.dt;
    const auto steps = static_cast<std::int64_t>(std::ceil(steps_real - 1e-9));
    try {
        for (std::int64_t k = 1; k <= steps; ++k) {
            const double t_next = k == steps ? config.t_end : k * config.dt;
            const double h = t_next - state.t;
            transport_step(state.f, 0.5 * h, config.interpolation, config.threads);
            const EventLog step_log = relax_step(state.f, h, config);
            transport_step(state.f, 0.5 * h, config.interpolation, config.threads);

            state.events.clamp_events += step_log.clamp_events;
            state.events.fallback_events += step_log.fallback_events;
            state.events.max_picard_iterations =
                std::max(state.events.max_picard_iterations, step_log.max_picard_iterations);
            state.t = t_next;
            state.step = k;

            const Totals now = compute_totals(state.f, config.threads);
            result.series.push_back(
                make_record(k, state.t, now, baseline, &result.series.back(), state.events.clamp_events));
            result.margins.push_back(growth.margins(state.f, state.t));
            if (hooks.snapshot && config.snapshot_every > 0 && k % config.snapshot_every == 0) {
                hooks.snapshot(state);
            }
        }
    } catch (...) {
        if (hooks.on_failure) {
            hooks.on_failure(state);
        }
        throw;
    }
    return result;
}

} // namespace relbgk
