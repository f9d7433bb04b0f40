#include "relbgk/diagnostics.hpp"

#include "relbgk/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace relbgk {
namespace {

struct CellSums {
    std::array<double, 6> v{}; // mass, px, py, pz, energy, entropy
    double min_f = std::numeric_limits<double>::infinity();
};

CellSums cell_sums(const MomentumGrid &grid, std::span<const double> f)
{
    const auto &w = grid.weights();
    const auto &nodes = grid.nodes();
    const auto &q0 = grid.energies();
    std::array<CompensatedSum, 6> acc{};
    CellSums out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double fi = f[i];
        out.min_f = std::min(out.min_f, fi);
        if (fi == 0.0) {
            continue;
        }
        const double wf = w[i] * fi;
        acc[0].add(wf);
        acc[1].add(wf * nodes[i].x);
        acc[2].add(wf * nodes[i].y);
        acc[3].add(wf * nodes[i].z);
        acc[4].add(wf * q0[i]);
        acc[5].add(w[i] * xlogx(fi));
    }
    for (int k = 0; k < 6; ++k) {
        out.v[k] = acc[k].value();
    }
    return out;
}

} // namespace

Totals compute_totals(const Distribution &f, unsigned threads)
{
    std::vector<CellSums> per_cell(f.cells());
    parallel_for(per_cell.size(), threads, [&](std::size_t c) { per_cell[c] = cell_sums(f.grid(), f.cell(static_cast<int>(c))); });

    const double dx = f.space().dx();
    std::array<CompensatedSum, 6> acc{};
    Totals t;
    t.min_f = std::numeric_limits<double>::infinity();
    for (const auto &cs : per_cell) {
        for (int k = 0; k < 6; ++k) {
            acc[k].add(cs.v[k]);
        }
        t.min_f = std::min(t.min_f, cs.min_f);
    }
    t.mass = dx * acc[0].value();
    t.momentum = {dx * acc[1].value(), dx * acc[2].value(), dx * acc[3].value()};
    t.energy = dx * acc[4].value();
    t.entropy = dx * acc[5].value();
    if (per_cell.empty()) {
        t.min_f = 0.0;
    }
    return t;
}

DiagnosticsRecord make_record(std::int64_t step, double t, const Totals &now, const Totals &baseline,
                              const DiagnosticsRecord *previous, std::int64_t clamp_events)
{
    auto drift = [](double value, double ref) { return ref == 0.0 ? value : (value - ref) / std::fabs(ref); };
    DiagnosticsRecord r;
    r.step = step;
    r.t = t;
    r.mass = now.mass;
    r.momentum = now.momentum;
    r.energy = now.energy;
    r.entropy = now.entropy;
    r.mass_defect = drift(now.mass, baseline.mass);
    r.energy_defect = drift(now.energy, baseline.energy);
    r.min_f = now.min_f;
    r.entropy_delta = previous ? now.entropy - previous->entropy : 0.0;
    r.clamp_events = clamp_events;
    return r;
}

DiagnosticsRecord record(const Distribution &f, std::int64_t step, double t)
{
    const Totals totals = compute_totals(f);
    return make_record(step, t, totals, totals, nullptr, 0);
}

HTheoremVerdict h_theorem_verdict(const std::vector<DiagnosticsRecord> &series, double slack)
{
    HTheoremVerdict v;
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        const double increase = series[k + 1].entropy - series[k].entropy;
        v.worst_increase = std::max(v.worst_increase, increase);
        if (increase > slack && v.pass) {
            v.pass = false;
            v.first_violation = k + 1;
        }
    }
    return v;
}

GrowthTracker::GrowthTracker(const Distribution &initial)
{
    const auto &space = initial.space();
    const Totals totals = compute_totals(initial);
    mass0_ = totals.mass;
    energy0_ = totals.energy;
    if (space.mode == SpatialMode::Slab) {
        double cx = 0.0, sx = 0.0;
        for (int c = 0; c < space.cells; ++c) {
            const double m = integrate(initial.grid(), initial.cell(c));
            const double angle = 2.0 * std::numbers::pi * space.center(c) / space.length;
            cx += m * std::cos(angle);
            sx += m * std::sin(angle);
        }
        double x = std::atan2(sx, cx) / (2.0 * std::numbers::pi) * space.length;
        if (x < 0.0) {
            x += space.length;
        }
        const int cell = std::clamp(static_cast<int>(x / space.dx()), 0, space.cells - 1);
        center_ = space.center(cell);
    }
    position0_ = position_moment(initial);
}

double GrowthTracker::position_moment(const Distribution &f) const
{
    const auto &space = f.space();
    CompensatedSum acc;
    for (int c = 0; c < space.cells; ++c) {
        double dist = 0.0;
        if (space.mode == SpatialMode::Slab) {
            const double d = std::fabs(space.center(c) - center_);
            dist = std::min(d, space.length - d);
        }
        acc.add((1.0 + dist) * integrate(f.grid(), f.cell(c)));
    }
    return space.dx() * acc.value();
}

GrowthMargins GrowthTracker::margins(const Distribution &f, double t) const
{
    const Totals totals = compute_totals(f);
    GrowthMargins m;
    m.t = t;
    m.mass = std::exp(t) * mass0_ - totals.mass;
    m.position = std::exp(2.0 * t) * position0_ - position_moment(f);
    m.energy = std::exp(t) * energy0_ - totals.energy;
    return m;
}

} // namespace relbgk
