#include "relbgk/moments.hpp"

#include "relbgk/errors.hpp"
#include "relbgk/numerics.hpp"
#include "relbgk/specfun.hpp"

#include <array>
#include <cmath>
#include <string>

namespace relbgk {

MatterMoments matter_moments(const MomentumGrid &grid, std::span<const double> f)
{
    const auto &nodes = grid.nodes();
    const auto &w = grid.weights();
    const auto &q0s = grid.energies();

    // 4 (N) + 10 (T, upper triangle) + 4 (S) + 1 (scalar)
    std::array<CompensatedSum, 19> acc{};
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double fi = f[i];
        if (fi == 0.0) {
            continue;
        }
        const double q0 = q0s[i];
        const std::array<double, 4> q{q0, nodes[i].x, nodes[i].y, nodes[i].z};
        const double wf = w[i] * fi / q0;
        const double ws = -w[i] * xlogx(fi) / q0;
        int slot = 0;
        for (int a = 0; a < 4; ++a) {
            acc[slot++].add(wf * q[a]);
        }
        for (int a = 0; a < 4; ++a) {
            for (int b = a; b < 4; ++b) {
                acc[slot++].add(wf * q[a] * q[b]);
            }
        }
        for (int a = 0; a < 4; ++a) {
            acc[slot++].add(ws * q[a]);
        }
        acc[slot].add(wf);
    }

    MatterMoments m;
    int slot = 0;
    for (int a = 0; a < 4; ++a) {
        m.n_mu[a] = acc[slot++].value();
    }
    for (int a = 0; a < 4; ++a) {
        for (int b = a; b < 4; ++b) {
            m.t_munu[a][b] = m.t_munu[b][a] = acc[slot++].value();
        }
    }
    for (int a = 0; a < 4; ++a) {
        m.s_mu[a] = acc[slot++].value();
    }
    m.scalar = acc[slot].value();
    return m;
}

ThermoFields thermo_fields(const MatterMoments &m, const FieldOptions &opts)
{
    ThermoFields out;
    const double n0 = m.n_mu[0];
    const Vec3 flux{m.n_mu[1], m.n_mu[2], m.n_mu[3]};
    for (double v : m.n_mu) {
        if (!std::isfinite(v)) {
            throw NumericalError("thermo_fields: non-finite particle flux");
        }
    }
    if (!std::isfinite(m.scalar)) {
        throw NumericalError("thermo_fields: non-finite scalar density");
    }
    if (n0 <= opts.vacuum_threshold) {
        return out;
    }

    const double flux_norm = flux.norm();
    const double n2 = (n0 - flux_norm) * (n0 + flux_norm);
    if (!(n2 > 0.0)) {
        throw InconsistencyError("thermo_fields: particle flux is not timelike (N0=" + std::to_string(n0) +
                                 ", |N|=" + std::to_string(flux_norm) + ")");
    }
    out.vacuum = false;
    out.n = std::sqrt(n2);
    out.u = (1.0 / out.n) * flux;

    double ratio = m.scalar / out.n;
    if (!(ratio < 1.0)) {
        if (opts.policy == InconsistencyPolicy::Throw) {
            throw InconsistencyError("thermo_fields: Bessel ratio argument " + std::to_string(ratio) +
                                     " is not below 1");
        }
        ratio = opts.clamp_ratio;
        out.clamped = true;
    }
    if (!(ratio >= 0.0)) {
        throw NumericalError("thermo_fields: negative scalar density");
    }
    out.beta = invert_ratio(ratio);

    // lower-index four-velocity u_mu = (u0, -u)
    const std::array<double, 4> ul{out.u0(), -out.u.x, -out.u.y, -out.u.z};
    double e = 0.0;
    double trace = 0.0;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            e += ul[a] * ul[b] * m.t_munu[a][b];
        }
        trace += kMetric[a] * m.t_munu[a][a];
    }
    out.e = e;
    out.p = (e - trace) / 3.0;
    out.sigma = ul[0] * m.s_mu[0] + ul[1] * m.s_mu[1] + ul[2] * m.s_mu[2] + ul[3] * m.s_mu[3];
    if (!std::isfinite(out.e) || !std::isfinite(out.p) || !std::isfinite(out.sigma) || !std::isfinite(out.beta)) {
        throw NumericalError("thermo_fields: non-finite thermodynamic field");
    }
    return out;
}

JuttnerParams lorentz_boost_juttner(const JuttnerParams &params, const Vec3 &v)
{
    const double v2 = v.norm2();
    if (!(v2 < 1.0)) {
        throw DomainError("lorentz_boost_juttner: boost speed must be below 1");
    }
    if (v2 == 0.0) {
        return params;
    }
    const double gamma = 1.0 / std::sqrt(1.0 - v2);
    const double u0 = params.u0();
    const double vu = v.dot(params.u);
    JuttnerParams out = params;
    out.u = params.u + ((gamma - 1.0) * vu / v2 + gamma * u0) * v;
    return out;
}

} // namespace relbgk
