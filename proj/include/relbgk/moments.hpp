#pragma once

#include "relbgk/phase_space.hpp"
#include "relbgk/types.hpp"

#include <span>

namespace relbgk {

/// Matter quantities of one cell, all with respect to dq/q0.
struct MatterMoments {
    FourVector n_mu{};   ///< N^mu = int q^mu f dq/q0
    FourTensor t_munu{}; ///< T^{mu nu} = int q^mu q^nu f dq/q0
    FourVector s_mu{};   ///< S^mu = -int q^mu f log f dq/q0
    double scalar{};     ///< int f dq/q0, the argument of the temperature inversion
};

[[nodiscard]] MatterMoments matter_moments(const MomentumGrid &grid, std::span<const double> f);

struct ThermoFields {
    double n{};
    Vec3 u{};
    double beta{};
    double e{};
    double p{};
    double sigma{};
    bool vacuum = true;
    bool clamped = false; ///< the Bessel-ratio argument was clamped below 1

    [[nodiscard]] double u0() const noexcept { return std::sqrt(1.0 + u.norm2()); }
    [[nodiscard]] JuttnerParams juttner() const noexcept { return {n, beta, u}; }
};

enum class InconsistencyPolicy { Throw, Clamp };

struct FieldOptions {
    double vacuum_threshold = 1e-14;
    InconsistencyPolicy policy = InconsistencyPolicy::Throw;
    double clamp_ratio = 1.0 - 1e-12;
};

/// Proper density, velocity, inverse temperature, energy, pressure and
/// entropy density. Vacuum cells (N^0 <= threshold) carry only n = 0.
[[nodiscard]] ThermoFields thermo_fields(const MatterMoments &m, const FieldOptions &opts = {});

[[nodiscard]] inline ThermoFields thermo_fields(const MomentumGrid &grid, std::span<const double> f,
                                                const FieldOptions &opts = {})
{
    return thermo_fields(matter_moments(grid, f), opts);
}

/// Active boost of a Juttner equilibrium by the 3-velocity v (|v| < 1): the
/// fluid four-velocity is mapped by the boost taking rest to velocity v.
[[nodiscard]] JuttnerParams lorentz_boost_juttner(const JuttnerParams &params, const Vec3 &v);

} // namespace relbgk
