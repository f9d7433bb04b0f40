#pragma once

#include "relbgk/phase_space.hpp"
#include "relbgk/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relbgk {

/// Phase-space totals: integrals over dq dx.
struct Totals {
    double mass{};
    Vec3 momentum{};
    double energy{};
    double entropy{}; ///< int int f log f
    double min_f{};
};

[[nodiscard]] Totals compute_totals(const Distribution &f, unsigned threads = 1);

struct DiagnosticsRecord {
    std::int64_t step{};
    double t{};
    double mass{};
    Vec3 momentum{};
    double energy{};
    double entropy{};
    double mass_defect{};   ///< (mass - mass0) / mass0
    double energy_defect{}; ///< (energy - energy0) / energy0
    double min_f{};
    double entropy_delta{}; ///< entropy - entropy of the previous record
    std::int64_t clamp_events{};
};

inline constexpr std::string_view kDiagnosticsHeader =
    "step,t,mass,mom_x,mom_y,mom_z,energy,entropy,mass_defect,energy_defect,min_f,entropy_delta,clamp_events";

/// Builds a record from totals; `baseline` holds the t = 0 totals and
/// `previous` the last record (absent for the first one).
[[nodiscard]] DiagnosticsRecord make_record(std::int64_t step, double t, const Totals &now, const Totals &baseline,
                                            const DiagnosticsRecord *previous, std::int64_t clamp_events);

/// Record of a distribution taken as its own baseline.
[[nodiscard]] DiagnosticsRecord record(const Distribution &f, std::int64_t step = 0, double t = 0.0);

struct HTheoremVerdict {
    bool pass = true;
    std::optional<std::size_t> first_violation; ///< index k + 1 of the first uptick
    double worst_increase = 0.0;
};

/// Pass iff entropy[k+1] <= entropy[k] + slack for all k.
[[nodiscard]] HTheoremVerdict h_theorem_verdict(const std::vector<DiagnosticsRecord> &series, double slack);

/// Margins of the a priori moment bounds: bound minus measured, each
/// nonnegative when the bound holds.
struct GrowthMargins {
    double t{};
    double mass{};     ///< e^t M0 - M(t)
    double position{}; ///< e^{2t} X0 - X(t), X = int int (1 + |x|) f
    double energy{};   ///< e^t E0 - E(t)
};

/// Tracks the moment bounds with |x| the periodic distance to the cell that
/// holds the initial center of mass (unit-free in homogeneous mode, |x| = 0).
class GrowthTracker {
public:
    explicit GrowthTracker(const Distribution &initial);
    [[nodiscard]] GrowthMargins margins(const Distribution &f, double t) const;
    [[nodiscard]] double center() const noexcept { return center_; }

private:
    [[nodiscard]] double position_moment(const Distribution &f) const;
    double center_ = 0.0;
    double mass0_ = 0.0;
    double position0_ = 0.0;
    double energy0_ = 0.0;
};

} // namespace relbgk
