#pragma once

#include "relbgk/phase_space.hpp"
#include "relbgk/solver.hpp"
#include "relbgk/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relbgk {

/// Density modulation 1 + amplitude cos(2 pi k x / length + phase) in slab mode.
struct XProfile {
    double amplitude = 0.0;
    int wavenumber = 1;
    double phase = 0.0;
};

struct BumpSpec {
    double n = 1.0;
    double beta = 1.0;
    Vec3 u{};
    std::optional<XProfile> profile;
};

struct RunConfig {
    SpatialGrid space{};

    double q_max = 0.0;
    int nodes_per_axis = 32;
    QuadratureRule rule = QuadratureRule::GaussLegendreSinh;
    bool force_grid = false;

    OperatorMode mode = OperatorMode::Exact;
    double beta_sup = 0.0; ///< meaningful in truncated mode only

    double dt = 0.0;
    double t_end = 0.0;
    int snapshot_every = 0;

    Interpolation interpolation = Interpolation::Linear;
    PicardConfig picard{};

    std::vector<BumpSpec> bumps;
    std::string initial_snapshot; ///< replaces bumps when non-empty

    std::string csv_path;
    std::string snapshot_dir;

    std::uint64_t seed = 0;
    unsigned threads = 1; ///< 0 = auto
};

/// Strict parse: unknown keys, wrong types and violated constraints are all
/// collected into one ValidationError; malformed JSON raises ParseError.
/// Relative paths in the config are resolved against `base_dir`.
[[nodiscard]] RunConfig parse_config_text(std::string_view text, const std::filesystem::path &base_dir = {});
[[nodiscard]] RunConfig parse_config(const std::filesystem::path &path);

/// Canonical JSON with every default spelled out.
[[nodiscard]] std::string normalize_config(const RunConfig &config);

[[nodiscard]] SolverConfig solver_config(const RunConfig &config);
[[nodiscard]] GridPtr config_grid(const RunConfig &config);

/// Initial distribution from the bump list (or the snapshot).
[[nodiscard]] Distribution build_initial(const RunConfig &config);

} // namespace relbgk
