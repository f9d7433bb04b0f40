#pragma once

#include "relbgk/diagnostics.hpp"
#include "relbgk/phase_space.hpp"
#include "relbgk/verification.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace relbgk {

/// Shortest round-trip decimal form of a double.
[[nodiscard]] std::string format_real(double value);

[[nodiscard]] std::uint64_t fnv1a64(const void *data, std::size_t size) noexcept;

/// CSV outputs open with "# relbgk threads=N", then the column header.
void write_diagnostics_csv(std::ostream &out, const std::vector<DiagnosticsRecord> &series, unsigned threads);

/// Per-cell fields: x,n,ux,uy,uz,beta,e,p,sigma,vacuum. Vacuum cells leave the
/// velocity and thermodynamic columns empty.
void write_fields_csv(std::ostream &out, const Distribution &f, unsigned threads);

void write_lemma_reports_json(std::ostream &out, const std::vector<LemmaReport> &reports);

void write_sweep_csv(std::ostream &out, const SweepResult &sweep, unsigned threads);

/// beta,k1,k2,ratio,m,psi at `points` log-spaced values in [beta_min, beta_max].
void write_specfun_table(std::ostream &out, double beta_min, double beta_max, int points);

inline constexpr std::string_view kSnapshotMagic = "RELBGK01";

/// RELBGK01 layout: magic, u32 LE header length, JSON header, LE f64 values
/// in cell-major, node-minor order.
void write_snapshot(const std::filesystem::path &path, const Distribution &f, double time, std::string_view mode,
                    unsigned threads);

struct Snapshot {
    Distribution f;
    double time = 0.0;
    std::string mode;
    unsigned threads = 1;
    std::uint64_t checksum = 0;
};

/// Reads and verifies a snapshot (magic, length, checksum). ParseError on any defect.
[[nodiscard]] Snapshot read_snapshot(const std::filesystem::path &path);

} // namespace relbgk
