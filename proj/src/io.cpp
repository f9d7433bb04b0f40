#include "relbgk/io.hpp"

#include "relbgk/errors.hpp"
#include "relbgk/moments.hpp"
#include "relbgk/specfun.hpp"

#include "json.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>

namespace relbgk {
namespace {

using nlohmann::json;

std::uint64_t to_le(std::uint64_t v) noexcept
{
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) {
            r = (r << 8) | ((v >> (8 * i)) & 0xFF);
        }
        return r;
    }
    return v;
}

std::uint32_t to_le32(std::uint32_t v) noexcept
{
    if constexpr (std::endian::native == std::endian::big) {
        return (v >> 24) | ((v >> 8) & 0xFF00u) | ((v << 8) & 0xFF0000u) | (v << 24);
    }
    return v;
}

std::vector<unsigned char> encode_values(const std::vector<double> &values)
{
    std::vector<unsigned char> bytes(values.size() * 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::uint64_t le = to_le(std::bit_cast<std::uint64_t>(values[i]));
        std::memcpy(bytes.data() + 8 * i, &le, 8);
    }
    return bytes;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    for (int i = 15; i >= 0; --i) {
        buf[i] = "0123456789abcdef"[v & 0xF];
        v >>= 4;
    }
    buf[16] = '\0';
    return buf;
}

} // namespace

std::string format_real(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(const void *data, std::size_t size) noexcept
{
    const auto *p = static_cast<const unsigned char *>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_diagnostics_csv(std::ostream &out, const std::vector<DiagnosticsRecord> &series, unsigned threads)
{
    out << "# relbgk threads=" << threads << '\n' << kDiagnosticsHeader << '\n';
    for (const auto &r : series) {
        out << r.step << ',' << format_real(r.t) << ',' << format_real(r.mass) << ',' << format_real(r.momentum.x)
            << ',' << format_real(r.momentum.y) << ',' << format_real(r.momentum.z) << ',' << format_real(r.energy)
            << ',' << format_real(r.entropy) << ',' << format_real(r.mass_defect) << ','
            << format_real(r.energy_defect) << ',' << format_real(r.min_f) << ',' << format_real(r.entropy_delta)
            << ',' << r.clamp_events << '\n';
    }
}

void write_fields_csv(std::ostream &out, const Distribution &f, unsigned threads)
{
    out << "# relbgk threads=" << threads << '\n' << "x,n,ux,uy,uz,beta,e,p,sigma,vacuum\n";
    std::vector<ThermoFields> fields(f.cells());
    FieldOptions opts;
    opts.policy = InconsistencyPolicy::Clamp;
    parallel_for(fields.size(), threads,
                 [&](std::size_t c) { fields[c] = thermo_fields(f.grid(), f.cell(static_cast<int>(c)), opts); });
    for (int c = 0; c < f.cells(); ++c) {
        const auto &fl = fields[c];
        out << format_real(f.space().center(c)) << ',';
        if (fl.vacuum) {
            out << "0,,,,,,,,1\n";
            continue;
        }
        out << format_real(fl.n) << ',' << format_real(fl.u.x) << ',' << format_real(fl.u.y) << ','
            << format_real(fl.u.z) << ',' << format_real(fl.beta) << ',' << format_real(fl.e) << ','
            << format_real(fl.p) << ',' << format_real(fl.sigma) << ",0\n";
    }
}

void write_lemma_reports_json(std::ostream &out, const std::vector<LemmaReport> &reports)
{
    json arr = json::array();
    for (const auto &r : reports) {
        arr.push_back({{"lemma", r.lemma},
                       {"trials", r.trials},
                       {"worst_margin", r.worst_margin},
                       {"failures", r.failures},
                       {"seed", r.seed},
                       {"slack", r.slack},
                       {"supplementary", r.supplementary}});
    }
    out << arr.dump(2) << '\n';
}

void write_sweep_csv(std::ostream &out, const SweepResult &sweep, unsigned threads)
{
    out << "# relbgk threads=" << threads << '\n'
        << "beta_sup,cauchy_l1,jtilde_gap,mass_defect,energy_defect,entropy_bound_cb\n";
    for (const auto &r : sweep.rows) {
        out << format_real(r.beta_sup) << ',' << (std::isnan(r.cauchy) ? "" : format_real(r.cauchy)) << ','
            << format_real(r.jtilde_gap) << ',' << format_real(r.mass_defect) << ',' << format_real(r.energy_defect)
            << ',' << format_real(r.cb) << '\n';
    }
}

void write_specfun_table(std::ostream &out, double beta_min, double beta_max, int points)
{
    if (points < 1) {
        throw DomainError("tabulate: points must be at least 1");
    }
    if (!(beta_min > 0.0) || !(beta_max >= beta_min)) {
        throw DomainError("tabulate: need 0 < beta_min <= beta_max");
    }
    out << "beta,k1,k2,ratio,m,psi\n";
    for (int i = 0; i < points; ++i) {
        const double beta =
            points == 1 ? beta_min : std::exp(std::log(beta_min) + std::log(beta_max / beta_min) * i / (points - 1));
        out << format_real(beta) << ',' << format_real(bessel_k(1, beta)) << ',' << format_real(bessel_k(2, beta))
            << ',' << format_real(ratio_k1k2(beta)) << ',' << format_real(partition_m(beta)) << ','
            << format_real(psi(beta)) << '\n';
    }
}

void write_snapshot(const std::filesystem::path &path, const Distribution &f, double time, std::string_view mode,
                    unsigned threads)
{
    const std::vector<unsigned char> payload = encode_values(f.values());
    const std::uint64_t checksum = fnv1a64(payload.data(), payload.size());
    const auto &g = f.grid();
    json header = {
        {"grid",
         {{"q_max", g.q_max()}, {"nodes_per_axis", g.nodes_per_axis()}, {"rule", std::string(to_string(g.rule()))}}},
        {"space",
         {{"mode", std::string(to_string(f.space().mode))}, {"length", f.space().length}, {"cells", f.space().cells}}},
        {"time", time},
        {"mode", std::string(mode)},
        {"checksum", hex64(checksum)},
        {"threads", threads}};
    const std::string text = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write snapshot '" + path.string() + "'");
    }
    const std::uint32_t len = to_le32(static_cast<std::uint32_t>(text.size()));
    out.write(kSnapshotMagic.data(), static_cast<std::streamsize>(kSnapshotMagic.size()));
    out.write(reinterpret_cast<const char *>(&len), 4);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.write(reinterpret_cast<const char *>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (!out) {
        throw ConfigError("failed writing snapshot '" + path.string() + "'");
    }
}

Snapshot read_snapshot(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open snapshot '" + path.string() + "'");
    }
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string_view(magic, 8) != kSnapshotMagic) {
        throw ParseError("snapshot '" + path.string() + "': bad magic");
    }
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char *>(&len), 4);
    len = to_le32(len);
    if (!in || len > (1u << 24)) {
        throw ParseError("snapshot: bad header length");
    }
    std::string text(len, '\0');
    in.read(text.data(), len);
    if (!in) {
        throw ParseError("snapshot: truncated header");
    }
    json header;
    try {
        header = json::parse(text);
        const auto &g = header.at("grid");
        const auto &s = header.at("space");
        const GridPtr grid = build_grid(g.at("q_max").get<double>(), g.at("nodes_per_axis").get<int>(),
                                        parse_quadrature_rule(g.at("rule").get<std::string>()), true);
        const std::string space_mode = s.at("mode").get<std::string>();
        const SpatialGrid space = space_mode == "homogeneous"
                                      ? SpatialGrid::homogeneous()
                                      : SpatialGrid::slab(s.at("length").get<double>(), s.at("cells").get<int>());
        Snapshot snap{Distribution(grid, space), header.at("time").get<double>(),
                      header.at("mode").get<std::string>(), header.at("threads").get<unsigned>(), 0};

        auto &values = snap.f.values();
        std::vector<unsigned char> payload(values.size() * 8);
        in.read(reinterpret_cast<char *>(payload.data()), static_cast<std::streamsize>(payload.size()));
        if (!in || in.peek() != std::char_traits<char>::eof()) {
            throw ParseError("snapshot: payload size does not match the header");
        }
        snap.checksum = fnv1a64(payload.data(), payload.size());
        if (hex64(snap.checksum) != header.at("checksum").get<std::string>()) {
            throw ParseError("snapshot: checksum mismatch");
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::uint64_t raw;
            std::memcpy(&raw, payload.data() + 8 * i, 8);
            values[i] = std::bit_cast<double>(to_le(raw));
        }
        return snap;
    } catch (const json::exception &e) {
        throw ParseError(std::string("snapshot header: ") + e.what());
    }
}

} // namespace relbgk
