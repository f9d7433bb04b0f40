#include "relbgk/config.hpp"

#include "relbgk/errors.hpp"
#include "relbgk/io.hpp"
#include "relbgk/relaxation.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace relbgk {
namespace {

using nlohmann::json;

class Validator {
public:
    void fail(const std::string &path, const std::string &constraint) { violations_.push_back({path, constraint}); }

    /// Rejects keys of `obj` outside `allowed`.
    void keys(const json &obj, const std::string &path, std::initializer_list<const char *> allowed)
    {
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (!ok.count(it.key())) {
                fail(join(path, it.key()), "unknown key");
            }
        }
    }

    const json *object(const json &parent, const std::string &path, const char *key, bool required)
    {
        if (!parent.contains(key)) {
            if (required) {
                fail(join(path, key), "required");
            }
            return nullptr;
        }
        const json &v = parent.at(key);
        if (!v.is_object()) {
            fail(join(path, key), "must be an object");
            return nullptr;
        }
        return &v;
    }

    std::optional<double> number(const json &parent, const std::string &path, const char *key, bool required)
    {
        if (!parent.contains(key)) {
            if (required) {
                fail(join(path, key), "required");
            }
            return std::nullopt;
        }
        const json &v = parent.at(key);
        if (!v.is_number()) {
            fail(join(path, key), "must be a number");
            return std::nullopt;
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            fail(join(path, key), "must be finite");
            return std::nullopt;
        }
        return x;
    }

    std::optional<long long> integer(const json &parent, const std::string &path, const char *key, bool required)
    {
        if (!parent.contains(key)) {
            if (required) {
                fail(join(path, key), "required");
            }
            return std::nullopt;
        }
        const json &v = parent.at(key);
        if (!v.is_number_integer()) {
            fail(join(path, key), "must be an integer");
            return std::nullopt;
        }
        return v.get<long long>();
    }

    std::optional<std::string> string(const json &parent, const std::string &path, const char *key, bool required)
    {
        if (!parent.contains(key)) {
            if (required) {
                fail(join(path, key), "required");
            }
            return std::nullopt;
        }
        const json &v = parent.at(key);
        if (!v.is_string()) {
            fail(join(path, key), "must be a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    std::optional<bool> boolean(const json &parent, const std::string &path, const char *key)
    {
        if (!parent.contains(key)) {
            return std::nullopt;
        }
        const json &v = parent.at(key);
        if (!v.is_boolean()) {
            fail(join(path, key), "must be a boolean");
            return std::nullopt;
        }
        return v.get<bool>();
    }

    static std::string join(const std::string &path, const std::string &key)
    {
        return path.empty() ? key : path + "." + key;
    }

    void finish() const
    {
        if (!violations_.empty()) {
            throw ValidationError(violations_);
        }
    }

private:
    std::vector<Violation> violations_;
};

std::string resolve(const std::filesystem::path &base, const std::string &p)
{
    if (p.empty() || base.empty()) {
        return p;
    }
    const std::filesystem::path path(p);
    return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

} // namespace

RunConfig parse_config_text(std::string_view text, const std::filesystem::path &base_dir)
{
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error &e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    Validator v;
    RunConfig cfg;
    if (!root.is_object()) {
        v.fail("$", "config must be a JSON object");
        v.finish();
    }
    v.keys(root, "", {"mode", "grid", "operator", "time", "solver", "initial", "output", "seed", "threads"});

    if (const json *mode = v.object(root, "", "mode", false)) {
        v.keys(*mode, "mode", {"kind", "length", "cells"});
        const auto kind = v.string(*mode, "mode", "kind", true);
        if (kind == "homogeneous") {
            if (mode->contains("length") || mode->contains("cells")) {
                v.fail("mode", "homogeneous mode takes no length or cells");
            }
            cfg.space = SpatialGrid::homogeneous();
        } else if (kind == "slab") {
            const auto length = v.number(*mode, "mode", "length", true);
            const auto cells = v.integer(*mode, "mode", "cells", true);
            if (length && !(*length > 0.0)) {
                v.fail("mode.length", "must be positive");
            }
            if (cells && *cells < 1) {
                v.fail("mode.cells", "must be at least 1");
            }
            if (length && cells && *length > 0.0 && *cells >= 1) {
                cfg.space = SpatialGrid::slab(*length, static_cast<int>(*cells));
            }
        } else if (kind) {
            v.fail("mode.kind", "must be 'homogeneous' or 'slab'");
        }
    }

    if (const json *grid = v.object(root, "", "grid", true)) {
        v.keys(*grid, "grid", {"q_max", "nodes_per_axis", "rule", "force"});
        if (const auto q = v.number(*grid, "grid", "q_max", true)) {
            if (!(*q > 0.0)) {
                v.fail("grid.q_max", "must be positive");
            }
            cfg.q_max = *q;
        }
        if (const auto n = v.integer(*grid, "grid", "nodes_per_axis", false)) {
            if (*n < 4 || *n > 512) {
                v.fail("grid.nodes_per_axis", "must lie in [4, 512]");
            }
            cfg.nodes_per_axis = static_cast<int>(*n);
        }
        if (const auto rule = v.string(*grid, "grid", "rule", false)) {
            try {
                cfg.rule = parse_quadrature_rule(*rule);
            } catch (const ConfigError &) {
                v.fail("grid.rule", "must be one of uniform-trapezoid, gauss-legendre-tensor, gauss-legendre-sinh");
            }
        }
        if (const auto force = v.boolean(*grid, "grid", "force")) {
            cfg.force_grid = *force;
        }
    }

    if (const json *op = v.object(root, "", "operator", false)) {
        v.keys(*op, "operator", {"kind", "beta_sup"});
        const auto kind = v.string(*op, "operator", "kind", true);
        if (kind == "exact") {
            cfg.mode = OperatorMode::Exact;
            if (op->contains("beta_sup")) {
                v.fail("operator.beta_sup", "only allowed with kind 'truncated'");
            }
        } else if (kind == "truncated") {
            cfg.mode = OperatorMode::Truncated;
            if (const auto b = v.number(*op, "operator", "beta_sup", true)) {
                if (!(*b > 1.0)) {
                    v.fail("operator.beta_sup", "must exceed 1");
                } else {
                    cfg.beta_sup = *b;
                    const double need = 2.0 * *b * *b;
                    if (cfg.q_max > 0.0 && cfg.q_max < need) {
                        std::ostringstream msg;
                        msg << "truncated operator needs q_max >= 2 beta_sup^2 = " << need;
                        v.fail("grid.q_max", msg.str());
                    }
                }
            }
        } else if (kind) {
            v.fail("operator.kind", "must be 'exact' or 'truncated'");
        }
    }

    if (const json *time = v.object(root, "", "time", true)) {
        v.keys(*time, "time", {"dt", "t_end", "snapshot_every"});
        if (const auto dt = v.number(*time, "time", "dt", true)) {
            if (!(*dt > 0.0)) {
                v.fail("time.dt", "must be positive");
            }
            cfg.dt = *dt;
        }
        if (const auto t = v.number(*time, "time", "t_end", true)) {
            if (!(*t >= 0.0)) {
                v.fail("time.t_end", "must be nonnegative");
            }
            cfg.t_end = *t;
        }
        if (const auto s = v.integer(*time, "time", "snapshot_every", false)) {
            if (*s < 0) {
                v.fail("time.snapshot_every", "must be nonnegative");
            }
            cfg.snapshot_every = static_cast<int>(*s);
        }
    }

    if (const json *solver = v.object(root, "", "solver", false)) {
        v.keys(*solver, "solver", {"interpolation", "picard"});
        if (const auto interp = v.string(*solver, "solver", "interpolation", false)) {
            if (*interp == "linear") {
                cfg.interpolation = Interpolation::Linear;
            } else if (*interp == "cubic") {
                cfg.interpolation = Interpolation::Cubic;
            } else {
                v.fail("solver.interpolation", "must be 'linear' or 'cubic'");
            }
        }
        if (const json *picard = v.object(*solver, "solver", "picard", false)) {
            v.keys(*picard, "solver.picard", {"enabled", "tol", "max_iter"});
            if (const auto e = v.boolean(*picard, "solver.picard", "enabled")) {
                cfg.picard.enabled = *e;
            }
            if (const auto tol = v.number(*picard, "solver.picard", "tol", false)) {
                if (!(*tol > 0.0)) {
                    v.fail("solver.picard.tol", "must be positive");
                }
                cfg.picard.tol = *tol;
            }
            if (const auto it = v.integer(*picard, "solver.picard", "max_iter", false)) {
                if (*it < 1) {
                    v.fail("solver.picard.max_iter", "must be at least 1");
                }
                cfg.picard.max_iter = static_cast<int>(*it);
            }
            if (cfg.picard.enabled && cfg.mode != OperatorMode::Truncated) {
                v.fail("solver.picard.enabled", "requires operator kind 'truncated'");
            }
        }
    }

    if (const json *initial = v.object(root, "", "initial", true)) {
        v.keys(*initial, "initial", {"bumps", "snapshot"});
        const bool has_bumps = initial->contains("bumps");
        const bool has_snapshot = initial->contains("snapshot");
        if (has_bumps == has_snapshot) {
            v.fail("initial", "exactly one of 'bumps' or 'snapshot' is required");
        }
        if (has_snapshot) {
            if (const auto s = v.string(*initial, "initial", "snapshot", true)) {
                cfg.initial_snapshot = resolve(base_dir, *s);
            }
        }
        if (has_bumps) {
            const json &bumps = initial->at("bumps");
            if (!bumps.is_array() || bumps.empty()) {
                v.fail("initial.bumps", "must be a nonempty array");
            } else {
                for (std::size_t k = 0; k < bumps.size(); ++k) {
                    const std::string path = "initial.bumps[" + std::to_string(k) + "]";
                    const json &b = bumps[k];
                    if (!b.is_object()) {
                        v.fail(path, "must be an object");
                        continue;
                    }
                    v.keys(b, path, {"n", "beta", "u", "profile"});
                    BumpSpec spec;
                    if (const auto n = v.number(b, path, "n", true)) {
                        if (!(*n > 0.0)) {
                            v.fail(path + ".n", "must be positive");
                        }
                        spec.n = *n;
                    }
                    if (const auto beta = v.number(b, path, "beta", true)) {
                        if (!(*beta > 0.0)) {
                            v.fail(path + ".beta", "must be positive");
                        }
                        spec.beta = *beta;
                    }
                    if (b.contains("u")) {
                        const json &u = b.at("u");
                        if (!u.is_array() || u.size() != 3 || !u[0].is_number() || !u[1].is_number() ||
                            !u[2].is_number()) {
                            v.fail(path + ".u", "must be an array of 3 numbers");
                        } else {
                            spec.u = {u[0].get<double>(), u[1].get<double>(), u[2].get<double>()};
                        }
                    }
                    if (const json *prof = v.object(b, path, "profile", false)) {
                        const std::string pp = path + ".profile";
                        v.keys(*prof, pp, {"amplitude", "wavenumber", "phase"});
                        XProfile xp;
                        if (const auto a = v.number(*prof, pp, "amplitude", true)) {
                            if (!(*a >= 0.0 && *a < 1.0)) {
                                v.fail(pp + ".amplitude", "must lie in [0, 1)");
                            }
                            xp.amplitude = *a;
                        }
                        if (const auto k = v.integer(*prof, pp, "wavenumber", false)) {
                            xp.wavenumber = static_cast<int>(*k);
                        }
                        if (const auto ph = v.number(*prof, pp, "phase", false)) {
                            xp.phase = *ph;
                        }
                        spec.profile = xp;
                    }
                    cfg.bumps.push_back(spec);
                }
            }
        }
    }

    if (const json *output = v.object(root, "", "output", false)) {
        v.keys(*output, "output", {"csv", "snapshot_dir"});
        if (const auto csv = v.string(*output, "output", "csv", false)) {
            cfg.csv_path = resolve(base_dir, *csv);
            const auto parent = std::filesystem::path(cfg.csv_path).parent_path();
            if (!parent.empty() && !std::filesystem::is_directory(parent)) {
                v.fail("output.csv", "parent directory does not exist");
            }
        }
        if (const auto dir = v.string(*output, "output", "snapshot_dir", false)) {
            cfg.snapshot_dir = resolve(base_dir, *dir);
        }
    }

    if (const auto seed = v.integer(root, "", "seed", false)) {
        if (*seed < 0) {
            v.fail("seed", "must be nonnegative");
        }
        cfg.seed = static_cast<std::uint64_t>(*seed);
    }
    if (root.contains("threads")) {
        const json &t = root.at("threads");
        if (t.is_string() && t.get<std::string>() == "auto") {
            cfg.threads = 0;
        } else if (t.is_number_integer() && t.get<long long>() >= 1 && t.get<long long>() <= 1024) {
            cfg.threads = static_cast<unsigned>(t.get<long long>());
        } else {
            v.fail("threads", "must be an integer in [1, 1024] or \"auto\"");
        }
    }

    v.finish();
    return cfg;
}

RunConfig parse_config(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.parent_path());
}

std::string normalize_config(const RunConfig &c)
{
    json root;
    if (c.space.mode == SpatialMode::Homogeneous) {
        root["mode"] = {{"kind", "homogeneous"}};
    } else {
        root["mode"] = {{"kind", "slab"}, {"length", c.space.length}, {"cells", c.space.cells}};
    }
    root["grid"] = {{"q_max", c.q_max},
                    {"nodes_per_axis", c.nodes_per_axis},
                    {"rule", std::string(to_string(c.rule))},
                    {"force", c.force_grid}};
    if (c.mode == OperatorMode::Exact) {
        root["operator"] = {{"kind", "exact"}};
    } else {
        root["operator"] = {{"kind", "truncated"}, {"beta_sup", c.beta_sup}};
    }
    root["time"] = {{"dt", c.dt}, {"t_end", c.t_end}, {"snapshot_every", c.snapshot_every}};
    root["solver"] = {
        {"interpolation", std::string(to_string(c.interpolation))},
        {"picard", {{"enabled", c.picard.enabled}, {"tol", c.picard.tol}, {"max_iter", c.picard.max_iter}}}};
    if (!c.initial_snapshot.empty()) {
        root["initial"] = {{"snapshot", c.initial_snapshot}};
    } else {
        json bumps = json::array();
        for (const auto &b : c.bumps) {
            json item = {{"n", b.n}, {"beta", b.beta}, {"u", {b.u.x, b.u.y, b.u.z}}};
            if (b.profile) {
                item["profile"] = {{"amplitude", b.profile->amplitude},
                                   {"wavenumber", b.profile->wavenumber},
                                   {"phase", b.profile->phase}};
            }
            bumps.push_back(item);
        }
        root["initial"] = {{"bumps", bumps}};
    }
    root["output"] = {{"csv", c.csv_path}, {"snapshot_dir", c.snapshot_dir}};
    root["seed"] = c.seed;
    if (c.threads == 0) {
        root["threads"] = "auto";
    } else {
        root["threads"] = c.threads;
    }
    return root.dump(2) + "\n";
}

SolverConfig solver_config(const RunConfig &c)
{
    SolverConfig s;
    s.dt = c.dt;
    s.t_end = c.t_end;
    s.mode = c.mode;
    if (c.mode == OperatorMode::Truncated) {
        s.truncation = TruncationParams::from_beta_sup(c.beta_sup);
    }
    s.picard = c.picard;
    s.interpolation = c.interpolation;
    s.snapshot_every = c.snapshot_every;
    s.threads = c.threads;
    return s;
}

GridPtr config_grid(const RunConfig &c)
{
    return build_grid(c.q_max, c.nodes_per_axis, c.rule, c.force_grid);
}

Distribution build_initial(const RunConfig &c)
{
    if (!c.initial_snapshot.empty()) {
        Snapshot snap = read_snapshot(c.initial_snapshot);
        const auto &g = snap.f.grid();
        if (g.q_max() != c.q_max || g.nodes_per_axis() != c.nodes_per_axis || g.rule() != c.rule ||
            !(snap.f.space() == c.space)) {
            throw ConfigError("initial snapshot grid does not match the configured grid and mode");
        }
        return std::move(snap.f);
    }
    Distribution f(config_grid(c), c.space);
    std::vector<double> shape(f.nodes());
    for (const auto &b : c.bumps) {
        fill_juttner(f.grid(), {1.0, b.beta, b.u}, shape);
        for (int cell = 0; cell < f.cells(); ++cell) {
            double density = b.n;
            if (b.profile && c.space.mode == SpatialMode::Slab) {
                const double x = c.space.center(cell);
                density *= 1.0 + b.profile->amplitude *
                                     std::cos(2.0 * std::numbers::pi * b.profile->wavenumber * x / c.space.length +
                                              b.profile->phase);
            }
            auto values = f.cell(cell);
            for (std::size_t i = 0; i < values.size(); ++i) {
                values[i] += density * shape[i];
            }
        }
    }
    return f;
}

} // namespace relbgk
