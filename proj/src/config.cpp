#include "pinlab/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "pinlab/error.hpp"

namespace pinlab {

namespace {

using S = Subcommand;

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string shortest(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::optional<double> to_real(const std::string& s)
{
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long> to_integer(const std::string& s)
{
    long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

using RealCheck = std::function<bool(double)>;
using IntCheck = std::function<bool(long)>;

struct Rule {
    RealCheck real;
    IntCheck integer;
    std::function<bool(const std::string&)> text;
    std::string requirement;
};

const std::map<std::string, Rule>& rules()
{
    auto pos = [](double v) { return v > 0.0; };
    auto nonneg = [](double v) { return v >= 0.0; };
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    auto at_least = [](long lo) { return [lo](long v) { return v >= lo; }; };
    static const std::map<std::string, Rule> r = {
        {"seed", {{}, {}, [](const std::string& s) {
                      if (s.empty() || s.size() > 20 || !std::all_of(s.begin(), s.end(), ::isdigit)) return false;
                      errno = 0;
                      std::strtoull(s.c_str(), nullptr, 10);
                      return errno == 0;
                  }, "an unsigned 64-bit integer"}},
        {"format", {{}, {}, [](const std::string& s) { return s == "csv" || s == "jsonl"; }, "csv or jsonl"}},
        {"output_dir", {{}, {}, [](const std::string& s) { return !s.empty(); }, "a nonempty path"}},
        {"threads", {{}, at_least(1), {}, ">= 1"}},
        {"s", {[](double v) { return v >= 0.5 && v < 1.0; }, {}, {}, "in [1/2, 1)"}},
        {"r0", {pos, {}, {}, "> 0"}},
        {"r1", {pos, {}, {}, "> 0"}},
        {"q", {pos, {}, {}, "> 0"}},
        {"V", {pos, {}, {}, "> 0"}},
        {"F2", {pos, {}, {}, "> 0"}},
        {"C_a", {[](double v) { return v > 5.0; }, {}, {}, "> 5"}},
        {"C_delta", {[](double v) { return v > 0.0 && v < 1.0; }, {}, {}, "in (0, 1)"}},
        {"alpha", {[](double v) { return v > 0.0 && v < 1.0; }, {}, {}, "in (0, 1)"}},
        {"a_factor", {[](double v) { return v >= 1.5; }, {}, {}, ">= 1.5"}},
        {"perc_n", {{}, at_least(1), {}, ">= 1"}},
        {"perc_width", {{}, at_least(1), {}, ">= 1"}},
        {"perc_height", {{}, at_least(1), {}, ">= 1"}},
        {"p_min", {unit, {}, {}, "in [0, 1]"}},
        {"p_max", {unit, {}, {}, "in [0, 1]"}},
        {"p_steps", {{}, at_least(1), {}, ">= 1"}},
        {"realizations", {{}, at_least(1), {}, ">= 1"}},
        {"cell_a", {nonneg, {}, {}, ">= 0"}},
        {"cell_b", {nonneg, {}, {}, ">= 0"}},
        {"cell_delta", {nonneg, {}, {}, ">= 0"}},
        {"n_modes", {{}, at_least(16), {}, ">= 16"}},
        {"profile_points", {{}, [](long v) { return v >= 8 && v % 2 == 0; }, {}, "even and >= 8"}},
        {"boxes", {{}, at_least(1), {}, ">= 1"}},
        {"rows", {{}, at_least(1), {}, ">= 1"}},
        {"closed_fraction", {[](double v) { return v > 0.0 && v <= 1.0; }, {}, {}, "in (0, 1]"}},
        {"grid_points", {{}, [](long v) { return v >= 8 && v % 2 == 0; }, {}, "even and >= 8"}},
        {"csv_stride", {{}, at_least(1), {}, ">= 1"}},
        {"self_test_polys", {{}, at_least(1), {}, ">= 1"}},
        {"self_test_points", {{}, at_least(1), {}, ">= 1"}},
        {"force", {{}, {}, [](const std::string& s) {
                       if (s == "fstar" || s == "escape") return true;
                       const auto v = to_real(s);
                       return v && *v >= 0.0;
                   }, "fstar, escape or a nonnegative number"}},
        {"sim_points", {{}, [](long v) { return v >= 8 && v % 2 == 0; }, {}, "even and >= 8"}},
        {"t_max", {pos, {}, {}, "> 0"}},
        {"dt", {nonneg, {}, {}, ">= 0 (0 selects the default)"}},
        {"pin_tol", {nonneg, {}, {}, ">= 0 (0 selects the default)"}},
        {"pin_window", {{}, at_least(1), {}, ">= 1"}},
        {"snapshot_every", {{}, at_least(0), {}, ">= 0"}},
        {"snapshot_stride", {{}, at_least(1), {}, ">= 1"}},
        {"F_lo", {nonneg, {}, {}, ">= 0"}},
        {"F_hi", {pos, {}, {}, "> 0"}},
        {"n_bisect", {{}, at_least(0), {}, ">= 0"}},
        {"scan_fields", {{}, at_least(1), {}, ">= 1"}},
    };
    return r;
}

const KeySpec* find_key(const std::string& name)
{
    for (const auto& k : config_schema())
        if (k.name == name) return &k;
    return nullptr;
}

}  // namespace

std::string_view to_string(Subcommand s)
{
    switch (s) {
    case S::percolate: return "percolate";
    case S::cell: return "cell";
    case S::build: return "build";
    case S::verify: return "verify";
    case S::evolve: return "evolve";
    case S::scan: return "scan";
    }
    return "?";
}

std::optional<Subcommand> parse_subcommand(std::string_view name)
{
    for (S s : {S::percolate, S::cell, S::build, S::verify, S::evolve, S::scan})
        if (to_string(s) == name) return s;
    return std::nullopt;
}

const std::vector<KeySpec>& config_schema()
{
    using K = KeyType;
    static const std::vector<KeySpec> schema = {
        {"seed", K::text, "1", "base random seed", {}},
        {"output_dir", K::text, "pinlab_out", "directory for results and manifest", {}},
        {"format", K::text, "csv", "record format for sweep results: csv or jsonl", {}},
        {"threads", K::integer, "1", "worker threads for independent realizations", {}},

        {"s", K::real, "0.75", "fractional order", {}},
        {"r0", K::real, "1", "obstacle plateau half-width", {}},
        {"r1", K::real, "1.5", "obstacle support radius", {}},
        {"q", K::real, "1", "obstacle strength threshold", {}},
        {"V", K::real, "0.0001", "area of one percolation cell", {}},
        {"F2", K::real, "0.5", "cell pulling force", {}},
        {"C_a", K::real, "6", "upper ratio a / l", {}},
        {"C_delta", K::real, "0.5", "ratio delta / (b/2)", {}},
        {"alpha", K::real, "0.5", "growth exponent of H(k) = floor(k^alpha)", {}},
        {"a_factor", K::real, "1.5", "chosen ratio a / l", {}},

        {"perc_n", K::integer, "1", "base dimension of the site lattice", {}},
        {"perc_width", K::integer, "200", "sites per base axis", {}},
        {"perc_height", K::integer, "64", "vertical sites", {}},
        {"p_min", K::real, "0.97", "smallest open probability in the sweep", {}},
        {"p_max", K::real, "0.97", "largest open probability in the sweep", {}},
        {"p_steps", K::integer, "1", "number of p values", {}},
        {"realizations", K::integer, "100", "lattices per p value", {}},
        {"periodic", K::boolean, "false", "horizontal wrap-around of the lattice", {}},
        {"dump_lattice", K::boolean, "false", "write lattice and lambda CSV for the first realization", {}},

        {"cell_a", K::real, "0", "cell half-period; 0 takes a, b, delta from the scaling rules", {}},
        {"cell_b", K::real, "0", "cell jump location", {}},
        {"cell_delta", K::real, "0", "cell mollification width", {}},
        {"n_modes", K::integer, "4096", "Fourier modes of the cell profile", {}},
        {"profile_points", K::integer, "4096", "sample points of the exported profile", {}},

        {"boxes", K::integer, "8", "boxes across the periodic obstacle field", {}},
        {"rows", K::integer, "64", "percolation rows of the obstacle field", {}},
        {"closed_fraction", K::real, "0.5", "closed-site probability as a fraction of q_max", {}},
        {"grid_points", K::integer, "16384", "verification grid points over the field period", {}},
        {"csv_stride", K::integer, "1", "row stride of the bundle CSV", {}},
        {"obstacles_file", K::text, "", "read the obstacle field from this file instead of sampling", {}},

        {"self_test_polys", K::integer, "5", "random polynomials in the operator self-test", {}},
        {"self_test_points", K::integer, "16", "points per polynomial in the operator self-test", {}},

        {"force", K::text, "fstar", "driving force: fstar, escape (10 sup f) or a number", {}},
        {"sim_points", K::integer, "4096", "simulation grid points over the field period", {}},
        {"t_max", K::real, "10000", "time horizon", {}},
        {"dt", K::real, "0", "time step; 0 selects the default", {}},
        {"pin_tol", K::real, "0", "velocity threshold; 0 selects the default", {}},
        {"pin_window", K::integer, "100", "consecutive quiet steps that count as pinned", {}},
        {"snapshot_every", K::integer, "100", "steps between trajectory snapshots; 0 disables", {}},
        {"snapshot_stride", K::integer, "1", "grid stride of trajectory snapshots", {}},

        {"F_lo", K::real, std::nullopt, "lower force bracket", {S::scan}},
        {"F_hi", K::real, std::nullopt, "upper force bracket", {S::scan}},
        {"n_bisect", K::integer, "8", "bisection steps", {}},
        {"scan_fields", K::integer, "1", "independent obstacle fields scanned", {}},
    };
    return schema;
}

// ---------------------------------------------------------------- RunConfig

void RunConfig::set(const std::string& key, const std::string& raw)
{
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError("unknown key '" + key + "'");
    const std::string value = trim(raw);
    static const Rule none{};
    const auto rit = rules().find(key);
    const Rule& rule = rit == rules().end() ? none : rit->second;
    auto fail = [&](const std::string& why) {
        throw ConfigError("key '" + key + "': value '" + value + "' " + why);
    };
    switch (spec->type) {
    case KeyType::real: {
        const auto v = to_real(value);
        if (!v) fail("is not a real number");
        if (rule.real && !rule.real(*v)) fail("must be " + rule.requirement);
        values_[key] = shortest(*v);
        break;
    }
    case KeyType::integer: {
        const auto v = to_integer(value);
        if (!v) fail("is not an integer");
        if (rule.integer && !rule.integer(*v)) fail("must be " + rule.requirement);
        values_[key] = std::to_string(*v);
        break;
    }
    case KeyType::boolean:
        if (value == "true" || value == "1") values_[key] = "true";
        else if (value == "false" || value == "0") values_[key] = "false";
        else fail("is not a boolean");
        break;
    case KeyType::text:
        if (rule.text && !rule.text(value)) fail("must be " + rule.requirement);
        values_[key] = value;
        break;
    }
}

const std::string& RunConfig::text(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

double RunConfig::real(const std::string& key) const { return *to_real(text(key)); }
long RunConfig::integer(const std::string& key) const { return *to_integer(text(key)); }
bool RunConfig::boolean(const std::string& key) const { return text(key) == "true"; }

RunConfig parse_config(std::string_view text, std::optional<Subcommand> subcommand)
{
    RunConfig cfg;
    std::optional<Subcommand> from_text;
    std::map<std::string, std::string> given;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (given.count(key) || (key == "subcommand" && from_text))
            throw ConfigError("key '" + key + "' given twice");
        if (key == "subcommand") {
            from_text = parse_subcommand(value);
            if (!from_text) throw ConfigError("key 'subcommand': unknown value '" + value + "'");
            continue;
        }
        given[key] = value;
    }
    if (subcommand && from_text && *subcommand != *from_text)
        throw ConfigError("key 'subcommand' conflicts with the command line");
    if (!subcommand && !from_text) throw ConfigError("missing required key 'subcommand'");
    cfg.subcommand = subcommand ? *subcommand : *from_text;

    for (const auto& [k, v] : given)
        if (!find_key(k)) throw ConfigError("unknown key '" + k + "'");
    for (const auto& spec : config_schema()) {
        if (auto it = given.find(spec.name); it != given.end()) cfg.set(spec.name, it->second);
        else if (spec.fallback) cfg.set(spec.name, *spec.fallback);
        else if (std::find(spec.required_for.begin(), spec.required_for.end(), cfg.subcommand)
                 != spec.required_for.end())
            throw ConfigError("missing required key '" + spec.name + "'");
    }
    return cfg;
}

void apply_environment(RunConfig& cfg)
{
    if (const char* env = std::getenv("PINLAB_SEED")) {
        try {
            cfg.set("seed", env);
        } catch (const ConfigError&) {
            throw ConfigError("key 'seed': PINLAB_SEED value '" + std::string(env) + "' is not a 64-bit seed");
        }
    }
}

std::string canonical_text(const RunConfig& cfg)
{
    std::string out = "subcommand = " + std::string(to_string(cfg.subcommand)) + "\n";
    for (const auto& [k, v] : cfg.values()) out += k + " = " + v + "\n";
    return out;
}

std::uint64_t config_hash(const RunConfig& cfg)
{
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a
    for (unsigned char c : canonical_text(cfg)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string emit_manifest(const RunConfig& cfg, const std::vector<std::string>& outputs)
{
    std::ostringstream os;
    os << "# pinlab-manifest v1\n";
    os << "# config_hash = " << std::hex << config_hash(cfg) << std::dec << '\n';
    for (const auto& f : outputs) os << "# output = " << f << '\n';
    os << canonical_text(cfg);
    return os.str();
}

}  // namespace pinlab
