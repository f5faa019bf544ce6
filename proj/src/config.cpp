#include "memvol/config.hpp"

#include "memvol/rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace memvol {

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += "; ";
        out += s;
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> table = {
        {"process.a", "const:0"},
        {"process.b", "const:0.2"},
        {"process.t0", "0"},
        {"process.T", "1"},
        {"process.kernel", "gaussian"},
        {"process.tau", "0"},
        {"pricing.s0", "100"},
        {"pricing.A", "const:0"},
        {"pricing.r", "0.05"},
        {"pricing.kind", "call"},
        {"pricing.strike", "100"},
        {"pricing.maturity", "1"},
        {"pricing.drift_coefficient", "r"},
        {"numerics.n_steps", "100"},
        {"numerics.n_paths", "10000"},
        {"numerics.seed", "42"},
        {"numerics.quad_tol", "1e-9"},
        {"numerics.pde_space", "400"},
        {"numerics.pde_time", "400"},
        {"numerics.picard_max_iter", "50"},
        {"numerics.picard_tol", "1e-10"},
        {"numerics.effvol_method", "exact"},
        {"io.out", ""},
        {"io.surface", ""},
    };
    return table;
}

// Pulls typed values out of the raw table, recording failures by key.
class Reader {
public:
    Reader(const std::map<std::string, std::string>& values, std::vector<std::string>& errors)
        : values_(values), errors_(errors) {}

    const std::string& raw(const std::string& key) const { return values_.at(key); }

    void fail(const std::string& key, const std::string& why) {
        errors_.push_back(key + ": " + why);
    }

    double real(const std::string& key) {
        const std::string& text = raw(key);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v)) {
            fail(key, "expected a real number, got '" + text + "'");
            return 0.0;
        }
        return v;
    }

    std::uint64_t integer(const std::string& key) {
        const std::string& text = raw(key);
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
            fail(key, "expected a nonnegative integer, got '" + text + "'");
            return 0;
        }
        return v;
    }

    template <class Parse>
    auto with(const std::string& key, Parse parse) -> decltype(parse(std::string{})) {
        try {
            return parse(raw(key));
        } catch (const Error& e) {
            fail(key, e.what());
        }
        return {};
    }

private:
    const std::map<std::string, std::string>& values_;
    std::vector<std::string>& errors_;
};

std::string curve_file_digest(const std::string& spec, const std::filesystem::path& base_dir) {
    if (spec.rfind("csv:", 0) != 0) return {};
    std::filesystem::path p = spec.substr(4);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a(buf.str());
    return hex.str();
}

void check_covers(Reader& rd, const std::string& key, const CoefficientCurve& curve, double lo,
                  double hi, const std::string& span_name) {
    if (!curve.contains(lo) || !curve.contains(hi)) {
        std::ostringstream msg;
        msg << "curve domain [" << curve.t_min() << ", " << curve.t_max() << "] does not cover "
            << span_name << " [" << lo << ", " << hi << "]";
        rd.fail(key, msg.str());
    }
}

} // namespace

ConfigError::ConfigError(ErrorCode code, std::vector<std::string> problems)
    : Error(code, join(problems)), problems_(std::move(problems)) {}

std::string default_config_text() {
    std::ostringstream out;
    for (const auto& [k, v] : defaults()) out << k << " = " << v << "\n";
    return out.str();
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    std::map<std::string, std::string> values = defaults();
    std::map<std::string, std::size_t> seen;
    std::vector<std::string> syntax;

    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string where = "line " + std::to_string(lineno);
        if (eq == std::string::npos) {
            syntax.push_back(where + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) {
            syntax.push_back(where + ": missing key");
            continue;
        }
        if (!defaults().contains(key)) {
            syntax.push_back(where + ": unknown key '" + key + "'");
            continue;
        }
        if (auto it = seen.find(key); it != seen.end()) {
            syntax.push_back(where + ": duplicate key '" + key + "' (first on line " +
                             std::to_string(it->second) + ")");
            continue;
        }
        seen[key] = lineno;
        values[key] = value;
    }
    std::vector<std::string> errors = syntax;
    Reader rd(values, errors);
    RunConfig cfg;

    cfg.a = rd.with("process.a", [&](const std::string& s) { return parse_curve_spec(s, CurveRole::Drift, base_dir); });
    cfg.b = rd.with("process.b", [&](const std::string& s) { return parse_curve_spec(s, CurveRole::Volatility, base_dir); });
    const bool curves_ok = errors.size() == syntax.size();
    cfg.t0 = rd.real("process.t0");
    cfg.horizon = rd.real("process.T");
    if (!(cfg.horizon > cfg.t0)) rd.fail("process.T", "must exceed process.t0");

    const double tau = rd.real("process.tau");
    if (!(tau >= 0.0)) rd.fail("process.tau", "must be >= 0");
    const std::string family = rd.raw("process.kernel");
    MemoryKernel::Family fam = MemoryKernel::Family::Gaussian;
    if (family == "exponential") fam = MemoryKernel::Family::Exponential;
    else if (family != "gaussian") rd.fail("process.kernel", "must be gaussian or exponential");
    if (tau >= 0.0) cfg.kernel = MemoryKernel(fam, tau);

    cfg.s0 = rd.real("pricing.s0");
    if (!(cfg.s0 > 0.0)) rd.fail("pricing.s0", "must be > 0");
    const std::size_t before_A = errors.size();
    cfg.A = rd.with("pricing.A", [&](const std::string& s) { return parse_curve_spec(s, CurveRole::Drift, base_dir); });
    const bool A_ok = errors.size() == before_A;
    cfg.r = rd.real("pricing.r");
    cfg.option.kind = rd.with("pricing.kind", [](const std::string& s) { return parse_option_kind(s); });
    cfg.option.strike = rd.real("pricing.strike");
    if (!(cfg.option.strike > 0.0)) rd.fail("pricing.strike", "must be > 0");
    cfg.option.maturity = rd.real("pricing.maturity");
    if (!(cfg.option.maturity > cfg.t0)) rd.fail("pricing.maturity", "must exceed process.t0");
    cfg.drift = rd.with("pricing.drift_coefficient", [](const std::string& s) { return parse_drift_coefficient(s); });

    auto positive_count = [&](const std::string& key, std::uint64_t min) {
        const auto v = rd.integer(key);
        if (v < min) rd.fail(key, "must be >= " + std::to_string(min));
        return static_cast<std::size_t>(v);
    };
    cfg.n_steps = positive_count("numerics.n_steps", 1);
    cfg.n_paths = positive_count("numerics.n_paths", 2);
    cfg.seed = rd.integer("numerics.seed");
    cfg.quad_tol = rd.real("numerics.quad_tol");
    if (!(cfg.quad_tol > 0.0)) rd.fail("numerics.quad_tol", "must be > 0");
    cfg.pde_space = positive_count("numerics.pde_space", 50);
    cfg.pde_time = positive_count("numerics.pde_time", 50);
    cfg.picard_max_iter = static_cast<int>(positive_count("numerics.picard_max_iter", 1));
    cfg.picard_tol = rd.real("numerics.picard_tol");
    if (!(cfg.picard_tol > 0.0)) rd.fail("numerics.picard_tol", "must be > 0");
    cfg.effvol_method = rd.with("numerics.effvol_method", [](const std::string& s) { return parse_effvol_method(s); });
    if (cfg.effvol_method == EffVolMethod::GaussianClosed && fam != MemoryKernel::Family::Gaussian)
        rd.fail("numerics.effvol_method", "gaussian method needs process.kernel = gaussian");

    cfg.out = values.at("io.out");
    cfg.surface = values.at("io.surface");

    if (curves_ok && cfg.horizon > cfg.t0) {
        check_covers(rd, "process.a", cfg.a, cfg.t0, cfg.horizon, "the process window");
        check_covers(rd, "process.b", cfg.b, cfg.t0, cfg.horizon, "the process window");
    }
    if (curves_ok && A_ok && cfg.option.maturity > cfg.t0) {
        check_covers(rd, "process.b", cfg.b, cfg.t0, cfg.option.maturity, "the option life");
        check_covers(rd, "pricing.A", cfg.A, cfg.t0, cfg.option.maturity, "the option life");
    }
    if (!errors.empty())
        throw ConfigError(syntax.empty() ? ErrorCode::ValidationError : ErrorCode::ParseError,
                          std::move(errors));

    std::ostringstream canon;
    for (const auto& [k, v] : values) {
        cfg.canonical[k] = v;
        canon << k << "=" << v << "\n";
    }
    for (const char* key : {"process.a", "process.b", "pricing.A"}) {
        const auto file_hash = curve_file_digest(values.at(key), base_dir);
        if (!file_hash.empty()) canon << key << "#file=" << file_hash << "\n";
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a(canon.str());
    cfg.digest = hex.str();
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.parent_path());
}

} // namespace memvol
