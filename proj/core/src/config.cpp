#include "featlab/config.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "featlab/error.hpp"

namespace featlab {

namespace {

constexpr std::pair<Scenario, const char*> kScenarioNames[] = {
    {Scenario::joint, "joint"},
    {Scenario::s_then_a, "s_then_a"},
    {Scenario::a_then_s, "a_then_s"},
    {Scenario::twohop_bridge, "twohop_bridge"},
    {Scenario::twohop_nobridge, "twohop_nobridge"},
    {Scenario::end_to_end, "end_to_end"},
    {Scenario::kappa_sweep, "kappa_sweep"},
    {Scenario::deep_linear, "deep_linear"},
    {Scenario::gradcheck, "gradcheck"},
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto s = trim(v);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
    return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
    return static_cast<std::size_t>(to_u64(key, v));
}

double to_double(const std::string& key, const std::string& v) {
    const auto s = trim(v);
    try {
        std::size_t used = 0;
        const double out = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return out;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    const auto s = trim(v);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(key, "expected true/false, got '" + v + "'");
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& v, F convert) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty()) out.push_back(convert(trim(item)));
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
    return out;
}

}  // namespace

std::string to_string(Scenario s) {
    for (const auto& [value, name] : kScenarioNames)
        if (value == s) return name;
    return "?";
}

Scenario parse_scenario(const std::string& s) {
    for (const auto& [value, name] : kScenarioNames)
        if (s == name) return value;
    throw ConfigError("scenario", "unknown scenario '" + s + "'");
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (key == "scenario") scenario = parse_scenario(v);
    else if (key == "N") N = to_size(key, v);
    else if (key == "d") d = to_size(key, v);
    else if (key == "m") m = to_size(key, v);
    else if (key == "lambda") lambda = to_double(key, v);
    else if (key == "sigma0") sigma0 = to_double(key, v);
    else if (key == "kappa") kappa = to_size(key, v);
    else if (key == "T1") T1 = to_size(key, v);
    else if (key == "T2") T2 = to_size(key, v);
    else if (key == "T3") T3 = to_size(key, v);
    else if (key == "eta1") eta1 = to_double(key, v);
    else if (key == "eta2") eta2 = to_double(key, v);
    else if (key == "eta3") eta3 = to_double(key, v);
    else if (key == "activation") {
        if (v == "identity") activation = Activation::identity;
        else if (v == "relu") activation = Activation::relu;
        else throw ConfigError(key, "expected identity or relu, got '" + v + "'");
    }
    else if (key == "e2e_variant") {
        if (v != "joint" && v != "s_then_a" && v != "a_then_s")
            throw ConfigError(key, "expected joint, s_then_a or a_then_s");
        e2e_variant = v;
    }
    else if (key == "e2e_iterations") e2e_iterations = to_size(key, v);
    else if (key == "e2e_eta") e2e_eta = to_double(key, v);
    else if (key == "kappas") kappas = to_list<std::size_t>(v, [&](const std::string& s) { return to_size(key, s); });
    else if (key == "dl_dim") dl_dim = to_size(key, v);
    else if (key == "dl_depth") dl_depth = to_size(key, v);
    else if (key == "dl_samples") dl_samples = to_size(key, v);
    else if (key == "dl_eta") dl_eta = to_double(key, v);
    else if (key == "dl_iterations") dl_iterations = to_size(key, v);
    else if (key == "gc_configs") gc_configs = to_size(key, v);
    else if (key == "gc_h") gc_h = to_double(key, v);
    else if (key == "gc_dims") gc_dims = to_list<std::size_t>(v, [&](const std::string& s) { return to_size(key, s); });
    else if (key == "gc_widths") gc_widths = to_list<std::size_t>(v, [&](const std::string& s) { return to_size(key, s); });
    else if (key == "gc_scale") gc_scale = to_double(key, v);
    else if (key == "gc_tolerance") gc_tolerance = to_double(key, v);
    else if (key == "seeds") seeds = to_list<std::uint64_t>(v, [&](const std::string& s) { return to_u64(key, s); });
    else if (key == "log_every") log_every = to_size(key, v);
    else if (key == "jobs") jobs = to_size(key, v);
    else if (key == "record_runtime") record_runtime = to_bool(key, v);
    else if (key == "out") out = v;
    else if (key == "format") {
        if (v == "csv") format = ReportFormat::csv;
        else if (v == "json") format = ReportFormat::json;
        else throw ConfigError(key, "expected csv or json, got '" + v + "'");
    }
    else throw ConfigError(key, "unknown key");
}

void ExperimentConfig::validate() const {
    auto positive = [](const char* key, double v) {
        if (!(v > 0.0)) throw ConfigError(key, "must be positive");
    };
    if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
    if (jobs == 0) throw ConfigError("jobs", "must be at least 1");
    switch (scenario) {
        case Scenario::deep_linear:
            if (dl_dim == 0) throw ConfigError("dl_dim", "must be positive");
            if (dl_depth < 2) throw ConfigError("dl_depth", "must be at least 2");
            if (dl_samples == 0) throw ConfigError("dl_samples", "must be positive");
            if (dl_samples > dl_dim) throw ConfigError("dl_samples", "cannot exceed dl_dim");
            positive("dl_eta", dl_eta);
            return;
        case Scenario::gradcheck:
            if (gc_configs == 0) throw ConfigError("gc_configs", "must be positive");
            if (!(gc_h >= 1e-7 && gc_h <= 1e-3)) throw ConfigError("gc_h", "must lie in [1e-7, 1e-3]");
            if (gc_dims.empty()) throw ConfigError("gc_dims", "must be non-empty");
            if (gc_widths.empty()) throw ConfigError("gc_widths", "must be non-empty");
            for (auto v : gc_dims) if (v < 2) throw ConfigError("gc_dims", "dimensions must be at least 2");
            for (auto v : gc_widths) if (v == 0) throw ConfigError("gc_widths", "widths must be positive");
            positive("gc_scale", gc_scale);
            positive("gc_tolerance", gc_tolerance);
            return;
        default:
            break;
    }
    if (N == 0) throw ConfigError("N", "must be positive");
    if (d == 0) throw ConfigError("d", "must be positive");
    if (m == 0) throw ConfigError("m", "must be positive");
    positive("lambda", lambda);
    positive("sigma0", sigma0);
    if (kappa == 0) throw ConfigError("kappa", "must be at least 1");
    const std::size_t tokens = 2 * N + (scenario == Scenario::twohop_bridge || scenario == Scenario::twohop_nobridge ? 3 : 2);
    if (tokens > d) throw ConfigError("d", "too small for " + std::to_string(tokens) + " orthonormal tokens");
    if (scenario == Scenario::end_to_end || scenario == Scenario::kappa_sweep) {
        positive("e2e_eta", e2e_eta);
        if (scenario == Scenario::kappa_sweep && kappas.empty()) throw ConfigError("kappas", "must be non-empty");
        for (auto k : kappas) if (k == 0) throw ConfigError("kappas", "entries must be at least 1");
    } else {
        positive("eta1", eta1);
        positive("eta2", eta2);
        positive("eta3", eta3);
    }
}

std::string ExperimentConfig::dump() const {
    std::ostringstream os;
    os << "scenario = " << to_string(scenario) << '\n'
       << "N = " << N << '\n'
       << "d = " << d << '\n'
       << "m = " << m << '\n'
       << "lambda = " << fmt(lambda) << '\n'
       << "sigma0 = " << fmt(sigma0) << '\n'
       << "kappa = " << kappa << '\n'
       << "T1 = " << T1 << '\n'
       << "T2 = " << T2 << '\n'
       << "T3 = " << T3 << '\n'
       << "eta1 = " << fmt(eta1) << '\n'
       << "eta2 = " << fmt(eta2) << '\n'
       << "eta3 = " << fmt(eta3) << '\n'
       << "activation = " << to_string(activation) << '\n'
       << "e2e_variant = " << e2e_variant << '\n'
       << "e2e_iterations = " << e2e_iterations << '\n'
       << "e2e_eta = " << fmt(e2e_eta) << '\n'
       << "kappas = " << join(kappas) << '\n'
       << "dl_dim = " << dl_dim << '\n'
       << "dl_depth = " << dl_depth << '\n'
       << "dl_samples = " << dl_samples << '\n'
       << "dl_eta = " << fmt(dl_eta) << '\n'
       << "dl_iterations = " << dl_iterations << '\n'
       << "gc_configs = " << gc_configs << '\n'
       << "gc_h = " << fmt(gc_h) << '\n'
       << "gc_dims = " << join(gc_dims) << '\n'
       << "gc_widths = " << join(gc_widths) << '\n'
       << "gc_scale = " << fmt(gc_scale) << '\n'
       << "gc_tolerance = " << fmt(gc_tolerance) << '\n'
       << "seeds = " << join(seeds) << '\n'
       << "log_every = " << log_every << '\n'
       << "jobs = " << jobs << '\n'
       << "record_runtime = " << (record_runtime ? "true" : "false") << '\n'
       << "out = " << out << '\n'
       << "format = " << (format == ReportFormat::csv ? "csv" : "json") << '\n';
    return os.str();
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::vector<std::uint64_t> seed_range(std::uint64_t base, std::size_t reps) {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < reps; ++i) out.push_back(base + i);
    return out;
}

}  // namespace featlab
