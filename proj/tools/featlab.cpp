// featlab command-line driver: one subcommand per experiment family.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "featlab/config.hpp"
#include "featlab/error.hpp"
#include "featlab/harness.hpp"
#include "featlab/report.hpp"

namespace {

enum Exit : int { ok = 0, config_error = 2, io_error = 3, diverged = 4, gradcheck_failed = 5 };

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::string out;
    std::string format;
    std::vector<std::string> overrides;
    std::optional<std::size_t> jobs;
    bool timing = false;
    bool print_config = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "key = value config file");
    cmd->add_option("--seed", f.seed, "first seed");
    cmd->add_option("--reps", f.reps, "number of seeds (seed, seed+1, ...)")->check(CLI::PositiveNumber);
    cmd->add_option("--out", f.out, "report path (stdout when omitted)");
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--set", f.overrides, "override a config key: --set key=value")->take_all();
    cmd->add_option("--jobs", f.jobs, "seeds run in parallel")->check(CLI::PositiveNumber);
    cmd->add_flag("--timing", f.timing, "record wall-clock runtime_s (breaks byte-identical reruns)");
    cmd->add_flag("--print-config", f.print_config, "print the resolved config and exit");
}

featlab::ExperimentConfig resolve(const CommonFlags& f, featlab::Scenario scenario) {
    featlab::ExperimentConfig c;
    c.scenario = scenario;
    if (!f.config_path.empty()) c = featlab::load_config(f.config_path, c);
    for (const auto& kv : f.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw featlab::ConfigError(kv, "--set expects key=value");
        c.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (f.seed || f.reps) {
        const std::uint64_t base = f.seed ? *f.seed : (c.seeds.empty() ? 1 : c.seeds.front());
        const std::size_t reps = f.reps ? *f.reps : (f.seed ? c.seeds.size() : 1);
        c.seeds = featlab::seed_range(base, reps == 0 ? 1 : reps);
    }
    if (!f.out.empty()) c.out = f.out;
    if (!f.format.empty()) c.format = f.format == "json" ? featlab::ReportFormat::json : featlab::ReportFormat::csv;
    if (f.jobs) c.jobs = *f.jobs;
    if (f.timing) c.record_runtime = true;
    return c;
}

void require_family(const featlab::ExperimentConfig& c, std::initializer_list<featlab::Scenario> allowed,
                    const std::string& command) {
    for (auto s : allowed)
        if (c.scenario == s) return;
    throw featlab::ConfigError("scenario", "'" + featlab::to_string(c.scenario) + "' cannot run under '" + command + "'");
}

int execute(const featlab::ExperimentConfig& c, bool print_config) {
    if (print_config) {
        std::cout << c.dump();
        return ok;
    }
    const auto result = featlab::run_experiment(c);
    for (const auto& line : result.diagnostics) std::cerr << "featlab: " << line << '\n';
    if (c.out.empty()) {
        if (c.scenario == featlab::Scenario::gradcheck)
            std::cout << featlab::render_gradcheck(result.grad_reports, c.format);
        else
            std::cout << featlab::render(result.rows, c.format);
        if (!result.curve.empty()) std::cout << featlab::render_curve(result.curve, c.format);
    } else {
        featlab::write_outputs(c, result);
    }
    if (result.gradcheck_failed) return gradcheck_failed;
    if (result.any_diverged) return diverged;
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"featlab: layer-wise training experiments for a one-layer attention block"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string analogical_scenario;
    bool no_bridge = false;

    auto* analogical = app.add_subcommand("analogical", "analogical reasoning runs (joint, curricula, end-to-end)");
    add_common(analogical, flags);
    analogical->add_option("--scenario", analogical_scenario, "joint | s_then_a | a_then_s | end_to_end")
        ->check(CLI::IsMember({"joint", "s_then_a", "a_then_s", "end_to_end"}));

    auto* two_hop = app.add_subcommand("two-hop", "two-hop reasoning with or without the identity bridge");
    add_common(two_hop, flags);
    two_hop->add_flag("--no-bridge", no_bridge, "drop the identity-bridge examples");

    auto* deep = app.add_subcommand("deep-linear", "layer-wise training of a deep linear network");
    add_common(deep, flags);

    auto* sweep = app.add_subcommand("kappa-sweep", "end-to-end runs over the similarity multiplicity");
    add_common(sweep, flags);

    auto* grad = app.add_subcommand("gradcheck", "closed-form gradients against central differences");
    add_common(grad, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    using featlab::Scenario;
    try {
        featlab::ExperimentConfig c;
        if (analogical->parsed()) {
            c = resolve(flags, Scenario::joint);
            if (!analogical_scenario.empty()) c.scenario = featlab::parse_scenario(analogical_scenario);
            require_family(c, {Scenario::joint, Scenario::s_then_a, Scenario::a_then_s, Scenario::end_to_end},
                           "analogical");
        } else if (two_hop->parsed()) {
            c = resolve(flags, Scenario::twohop_bridge);
            if (no_bridge) c.scenario = Scenario::twohop_nobridge;
            require_family(c, {Scenario::twohop_bridge, Scenario::twohop_nobridge}, "two-hop");
        } else if (deep->parsed()) {
            c = resolve(flags, Scenario::deep_linear);
            require_family(c, {Scenario::deep_linear}, "deep-linear");
        } else if (sweep->parsed()) {
            c = resolve(flags, Scenario::kappa_sweep);
            require_family(c, {Scenario::kappa_sweep}, "kappa-sweep");
        } else {
            c = resolve(flags, Scenario::gradcheck);
            require_family(c, {Scenario::gradcheck}, "gradcheck");
        }
        c.validate();
        return execute(c, flags.print_config);
    } catch (const featlab::ConfigError& e) {
        std::cerr << "featlab: " << e.what() << '\n';
        return config_error;
    } catch (const featlab::IoError& e) {
        std::cerr << "featlab: " << e.what() << '\n';
        return io_error;
    } catch (const featlab::Error& e) {
        std::cerr << "featlab: " << e.what() << '\n';
        return config_error;
    }
}
