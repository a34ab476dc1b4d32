#include "featlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>
#include <tuple>

#include "featlab/deep_linear.hpp"
#include "featlab/error.hpp"
#include "featlab/metrics.hpp"
#include "featlab/rng.hpp"

namespace featlab {

namespace {

bool is_two_hop(Scenario s) { return s == Scenario::twohop_bridge || s == Scenario::twohop_nobridge; }

std::vector<Recipe> e2e_recipes(const std::string& variant) {
    if (variant == "joint") return {Recipe::joint_analogical};
    if (variant == "s_then_a") return {Recipe::phase1_S1S2, Recipe::phase2_S3};
    if (variant == "a_then_s") return {Recipe::phase1_S1S3, Recipe::phase2_S2};
    throw ConfigError("e2e_variant", "unknown end-to-end variant '" + variant + "'");
}

struct SeedOutcome {
    std::uint64_t seed = 0;
    std::size_t kappa = 0;
    double train_loss = 0.0;
    MeanStd sim;
    double success = 0.0;
    double runtime = 0.0;
    bool diverged = false;
    std::vector<MeanStd> depth_similarity;
    std::vector<std::string> diagnostics;
};

struct Task {
    std::uint64_t seed;
    std::size_t kappa;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SeedOutcome run_task(const ExperimentConfig& config, const Task& task) {
    SeedOutcome out;
    out.seed = task.seed;
    out.kappa = task.kappa;
    const auto t0 = std::chrono::steady_clock::now();
    if (config.scenario == Scenario::deep_linear) {
        LayerwiseConfig lc{config.dl_dim, config.dl_depth, config.dl_samples, config.dl_eta, config.dl_iterations};
        Rng rng = Rng::derive(task.seed, kDeepLinearStream);
        const auto r = train_layerwise_linear(lc, rng);
        out.train_loss = r.final_loss;
        out.sim = r.depth_similarity.back();
        out.success = 100.0 * r.train_accuracy;
        out.depth_similarity = r.depth_similarity;
    } else {
        TrainOptions opts;
        opts.activation = config.activation;
        opts.log_every = config.log_every;
        try {
            const auto r = run_seed(config, config.scenario, task.seed, task.kappa, opts);
            out.train_loss = r.train_loss;
            out.sim = r.feature_sim;
            out.success = 100.0 * (1.0 - r.test_error);
            for (const auto& d : r.diagnostics) out.diagnostics.push_back("seed " + std::to_string(task.seed) + ": " + d);
        } catch (const DivergenceError& e) {
            out.diverged = true;
            out.diagnostics.push_back("seed " + std::to_string(task.seed) + ": diverged at iteration " +
                                      std::to_string(e.iteration()) + ": " + e.what());
        }
    }
    out.runtime = config.record_runtime ? elapsed(t0) : 0.0;
    return out;
}

std::vector<SeedOutcome> run_tasks(const ExperimentConfig& config, const std::vector<Task>& tasks) {
    std::vector<SeedOutcome> outcomes(tasks.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(config.jobs, tasks.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) outcomes[i] = run_task(config, tasks[i]);
        return outcomes;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < tasks.size(); i = next++) outcomes[i] = run_task(config, tasks[i]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return outcomes;
}

ReportRow seed_row(const std::string& scenario, const SeedOutcome& o) {
    ReportRow r;
    r.scenario = scenario;
    r.seed = o.seed;
    r.kappa = o.kappa;
    r.diverged = o.diverged;
    if (!o.diverged) {
        r.train_loss = o.train_loss;
        r.feature_sim_mean = o.sim.mean;
        r.feature_sim_std = o.sim.std;
        r.success_rate_mean = o.success;
        r.success_rate_std = 0.0;
    }
    r.runtime_s = o.runtime;
    return r;
}

/// Mean and sample std across seeds of the per-seed values; diverged seeds
/// are left out.
ReportRow aggregate_row(const std::string& scenario, std::size_t kappa, const std::vector<const SeedOutcome*>& group) {
    ReportRow r;
    r.scenario = scenario;
    r.kappa = kappa;
    std::vector<double> loss, sim, success;
    double runtime = 0.0;
    for (const auto* o : group) {
        runtime += o->runtime;
        if (o->diverged) continue;
        loss.push_back(o->train_loss);
        sim.push_back(o->sim.mean);
        success.push_back(o->success);
    }
    r.runtime_s = runtime;
    if (loss.empty()) {
        r.diverged = true;
        return r;
    }
    r.train_loss = mean_std(loss).mean;
    const auto s = mean_std(sim);
    const auto a = mean_std(success);
    r.feature_sim_mean = s.mean;
    r.feature_sim_std = s.std;
    r.success_rate_mean = a.mean;
    r.success_rate_std = a.std;
    return r;
}

}  // namespace

Corpus build_corpus(const ExperimentConfig& config, Scenario scenario, std::uint64_t seed) {
    Rng rng = Rng::derive(seed, kCorpusStream);
    if (is_two_hop(scenario)) return build_two_hop(config.N, config.d, scenario == Scenario::twohop_bridge, rng);
    if (scenario == Scenario::deep_linear || scenario == Scenario::gradcheck)
        throw ConfigError("scenario", to_string(scenario) + " has no corpus");
    return build_analogical(config.N, config.d, rng);
}

ModelParams build_init(const ExperimentConfig& config, std::uint64_t seed) {
    Rng rng = Rng::derive(seed, kInitStream);
    return init_params(config.d, config.m, config.lambda, config.sigma0, rng);
}

RunResult run_seed(const ExperimentConfig& config, Scenario scenario, std::uint64_t seed, std::size_t kappa,
                   const TrainOptions& options) {
    const Corpus corpus = build_corpus(config, scenario, seed);
    const ModelParams init = build_init(config, seed);
    switch (scenario) {
        case Scenario::joint:
        case Scenario::twohop_bridge:
        case Scenario::twohop_nobridge:
            return run_joint(corpus, init, JointConfig{config.kappa, config.T1, config.T2, config.eta1, config.eta2},
                             options);
        case Scenario::s_then_a:
        case Scenario::a_then_s:
            return run_sequential(corpus, init, scenario == Scenario::s_then_a ? Order::S_then_A : Order::A_then_S,
                                  SequentialConfig{config.T1, config.T2, config.T3, config.eta1, config.eta2,
                                                   config.eta3},
                                  options);
        case Scenario::end_to_end:
        case Scenario::kappa_sweep:
            return run_end_to_end(corpus, init, e2e_recipes(config.e2e_variant), kappa, config.e2e_iterations,
                                  config.e2e_eta, options);
        default:
            throw ConfigError("scenario", to_string(scenario) + " is not a transformer scenario");
    }
}

std::vector<GradReport> run_gradcheck(const ExperimentConfig& config) {
    std::vector<GradReport> reports;
    const std::uint64_t base = config.seeds.front();
    for (std::size_t i = 0; i < config.gc_configs; ++i) {
        const std::size_t dim = config.gc_dims[i % config.gc_dims.size()];
        const std::size_t m = config.gc_widths[(i / config.gc_dims.size()) % config.gc_widths.size()];
        const std::uint64_t seed = base + i;
        const auto inst = random_grad_instance(dim, m, seed, config.gc_scale);
        for (auto& r : finite_diff_check(inst.params, inst.example, config.gc_h, kAllGroups)) {
            r.seed = seed;
            reports.push_back(r);
        }
    }
    return reports;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentResult result;
    const std::string name = to_string(config.scenario);

    if (config.scenario == Scenario::gradcheck) {
        result.grad_reports = run_gradcheck(config);
        double worst = 0.0;
        for (const auto& r : result.grad_reports) worst = std::max(worst, r.max_rel_error);
        result.gradcheck_failed = !(worst < config.gc_tolerance);
        result.diagnostics.push_back("gradcheck: " + std::to_string(result.grad_reports.size()) +
                                     " group reports, max relative error " + format_number(worst));
        return result;
    }

    std::vector<Task> tasks;
    if (config.scenario == Scenario::kappa_sweep) {
        for (std::size_t k : config.kappas)
            for (auto s : config.seeds) tasks.push_back({s, k});
    } else {
        const std::size_t k = config.scenario == Scenario::deep_linear ? 0 : config.kappa;
        for (auto s : config.seeds) tasks.push_back({s, k});
    }

    if (config.scenario != Scenario::deep_linear) {
        const Corpus probe = build_corpus(config, config.scenario, config.seeds.front());
        const Recipe recipe = config.scenario == Scenario::twohop_bridge     ? Recipe::joint_twohop_bridge
                              : config.scenario == Scenario::twohop_nobridge ? Recipe::joint_twohop_nobridge
                                                                             : Recipe::joint_analogical;
        const std::size_t n = assemble_train(probe, recipe, std::max<std::size_t>(config.kappa, 1)).size();
        for (auto& line : regime_advisories(config.d, config.m, n, config.N, config.lambda, config.sigma0, config.eta1))
            result.diagnostics.push_back(line);
    }

    const auto outcomes = run_tasks(config, tasks);

    std::vector<std::size_t> kappas;
    for (const auto& o : outcomes) {
        result.rows.push_back(seed_row(name, o));
        result.any_diverged = result.any_diverged || o.diverged;
        for (const auto& d : o.diagnostics) result.diagnostics.push_back(d);
        if (std::find(kappas.begin(), kappas.end(), o.kappa) == kappas.end()) kappas.push_back(o.kappa);
    }
    for (std::size_t k : kappas) {
        std::vector<const SeedOutcome*> group;
        for (const auto& o : outcomes)
            if (o.kappa == k) group.push_back(&o);
        result.rows.push_back(aggregate_row(name, k, group));
    }
    // Seed rows ordered by seed, the aggregate closing each kappa block.
    std::stable_sort(result.rows.begin(), result.rows.end(), [](const ReportRow& a, const ReportRow& b) {
        const auto key = [](const ReportRow& r) {
            return std::make_tuple(r.scenario, r.kappa, r.seed ? *r.seed : std::numeric_limits<std::uint64_t>::max(),
                                   r.seed.has_value() ? 0 : 1);
        };
        return key(a) < key(b);
    });

    if (config.scenario == Scenario::deep_linear) {
        const std::size_t depth = outcomes.front().depth_similarity.size();
        for (std::size_t k = 0; k < depth; ++k) {
            std::vector<double> v;
            for (const auto& o : outcomes) v.push_back(o.depth_similarity[k].mean);
            const auto ms = mean_std(v);
            result.curve.push_back({k, ms.mean, ms.std});
        }
    }
    return result;
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
    if (config.out.empty()) throw ConfigError("out", "no output path");
    const std::string ext = config.format == ReportFormat::csv ? ".csv" : ".json";
    if (config.scenario == Scenario::gradcheck) {
        write_text(config.out, render_gradcheck(result.grad_reports, config.format));
    } else {
        emit_report(result.rows, config.format, config.out);
    }
    if (!result.curve.empty()) write_text(sibling_path(config.out, ".curve" + ext), render_curve(result.curve, config.format));
    write_text(sibling_path(config.out, ".config"), config.dump());
}

}  // namespace featlab
