#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "featlab/batch.hpp"
#include "featlab/datasets.hpp"
#include "featlab/metrics.hpp"
#include "featlab/model.hpp"

namespace featlab {

struct Stage {
    GroupSet groups;
    std::size_t iterations = 0;
    double step_size = 0.0;
};

struct Phase {
    Recipe recipe = Recipe::joint_analogical;
    std::size_t kappa = 1;
    std::vector<Stage> stages;
};

/// Ordered phases; each phase trains a recipe's multiset through its stages.
struct Schedule {
    std::vector<Phase> phases;

    void validate() const;
    std::size_t total_iterations() const;
};

struct TrainOptions {
    Activation activation = Activation::identity;
    std::size_t log_every = 10;
    /// Abort when any |f_k| exceeds this.
    double divergence_limit = 1e6;
    /// Take snapshots every `log_every` steps while W is still at its
    /// initial value (the span diagnostic is only defined there).
    bool snapshot_frozen_w = true;
    /// Slack for the stage-2 monotone-loss diagnostic.
    double monotone_slack = 1e-9;
};

struct BestIterate {
    std::size_t iteration = 0;
    double loss = 0.0;
    double test_error = 1.0;
};

struct RunResult {
    ModelParams final_params;
    std::vector<std::pair<std::size_t, double>> loss_trace;
    std::vector<MetricSnapshot> snapshots;
    double train_loss = 0.0;  ///< on the last phase's multiset, final iterate
    double test_error = 1.0;
    std::vector<double> margins;  ///< f_y - max_{k != y} f_k on the test set
    MeanStd feature_sim;
    std::vector<double> feature_sims;
    std::optional<BestIterate> best;
    std::vector<std::string> diagnostics;
    std::size_t iterations = 0;
};

/// One full-batch gradient-descent step on the listed groups. Other groups
/// are returned bit-identical. Throws DivergenceError carrying `iteration`
/// when logits blow past `divergence_limit` or the gradient is not finite.
ModelParams gd_step(const ModelParams& params, const Batch& batch, GroupSet groups, double step_size,
                    Activation activation, std::size_t iteration = 0, double divergence_limit = 1e6);
ModelParams gd_step(const ModelParams& params, const Corpus& corpus, const TrainMultiset& multiset,
                    GroupSet groups, double step_size, Activation activation);

/// Mean weighted cross-entropy of `params` over a multiset.
double train_loss(const ModelParams& params, const Corpus& corpus, const TrainMultiset& multiset,
                  Activation activation);

RunResult run_schedule(const Corpus& corpus, const ModelParams& init, const Schedule& schedule,
                       const TrainOptions& options = {});

struct JointConfig {
    std::size_t kappa = 3;
    std::size_t T1 = 500;
    std::size_t T2 = 2000;
    double eta1 = 2.0;
    double eta2 = 10.0;
};

/// Stage 1 trains {Z, V} with W frozen, Stage 2 trains {W} with Z, V frozen,
/// both on the joint multiset of the corpus (analogical or two-hop).
RunResult run_joint(const Corpus& corpus, const ModelParams& init, const JointConfig& config,
                    const TrainOptions& options = {});

enum class Order { S_then_A, A_then_S };
std::string to_string(Order o);

struct SequentialConfig {
    std::size_t T1 = 500;
    std::size_t T2 = 2000;
    std::size_t T3 = 2000;
    double eta1 = 2.0;
    double eta2 = 10.0;
    double eta3 = 10.0;
};

/// Phase 1 on S1+S2 (or S1+S3) with the two-stage scheme, then Phase 2 on S3
/// (or S2) training {W} only.
RunResult run_sequential(const Corpus& corpus, const ModelParams& init, Order order,
                         const SequentialConfig& config, const TrainOptions& options = {});

/// Train {Z, V, W} together for `iterations` steps on each recipe in turn.
RunResult run_end_to_end(const Corpus& corpus, const ModelParams& init, const std::vector<Recipe>& recipes,
                         std::size_t kappa, std::size_t iterations, double step_size,
                         const TrainOptions& options = {});

Schedule joint_schedule(const Corpus& corpus, const JointConfig& config);
Schedule sequential_schedule(Order order, const SequentialConfig& config);

/// Advisory check of the small-init / small-step / large-dimension regime
/// with unit constant. Returns human-readable lines; never throws.
std::vector<std::string> regime_advisories(std::size_t dim, std::size_t m, std::size_t n, std::size_t N,
                                           double lambda, double sigma0, double step_size, double delta = 0.05);

}  // namespace featlab
