#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "featlab/config.hpp"
#include "featlab/datasets.hpp"
#include "featlab/embeddings.hpp"
#include "featlab/gradcheck.hpp"
#include "featlab/report.hpp"
#include "featlab/training.hpp"

namespace featlab {

/// Random stream ids used by the harness; corpus and init draw from
/// independent streams so changing one never shifts the other.
inline constexpr std::uint64_t kCorpusStream = 1;
inline constexpr std::uint64_t kInitStream = 2;
inline constexpr std::uint64_t kDeepLinearStream = 3;

struct ExperimentResult {
    std::vector<ReportRow> rows;          ///< per-seed rows then aggregates, sorted
    std::vector<CurveRow> curve;          ///< deep_linear only
    std::vector<GradReport> grad_reports; ///< gradcheck only
    std::vector<std::string> diagnostics;
    bool any_diverged = false;
    bool gradcheck_failed = false;
};

/// Corpus for a (non deep-linear, non gradcheck) scenario and seed.
Corpus build_corpus(const ExperimentConfig& config, Scenario scenario, std::uint64_t seed);
ModelParams build_init(const ExperimentConfig& config, std::uint64_t seed);

/// Train one seed of a transformer scenario. For kappa_sweep/end_to_end the
/// given kappa is used; other scenarios take config.kappa.
RunResult run_seed(const ExperimentConfig& config, Scenario scenario, std::uint64_t seed, std::size_t kappa,
                   const TrainOptions& options);

/// Gradient checks over config.gc_configs instances cycling through
/// gc_dims x gc_widths, seeds drawn from config.seeds.front().
std::vector<GradReport> run_gradcheck(const ExperimentConfig& config);

/// Validate, run every seed (config.jobs threads), aggregate.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Write the report to config.out plus `<stem>.config` (resolved config) and,
/// for deep_linear, `<stem>.curve.<ext>`.
void write_outputs(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace featlab
