#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "featlab/model.hpp"

namespace featlab {

enum class Scenario {
    joint,
    s_then_a,
    a_then_s,
    twohop_bridge,
    twohop_nobridge,
    end_to_end,
    kappa_sweep,
    deep_linear,
    gradcheck,
};

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& s);

enum class ReportFormat { csv, json };

/// Fully resolved experiment settings. Defaults reproduce the one-layer
/// synthetic setup (N=100, d=427, m=50, lambda=20, sigma0=0.03, kappa=3,
/// T1=500, T2=T3=2000).
///
/// Config files are flat `key = value` lines; `#` starts a comment. Keys are
/// the field names below. List values are comma separated.
struct ExperimentConfig {
    Scenario scenario = Scenario::joint;

    std::size_t N = 100;
    std::size_t d = 427;
    std::size_t m = 50;
    double lambda = 20.0;
    double sigma0 = 0.03;
    std::size_t kappa = 3;
    std::size_t T1 = 500;
    std::size_t T2 = 2000;
    std::size_t T3 = 2000;
    double eta1 = 2.0;
    double eta2 = 10.0;
    double eta3 = 10.0;
    Activation activation = Activation::identity;

    // end-to-end runs (also used by the kappa sweep)
    std::string e2e_variant = "joint";  ///< joint | s_then_a | a_then_s
    std::size_t e2e_iterations = 1000;
    double e2e_eta = 2.0;
    std::vector<std::size_t> kappas = {1, 3, 5};

    // deep linear networks
    std::size_t dl_dim = 512;
    std::size_t dl_depth = 6;
    std::size_t dl_samples = 32;
    double dl_eta = 0.5;
    std::size_t dl_iterations = 0;  ///< 0: round(samples / (eta * depth))

    // gradient checks
    std::size_t gc_configs = 120;
    double gc_h = 1e-5;
    std::vector<std::size_t> gc_dims = {4, 8, 16};
    std::vector<std::size_t> gc_widths = {1, 3};
    double gc_scale = 0.5;
    double gc_tolerance = 1e-6;

    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::size_t log_every = 10;
    std::size_t jobs = 1;
    bool record_runtime = false;

    std::string out;
    ReportFormat format = ReportFormat::csv;

    /// Apply one key/value pair; throws ConfigError naming the key.
    void set(const std::string& key, const std::string& value);
    /// Throws ConfigError for the first invalid field.
    void validate() const;
    /// `key = value` lines for every field, readable back by `load_config`.
    std::string dump() const;
};

/// Parse `key = value` text on top of `base`.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Seeds base, base+1, ..., base+reps-1.
std::vector<std::uint64_t> seed_range(std::uint64_t base, std::size_t reps);

}  // namespace featlab
