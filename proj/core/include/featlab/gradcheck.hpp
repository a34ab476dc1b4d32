#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "featlab/embeddings.hpp"
#include "featlab/model.hpp"

namespace featlab {

struct GradReport {
    Group group = Group::Z;
    double max_rel_error = 0.0;
    /// (row, col) for Z and V; (k, l, j) for w_{k,l} entry j.
    std::vector<std::size_t> worst_coordinate;
    double max_abs_closed = 0.0;
    double max_abs_numeric = 0.0;
    /// Every closed-form and numeric entry sits below 1e-8, so relative
    /// errors are dominated by the 1e-10 denominator floor.
    bool small_denominator = false;
    std::size_t dim = 0;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    double h = 0.0;
};

std::string group_name(Group g);

/// Loss evaluated independently of the model code, with naive loops in
/// binary128 (libquadmath). Used as the finite-difference oracle.
long double reference_loss(const ModelParams& params, const LabeledExample& example);

/// Compare the closed-form gradients against central differences
/// (L(theta + h) - L(theta - h)) / 2h for every coordinate of the requested
/// groups. Relative error uses max(|closed|, |numeric|, 1e-10).
std::vector<GradReport> finite_diff_check(const ModelParams& params, const LabeledExample& example, double h,
                                          GroupSet groups);

/// Same check against a caller-supplied gradient bundle.
std::vector<GradReport> finite_diff_check(const ModelParams& params, const LabeledExample& example, double h,
                                          GroupSet groups, const Gradients& closed);

/// Seeded random instance for gradient checks: unit-norm orthogonal prompt
/// tokens, parameters N(0, scale^2).
struct GradInstance {
    ModelParams params;
    LabeledExample example;
};
GradInstance random_grad_instance(std::size_t dim, std::size_t m, std::uint64_t seed, double scale = 0.5,
                                  double lambda = 1.0);

}  // namespace featlab
