#include "featlab/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <quadmath.h>

#include "featlab/error.hpp"
#include "featlab/rng.hpp"

namespace featlab {

std::string group_name(Group g) {
    switch (g) {
        case Group::Z: return "Z";
        case Group::V: return "V";
        case Group::W: return "W";
    }
    return "?";
}

namespace {

// The oracle runs in binary128: with h = 1e-5 the central difference loses
// about eps/h of absolute accuracy, which in long double is ~1e-14 and
// swamps coordinates whose gradient sits near 1e-9.
using Quad = __float128;

struct QuadMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<Quad> data;
    Quad& operator()(std::size_t r, std::size_t c) { return data[c * rows + r]; }
    Quad operator()(std::size_t r, std::size_t c) const { return data[c * rows + r]; }
};

QuadMatrix widen(const Matrix& m) {
    QuadMatrix q{static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()), {}};
    q.data.resize(q.rows * q.cols);
    for (std::size_t i = 0; i < q.data.size(); ++i) q.data[i] = m.data()[i];
    return q;
}

std::vector<Quad> widen(const Vector& v) { return std::vector<Quad>(v.data(), v.data() + v.size()); }

struct QuadParams {
    QuadMatrix Z, V, W;
    Quad lambda;
    std::size_t m;
};

QuadParams widen(const ModelParams& p) { return QuadParams{widen(p.Z), widen(p.V), widen(p.W), p.lambda, p.m}; }

Quad eval_loss(const QuadParams& p, const std::vector<Quad>& x1, const std::vector<Quad>& x2, std::size_t y) {
    const std::size_t d = p.Z.rows;
    const Quad root_d = sqrtq(static_cast<Quad>(d));
    Quad s1 = 0, s2 = 0;
    for (std::size_t i = 0; i < d; ++i) {
        Quad zq = 0;
        for (std::size_t j = 0; j < d; ++j) zq += p.Z(i, j) * x2[j];
        s1 += x1[i] * zq;
        s2 += x2[i] * zq;
    }
    s1 /= root_d;
    s2 /= root_d;
    const Quad top = s1 > s2 ? s1 : s2;
    const Quad e1 = expq(s1 - top), e2 = expq(s2 - top);
    const Quad a1 = e1 / (e1 + e2), a2 = e2 / (e1 + e2);

    std::vector<Quad> o1(d, 0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) o1[i] += p.V(i, j) * (a1 * x1[j] + a2 * x2[j]);

    std::vector<Quad> f(d, 0);
    for (std::size_t k = 0; k < d; ++k) {
        Quad acc = 0;
        for (std::size_t l = 0; l < p.m; ++l)
            for (std::size_t j = 0; j < d; ++j) acc += p.W(k * p.m + l, j) * o1[j];
        f[k] = p.lambda / static_cast<Quad>(p.m) * acc;
    }
    Quad fmax = f[0];
    for (Quad v : f) fmax = v > fmax ? v : fmax;
    Quad z = 0;
    for (Quad v : f) z += expq(v - fmax);
    return fmax + logq(z) - f[y];
}

GradReport check_group(const ModelParams& params, const LabeledExample& ex, double h, Group group,
                       const Matrix& closed) {
    QuadParams qp = widen(params);
    const auto x1 = widen(ex.prompt.first);
    const auto x2 = widen(ex.prompt.last);
    QuadMatrix& target = group == Group::Z ? qp.Z : group == Group::V ? qp.V : qp.W;
    if (static_cast<std::size_t>(closed.rows()) != target.rows || static_cast<std::size_t>(closed.cols()) != target.cols)
        throw ShapeError("closed-form gradient has the wrong shape for group " + group_name(group));

    GradReport report;
    report.group = group;
    report.h = h;
    report.dim = params.dim();
    report.m = params.m;
    const Quad step = h;
    for (std::size_t c = 0; c < target.cols; ++c) {
        for (std::size_t r = 0; r < target.rows; ++r) {
            const Quad saved = target(r, c);
            target(r, c) = saved + step;
            const Quad up = eval_loss(qp, x1, x2, ex.label);
            target(r, c) = saved - step;
            const Quad down = eval_loss(qp, x1, x2, ex.label);
            target(r, c) = saved;
            const double numeric = static_cast<double>((up - down) / (2 * step));
            const double exact = closed(r, c);
            const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-10});
            const double rel = std::abs(exact - numeric) / denom;
            report.max_abs_closed = std::max(report.max_abs_closed, std::abs(exact));
            report.max_abs_numeric = std::max(report.max_abs_numeric, std::abs(numeric));
            if (rel > report.max_rel_error || report.worst_coordinate.empty()) {
                report.max_rel_error = std::max(rel, report.max_rel_error);
                if (group == Group::W)
                    report.worst_coordinate = {r / params.m, r % params.m, c};
                else
                    report.worst_coordinate = {r, c};
            }
        }
    }
    report.small_denominator = report.max_abs_closed < 1e-8 && report.max_abs_numeric < 1e-8;
    return report;
}

}  // namespace

long double reference_loss(const ModelParams& params, const LabeledExample& example) {
    if (example.label >= params.dim()) throw IndexError("label out of range");
    return static_cast<long double>(
        eval_loss(widen(params), widen(example.prompt.first), widen(example.prompt.last), example.label));
}

std::vector<GradReport> finite_diff_check(const ModelParams& params, const LabeledExample& example, double h,
                                          GroupSet groups, const Gradients& closed) {
    if (!(h >= 1e-7 && h <= 1e-3)) throw ParameterError("finite-difference step must lie in [1e-7, 1e-3]");
    params.validate();
    std::vector<GradReport> out;
    const std::pair<Group, const std::optional<Matrix>*> all[] = {
        {Group::Z, &closed.Z}, {Group::V, &closed.V}, {Group::W, &closed.W}};
    for (const auto& [g, grad] : all) {
        if (!groups.has(g)) continue;
        if (!grad->has_value()) throw ParameterError("closed-form gradient missing for group " + group_name(g));
        out.push_back(check_group(params, example, h, g, **grad));
    }
    return out;
}

std::vector<GradReport> finite_diff_check(const ModelParams& params, const LabeledExample& example, double h,
                                          GroupSet groups) {
    return finite_diff_check(params, example, h, groups, grads(params, example, groups, Activation::identity));
}

GradInstance random_grad_instance(std::size_t dim, std::size_t m, std::uint64_t seed, double scale, double lambda) {
    Rng token_rng = Rng::derive(seed, 11);
    Rng param_rng = Rng::derive(seed, 12);
    const EmbeddingTable tokens = sample_orthonormal_system(2, dim, token_rng);
    GradInstance inst;
    inst.params = init_params(dim, m, lambda, scale, param_rng);
    inst.example.prompt = Prompt{tokens.vector(0), tokens.vector(1)};
    inst.example.label = static_cast<std::size_t>(param_rng.next_u64() % dim);
    return inst;
}

}  // namespace featlab
