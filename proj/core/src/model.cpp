#include "featlab/model.hpp"

#include <cmath>
#include <limits>

#include "featlab/error.hpp"

namespace featlab {

std::string to_string(Activation a) {
    return a == Activation::identity ? "identity" : "relu";
}

Activation parse_activation(const std::string& s) {
    if (s == "identity" || s == "linear") return Activation::identity;
    if (s == "relu") return Activation::relu;
    throw ParameterError("unknown activation '" + s + "'");
}

std::string GroupSet::str() const {
    std::string out;
    if (has(Group::Z)) out += 'Z';
    if (has(Group::V)) out += 'V';
    if (has(Group::W)) out += 'W';
    return out;
}

GroupSet GroupSet::parse(const std::string& s) {
    GroupSet set;
    for (char c : s) {
        switch (c) {
            case 'Z': case 'z': set.bits_ |= static_cast<unsigned>(Group::Z); break;
            case 'V': case 'v': set.bits_ |= static_cast<unsigned>(Group::V); break;
            case 'W': case 'w': set.bits_ |= static_cast<unsigned>(Group::W); break;
            case ',': case ' ': break;
            default: throw ParameterError("unknown parameter group '" + std::string(1, c) + "'");
        }
    }
    return set;
}

double log_sum_exp(const Vector& v) {
    const double top = v.maxCoeff();
    return top + std::log((v.array() - top).exp().sum());
}

Vector softmax(const Vector& v) {
    Vector e = (v.array() - v.maxCoeff()).exp();
    return e / e.sum();
}

namespace {

void check_prompt(std::size_t d, const Prompt& prompt) {
    if (static_cast<std::size_t>(prompt.first.size()) != d || static_cast<std::size_t>(prompt.last.size()) != d)
        throw ShapeError("prompt tokens must have length " + std::to_string(d));
}

void check_label(std::size_t d, std::size_t label) {
    if (label >= d)
        throw IndexError("label " + std::to_string(label) + " out of range for " + std::to_string(d) + " classes");
}

}  // namespace

Eigen::Vector2d attention_weights(const Matrix& Z, const Prompt& prompt) {
    const auto d = static_cast<std::size_t>(Z.rows());
    if (Z.cols() != Z.rows()) throw ShapeError("Z must be square");
    check_prompt(d, prompt);
    const Vector zq = Z * prompt.last;
    const double scale = std::sqrt(static_cast<double>(d));
    const double s1 = prompt.first.dot(zq) / scale;
    const double s2 = prompt.last.dot(zq) / scale;
    const double top = std::max(s1, s2);
    const double e1 = std::exp(s1 - top);
    const double e2 = std::exp(s2 - top);
    return Eigen::Vector2d(e1 / (e1 + e2), e2 / (e1 + e2));
}

ForwardTrace forward(const ModelParams& params, const Prompt& prompt, Activation activation) {
    params.validate();
    const std::size_t d = params.dim();
    check_prompt(d, prompt);

    ForwardTrace t;
    t.alpha = attention_weights(params.Z, prompt);
    t.x_a = t.alpha(0) * prompt.first + t.alpha(1) * prompt.last;
    t.o1 = params.V * t.x_a;
    const double scale = params.lambda / static_cast<double>(params.m);
    if (activation == Activation::identity) {
        t.f = params.lambda * (params.class_mean() * t.o1);
    } else {
        t.pre = params.W * t.o1;
        t.f.resize(static_cast<Eigen::Index>(d));
        const auto width = static_cast<Eigen::Index>(params.m);
        for (Eigen::Index k = 0; k < t.f.size(); ++k)
            t.f(k) = scale * t.pre.segment(k * width, width).cwiseMax(0.0).sum();
    }
    t.logit = softmax(t.f);
    return t;
}

double loss(const ModelParams& params, const LabeledExample& example, Activation activation) {
    check_label(params.dim(), example.label);
    const ForwardTrace t = forward(params, example.prompt, activation);
    return log_sum_exp(t.f) - t.f(static_cast<Eigen::Index>(example.label));
}

Gradients grads(const ModelParams& params, const LabeledExample& example, GroupSet groups,
                Activation activation) {
    check_label(params.dim(), example.label);
    const ForwardTrace t = forward(params, example.prompt, activation);
    const auto d = static_cast<Eigen::Index>(params.dim());
    const auto width = static_cast<Eigen::Index>(params.m);
    const double lam = params.lambda;
    const double per_neuron = lam / static_cast<double>(params.m);

    // residual = logit - e_y
    Vector residual = t.logit;
    residual(static_cast<Eigen::Index>(example.label)) -= 1.0;

    Gradients g;
    Vector d_o1;  // dL/d o1
    Matrix mean;
    if (activation == Activation::identity) {
        mean = params.class_mean();
        d_o1 = lam * (mean.transpose() * residual);
    } else {
        d_o1 = Vector::Zero(d);
        for (Eigen::Index k = 0; k < d; ++k)
            for (Eigen::Index l = 0; l < width; ++l)
                if (t.pre(k * width + l) > 0.0)
                    d_o1 += per_neuron * residual(k) * params.W.row(k * width + l).transpose();
    }

    if (groups.has(Group::W)) {
        Matrix gw(d * width, d);
        for (Eigen::Index k = 0; k < d; ++k) {
            for (Eigen::Index l = 0; l < width; ++l) {
                const bool active = activation == Activation::identity || t.pre(k * width + l) > 0.0;
                if (active)
                    gw.row(k * width + l) = (per_neuron * residual(k)) * t.o1.transpose();
                else
                    gw.row(k * width + l).setZero();
            }
        }
        g.W = std::move(gw);
    }
    if (groups.has(Group::V)) g.V = d_o1 * t.x_a.transpose();
    if (groups.has(Group::Z)) {
        const Prompt& p = example.prompt;
        const Vector d_xa = params.V.transpose() * d_o1;
        const double c1 = p.first.dot(d_xa);
        const double c2 = p.last.dot(d_xa);
        const double mix = t.alpha(0) * c1 + t.alpha(1) * c2;
        const double ds1 = t.alpha(0) * (c1 - mix);
        const double ds2 = t.alpha(1) * (c2 - mix);
        const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
        const Vector gz = inv_sqrt_d * (ds1 * p.first + ds2 * p.last);
        g.Z = gz * p.last.transpose();
    }
    return g;
}

double margin(const Vector& f, std::size_t label) {
    const auto y = static_cast<Eigen::Index>(label);
    if (y >= f.size()) throw IndexError("label out of range");
    double best_other = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < f.size(); ++k)
        if (k != y) best_other = std::max(best_other, f(k));
    return f(y) - best_other;
}

std::size_t predict(const ModelParams& params, const Prompt& prompt, Activation activation) {
    const ForwardTrace t = forward(params, prompt, activation);
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < t.f.size(); ++k)
        if (t.f(k) > t.f(best)) best = k;
    return static_cast<std::size_t>(best);
}

}  // namespace featlab
