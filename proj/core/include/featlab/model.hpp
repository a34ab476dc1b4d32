#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "featlab/embeddings.hpp"

namespace featlab {

enum class Activation { identity, relu };

std::string to_string(Activation a);
Activation parse_activation(const std::string& s);

/// Two-token prompt; the last token is the attention query.
struct Prompt {
    Vector first;
    Vector last;
};

struct LabeledExample {
    Prompt prompt;
    std::size_t label = 0;
};

struct ForwardTrace {
    Eigen::Vector2d alpha;  ///< attention weights over (first, last)
    Vector x_a;             ///< attended mixture X * alpha
    Vector o1;              ///< V * x_a
    Vector pre;             ///< per-neuron <w_{k,l}, o1>, length dim*m (relu mode only)
    Vector f;               ///< output logits
    Vector logit;           ///< softmax(f)
};

/// Parameter groups selectable for gradients and updates.
enum class Group : unsigned { Z = 1u, V = 2u, W = 4u };

class GroupSet {
public:
    constexpr GroupSet() = default;
    constexpr GroupSet(std::initializer_list<Group> groups) {
        for (Group g : groups) bits_ |= static_cast<unsigned>(g);
    }
    constexpr bool has(Group g) const { return (bits_ & static_cast<unsigned>(g)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool operator==(const GroupSet&) const = default;
    std::string str() const;
    static GroupSet parse(const std::string& s);  ///< e.g. "ZV", "W", "ZVW"

private:
    unsigned bits_ = 0;
};

inline constexpr GroupSet kAllGroups{Group::Z, Group::V, Group::W};

/// Gradient bundle; only requested groups are populated.
struct Gradients {
    std::optional<Matrix> Z;
    std::optional<Matrix> V;
    std::optional<Matrix> W;  ///< same row layout as ModelParams::W
};

/// Numerically stable softmax (max-subtracted).
Vector softmax(const Vector& v);
double log_sum_exp(const Vector& v);

Eigen::Vector2d attention_weights(const Matrix& Z, const Prompt& prompt);

ForwardTrace forward(const ModelParams& params, const Prompt& prompt, Activation activation);

/// Cross-entropy -log softmax(f)_y.
double loss(const ModelParams& params, const LabeledExample& example, Activation activation);

/// Closed-form per-example gradients. Identity mode follows the class-mean
/// factorisation f = lambda * mean(W) * V * X * alpha; relu mode uses the same
/// chain rule with subgradient 0 at the kink.
Gradients grads(const ModelParams& params, const LabeledExample& example, GroupSet groups,
                Activation activation);

/// Smallest index attaining max_k f_k.
std::size_t predict(const ModelParams& params, const Prompt& prompt, Activation activation);

/// f_y - max_{k != y} f_k. Correct only when strictly positive.
double margin(const Vector& f, std::size_t label);
inline bool is_correct(const Vector& f, std::size_t label) { return margin(f, label) > 0.0; }

}  // namespace featlab
