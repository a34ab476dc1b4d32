#include "featlab/training.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "featlab/error.hpp"

namespace featlab {

void Schedule::validate() const {
    if (phases.empty()) throw ParameterError("schedule has no phases");
    for (const auto& p : phases) {
        if (p.kappa == 0) throw ParameterError("schedule phase kappa must be at least 1");
        for (const auto& s : p.stages) {
            if (s.groups.empty()) throw ParameterError("schedule stage trains no parameter group");
            if (!(s.step_size > 0.0) || !std::isfinite(s.step_size))
                throw ParameterError("schedule stage step size must be positive");
        }
    }
}

std::size_t Schedule::total_iterations() const {
    std::size_t total = 0;
    for (const auto& p : phases)
        for (const auto& s : p.stages) total += s.iterations;
    return total;
}

std::string to_string(Order o) {
    return o == Order::S_then_A ? "S_then_A" : "A_then_S";
}

namespace {

void apply_class_update(Matrix& W, const Matrix& class_grad, double scale, std::size_t m) {
    const auto width = static_cast<Eigen::Index>(m);
    for (Eigen::Index k = 0; k < class_grad.rows(); ++k)
        W.middleRows(k * width, width).rowwise() -= scale * class_grad.row(k);
}

void check_gradients(const BatchGradients& g, GroupSet groups, std::size_t iteration) {
    if ((groups.has(Group::Z) && !g.Z.allFinite()) || (groups.has(Group::V) && !g.V.allFinite()) ||
        (groups.has(Group::W) && !g.W.allFinite()))
        throw DivergenceError(iteration, "non-finite gradient");
}

void check_loss(const BatchLoss& loss, double limit, std::size_t iteration) {
    if (!std::isfinite(loss.value) || !(loss.max_abs_logit <= limit)) {
        std::ostringstream os;
        os << "max |f_k| = " << loss.max_abs_logit << " exceeds " << limit;
        throw DivergenceError(iteration, os.str());
    }
}

}  // namespace

ModelParams gd_step(const ModelParams& params, const Batch& batch, GroupSet groups, double step_size,
                    Activation activation, std::size_t iteration, double divergence_limit) {
    params.validate();
    const Matrix mean = activation == Activation::identity ? params.class_mean() : Matrix();
    const FeatureView feature{activation == Activation::identity ? mean : params.W, activation, params.lambda,
                              params.m};
    BatchForward fw;
    batch_attention(params.Z, batch, fw);
    batch_values(params.V, fw);
    batch_logits(feature, fw);
    const BatchLoss loss = batch_loss(batch, fw.f);
    check_loss(loss, divergence_limit, iteration);
    const BatchGradients g = batch_gradients(params.V, feature, batch, fw, loss.residual, groups);
    check_gradients(g, groups, iteration);

    ModelParams out = params;
    if (groups.has(Group::Z)) out.Z -= step_size * g.Z;
    if (groups.has(Group::V)) out.V -= step_size * g.V;
    if (groups.has(Group::W)) {
        if (activation == Activation::identity)
            apply_class_update(out.W, g.W, step_size / static_cast<double>(params.m), params.m);
        else
            out.W -= step_size * g.W;
    }
    return out;
}

ModelParams gd_step(const ModelParams& params, const Corpus& corpus, const TrainMultiset& multiset,
                    GroupSet groups, double step_size, Activation activation) {
    return gd_step(params, make_batch(corpus, multiset), groups, step_size, activation);
}

double train_loss(const ModelParams& params, const Corpus& corpus, const TrainMultiset& multiset,
                  Activation activation) {
    params.validate();
    const Batch batch = make_batch(corpus, multiset);
    const Matrix mean = activation == Activation::identity ? params.class_mean() : Matrix();
    const FeatureView feature{activation == Activation::identity ? mean : params.W, activation, params.lambda,
                              params.m};
    BatchForward fw;
    batch_attention(params.Z, batch, fw);
    batch_values(params.V, fw);
    batch_logits(feature, fw);
    return batch_loss(batch, fw.f).value;
}

std::vector<std::string> regime_advisories(std::size_t dim, std::size_t m, std::size_t n, std::size_t N,
                                           double lambda, double sigma0, double step_size, double delta) {
    const double d = static_cast<double>(dim);
    const double md = static_cast<double>(m);
    const double log_d = std::log(d);
    std::vector<std::string> out;
    auto line = [&](const char* name, bool ok, double lhs, const char* op, double rhs) {
        std::ostringstream os;
        os << "regime " << name << ": " << (ok ? "satisfied" : "violated") << " (" << lhs << ' ' << op << ' '
           << rhs << ", unit constant)";
        out.push_back(os.str());
    };
    const double dim_need = std::max(std::log(4.0 * md * d / delta),
                                     md * md * md * static_cast<double>(n) * static_cast<double>(N) *
                                         static_cast<double>(N) / std::pow(lambda, 6));
    line("large-dimension", d >= dim_need, d, ">=", dim_need);
    const double sigma_max = std::sqrt(static_cast<double>(n) * md) * log_d / (d * lambda);
    line("small-init", sigma0 <= sigma_max, sigma0, "<=", sigma_max);
    const double eta_max = lambda * lambda / (static_cast<double>(N) * md * d * sigma0 * sigma0 * log_d * log_d);
    line("small-step", step_size <= eta_max, step_size, "<=", eta_max);
    return out;
}

namespace {

/// Stateful runner for a schedule. With identity activation the feature
/// layer is trained through its class means: every w_{k,l} of class k gets
/// the same update, so the mean moves by that update and the full stack is
/// brought up to date at stage boundaries.
class Trainer {
public:
    Trainer(const Corpus& corpus, const ModelParams& init, const TrainOptions& options)
        : corpus_(corpus), options_(options), params_(init), V0_(init.V), W0_(init.W) {
        params_.validate();
        if (init.dim() != corpus.dim()) throw ShapeError("model dim does not match corpus embeddings");
        if (options_.activation == Activation::identity) {
            mean_ = params_.class_mean();
            pending_ = Matrix::Zero(mean_.rows(), mean_.cols());
        }
        test_batch_ = make_batch(corpus, corpus.test_set);
        pairs_ = corpus.similarity_pairs();
    }

    RunResult run(const Schedule& schedule) {
        schedule.validate();
        result_ = RunResult{};
        Batch last_batch;
        for (std::size_t p = 0; p < schedule.phases.size(); ++p) {
            const Phase& phase = schedule.phases[p];
            const Batch batch = make_batch(corpus_, assemble_train(corpus_, phase.recipe, phase.kappa));
            for (std::size_t s = 0; s < phase.stages.size(); ++s) {
                const bool final_stage = p + 1 == schedule.phases.size() && s + 1 == phase.stages.size();
                run_stage(batch, phase.stages[s], "phase" + std::to_string(p + 1) + "/stage" + std::to_string(s + 1),
                          final_stage);
            }
            if (p + 1 == schedule.phases.size()) last_batch = batch;
        }
        materialize();
        result_.final_params = params_;
        result_.iterations = iteration_;

        BatchForward fw = forward(last_batch);
        result_.train_loss = batch_loss(last_batch, fw.f).value;
        evaluate_test(result_.test_error, &result_.margins);
        result_.feature_sims = feature_similarities(params_.V, corpus_.embeddings, pairs_);
        result_.feature_sim = mean_std(result_.feature_sims);
        return std::move(result_);
    }

private:
    FeatureView feature() const {
        return FeatureView{options_.activation == Activation::identity ? mean_ : params_.W, options_.activation,
                           params_.lambda, params_.m};
    }

    BatchForward forward(const Batch& batch) const {
        BatchForward fw;
        batch_attention(params_.Z, batch, fw);
        batch_values(params_.V, fw);
        batch_logits(feature(), fw);
        return fw;
    }

    void materialize() {
        if (options_.activation != Activation::identity || !pending_dirty_) return;
        apply_class_update(params_.W, pending_, -1.0, params_.m);
        pending_.setZero();
        pending_dirty_ = false;
    }

    void evaluate_test(double& error, std::vector<double>* margins) const {
        const BatchForward fw = forward(test_batch_);
        std::size_t wrong = 0;
        if (margins) margins->clear();
        for (Eigen::Index i = 0; i < fw.f.cols(); ++i) {
            const double mg = margin(fw.f.col(i), test_batch_.labels[static_cast<std::size_t>(i)]);
            if (!(mg > 0.0)) ++wrong;
            if (margins) margins->push_back(mg);
        }
        error = static_cast<double>(wrong) / static_cast<double>(fw.f.cols());
    }

    void snapshot(const std::string& tag, double loss, const Batch& batch, const BatchForward& fw) {
        MetricSnapshot snap;
        snap.iteration = iteration_;
        snap.tag = tag;
        snap.train_loss = loss;
        snap.feature_sim = mean_std(feature_similarities(params_.V, corpus_.embeddings, pairs_));
        const Eigen::ArrayXd ratio = fw.alpha_first / fw.alpha_last;
        snap.attention_min = ratio.minCoeff();
        snap.attention_max = ratio.maxCoeff();
        if (w_at_init_) {
            if (!span_) span_.emplace(W0_);
            // Tracked tokens are the prompt tokens of the stage. Any token
            // orthogonal to all of them has an exactly zero update, and its
            // rounding noise would make the relative residual meaningless.
            const Matrix dV = params_.V - V0_;
            double worst = 0.0;
            for (const Matrix* tokens : {&batch.entity, &batch.relation}) {
                const Matrix delta = dV * *tokens;
                for (Eigen::Index j = 0; j < delta.cols(); ++j)
                    worst = std::max(worst, span_->relative_residual(delta.col(j)));
            }
            snap.span_residual = worst;
        }
        double err = 1.0;
        evaluate_test(err, nullptr);
        snap.test_error = err;
        result_.snapshots.push_back(std::move(snap));
    }

    void run_stage(const Batch& batch, const Stage& stage, const std::string& tag, bool final_stage) {
        const bool train_z = stage.groups.has(Group::Z);
        const bool train_v = stage.groups.has(Group::V);
        const bool train_w = stage.groups.has(Group::W);
        const bool identity = options_.activation == Activation::identity;
        const double scale_w = stage.step_size / static_cast<double>(params_.m);
        const bool check_monotone = identity && train_w && !train_z && !train_v;

        if (train_w) w_at_init_ = false;

        BatchForward fw;
        bool fresh = false;
        double previous = std::numeric_limits<double>::infinity();
        std::size_t monotone_violations = 0;

        for (std::size_t t = 0; t < stage.iterations; ++t) {
            if (!fresh || train_z) {
                batch_attention(params_.Z, batch, fw);
                batch_values(params_.V, fw);
            } else if (train_v) {
                batch_values(params_.V, fw);
            }
            fresh = true;
            batch_logits(feature(), fw);
            const BatchLoss loss = batch_loss(batch, fw.f);
            check_loss(loss, options_.divergence_limit, iteration_);

            if (check_monotone && loss.value > previous + options_.monotone_slack) ++monotone_violations;
            previous = loss.value;

            if (options_.log_every > 0 && iteration_ % options_.log_every == 0) {
                result_.loss_trace.emplace_back(iteration_, loss.value);
                if (final_stage && (!result_.best || loss.value < result_.best->loss)) {
                    BestIterate best{iteration_, loss.value, 1.0};
                    evaluate_test(best.test_error, nullptr);
                    result_.best = best;
                }
                if (options_.snapshot_frozen_w && w_at_init_ && t > 0) snapshot(tag, loss.value, batch, fw);
            }

            const BatchGradients g = batch_gradients(params_.V, feature(), batch, fw, loss.residual, stage.groups);
            check_gradients(g, stage.groups, iteration_);
            if (train_z) params_.Z -= stage.step_size * g.Z;
            if (train_v) params_.V -= stage.step_size * g.V;
            if (train_w) {
                if (identity) {
                    mean_ -= scale_w * g.W;
                    pending_ -= scale_w * g.W;
                    pending_dirty_ = true;
                } else {
                    params_.W -= stage.step_size * g.W;
                }
            }
            ++iteration_;
        }

        if (train_w) materialize();
        if (monotone_violations > 0)
            result_.diagnostics.push_back(tag + ": training loss increased on " + std::to_string(monotone_violations) +
                                          " step(s) of a feature-layer stage");

        const BatchForward end = forward(batch);
        const BatchLoss loss = batch_loss(batch, end.f);
        check_loss(loss, options_.divergence_limit, iteration_);
        result_.loss_trace.emplace_back(iteration_, loss.value);
        if (final_stage && (!result_.best || loss.value < result_.best->loss)) {
            BestIterate best{iteration_, loss.value, 1.0};
            evaluate_test(best.test_error, nullptr);
            result_.best = best;
        }
        snapshot(tag + " end", loss.value, batch, end);
    }

    const Corpus& corpus_;
    TrainOptions options_;
    ModelParams params_;
    Matrix V0_;
    Matrix W0_;
    Matrix mean_;
    Matrix pending_;
    bool pending_dirty_ = false;
    bool w_at_init_ = true;
    std::optional<SpanProjector> span_;
    Batch test_batch_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
    std::size_t iteration_ = 0;
    RunResult result_;
};

Recipe joint_recipe(const Corpus& corpus) {
    if (corpus.kind == TaskKind::analogical) return Recipe::joint_analogical;
    return corpus.has_bridge ? Recipe::joint_twohop_bridge : Recipe::joint_twohop_nobridge;
}

}  // namespace

RunResult run_schedule(const Corpus& corpus, const ModelParams& init, const Schedule& schedule,
                       const TrainOptions& options) {
    Trainer trainer(corpus, init, options);
    return trainer.run(schedule);
}

Schedule joint_schedule(const Corpus& corpus, const JointConfig& config) {
    Schedule s;
    s.phases.push_back(Phase{joint_recipe(corpus), config.kappa,
                             {Stage{GroupSet{Group::Z, Group::V}, config.T1, config.eta1},
                              Stage{GroupSet{Group::W}, config.T2, config.eta2}}});
    return s;
}

Schedule sequential_schedule(Order order, const SequentialConfig& config) {
    const bool s_first = order == Order::S_then_A;
    Schedule s;
    s.phases.push_back(Phase{s_first ? Recipe::phase1_S1S2 : Recipe::phase1_S1S3, 1,
                             {Stage{GroupSet{Group::Z, Group::V}, config.T1, config.eta1},
                              Stage{GroupSet{Group::W}, config.T2, config.eta2}}});
    s.phases.push_back(Phase{s_first ? Recipe::phase2_S3 : Recipe::phase2_S2, 1,
                             {Stage{GroupSet{Group::W}, config.T3, config.eta3}}});
    return s;
}

RunResult run_joint(const Corpus& corpus, const ModelParams& init, const JointConfig& config,
                    const TrainOptions& options) {
    return run_schedule(corpus, init, joint_schedule(corpus, config), options);
}

RunResult run_sequential(const Corpus& corpus, const ModelParams& init, Order order,
                         const SequentialConfig& config, const TrainOptions& options) {
    if (corpus.kind != TaskKind::analogical) throw RecipeError("sequential curricula need an analogical corpus");
    return run_schedule(corpus, init, sequential_schedule(order, config), options);
}

RunResult run_end_to_end(const Corpus& corpus, const ModelParams& init, const std::vector<Recipe>& recipes,
                         std::size_t kappa, std::size_t iterations, double step_size,
                         const TrainOptions& options) {
    if (recipes.empty()) throw RecipeError("end-to-end run needs at least one recipe");
    Schedule s;
    for (Recipe r : recipes) s.phases.push_back(Phase{r, kappa, {Stage{kAllGroups, iterations, step_size}}});
    return run_schedule(corpus, init, s, options);
}

}  // namespace featlab
