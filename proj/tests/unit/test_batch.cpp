#include <doctest.h>

#include "featlab/batch.hpp"
#include "featlab/rng.hpp"

using namespace featlab;

TEST_CASE("batch columns mirror the examples and weights sum to one") {
    Rng rng(1);
    const auto c = build_analogical(3, 10, rng);
    const auto ms = assemble_train(c, Recipe::joint_analogical, 3);
    const Batch b = make_batch(c, ms);
    CHECK(b.count() == 9);
    CHECK(std::abs(b.weight.sum() - 1.0) < 1e-15);
    CHECK(b.weight(0) == doctest::Approx(3.0 / 21.0));
    CHECK(b.weight(8) == doctest::Approx(1.0 / 21.0));
    const auto flat = ms.components[0].examples;
    CHECK(b.entity.col(0) == c.embeddings.vector(flat[0].entity));
    CHECK(b.relation.col(0) == c.embeddings.vector(flat[0].relation));
    CHECK(b.labels[0] == flat[0].label);

    const Batch t = make_batch(c, c.test_set);
    CHECK(t.count() == 3);
    CHECK((t.weight - 1.0 / 3.0).abs().maxCoeff() < 1e-16);
}

TEST_CASE("batched forward agrees with the per-example forward") {
    Rng rng(2);
    const auto c = build_analogical(4, 12, rng);
    const auto p = init_params(12, 3, 5.0, 0.4, rng);
    const Batch b = make_batch(c, c.train_set("S1"));
    for (Activation act : {Activation::identity, Activation::relu}) {
        const Matrix mean = p.class_mean();
        const FeatureView fv{act == Activation::identity ? mean : p.W, act, p.lambda, p.m};
        BatchForward fw;
        batch_attention(p.Z, b, fw);
        batch_values(p.V, fw);
        batch_logits(fv, fw);
        for (std::size_t i = 0; i < b.count(); ++i) {
            const auto t = forward(p, c.prompt(c.train_set("S1")[i]), act);
            const auto col = static_cast<Eigen::Index>(i);
            CHECK(std::abs(fw.alpha_first(col) - t.alpha(0)) < 1e-15);
            CHECK((fw.o1.col(col) - t.o1).cwiseAbs().maxCoeff() < 1e-14);
            CHECK((fw.f.col(col) - t.f).cwiseAbs().maxCoeff() < 1e-13);
        }
    }
}

TEST_CASE("batch loss is the weighted cross-entropy") {
    Rng rng(3);
    const auto c = build_analogical(3, 10, rng);
    const auto p = init_params(10, 2, 5.0, 0.5, rng);
    const auto ms = assemble_train(c, Recipe::joint_analogical, 2);
    const Batch b = make_batch(c, ms);
    BatchForward fw;
    batch_attention(p.Z, b, fw);
    batch_values(p.V, fw);
    const Matrix mean = p.class_mean();
    batch_logits(FeatureView{mean, Activation::identity, p.lambda, p.m}, fw);
    const BatchLoss l = batch_loss(b, fw.f);
    double expect = 0.0;
    for (const auto& e : ms.expanded()) expect += loss(p, c.labeled(e), Activation::identity);
    expect /= static_cast<double>(ms.size());
    CHECK(std::abs(l.value - expect) < 1e-14);
    // residual columns sum to zero: weight * (sum softmax - 1)
    CHECK(l.residual.colwise().sum().cwiseAbs().maxCoeff() < 1e-16);
    CHECK(l.max_abs_logit == fw.f.cwiseAbs().maxCoeff());
}
