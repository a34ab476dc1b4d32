#include <doctest.h>

#include <cmath>

#include "featlab/embeddings.hpp"
#include "featlab/error.hpp"
#include "featlab/rng.hpp"
#include "oracles.hpp"

using namespace featlab;

TEST_CASE("count == dim gives an exact orthonormal frame") {
    Rng rng(5);
    const auto t = sample_orthonormal_system(3, 3, rng);
    const Matrix gram = t.vectors().transpose() * t.vectors();
    CHECK((gram - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("count above dim and count zero are rejected") {
    Rng rng(5);
    CHECK_THROWS_AS(sample_orthonormal_system(4, 3, rng), DimensionError);
    CHECK_THROWS_AS(sample_orthonormal_system(0, 3, rng), EmptyTableError);
}

TEST_CASE("202 tokens in R^427: brute-force pairwise check") {
    Rng rng(7);
    const auto t = sample_orthonormal_system(202, 427, rng);
    REQUIRE(t.size() == 202);
    double worst_dot = 0.0, worst_norm = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const Vector vi = t.vector(i);
        worst_norm = std::max(worst_norm, std::abs(std::sqrt(oracle::dot(vi, vi)) - 1.0));
        for (std::size_t j = i + 1; j < t.size(); ++j) worst_dot = std::max(worst_dot, std::abs(oracle::dot(vi, t.vector(j))));
    }
    CHECK(worst_dot < 1e-12);
    CHECK(worst_norm < 1e-12);
}

TEST_CASE("re-orthogonalisation is idempotent") {
    Rng rng(9);
    const auto t = sample_orthonormal_system(30, 40, rng);
    const Matrix again = orthonormalize(t.vectors());
    CHECK((again - t.vectors()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dependent columns cannot be orthonormalised") {
    Matrix m(3, 2);
    m << 1, 2, 0, 0, 0, 0;
    CHECK_THROWS_AS(orthonormalize(m), DimensionError);
}

TEST_CASE("same seed gives the same table") {
    Rng a(21), b(21);
    const auto ta = sample_orthonormal_system(10, 16, a);
    const auto tb = sample_orthonormal_system(10, 16, b);
    CHECK(ta.vectors() == tb.vectors());
    CHECK(ta.names() == tb.names());
}

TEST_CASE("names resolve to ids and renaming keeps vectors") {
    Rng rng(1);
    const auto t = sample_orthonormal_system(3, 5, rng);
    CHECK(t.name(0) == "t0");
    CHECK(t.id("t2") == 2);
    const auto r = t.renamed({"a", "b", "c"});
    CHECK(r.id("b") == 1);
    CHECK(r.vectors() == t.vectors());
    CHECK_FALSE(r.contains("t0"));
    CHECK_THROWS_AS(t.renamed({"x", "x", "y"}), ParameterError);
}

TEST_CASE("init_params: seeded determinism") {
    Rng a(1), b(1);
    const auto p = init_params(4, 2, 1.0, 0.03, a);
    const auto q = init_params(4, 2, 1.0, 0.03, b);
    CHECK(p.Z == q.Z);
    CHECK(p.V == q.V);
    CHECK(p.W == q.W);
    CHECK(p.lambda == 1.0);
    CHECK(p.m == 2);
    CHECK(p.W.rows() == 8);
    CHECK(p.W.cols() == 4);
}

TEST_CASE("init_params: sample moments at full scale") {
    Rng rng(3);
    const double sigma = 0.03;
    const auto p = init_params(427, 50, 20.0, sigma, rng);
    double sum = 0.0, sq = 0.0;
    std::size_t count = 0;
    for (const Matrix* m : {&p.Z, &p.V, &p.W}) {
        sum += m->sum();
        sq += m->squaredNorm();
        count += static_cast<std::size_t>(m->size());
    }
    REQUIRE(count == 427 * 427 * 2 + 427 * 50 * 427);
    const double n = static_cast<double>(count);
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 * sigma / std::sqrt(n));
    CHECK(std::abs(var / (sigma * sigma) - 1.0) < 0.05);
}

TEST_CASE("init_params rejects a degenerate scale") {
    Rng rng(1);
    CHECK_THROWS_AS(init_params(4, 2, 1.0, 0.0, rng), ParameterError);
    CHECK_THROWS_AS(init_params(4, 2, 1.0, -1.0, rng), ParameterError);
}

TEST_CASE("class_mean averages the width") {
    ModelParams p;
    p.m = 2;
    p.Z = Matrix::Zero(2, 2);
    p.V = Matrix::Identity(2, 2);
    p.W.resize(4, 2);
    p.W << 1, 2, 3, 4, 5, 6, 7, 8;
    Matrix expect(2, 2);
    expect << 2, 3, 6, 7;
    CHECK(p.class_mean() == expect);
    p.W(0, 0) = std::nan("");
    CHECK_THROWS_AS(p.validate(), ParameterError);
}
