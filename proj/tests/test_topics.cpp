#include <doctest.h>

#include <numeric>

#include "saw/cooccur.hpp"
#include "saw/synthgen.hpp"
#include "saw/topics.hpp"
#include "support.hpp"

using namespace saw;
using namespace saw::testing;

namespace {

/// Stats whose Qbar rows are given directly (Q and p are consistent with a
/// uniform word distribution).
CooccurrenceStats stats_from_rows(const RowMatrix& Qbar)
{
    CooccurrenceStats s;
    s.Qbar = Qbar;
    s.p = Vector::Constant(Qbar.rows(), 1.0 / static_cast<double>(Qbar.rows()));
    s.Q = s.Qbar / static_cast<double>(Qbar.rows());
    s.degenerate.assign(static_cast<std::size_t>(Qbar.rows()), false);
    return s;
}

AnchorSet anchors_of(std::vector<Index> idx)
{
    AnchorSet a;
    a.indices = std::move(idx);
    return a;
}

Eigen::RowVectorXd random_distribution(std::mt19937_64& rng, Index d)
{
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Eigen::RowVectorXd r(d);
    for (Index j = 0; j < d; ++j) r[j] = u(rng);
    return r / r.sum();
}

} // namespace

TEST_SUITE("topics") {

TEST_CASE("kl_divergence examples")
{
    const std::vector<double> p{0.2, 0.3, 0.5};
    CHECK(kl_divergence(p, p) == 0.0);
    CHECK(kl_divergence(std::vector<double>{1, 0}, std::vector<double>{0.5, 0.5}) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(kl_divergence(std::vector<double>{0.5, 0.5}, std::vector<double>{0.25, 0.75}) ==
          doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-14));
    CHECK(kl_divergence(std::vector<double>{0.5, 0.5}, std::vector<double>{0.25, 0.75}) ==
          doctest::Approx(0.1438).epsilon(1e-3));
    // Zero mixture entries hit the floor instead of producing infinity.
    CHECK(kl_divergence(std::vector<double>{1, 0}, std::vector<double>{0, 1}) ==
          doctest::Approx(-std::log(kKlFloor)));
    CHECK_THROWS_AS(kl_divergence(p, std::vector<double>{1.0}), Error);
}

TEST_CASE("MixtureKl gradient matches finite differences")
{
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        RowMatrix B(3, 7);
        for (Index g = 0; g < 3; ++g) B.row(g) = random_distribution(rng, 7);
        const MixtureKl f(random_distribution(rng, 7), B);
        Vector t = random_distribution(rng, 3).transpose();
        Vector grad;
        f.value_and_gradient(t, grad);
        for (Index g = 0; g < 3; ++g) {
            Vector up = t, down = t;
            up[g] += 1e-6;
            down[g] -= 1e-6;
            CHECK(grad[g] == doctest::Approx((f.value(up) - f.value(down)) / 2e-6).epsilon(1e-6));
        }
    }
}

TEST_CASE("a word equal to an anchor row recovers that indicator")
{
    std::mt19937_64 rng(1);
    RowMatrix Qbar(5, 5);
    for (Index w = 0; w < 4; ++w) Qbar.row(w) = random_distribution(rng, 5);
    Qbar.row(4) = Qbar.row(2);
    // The objective is quadratic in the distance from e_3, so an objective
    // gap of tol leaves theta about sqrt(tol) away.
    RecoveryConfig cfg;
    const auto m = recover_topics_unsupervised(stats_from_rows(Qbar), anchors_of({0, 1, 2}), cfg);
    CHECK(m.residuals[4] <= cfg.tol);
    CHECK(std::abs(m.theta(4, 2) - 1.0) <= 1e-4);
    cfg.tol = 1e-15;
    cfg.max_iters = 100000;
    const auto tight = recover_topics_unsupervised(stats_from_rows(Qbar), anchors_of({0, 1, 2}), cfg);
    CHECK(tight.residuals[4] <= 1e-15);
    CHECK(std::abs(tight.theta(4, 2) - 1.0) <= 1e-6);
}

TEST_CASE("an exact half/half mixture is recovered")
{
    std::mt19937_64 rng(2);
    RowMatrix Qbar(6, 6);
    for (Index w = 0; w < 6; ++w) Qbar.row(w) = random_distribution(rng, 6);
    Qbar.row(3) = 0.5 * Qbar.row(0) + 0.5 * Qbar.row(1);
    const auto m = recover_topics_unsupervised(stats_from_rows(Qbar), anchors_of({0, 1, 2}));
    CHECK(m.residuals[3] <= 1e-8);

    // Grid oracle over the 2-simplex at step 0.01.
    double best = INFINITY;
    Vector arg(3);
    for (int a = 0; a <= 100; ++a)
        for (int b = 0; a + b <= 100; ++b) {
            const Vector t = (Vector(3) << a / 100.0, b / 100.0, (100 - a - b) / 100.0).finished();
            std::vector<double> q(6);
            for (Index j = 0; j < 6; ++j) q[static_cast<std::size_t>(j)] = t.dot(Qbar.col(j).head(3));
            const double v = brute_kl(row_of(Qbar, 3), q);
            if (v < best) {
                best = v;
                arg = t;
            }
        }
    CHECK((m.theta.row(3).transpose() - arg).lpNorm<1>() <= 0.02);
    CHECK(m.theta(3, 0) == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(m.theta(3, 1) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("per-row objective never increases and constraints hold exactly")
{
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 15; ++rep) {
        const Index d = 8, k = 3;
        RowMatrix Qbar(d, d);
        for (Index w = 0; w < d; ++w) Qbar.row(w) = random_distribution(rng, d);
        const auto stats = stats_from_rows(Qbar);
        const auto anchors = anchors_of({0, 3, 5});
        const RowMatrix B = anchor_rows(stats, anchors);
        for (Index w = 0; w < d; ++w) {
            if (anchors.contains(w)) continue;
            double prev = INFINITY;
            int increases = 0;
            recover_row(MixtureKl(Qbar.row(w), B), {}, [&](double f) {
                if (f > prev + 1e-12) ++increases;
                prev = f;
            });
            CHECK(increases == 0);
        }
        const auto m = recover_topics_unsupervised(stats, anchors);
        CHECK_NOTHROW(check_theta_feasible(m.theta, anchors, 1e-8));
        for (Index g = 0; g < k; ++g)
            for (Index h = 0; h < k; ++h)
                CHECK(m.theta(anchors.indices[static_cast<std::size_t>(g)], h) == (g == h ? 1.0 : 0.0));
        CHECK(m.theta.minCoeff() >= 0.0);
    }
}

TEST_CASE("k = 2 rows match the simplex grid oracle")
{
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 10; ++rep) {
        const Index d = 4 + rep % 3;
        RowMatrix Qbar(d, d);
        for (Index w = 0; w < d; ++w) Qbar.row(w) = random_distribution(rng, d);
        const auto m = recover_topics_unsupervised(stats_from_rows(Qbar), anchors_of({0, 1}));
        for (Index w = 2; w < d; ++w) {
            const double t = grid_argmin_two(row_of(Qbar, w), row_of(Qbar, 0), row_of(Qbar, 1));
            CHECK(std::abs(m.theta(w, 0) - t) + std::abs(m.theta(w, 1) - (1.0 - t)) <= 0.02);
        }
    }
}

TEST_CASE("iteration cap exhaustion names the worst row")
{
    std::mt19937_64 rng(7);
    RowMatrix Qbar(5, 5);
    for (Index w = 0; w < 5; ++w) Qbar.row(w) = random_distribution(rng, 5);
    RecoveryConfig cfg;
    cfg.max_iters = 1;
    try {
        recover_topics_unsupervised(stats_from_rows(Qbar), anchors_of({0, 1}), cfg);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.index() >= 2);
        CHECK(e.index() < 5);
    }
}

TEST_CASE("recover_word_topic_matrix examples")
{
    CHECK(recover_word_topic_matrix(RowMatrix::Identity(3, 3), Vector::Constant(3, 1.0 / 3.0)) ==
          RowMatrix::Identity(3, 3));
    const RowMatrix single = recover_word_topic_matrix(RowMatrix::Ones(2, 1), Vector((Vector(2) << 0.3, 0.7).finished()));
    CHECK(single(0, 0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(single(1, 0) == doctest::Approx(0.7).epsilon(1e-15));

    RowMatrix theta(3, 2);
    theta << 1, 0, 0, 1, 0.5, 0.5;
    const RowMatrix A = recover_word_topic_matrix(theta, Vector((Vector(3) << 0.25, 0.25, 0.5).finished()));
    RowMatrix expected(3, 2);
    expected << 0.5, 0, 0, 0.5, 0.5, 0.5;
    CHECK((A - expected).cwiseAbs().maxCoeff() <= 1e-15);

    RowMatrix dead(2, 2);
    dead << 1, 0, 1, 0;
    CHECK_THROWS_WITH_AS(recover_word_topic_matrix(dead, Vector::Constant(2, 0.5)), doctest::Contains("topic 1"), Error);
}

TEST_CASE("Bayes round trip returns theta")
{
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        const Index d = 9, k = 4;
        RowMatrix theta(d, k);
        for (Index w = 0; w < d; ++w) theta.row(w) = random_distribution(rng, k);
        const Vector p = random_distribution(rng, d).transpose();
        const RowMatrix A = recover_word_topic_matrix(theta, p);
        for (Index g = 0; g < k; ++g) CHECK(std::abs(A.col(g).sum() - 1.0) <= 1e-8);
        // Invert: theta(w, g) = A(w, g) m_g / sum_h A(w, h) m_h, m_g the topic mass.
        Vector mass = Vector::Zero(k);
        for (Index w = 0; w < d; ++w) mass += p[w] * theta.row(w).transpose();
        for (Index w = 0; w < d; ++w) {
            double z = 0.0;
            for (Index h = 0; h < k; ++h) z += A(w, h) * mass[h];
            for (Index g = 0; g < k; ++g) CHECK(std::abs(A(w, g) * mass[g] / z - theta(w, g)) <= 1e-8);
        }
    }
}

TEST_CASE("doc_topic_features examples")
{
    auto corpus = make_corpus({{1, 0, 3}, {4, 2, 0}, {0, 0, 1}}, all_observed({1, 2, 3}));
    const FrequencyMatrix X = normalize_columns(corpus);
    const RowMatrix Z = doc_topic_features(RowMatrix::Identity(3, 3), X);
    CHECK(Z(0, 0) == doctest::Approx(0.2));
    CHECK(Z(0, 1) == doctest::Approx(0.8));
    // Document 1 holds only word 1; with word 1 an anchor of topic 1, z = e_1.
    RowMatrix theta(3, 2);
    theta << 0.3, 0.7, 0, 1, 1, 0;
    const RowMatrix Z2 = doc_topic_features(theta, X);
    CHECK(Z2.row(1) == Eigen::RowVector2d(0, 1));
    const RowMatrix Z3 = doc_topic_features(RowMatrix::Constant(3, 2, 0.5), X);
    CHECK((Z3.array() - 0.5).abs().maxCoeff() <= 1e-15);
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(Z2.row(i).sum() - 1.0) <= 1e-8);
    CHECK_THROWS_AS(doc_topic_features(RowMatrix::Identity(2, 2), X), Error);
}

TEST_CASE("representability on a planted corpus, threshold semantics and an orthogonal word")
{
    SyntheticSpec spec;
    spec.d = 25;
    spec.k = 3;
    spec.n = 20000;
    spec.length = {100, 100};
    spec.a0 = 0.3;
    spec.seed = 3;
    const auto data = generate_dataset(spec);
    const auto stats = build_cooccurrence(data.corpus);
    const auto planted = anchors_of(data.truth.anchor_indices);
    CHECK(representability(stats, planted, 1e-3).flagged.empty());

    const auto all = representability(stats, planted, 0.0);
    for (Index w = 0; w < stats.size(); ++w) {
        const bool flagged = std::find(all.flagged.begin(), all.flagged.end(), w) != all.flagged.end();
        CHECK(flagged == (all.residuals[w] > 0.0));
    }

    RowMatrix Qbar = RowMatrix::Zero(6, 6);
    Qbar.row(0) << 0.5, 0.5, 0, 0, 0, 0;
    Qbar.row(1) << 0, 0, 0.5, 0.5, 0, 0;
    Qbar.row(2) << 0, 0, 0, 0, 0.5, 0.5;
    Qbar.row(3) << 0.25, 0.25, 0.25, 0.25, 0, 0;
    Qbar.row(4) = Qbar.row(0);
    Qbar.row(5) << 0.125, 0.125, 0.375, 0.375, 0, 0;
    const auto r = representability(stats_from_rows(Qbar), anchors_of({0, 1}), 1e-6);
    // Word 2 lives where no anchor has mass: only the floor supports it.
    CHECK(r.residuals[2] == doctest::Approx(-std::log(kKlFloor) + std::log(0.5)).epsilon(1e-9));
    CHECK(r.flagged == std::vector<Index>{2});
}

TEST_CASE("infeasible theta is rejected")
{
    RowMatrix theta(3, 2);
    theta << 1, 0, 0, 1, 0.4, 0.5;
    CHECK_THROWS_AS(check_theta_feasible(theta, anchors_of({0, 1})), Error);
    theta(2, 1) = 0.6;
    CHECK_NOTHROW(check_theta_feasible(theta, anchors_of({0, 1})));
    theta(0, 0) = 0.999;
    theta(0, 1) = 0.001;
    CHECK_THROWS_AS(check_theta_feasible(theta, anchors_of({0, 1})), Error);
}

} // TEST_SUITE
