#include <doctest.h>

#include "saw/joint.hpp"
#include "saw/synthgen.hpp"
#include "support.hpp"

using namespace saw;
using namespace saw::testing;

namespace {

SyntheticDataset small_dataset(std::uint64_t seed, Index n = 300)
{
    SyntheticSpec spec;
    spec.d = 30;
    spec.k = 3;
    spec.n = n;
    spec.length = {80, 80};
    spec.a0 = 0.2;
    spec.beta = (Vector(3) << 2.0, -2.0, 0.0).finished();
    spec.seed = seed;
    return generate_dataset(spec);
}

SawConfig small_config(std::uint64_t seed)
{
    SawConfig cfg;
    cfg.k = 3;
    cfg.lambda = 0.5;
    cfg.alpha = 0.5;
    cfg.anchors.seed = seed;
    cfg.max_outer_iters = 20;
    return cfg;
}

} // namespace

TEST_SUITE("joint") {

TEST_CASE("config validation")
{
    SawConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    auto bad = cfg;
    bad.k = 0;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("config"), Error);
    bad = cfg;
    bad.lambda = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.alpha = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.outer_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.anchors.runs = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("joint objective is the sum of its parts")
{
    const auto data = small_dataset(1);
    const auto stats = build_cooccurrence(data.corpus);
    const auto X = normalize_columns(data.corpus);
    const auto anchors = stable_anchors(stats, 3, 3, 30, 1, default_candidates(data.corpus, stats));
    const auto tm = recover_topics_unsupervised(stats, anchors);
    const JointProblem problem(stats, X, data.corpus.labels, anchors);
    Vector beta(3);
    beta << 0.4, -1.0, 0.2;

    double kl = 0.0;
    for (Index w = 0; w < stats.size(); ++w) {
        if (anchors.contains(w)) continue;
        std::vector<double> mix(static_cast<std::size_t>(stats.size()), 0.0);
        for (Index g = 0; g < 3; ++g)
            for (Index j = 0; j < stats.size(); ++j)
                mix[static_cast<std::size_t>(j)] +=
                    tm.theta(w, g) * stats.Qbar(anchors.indices[static_cast<std::size_t>(g)], j);
        kl += brute_kl(row_of(stats.Qbar, w), mix);
    }
    const RowMatrix Z = doc_topic_features(tm.theta, X);
    const double expected = kl + brute_cox_nll(beta, Z, data.corpus.labels) + elastic_net_penalty(beta, 0.7, 0.3);
    CHECK(problem.kl_total(tm.theta) == doctest::Approx(kl).epsilon(1e-10));
    CHECK(problem.objective(tm.theta, beta, 0.7, 0.3) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(joint_objective(tm.theta, beta, stats, X, data.corpus.labels, anchors, 0.7, 0.3) ==
          doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("theta gradient matches finite differences")
{
    const auto data = small_dataset(2, 150);
    const auto stats = build_cooccurrence(data.corpus);
    const auto X = normalize_columns(data.corpus);
    const auto anchors = stable_anchors(stats, 3, 2, 30, 2, default_candidates(data.corpus, stats));
    const JointProblem problem(stats, X, data.corpus.labels, anchors);
    RowMatrix theta = recover_topics_unsupervised(stats, anchors).theta;
    // Move away from the boundary so central differences stay feasible in value.
    for (Index w : problem.free_words()) theta.row(w) = 0.5 * theta.row(w).array() + 0.5 / 3.0;
    const Vector beta = (Vector(3) << 1.0, -0.5, 0.3).finished();
    const RowMatrix G = problem.theta_gradient(theta, beta);
    for (Index a : anchors.indices) CHECK(G.row(a).isZero());
    int checked = 0;
    for (Index w : problem.free_words()) {
        if (checked++ == 6) break;
        for (Index g = 0; g < 3; ++g) {
            RowMatrix up = theta, down = theta;
            up(w, g) += 1e-6;
            down(w, g) -= 1e-6;
            const double fd = (problem.smooth_objective(up, beta) - problem.smooth_objective(down, beta)) / 2e-6;
            CHECK(G(w, g) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
        }
    }
}

TEST_CASE("theta step never increases the subproblem and keeps feasibility")
{
    for (std::uint64_t seed = 3; seed < 6; ++seed) {
        const auto data = small_dataset(seed, 200);
        const auto stats = build_cooccurrence(data.corpus);
        const auto X = normalize_columns(data.corpus);
        const auto anchors = stable_anchors(stats, 3, 2, 30, seed, default_candidates(data.corpus, stats));
        const JointProblem problem(stats, X, data.corpus.labels, anchors);
        const RowMatrix theta = recover_topics_unsupervised(stats, anchors).theta;
        const Vector beta = (Vector(3) << 3.0, -3.0, 0.0).finished();
        const auto up = update_theta(problem, theta, beta, {});
        CHECK(up.objective_before == doctest::Approx(problem.smooth_objective(theta, beta)).epsilon(1e-12));
        CHECK(up.objective_after <= up.objective_before);
        CHECK(up.objective_after == doctest::Approx(problem.smooth_objective(up.theta, beta)).epsilon(1e-12));
        CHECK_NOTHROW(check_theta_feasible(up.theta, anchors));
        if (up.stalled) CHECK(up.theta == theta);
    }
}

TEST_CASE("fit_saw trace is monotone and the model is consistent")
{
    const auto data = small_dataset(7);
    const auto model = fit_saw(data.corpus, small_config(7));
    const auto& v = model.trace.objective_values;
    REQUIRE(v.size() >= 2);
    for (std::size_t t = 1; t < v.size(); ++t) CHECK(v[t] <= v[t - 1] + kDescentSlack * std::abs(v[t - 1]));
    CHECK(model.method == "saw");
    CHECK(model.num_topics() == 3);
    CHECK_NOTHROW(check_theta_feasible(model.topic_model.theta, model.topic_model.anchors));
    for (Index g = 0; g < 3; ++g) CHECK(std::abs(model.topic_model.A.col(g).sum() - 1.0) <= 1e-8);
    CHECK(model.vocabulary == data.corpus.vocab.words());
    CHECK(model.word_prob.size() == 30);
    CHECK(static_cast<int>(model.trace.objective_values.size()) == 1 + 2 * model.trace.iterations);
}

TEST_CASE("fit_saw is deterministic for a fixed seed and thread count does not matter")
{
    const auto data = small_dataset(8, 200);
    auto cfg = small_config(8);
    const auto a = fit_saw(data.corpus, cfg);
    const auto b = fit_saw(data.corpus, cfg);
    CHECK(a.topic_model.theta == b.topic_model.theta);
    CHECK(a.cox.beta == b.cox.beta);
    cfg.threads = 3;
    const auto c = fit_saw(data.corpus, cfg);
    CHECK(a.topic_model.anchors.indices == c.topic_model.anchors.indices);
    CHECK((a.cox.beta - c.cox.beta).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("usaw keeps the unsupervised topics")
{
    const auto data = small_dataset(9, 200);
    const auto cfg = small_config(9);
    const auto u = fit_usaw(data.corpus, cfg);
    CHECK(u.method == "usaw");
    const auto stats = build_cooccurrence(data.corpus);
    const auto tm = recover_topics_unsupervised(stats, u.topic_model.anchors);
    CHECK(u.topic_model.theta == tm.theta);
    const auto s = fit_saw(data.corpus, cfg);
    CHECK(s.topic_model.anchors.indices == u.topic_model.anchors.indices);
}

TEST_CASE("no observed events is rejected")
{
    auto data = small_dataset(10, 100);
    data.corpus.labels.observed.assign(100, false);
    CHECK_THROWS_WITH_AS(fit_saw(data.corpus, small_config(10)), doctest::Contains("no observed events"), Error);
}

TEST_CASE("predictions: risk is the linear predictor and medians follow risk")
{
    const auto data = small_dataset(11);
    const auto model = fit_saw(data.corpus, small_config(11));
    const auto preds = predict(model, data.corpus);
    const RowMatrix Z = model_features(model, data.corpus);
    REQUIRE(preds.size() == 300);
    for (Index i = 0; i < 300; ++i) {
        const auto& p = preds[static_cast<std::size_t>(i)];
        CHECK(p.risk == doctest::Approx(Z.row(i).dot(model.cox.beta)).epsilon(1e-12));
        const auto m = predict_median(model.cox.baseline, p.risk);
        CHECK(p.median == m.time);
        CHECK(p.saturated == m.saturated);
    }
}

TEST_CASE("features reject a corpus with a different vocabulary")
{
    const auto data = small_dataset(12, 100);
    const auto model = fit_usaw(data.corpus, small_config(12));
    auto other = data.corpus;
    auto words = other.vocab.words();
    std::swap(words[0], words[1]);
    other.vocab = Vocabulary(words);
    CHECK_THROWS_AS(model_features(model, other), Error);
}

} // TEST_SUITE
