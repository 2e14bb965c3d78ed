#include <doctest.h>

#include <numeric>
#include <set>

#include "saw/anchors.hpp"
#include "saw/cooccur.hpp"
#include "saw/synthgen.hpp"
#include "saw/topics.hpp"
#include "support.hpp"

using namespace saw;
using namespace saw::testing;

namespace {

std::vector<Index> iota_n(Index n)
{
    std::vector<Index> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), Index{0});
    return v;
}

std::set<Index> as_set(const std::vector<Index>& v) { return {v.begin(), v.end()}; }

CooccurrenceStats small_stats(std::uint64_t seed)
{
    SyntheticSpec spec;
    spec.d = 20;
    spec.k = 3;
    spec.n = 300;
    spec.length = {60, 60};
    spec.seed = seed;
    return build_cooccurrence(generate_dataset(spec).corpus);
}

} // namespace

TEST_SUITE("anchors") {

TEST_CASE("identity projection returns Qbar")
{
    const RowMatrix Qbar = small_stats(1).Qbar;
    CHECK(project_rows(Qbar, RowMatrix::Identity(Qbar.cols(), Qbar.cols())) == Qbar);
}

TEST_CASE("projection is deterministic given the seed and rejects r <= 0")
{
    const RowMatrix Qbar = small_stats(2).Qbar;
    CHECK(project_rows(Qbar, 7, 42) == project_rows(Qbar, 7, 42));
    CHECK(project_rows(Qbar, 7, 42) != project_rows(Qbar, 7, 43));
    CHECK_THROWS_AS(project_rows(Qbar, 0, 1), Error);
    CHECK_THROWS_AS(gaussian_projection(5, -1, 1), Error);
}

TEST_CASE("random projection roughly preserves distances (d = 100, r = 50)")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long preserved = 0, pairs = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RowMatrix X(100, 100);
        for (Index i = 0; i < 100; ++i) {
            for (Index j = 0; j < 100; ++j) X(i, j) = u(rng);
            X.row(i) /= X.row(i).sum();
        }
        const RowMatrix Y = project_rows(X, 50, seed);
        for (Index i = 0; i < 100; ++i)
            for (Index j = i + 1; j < 100; ++j) {
                double exact = 0.0;
                for (Index c = 0; c < 100; ++c) exact += (X(i, c) - X(j, c)) * (X(i, c) - X(j, c));
                exact = std::sqrt(exact);
                const double ratio = (Y.row(i) - Y.row(j)).norm() / exact;
                ++pairs;
                if (ratio >= 0.5 && ratio <= 1.5) ++preserved;
            }
    }
    CHECK(static_cast<double>(preserved) >= 0.99 * static_cast<double>(pairs));
}

TEST_CASE("greedy picks the two vertices over their midpoint")
{
    RowMatrix pts(3, 2);
    pts << 1, 0, 0, 1, 0.5, 0.5;
    const auto cand = iota_n(3);
    CHECK(as_set(greedy_anchors(pts, 2, cand)) == std::set<Index>{0, 1});
    // Ties go to the smaller index: rows 0 and 1 have equal norm.
    CHECK(greedy_anchors(pts, 2, cand).front() == 0);
}

TEST_CASE("k equal to the candidate count returns every candidate")
{
    const RowMatrix pts = RowMatrix::Random(6, 3);
    const std::vector<Index> cand{1, 3, 4};
    CHECK(as_set(greedy_anchors(pts, 3, cand)) == std::set<Index>{1, 3, 4});
    CHECK_THROWS_AS(greedy_anchors(pts, 4, cand), Error);
    CHECK_THROWS_AS(greedy_anchors(pts, 1, std::vector<Index>{9}), Error);
}

TEST_CASE("planted simplex: vertices are selected")
{
    std::mt19937_64 rng(31);
    std::gamma_distribution<double> gamma(1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const RowMatrix vertices = random_matrix(rng, 5, 8);
        RowMatrix pts(55, 8);
        // Vertices are scattered among the interior points.
        std::vector<Index> slots{3, 17, 29, 40, 51};
        std::size_t v = 0;
        for (Index i = 0; i < 55; ++i) {
            if (v < slots.size() && i == slots[v]) {
                pts.row(i) = vertices.row(static_cast<Index>(v++));
                continue;
            }
            Vector w(5);
            for (Index g = 0; g < 5; ++g) w[g] = gamma(rng) + 0.05;
            w /= w.sum();
            pts.row(i) = w.transpose() * vertices;
        }
        CHECK(as_set(greedy_anchors(pts, 5, iota_n(55))) == as_set(slots));
    }
}

TEST_CASE("stable_anchors: one run equals the single greedy run")
{
    const auto stats = small_stats(3);
    const auto cand = iota_n(stats.size());
    const auto one = stable_anchors(stats, 3, 1, 10, 77, cand);
    const auto direct = greedy_anchors(project_rows(stats.Qbar, 10, derive_seed(77, std::uint64_t{0})), 3, cand);
    CHECK(one.indices == direct);
    for (auto w : one.indices) CHECK(one.stability.at(w) == 1);
    CHECK(one.runs == 1);
    CHECK(one.projection_dim == 10);
}

TEST_CASE("stable_anchors: unanimous runs give stability T; deterministic")
{
    // Identity-like geometry: three far-apart vertices and mixtures of them.
    CooccurrenceStats stats;
    RowMatrix Qbar(6, 3);
    Qbar << 1, 0, 0, 0, 1, 0, 0, 0, 1, 0.4, 0.3, 0.3, 0.2, 0.5, 0.3, 0.3, 0.3, 0.4;
    stats.Qbar = Qbar;
    stats.Q = Qbar / 6.0;
    stats.p = Vector::Constant(6, 1.0 / 6.0);
    stats.degenerate.assign(6, false);
    const auto a = stable_anchors(stats, 3, 8, 3, 5, iota_n(6));
    CHECK(as_set(a.indices) == std::set<Index>{0, 1, 2});
    for (auto w : a.indices) CHECK(a.stability.at(w) == 8);
    const auto b = stable_anchors(stats, 3, 8, 3, 5, iota_n(6));
    CHECK(a.indices == b.indices);
    CHECK(a.stability == b.stability);
    // Threads do not change the answer.
    const auto c = stable_anchors(stats, 3, 8, 3, 5, iota_n(6), 3);
    CHECK(a.indices == c.indices);
}

TEST_CASE("degenerate words are never candidates")
{
    SyntheticSpec spec;
    spec.d = 15;
    spec.k = 3;
    spec.n = 200;
    spec.length = {40, 40};
    spec.seed = 8;
    auto data = generate_dataset(spec);
    // Add an unused word.
    Corpus& c = data.corpus;
    auto words = c.vocab.words();
    words.push_back("unused");
    c.vocab = Vocabulary(words);
    c.counts.conservativeResize(c.num_words() + 1, c.num_docs());
    const auto stats = build_cooccurrence(c);
    REQUIRE(stats.degenerate.back());
    const auto cand = default_candidates(c, stats);
    CHECK(std::find(cand.begin(), cand.end(), stats.size() - 1) == cand.end());
    CHECK_THROWS_AS(stable_anchors(stats, 3, 2, 5, 1, iota_n(stats.size())), Error);
}

TEST_CASE("default candidate threshold is max(3, 0.5% of documents)")
{
    // 1000 documents: threshold 5. Word 1 appears in 4 documents, word 2 in 5.
    std::vector<std::vector<int>> counts(3, std::vector<int>(1000, 0));
    for (int i = 0; i < 1000; ++i) counts[0][static_cast<std::size_t>(i)] = 2;
    for (int i = 0; i < 4; ++i) counts[1][static_cast<std::size_t>(i)] = 1;
    for (int i = 0; i < 5; ++i) counts[2][static_cast<std::size_t>(i)] = 1;
    const auto c = make_corpus(counts, all_observed(std::vector<double>(1000, 1.0)));
    const auto cand = default_candidates(c, build_cooccurrence(c));
    CHECK(cand == std::vector<Index>{0, 2});
    CHECK(default_projection_dim(60) == 60);
    CHECK(default_projection_dim(5000) == 1000);
}

TEST_CASE("selected anchors are extreme: none is representable by the others")
{
    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        const auto stats = small_stats(seed);
        const auto chosen = greedy_anchors(stats.Qbar, 3, iota_n(stats.size()));
        for (std::size_t g = 0; g < chosen.size(); ++g) {
            RowMatrix others(2, stats.size());
            Index r = 0;
            for (std::size_t h = 0; h < chosen.size(); ++h)
                if (h != g) others.row(r++) = stats.Qbar.row(chosen[h]);
            const MixtureKl f(stats.Qbar.row(chosen[g]), others);
            CHECK(recover_row(f, {}).objective > 0.0);
        }
    }
}

} // TEST_SUITE
