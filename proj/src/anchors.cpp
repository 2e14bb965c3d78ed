#include "saw/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "saw/parallel.hpp"

namespace saw {

bool AnchorSet::contains(Index w) const
{
    return std::find(indices.begin(), indices.end(), w) != indices.end();
}

Index default_projection_dim(Index d)
{
    return std::min<Index>(d, 1000);
}

RowMatrix gaussian_projection(Index d, Index r, std::uint64_t seed)
{
    if (r <= 0) throw Error("projection dimension must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(r));
    RowMatrix G(d, r);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < r; ++j) G(i, j) = normal(rng) * scale;
    return G;
}

RowMatrix project_rows(const RowMatrix& Qbar, const RowMatrix& projection)
{
    if (projection.rows() != Qbar.cols())
        throw Error("project_rows: projection has wrong number of rows");
    if (projection.cols() <= 0) throw Error("projection dimension must be positive");
    return Qbar * projection;
}

RowMatrix project_rows(const RowMatrix& Qbar, Index r, std::uint64_t seed)
{
    return project_rows(Qbar, gaussian_projection(Qbar.cols(), r, seed));
}

std::vector<Index> greedy_anchors(const RowMatrix& points, Index k,
                                  std::span<const Index> candidates)
{
    if (k < 1) throw Error("greedy_anchors: k must be positive");
    if (static_cast<Index>(candidates.size()) < k)
        throw Error("greedy_anchors: " + std::to_string(candidates.size()) +
                    " candidates for k = " + std::to_string(k));
    for (auto c : candidates)
        if (c < 0 || c >= points.rows()) throw Error("greedy_anchors: candidate out of range");

    std::vector<Index> cand(candidates.begin(), candidates.end());
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    if (static_cast<Index>(cand.size()) < k)
        throw Error("greedy_anchors: fewer distinct candidates than k");

    const Index r = points.cols();
    RowMatrix residual(static_cast<Index>(cand.size()), r);
    for (std::size_t c = 0; c < cand.size(); ++c) residual.row(static_cast<Index>(c)) = points.row(cand[c]);

    std::vector<bool> used(cand.size(), false);
    auto pick_farthest = [&] {
        Index best = -1;
        double best_norm = -1.0;
        for (Index c = 0; c < residual.rows(); ++c) {
            if (used[static_cast<std::size_t>(c)]) continue;
            const double nrm = residual.row(c).squaredNorm();
            if (nrm > best_norm) {
                best_norm = nrm;
                best = c;
            }
        }
        used[static_cast<std::size_t>(best)] = true;
        return best;
    };

    std::vector<Index> chosen;
    chosen.reserve(static_cast<std::size_t>(k));
    const Index first = pick_farthest();
    chosen.push_back(cand[static_cast<std::size_t>(first)]);
    // Shift so the first anchor is the origin; the remaining picks then measure
    // distance to the span of the shifted directions.
    const Eigen::RowVectorXd origin = residual.row(first);
    residual.rowwise() -= origin;

    for (Index j = 1; j < k; ++j) {
        const Index next = pick_farthest();
        chosen.push_back(cand[static_cast<std::size_t>(next)]);
        const double nrm = residual.row(next).norm();
        if (nrm <= 0.0) continue;  // all remaining points lie in the span
        const Eigen::RowVectorXd dir = residual.row(next) / nrm;
        residual -= (residual * dir.transpose()) * dir;
    }
    return chosen;
}

AnchorSet stable_anchors(const CooccurrenceStats& stats, Index k, int runs,
                         Index projection_dim, std::uint64_t seed,
                         std::span<const Index> candidates, int threads)
{
    if (runs < 1) throw Error("stable_anchors: run count must be at least 1");
    for (auto c : candidates) {
        if (c < 0 || c >= stats.size()) throw Error("stable_anchors: candidate out of range");
        if (stats.degenerate[static_cast<std::size_t>(c)])
            throw Error("stable_anchors: zero-probability word " + std::to_string(c) + " is a candidate");
    }
    const Index r = projection_dim > 0 ? projection_dim : default_projection_dim(stats.size());

    std::vector<std::vector<Index>> picks(static_cast<std::size_t>(runs));
    parallel_for(runs, threads, [&](Index t) {
        const auto points = project_rows(stats.Qbar, r, derive_seed(seed, static_cast<std::uint64_t>(t)));
        picks[static_cast<std::size_t>(t)] = greedy_anchors(points, k, candidates);
    });

    AnchorSet out;
    out.runs = runs;
    out.projection_dim = r;
    for (const auto& run : picks)
        for (auto w : run) ++out.stability[w];

    std::size_t best = 0;
    long best_score = -1;
    std::vector<Index> best_sorted;
    for (std::size_t t = 0; t < picks.size(); ++t) {
        long score = 0;
        for (auto w : picks[t]) score += out.stability[w];
        auto sorted = picks[t];
        std::sort(sorted.begin(), sorted.end());
        if (score > best_score || (score == best_score && sorted < best_sorted)) {
            best = t;
            best_score = score;
            best_sorted = std::move(sorted);
        }
    }
    out.indices = picks[best];
    return out;
}

std::vector<Index> default_candidates(const Corpus& corpus, const CooccurrenceStats& stats)
{
    const auto df = corpus.doc_frequency();
    const auto min_df = std::max<long>(
        3, static_cast<long>(std::ceil(0.005 * static_cast<double>(corpus.num_docs()))));
    std::vector<Index> out;
    for (Index w = 0; w < corpus.num_words(); ++w) {
        if (stats.degenerate[static_cast<std::size_t>(w)]) continue;
        if (df[static_cast<std::size_t>(w)] >= min_df) out.push_back(w);
    }
    return out;
}

} // namespace saw
