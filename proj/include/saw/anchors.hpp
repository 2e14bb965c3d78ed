#pragma once

#include <map>
#include <span>
#include <vector>

#include "saw/common.hpp"
#include "saw/cooccur.hpp"
#include "saw/corpus.hpp"

namespace saw {

struct AnchorSet {
    /// Anchor word of topic g is indices[g].
    std::vector<Index> indices;
    /// Word -> number of stabilization runs that selected it.
    std::map<Index, int> stability;
    int runs = 0;
    Index projection_dim = 0;

    Index size() const { return static_cast<Index>(indices.size()); }
    bool contains(Index w) const;
};

/// d x r Gaussian matrix with N(0, 1/r) entries.
RowMatrix gaussian_projection(Index d, Index r, std::uint64_t seed);

/// Qbar * projection.
RowMatrix project_rows(const RowMatrix& Qbar, const RowMatrix& projection);
/// Qbar * G with G = gaussian_projection(Qbar.cols(), r, seed).
RowMatrix project_rows(const RowMatrix& Qbar, Index r, std::uint64_t seed);

/// Greedy farthest-point selection over `candidates`: the first pick is the row
/// of largest norm, each later pick the row farthest from the affine span of
/// the rows picked so far. Ties go to the smallest index.
std::vector<Index> greedy_anchors(const RowMatrix& points, Index k,
                                  std::span<const Index> candidates);

/// Runs greedy_anchors `runs` times under independent projections and returns
/// the run whose anchors were selected most often in total.
AnchorSet stable_anchors(const CooccurrenceStats& stats, Index k, int runs,
                         Index projection_dim, std::uint64_t seed,
                         std::span<const Index> candidates, int threads = 1);

/// min(d, 1000)
Index default_projection_dim(Index d);

/// Words occurring in at least max(3, ceil(0.5% of n)) documents with
/// positive probability.
std::vector<Index> default_candidates(const Corpus& corpus, const CooccurrenceStats& stats);

} // namespace saw
