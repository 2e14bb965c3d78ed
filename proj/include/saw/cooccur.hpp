#pragma once

#include <iosfwd>
#include <vector>

#include "saw/common.hpp"
#include "saw/corpus.hpp"

namespace saw {

/// Word co-occurrence statistics.
///   Q    : symmetric d x d, entries sum to 1
///   p    : word probabilities, p[w] = sum_w' Q[w, w']
///   Qbar : rows of Q divided by p[w]; rows with p[w] == 0 are uniform and
///          flagged in `degenerate`.
struct CooccurrenceStats {
    RowMatrix Q;
    Vector p;
    RowMatrix Qbar;
    std::vector<bool> degenerate;

    Index size() const { return Q.rows(); }
};

struct RowNormalized {
    RowMatrix Qbar;
    std::vector<bool> degenerate;
};

/// Q = (1/n) sum_i (H_i H_i^T - diag(H_i)) / (m_i (m_i - 1)), H_i the count
/// column of document i. Each document contributes a term of unit mass, so a
/// word instance never co-occurs with itself.
CooccurrenceStats build_cooccurrence(const Corpus& corpus);
CooccurrenceStats build_cooccurrence(const CountMatrix& counts);

RowNormalized row_normalize(const RowMatrix& Q, const Vector& p);

/// Debug dump: d as little-endian uint64 then Q row-major as float64.
void write_q_binary(const CooccurrenceStats& stats, std::ostream& out);
RowMatrix read_q_binary(std::istream& in);

} // namespace saw
