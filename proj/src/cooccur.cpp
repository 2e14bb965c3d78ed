#include "saw/cooccur.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

namespace saw {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary Q dump assumes a little-endian host");

} // namespace

CooccurrenceStats build_cooccurrence(const Corpus& corpus)
{
    return build_cooccurrence(corpus.counts);
}

CooccurrenceStats build_cooccurrence(const CountMatrix& counts)
{
    const Index d = counts.rows();
    const Index n = counts.cols();
    if (n == 0) throw Error("build_cooccurrence: corpus has no documents");

    // Extended-precision accumulator.
    using WideMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    WideMatrix acc = WideMatrix::Zero(d, d);
    std::vector<Index> rows;
    std::vector<double> vals;
    // Documents are accumulated in index order so Q is bit-reproducible.
    for (Index i = 0; i < n; ++i) {
        rows.clear();
        vals.clear();
        long m = 0;
        for (CountMatrix::InnerIterator it(counts, i); it; ++it) {
            if (it.value() == 0) continue;
            rows.push_back(it.row());
            vals.push_back(static_cast<double>(it.value()));
            m += it.value();
        }
        if (m < 2)
            throw Error("build_cooccurrence: document " + std::to_string(i) +
                        " has fewer than two words");
        const long double norm = 1.0L / (static_cast<long double>(m) * static_cast<long double>(m - 1));
        for (std::size_t a = 0; a < rows.size(); ++a) {
            for (std::size_t b = 0; b < rows.size(); ++b) {
                const double hh = a == b ? vals[a] * (vals[a] - 1.0) : vals[a] * vals[b];
                acc(rows[a], rows[b]) += hh * norm;
            }
        }
    }
    acc /= static_cast<long double>(n);
    RowMatrix Q = acc.cast<double>();

    CooccurrenceStats stats;
    stats.p = Q.rowwise().sum();
    auto normalized = row_normalize(Q, stats.p);
    stats.Q = std::move(Q);
    stats.Qbar = std::move(normalized.Qbar);
    stats.degenerate = std::move(normalized.degenerate);
    return stats;
}

RowNormalized row_normalize(const RowMatrix& Q, const Vector& p)
{
    if (p.size() != Q.rows()) throw Error("row_normalize: p length does not match Q");
    RowNormalized out{RowMatrix(Q.rows(), Q.cols()), std::vector<bool>(static_cast<std::size_t>(Q.rows()), false)};
    for (Index w = 0; w < Q.rows(); ++w) {
        if (p[w] < 0.0) throw Error("row_normalize: negative word probability");
        if (p[w] > 0.0) {
            out.Qbar.row(w) = Q.row(w) / p[w];
        } else {
            out.Qbar.row(w).setConstant(1.0 / static_cast<double>(Q.cols()));
            out.degenerate[static_cast<std::size_t>(w)] = true;
        }
    }
    return out;
}

void write_q_binary(const CooccurrenceStats& stats, std::ostream& out)
{
    const auto d = static_cast<std::uint64_t>(stats.Q.rows());
    out.write(reinterpret_cast<const char*>(&d), sizeof(d));
    out.write(reinterpret_cast<const char*>(stats.Q.data()),
              static_cast<std::streamsize>(stats.Q.size() * sizeof(double)));
    if (!out) throw Error("write_q_binary: write failed");
}

RowMatrix read_q_binary(std::istream& in)
{
    std::uint64_t d = 0;
    in.read(reinterpret_cast<char*>(&d), sizeof(d));
    if (!in) throw Error("read_q_binary: missing header");
    RowMatrix Q(static_cast<Index>(d), static_cast<Index>(d));
    in.read(reinterpret_cast<char*>(Q.data()),
            static_cast<std::streamsize>(Q.size() * sizeof(double)));
    if (!in) throw Error("read_q_binary: truncated matrix");
    return Q;
}

} // namespace saw
