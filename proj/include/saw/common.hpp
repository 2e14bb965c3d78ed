#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace saw {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// Word-by-document count matrix (d rows, n columns).
using CountMatrix = Eigen::SparseMatrix<int, Eigen::ColMajor>;
/// Column-stochastic word-by-document frequency matrix.
using FrequencyMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input at a 1-based row of a text file.
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// An iterative solver exhausted its budget; `index` names the offending unit
/// (row, topic, ...).
class ConvergenceError : public Error {
public:
    ConvergenceError(Index index, const std::string& what)
        : Error(what), index_(index) {}
    Index index() const noexcept { return index_; }

private:
    Index index_;
};

/// Derives an independent stream seed from a master seed and a stage tag.
/// splitmix64(seed ^ fnv1a64(tag)).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Shortest round-trip decimal representation.
std::string format_double(double x);
/// Strict parse; rejects trailing garbage and empty input.
bool parse_double(std::string_view text, double& out);

std::string_view trim(std::string_view s);

} // namespace saw
