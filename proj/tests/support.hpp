#pragma once

// Hand-rolled generators and brute-force oracles shared by the unit and
// acceptance tests. Oracles deliberately avoid the library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "saw/corpus.hpp"

namespace saw::testing {

inline SurvivalLabels make_labels(std::vector<double> times, std::vector<bool> observed)
{
    SurvivalLabels l;
    l.times = std::move(times);
    l.observed = std::move(observed);
    return l;
}

inline SurvivalLabels all_observed(std::vector<double> times)
{
    std::vector<bool> obs(times.size(), true);
    return make_labels(std::move(times), std::move(obs));
}

/// Corpus from a dense word-major count table (counts[w][i]).
inline Corpus make_corpus(const std::vector<std::vector<int>>& counts, SurvivalLabels labels)
{
    const auto d = static_cast<Index>(counts.size());
    const auto n = d ? static_cast<Index>(counts[0].size()) : 0;
    Corpus c;
    std::vector<Eigen::Triplet<int>> trips;
    c.doc_lengths.assign(static_cast<std::size_t>(n), 0);
    for (Index w = 0; w < d; ++w)
        for (Index i = 0; i < n; ++i) {
            const int v = counts[static_cast<std::size_t>(w)][static_cast<std::size_t>(i)];
            if (v) trips.emplace_back(static_cast<int>(w), static_cast<int>(i), v);
            c.doc_lengths[static_cast<std::size_t>(i)] += v;
        }
    c.counts.resize(d, n);
    c.counts.setFromTriplets(trips.begin(), trips.end());
    std::vector<std::string> words;
    for (Index w = 0; w < d; ++w) words.push_back("w" + std::to_string(w));
    c.vocab = Vocabulary(words);
    for (Index i = 0; i < n; ++i) c.patient_ids.push_back("p" + std::to_string(i));
    c.labels = std::move(labels);
    return c;
}

/// Random labels: times drawn from a small set so ties occur, each observed
/// with probability 1 - censoring; at least one event is forced.
inline SurvivalLabels random_labels(std::mt19937_64& rng, std::size_t n, double censoring, int distinct_times = 0)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> pick(1, std::max(distinct_times, 1));
    SurvivalLabels l;
    for (std::size_t i = 0; i < n; ++i) {
        l.times.push_back(distinct_times > 0 ? static_cast<double>(pick(rng)) : 0.1 + 10.0 * u(rng));
        l.observed.push_back(u(rng) >= censoring);
    }
    if (std::none_of(l.observed.begin(), l.observed.end(), [](bool b) { return b; })) l.observed[0] = true;
    return l;
}

inline RowMatrix random_matrix(std::mt19937_64& rng, Index rows, Index cols, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    RowMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = g(rng);
    return m;
}

/// Harrell's c-index by enumerating every ordered pair.
inline double brute_c_index(const std::vector<double>& risk, const SurvivalLabels& labels)
{
    double concordant = 0.0;
    long comparable = 0;
    for (std::size_t i = 0; i < risk.size(); ++i)
        for (std::size_t j = 0; j < risk.size(); ++j) {
            if (!labels.observed[i] || !(labels.times[i] < labels.times[j])) continue;
            ++comparable;
            if (risk[i] > risk[j]) concordant += 1.0;
            else if (risk[i] == risk[j]) concordant += 0.5;
        }
    return concordant / static_cast<double>(comparable);
}

/// Cox negative partial log-likelihood by explicit risk-set sums.
inline double brute_cox_nll(const Vector& beta, const RowMatrix& Z, const SurvivalLabels& labels)
{
    const Vector eta = Z * beta;
    double total = 0.0;
    for (Index i = 0; i < Z.rows(); ++i) {
        if (!labels.observed[static_cast<std::size_t>(i)]) continue;
        double s = 0.0;
        for (Index j = 0; j < Z.rows(); ++j)
            if (labels.times[static_cast<std::size_t>(j)] >= labels.times[static_cast<std::size_t>(i)])
                s += std::exp(eta[j]);
        total += -eta[i] + std::log(s);
    }
    return total;
}

/// KL(p || q) with the same floor convention, written out independently.
inline double brute_kl(const std::vector<double>& p, const std::vector<double>& q)
{
    double s = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j)
        if (p[j] > 0.0) s += p[j] * std::log(p[j] / std::max(q[j], 1e-12));
    return s;
}

/// Best t on the 0.01 grid for min_t KL(target || t a + (1 - t) b).
inline double grid_argmin_two(const std::vector<double>& target, const std::vector<double>& a,
                              const std::vector<double>& b)
{
    double best_t = 0.0, best = INFINITY;
    for (int s = 0; s <= 100; ++s) {
        const double t = s / 100.0;
        std::vector<double> q(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) q[j] = t * a[j] + (1.0 - t) * b[j];
        const double v = brute_kl(target, q);
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    return best_t;
}

inline std::vector<double> row_of(const RowMatrix& m, Index r)
{
    return std::vector<double>(m.row(r).data(), m.row(r).data() + m.cols());
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("saw-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace saw::testing
