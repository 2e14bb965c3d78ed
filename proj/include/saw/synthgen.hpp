#pragma once

#include <iosfwd>
#include <vector>

#include "saw/common.hpp"
#include "saw/corpus.hpp"

namespace saw {

/// Planted anchored topic model and the quantities sampled from it.
struct GroundTruth {
    RowMatrix A_true;  // d x k, column-stochastic
    RowMatrix W_true;  // k x n, columns on the simplex
    RowMatrix M_true;  // d x n, A_true W_true
    Vector beta_true;
    /// anchor_indices[g] is the planted anchor word of topic g.
    std::vector<Index> anchor_indices;
};

/// Picks k distinct anchor words (ascending, so topic g gets the g-th
/// smallest), gives each anchor_mass in its topic column and zero elsewhere,
/// and fills the remaining rows with Uniform(0.1, 1) weights scaled to
/// 1 - anchor_mass per column.
GroundTruth generate_topic_model(Index d, Index k, double anchor_mass, std::uint64_t seed);

struct DocLength {
    int min = 300;
    int max = 300;  // inclusive; equal to min for fixed-length documents
};

/// Samples W columns from a symmetric Dirichlet(a0) and each document as
/// multinomial draws from its M_true column. Fills truth.W_true and
/// truth.M_true. Labels are placeholders (time 1, observed) until
/// generate_survival supplies real ones. Words are named "w<index>".
Corpus generate_corpus(GroundTruth& truth, Index n, DocLength length, double a0,
                       std::uint64_t seed);

/// T_i ~ Exp(base_rate * exp(beta^T W_i)); C_i ~ Exp(c) with c chosen so that
/// the mean of P(C_i < T_i) equals censor_fraction; Y = min(T, C).
SurvivalLabels generate_survival(const RowMatrix& W_true, const Vector& beta_true,
                                 double base_rate, double censor_fraction,
                                 std::uint64_t seed);

/// theta*(w, g) = A(w, g) prior(g) / sum_h A(w, h) prior(h); rows with zero
/// mass are uniform.
RowMatrix analytic_theta(const RowMatrix& A_true, const Vector& prior);

struct SyntheticSpec {
    Index d = 60;
    Index k = 5;
    Index n = 1000;
    DocLength length;
    double a0 = 0.1;
    double anchor_mass = 0.3;
    Vector beta;  // empty selects zeros
    double base_rate = 0.1;
    double censor_fraction = 0.2;
    std::uint64_t seed = 0;
};

struct SyntheticDataset {
    GroundTruth truth;
    Corpus corpus;
};

/// Topic model, corpus and survival labels, each stage seeded from
/// derive_seed(spec.seed, stage).
SyntheticDataset generate_dataset(const SyntheticSpec& spec);

void write_ground_truth(const GroundTruth& truth, std::ostream& out);
GroundTruth read_ground_truth(std::istream& in);

} // namespace saw
