#pragma once

#include <functional>
#include <span>
#include <vector>

#include "saw/anchors.hpp"
#include "saw/common.hpp"
#include "saw/cooccur.hpp"

namespace saw {

/// Floor applied to mixture probabilities inside logarithms.
inline constexpr double kKlFloor = 1e-12;

struct TopicModel {
    RowMatrix theta;  // d x k, theta(w, g) = P(topic g | word w)
    RowMatrix A;      // d x k, column-stochastic; empty until recovered
    AnchorSet anchors;
    Vector residuals;  // per-word KL residual

    Index num_topics() const { return theta.cols(); }
};

struct RecoveryConfig {
    /// Stop once the simplex duality gap theta.g - min(g), an upper bound on
    /// suboptimality, falls below tol.
    double tol = 1e-10;
    int max_iters = 1000;
    double initial_step = 1.0;
};

/// sum_j p_j log(p_j / max(q_j, eps)), with 0 log 0 = 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// f(theta) = KL(target || theta^T B) for one word, with B the k x d matrix of
/// anchor rows. Only the support of `target` enters the sum.
class MixtureKl {
public:
    MixtureKl(const Eigen::Ref<const Eigen::RowVectorXd>& target, const RowMatrix& basis);

    Index num_topics() const { return basis_.rows(); }
    double value(const Vector& theta) const;
    double value_and_gradient(const Vector& theta, Vector& grad) const;

private:
    Vector p_;
    RowMatrix basis_;  // k x |support|
};

struct RowRecovery {
    Vector theta;
    double objective = 0.0;
    double gap = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Exponentiated gradient with backtracking over the k-simplex, started at
/// the uniform point. Every accepted iterate has objective no larger than the
/// previous one; `observer` sees each accepted objective value.
RowRecovery recover_row(const MixtureKl& objective, const RecoveryConfig& cfg,
                        const std::function<void(double)>& observer = {});

/// Anchor rows of Qbar, k x d, in topic order.
RowMatrix anchor_rows(const CooccurrenceStats& stats, const AnchorSet& anchors);

/// Per-word KL recovery of theta with anchor rows pinned to indicators.
/// Throws ConvergenceError naming the worst row if any row exhausts its budget.
TopicModel recover_topics_unsupervised(const CooccurrenceStats& stats,
                                       const AnchorSet& anchors,
                                       const RecoveryConfig& cfg = {},
                                       int threads = 1);

/// A(w, g) = theta(w, g) p(w) / sum_w' theta(w', g) p(w').
RowMatrix recover_word_topic_matrix(const RowMatrix& theta, const Vector& p);

/// Z = Xbar^T theta, one row of topic proportions per document.
RowMatrix doc_topic_features(const RowMatrix& theta, const FrequencyMatrix& Xbar);

struct Representability {
    Vector residuals;
    std::vector<Index> flagged;  // residual > threshold
};

Representability representability(const CooccurrenceStats& stats,
                                  const AnchorSet& anchors, double threshold,
                                  const RecoveryConfig& cfg = {});

/// Throws unless theta rows lie on the simplex (within tol) and anchor rows
/// are exact indicators.
void check_theta_feasible(const RowMatrix& theta, const AnchorSet& anchors,
                          double tol = 1e-8);

} // namespace saw
