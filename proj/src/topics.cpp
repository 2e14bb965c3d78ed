#include "saw/topics.hpp"

#include <cmath>
#include <limits>

#include "saw/parallel.hpp"

namespace saw {

namespace {

/// Coordinates below this are candidates for being dropped to the face.
constexpr double kDropThreshold = 1e-3;

} // namespace

double kl_divergence(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size()) throw Error("kl_divergence: length mismatch");
    double sum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] <= 0.0) continue;
        sum += p[j] * std::log(p[j] / std::max(q[j], kKlFloor));
    }
    return sum;
}

MixtureKl::MixtureKl(const Eigen::Ref<const Eigen::RowVectorXd>& target, const RowMatrix& basis)
{
    if (target.size() != basis.cols()) throw Error("MixtureKl: basis width does not match target");
    std::vector<Index> support;
    for (Index j = 0; j < target.size(); ++j)
        if (target[j] > 0.0) support.push_back(j);
    p_.resize(static_cast<Index>(support.size()));
    basis_.resize(basis.rows(), static_cast<Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) {
        p_[static_cast<Index>(s)] = target[support[s]];
        basis_.col(static_cast<Index>(s)) = basis.col(support[s]);
    }
}

double MixtureKl::value(const Vector& theta) const
{
    const Eigen::RowVectorXd q = theta.transpose() * basis_;
    double sum = 0.0;
    for (Index j = 0; j < p_.size(); ++j) sum += p_[j] * std::log(p_[j] / std::max(q[j], kKlFloor));
    return sum;
}

double MixtureKl::value_and_gradient(const Vector& theta, Vector& grad) const
{
    const Eigen::RowVectorXd q = theta.transpose() * basis_;
    double sum = 0.0;
    Vector ratio(p_.size());
    for (Index j = 0; j < p_.size(); ++j) {
        const double qj = std::max(q[j], kKlFloor);
        sum += p_[j] * std::log(p_[j] / qj);
        ratio[j] = p_[j] / qj;
    }
    grad = -(basis_ * ratio);
    return sum;
}

RowRecovery recover_row(const MixtureKl& objective, const RecoveryConfig& cfg,
                        const std::function<void(double)>& observer)
{
    const Index k = objective.num_topics();
    RowRecovery out;
    out.theta = Vector::Constant(k, 1.0 / static_cast<double>(k));
    if (k == 1) {
        out.objective = objective.value(out.theta);
        out.converged = true;
        return out;
    }

    Vector grad(k), cand(k);
    double f = objective.value_and_gradient(out.theta, grad);
    double step = cfg.initial_step;
    for (; out.iterations < cfg.max_iters; ++out.iterations) {
        const double gmin = grad.minCoeff();
        out.gap = out.theta.dot(grad) - gmin;
        if (out.gap <= cfg.tol) {
            out.converged = true;
            break;
        }
        bool accepted = false;
        double fc = f;
        while (step > 1e-30) {
            cand = out.theta.array() * (-step * (grad.array() - gmin)).exp();
            // Exact zeros would be absorbing under multiplicative updates.
            cand = cand.cwiseMax(std::numeric_limits<double>::min());
            cand /= cand.sum();
            fc = objective.value(cand);
            // Sufficient decrease relative to the entropic model; plain
            // descent alone lets iterates zig-zag around the optimum.
            const double model = f + grad.dot(cand - out.theta) +
                                 (cand.array() * (cand.array() / out.theta.array()).log()).sum() / step;
            if (fc <= f && fc <= model) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted || fc == f) {
            // No further decrease is resolvable in floating point.
            out.converged = true;
            break;
        }
        out.theta = cand;
        f = objective.value_and_gradient(out.theta, grad);
        // When the optimum sits on a face without strict complementarity the
        // multiplicative update only approaches it sublinearly. Try dropping
        // tiny coordinates whose gradient pushes mass out; keep it only if the
        // objective improves.
        const double avg = out.theta.dot(grad);
        bool any = false;
        cand = out.theta;
        for (Index g = 0; g < k; ++g) {
            if (cand[g] > std::numeric_limits<double>::min() && cand[g] < kDropThreshold && grad[g] > avg) {
                cand[g] = std::numeric_limits<double>::min();
                any = true;
            }
        }
        if (any) {
            cand /= cand.sum();
            Vector gc(k);
            const double fd = objective.value_and_gradient(cand, gc);
            if (fd <= f) {
                out.theta = cand;
                grad = gc;
                f = fd;
            }
        }
        if (observer) observer(f);
        step *= 2.0;
    }
    out.objective = f;
    if (!out.converged) {
        out.gap = out.theta.dot(grad) - grad.minCoeff();
        out.converged = out.gap <= cfg.tol;
    }
    return out;
}

RowMatrix anchor_rows(const CooccurrenceStats& stats, const AnchorSet& anchors)
{
    RowMatrix B(anchors.size(), stats.size());
    for (Index g = 0; g < anchors.size(); ++g) {
        const Index a = anchors.indices[static_cast<std::size_t>(g)];
        if (a < 0 || a >= stats.size()) throw Error("anchor index out of range");
        B.row(g) = stats.Qbar.row(a);
    }
    return B;
}

TopicModel recover_topics_unsupervised(const CooccurrenceStats& stats,
                                       const AnchorSet& anchors,
                                       const RecoveryConfig& cfg, int threads)
{
    const Index d = stats.size();
    const Index k = anchors.size();
    if (k < 1) throw Error("recover_topics_unsupervised: empty anchor set");
    const RowMatrix B = anchor_rows(stats, anchors);

    TopicModel model;
    model.anchors = anchors;
    model.theta = RowMatrix::Zero(d, k);
    model.residuals = Vector::Zero(d);
    std::vector<int> anchor_of(static_cast<std::size_t>(d), -1);
    for (Index g = 0; g < k; ++g) {
        auto& slot = anchor_of[static_cast<std::size_t>(anchors.indices[static_cast<std::size_t>(g)])];
        if (slot >= 0) throw Error("recover_topics_unsupervised: duplicate anchor");
        slot = static_cast<int>(g);
    }

    std::vector<RowRecovery> fits(static_cast<std::size_t>(d));
    parallel_for(d, threads, [&](Index w) {
        if (anchor_of[static_cast<std::size_t>(w)] >= 0) return;
        fits[static_cast<std::size_t>(w)] = recover_row(MixtureKl(stats.Qbar.row(w), B), cfg);
    });

    Index worst = -1;
    double worst_gap = -1.0;
    for (Index w = 0; w < d; ++w) {
        const int g = anchor_of[static_cast<std::size_t>(w)];
        if (g >= 0) {
            model.theta(w, g) = 1.0;
            continue;
        }
        const auto& fit = fits[static_cast<std::size_t>(w)];
        model.theta.row(w) = fit.theta.transpose();
        model.residuals[w] = fit.objective;
        if (!fit.converged && fit.gap > worst_gap) {
            worst_gap = fit.gap;
            worst = w;
        }
    }
    if (worst >= 0)
        throw ConvergenceError(worst, "topic recovery did not converge for word " +
                                          std::to_string(worst) + " (duality gap " +
                                          format_double(worst_gap) + ")");
    return model;
}

RowMatrix recover_word_topic_matrix(const RowMatrix& theta, const Vector& p)
{
    if (theta.rows() != p.size()) throw Error("recover_word_topic_matrix: dimension mismatch");
    RowMatrix A = theta.array().colwise() * p.array();
    for (Index g = 0; g < A.cols(); ++g) {
        const double mass = A.col(g).sum();
        if (!(mass > 0.0)) throw Error("recover_word_topic_matrix: topic " + std::to_string(g) + " has zero mass");
        A.col(g) /= mass;
    }
    return A;
}

RowMatrix doc_topic_features(const RowMatrix& theta, const FrequencyMatrix& Xbar)
{
    if (theta.rows() != Xbar.rows())
        throw Error("doc_topic_features: theta has " + std::to_string(theta.rows()) +
                    " rows but documents have " + std::to_string(Xbar.rows()) + " words");
    return RowMatrix(Xbar.transpose() * theta);
}

Representability representability(const CooccurrenceStats& stats,
                                  const AnchorSet& anchors, double threshold,
                                  const RecoveryConfig& cfg)
{
    const auto model = recover_topics_unsupervised(stats, anchors, cfg);
    Representability out{model.residuals, {}};
    for (Index w = 0; w < out.residuals.size(); ++w)
        if (out.residuals[w] > threshold) out.flagged.push_back(w);
    return out;
}

void check_theta_feasible(const RowMatrix& theta, const AnchorSet& anchors, double tol)
{
    if (theta.cols() != anchors.size()) throw Error("theta: column count does not match anchor count");
    for (Index w = 0; w < theta.rows(); ++w) {
        if ((theta.row(w).array() < 0.0).any() || !theta.row(w).allFinite())
            throw Error("theta: row " + std::to_string(w) + " has a negative or non-finite entry");
        if (std::abs(theta.row(w).sum() - 1.0) > tol)
            throw Error("theta: row " + std::to_string(w) + " is off the simplex");
    }
    for (Index g = 0; g < anchors.size(); ++g) {
        const Index a = anchors.indices[static_cast<std::size_t>(g)];
        for (Index h = 0; h < theta.cols(); ++h)
            if (theta(a, h) != (g == h ? 1.0 : 0.0))
                throw Error("theta: anchor row " + std::to_string(a) + " is not an indicator");
    }
}

} // namespace saw
