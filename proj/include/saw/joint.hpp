#pragma once

#include <string>
#include <vector>

#include "saw/anchors.hpp"
#include "saw/common.hpp"
#include "saw/cooccur.hpp"
#include "saw/corpus.hpp"
#include "saw/survival.hpp"
#include "saw/topics.hpp"

namespace saw {

struct ThetaSolverSettings {
    /// Exponentiated-gradient iterations per theta-step.
    int inner_iters = 50;
    double initial_step = 1.0;
    /// Early exit once the summed simplex duality gap drops below this.
    double gap_tol = 1e-12;
};

struct AnchorSettings {
    int runs = 10;
    Index projection_dim = 0;  // 0 selects min(d, 1000)
    std::uint64_t seed = 0;
};

struct SawConfig {
    Index k = 5;
    double lambda = 1.0;
    double alpha = 1.0;
    double outer_tol = 1e-6;
    int max_outer_iters = 50;
    ThetaSolverSettings theta_solver;
    AnchorSettings anchors;
    RecoveryConfig recovery;
    CoxFitConfig cox;
    int threads = 1;
    /// Disabled for the two-stage baseline.
    bool theta_step = true;

    void validate() const;
};

struct FitTrace {
    /// Joint objective at the start and after every half-step.
    std::vector<double> objective_values;
    bool converged = false;
    int iterations = 0;
};

struct SawModel {
    std::string method = "saw";
    TopicModel topic_model;
    CoxModel cox;
    SawConfig config;
    FitTrace trace;
    Vector word_prob;
    std::vector<std::string> vocabulary;
    std::vector<int> doc_frequency;

    Index num_topics() const { return topic_model.num_topics(); }
};

/// Relative slack allowed when checking that a half-step did not increase
/// the joint objective.
inline constexpr double kDescentSlack = 1e-9;

/// Fixed data of the joint objective: KL terms for every non-anchor word and
/// the Cox partial likelihood over Z(theta) = Xbar^T theta. Holds references;
/// the arguments must outlive it.
class JointProblem {
public:
    JointProblem(const CooccurrenceStats& stats, const FrequencyMatrix& Xbar,
                 const SurvivalLabels& labels, const AnchorSet& anchors);

    const AnchorSet& anchors() const { return anchors_; }
    const FrequencyMatrix& frequencies() const { return Xbar_; }
    const SurvivalLabels& labels() const { return labels_; }
    const CoxPartialLikelihood& likelihood() const { return likelihood_; }
    const std::vector<Index>& free_words() const { return free_words_; }

    double kl_total(const RowMatrix& theta) const;
    /// KL total plus Cox term; the theta-subproblem objective for fixed beta.
    double smooth_objective(const RowMatrix& theta, const Vector& beta) const;
    double objective(const RowMatrix& theta, const Vector& beta, double lambda, double alpha) const;
    /// Gradient of smooth_objective with respect to the free rows (anchor
    /// rows are zero).
    RowMatrix theta_gradient(const RowMatrix& theta, const Vector& beta) const;

private:
    const CooccurrenceStats& stats_;
    const FrequencyMatrix& Xbar_;
    const SurvivalLabels& labels_;
    const AnchorSet& anchors_;
    CoxPartialLikelihood likelihood_;
    std::vector<Index> free_words_;
    std::vector<MixtureKl> kl_terms_;  // aligned with free_words_
};

double joint_objective(const RowMatrix& theta, const Vector& beta,
                       const CooccurrenceStats& stats, const FrequencyMatrix& Xbar,
                       const SurvivalLabels& labels, const AnchorSet& anchors,
                       double lambda, double alpha);

struct ThetaUpdate {
    RowMatrix theta;
    double objective_before = 0.0;
    double objective_after = 0.0;
    int iterations = 0;
    /// No step decreased the subproblem objective; theta is the input.
    bool stalled = false;
};

/// Exponentiated gradient on all free rows jointly, with a shared step size
/// backtracked on the full subproblem objective. Anchor rows are untouched and
/// the subproblem objective never increases.
ThetaUpdate update_theta(const JointProblem& problem, const RowMatrix& theta,
                         const Vector& beta, const ThetaSolverSettings& settings);

/// Alternating minimization: anchors, unsupervised theta, then repeated
/// beta-steps and theta-steps until the relative decrease of the joint
/// objective over an outer iteration falls below outer_tol.
SawModel fit_saw(const Corpus& corpus, const SawConfig& config);
/// Unsupervised topics followed by a single elastic-net Cox fit.
SawModel fit_usaw(const Corpus& corpus, SawConfig config);

struct PatientPrediction {
    double risk = 0.0;
    double median = 0.0;
    bool saturated = false;
};

/// Topic features of `corpus` under the model; throws on vocabulary mismatch.
RowMatrix model_features(const SawModel& model, const Corpus& corpus);
std::vector<PatientPrediction> predict(const SawModel& model, const Corpus& corpus);

} // namespace saw
