#include "saw/joint.hpp"

#include <cmath>
#include <limits>

namespace saw {

void SawConfig::validate() const
{
    if (k < 1) throw Error("config: k must be at least 1");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error("config: lambda must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("config: alpha must lie in [0, 1]");
    if (!(outer_tol > 0.0)) throw Error("config: outer_tol must be positive");
    if (max_outer_iters < 0) throw Error("config: max_outer_iters must be >= 0");
    if (theta_solver.inner_iters < 1) throw Error("config: theta inner iterations must be >= 1");
    if (!(theta_solver.initial_step > 0.0)) throw Error("config: theta step must be positive");
    if (anchors.runs < 1) throw Error("config: anchor runs must be >= 1");
    if (anchors.projection_dim < 0) throw Error("config: projection dimension must be >= 0");
    if (!(recovery.tol > 0.0) || recovery.max_iters < 1) throw Error("config: invalid recovery settings");
    if (!(cox.tol > 0.0) || cox.max_iters < 1) throw Error("config: invalid cox settings");
    if (threads < 1) throw Error("config: threads must be >= 1");
}

// ---------------------------------------------------------------------------
// Joint problem
// ---------------------------------------------------------------------------

JointProblem::JointProblem(const CooccurrenceStats& stats, const FrequencyMatrix& Xbar,
                           const SurvivalLabels& labels, const AnchorSet& anchors)
    : stats_(stats), Xbar_(Xbar), labels_(labels), anchors_(anchors), likelihood_(labels)
{
    if (Xbar.rows() != stats.size()) throw Error("joint: document vocabulary does not match statistics");
    if (Xbar.cols() != labels.size()) throw Error("joint: documents do not match labels");
    const RowMatrix B = anchor_rows(stats, anchors);
    for (Index w = 0; w < stats.size(); ++w) {
        if (anchors.contains(w)) continue;
        free_words_.push_back(w);
        kl_terms_.emplace_back(stats.Qbar.row(w), B);
    }
}

double JointProblem::kl_total(const RowMatrix& theta) const
{
    double sum = 0.0;
    for (std::size_t f = 0; f < free_words_.size(); ++f)
        sum += kl_terms_[f].value(theta.row(free_words_[f]).transpose());
    return sum;
}

double JointProblem::smooth_objective(const RowMatrix& theta, const Vector& beta) const
{
    const RowMatrix Z = doc_topic_features(theta, Xbar_);
    return kl_total(theta) + likelihood_.value(Z * beta);
}

double JointProblem::objective(const RowMatrix& theta, const Vector& beta, double lambda, double alpha) const
{
    check_theta_feasible(theta, anchors_);
    if (beta.size() != theta.cols()) throw Error("joint: beta length does not match topic count");
    return smooth_objective(theta, beta) + elastic_net_penalty(beta, lambda, alpha);
}

RowMatrix JointProblem::theta_gradient(const RowMatrix& theta, const Vector& beta) const
{
    const RowMatrix Z = doc_topic_features(theta, Xbar_);
    Vector d_eta;
    likelihood_.value_and_gradient(Z * beta, d_eta);
    // d cox / d theta(w, g) = (Xbar d_eta)_w beta_g
    const Vector u = Xbar_ * d_eta;
    RowMatrix grad = RowMatrix::Zero(theta.rows(), theta.cols());
    Vector g;
    for (std::size_t f = 0; f < free_words_.size(); ++f) {
        const Index w = free_words_[f];
        kl_terms_[f].value_and_gradient(theta.row(w).transpose(), g);
        grad.row(w) = (g + u[w] * beta).transpose();
    }
    return grad;
}

double joint_objective(const RowMatrix& theta, const Vector& beta,
                       const CooccurrenceStats& stats, const FrequencyMatrix& Xbar,
                       const SurvivalLabels& labels, const AnchorSet& anchors,
                       double lambda, double alpha)
{
    return JointProblem(stats, Xbar, labels, anchors).objective(theta, beta, lambda, alpha);
}

// ---------------------------------------------------------------------------
// Theta step
// ---------------------------------------------------------------------------

ThetaUpdate update_theta(const JointProblem& problem, const RowMatrix& theta,
                         const Vector& beta, const ThetaSolverSettings& settings)
{
    check_theta_feasible(theta, problem.anchors());
    ThetaUpdate out;
    out.theta = theta;
    double f = problem.smooth_objective(theta, beta);
    out.objective_before = f;
    double step = settings.initial_step;
    const auto& free = problem.free_words();

    RowMatrix cand = theta;
    for (; out.iterations < settings.inner_iters; ++out.iterations) {
        const RowMatrix grad = problem.theta_gradient(out.theta, beta);
        Vector shift(static_cast<Index>(free.size()));
        double gap = 0.0;
        for (std::size_t i = 0; i < free.size(); ++i) {
            const Index w = free[i];
            shift[static_cast<Index>(i)] = grad.row(w).minCoeff();
            gap += out.theta.row(w).dot(grad.row(w)) - shift[static_cast<Index>(i)];
        }
        if (gap <= settings.gap_tol) break;

        bool accepted = false;
        double fc = f;
        while (step > 1e-30) {
            for (std::size_t i = 0; i < free.size(); ++i) {
                const Index w = free[i];
                auto row = cand.row(w);
                row = out.theta.row(w).array() *
                      (-step * (grad.row(w).array() - shift[static_cast<Index>(i)])).exp();
                row = row.cwiseMax(std::numeric_limits<double>::min());
                row /= row.sum();
            }
            fc = problem.smooth_objective(cand, beta);
            double model = f;
            for (const Index w : free) {
                const auto c = cand.row(w).array();
                model += grad.row(w).dot(cand.row(w) - out.theta.row(w)) +
                         (c * (c / out.theta.row(w).array()).log()).sum() / step;
            }
            if (fc <= f && fc <= model) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted || fc == f) break;
        out.theta = cand;
        f = fc;
        step *= 2.0;
    }
    out.objective_after = f;
    out.stalled = out.objective_after == out.objective_before;
    if (out.stalled) out.theta = theta;
    return out;
}

// ---------------------------------------------------------------------------
// Alternating fit
// ---------------------------------------------------------------------------

namespace {

void check_descent(double before, double after, const char* step, int iteration)
{
    if (after > before + kDescentSlack * std::max(1.0, std::abs(before)))
        throw Error(std::string("joint objective increased during the ") + step + " of outer iteration " +
                    std::to_string(iteration) + " (" + format_double(before) + " -> " +
                    format_double(after) + ")");
}

} // namespace

SawModel fit_saw(const Corpus& corpus, const SawConfig& config)
{
    config.validate();
    corpus.validate();
    if (corpus.num_docs() < 2) throw Error("fit: need at least two documents");
    if (corpus.labels.num_events() == 0) throw Error("fit: corpus has no observed events");
    if (config.k > corpus.num_words())
        throw Error("fit: k = " + std::to_string(config.k) + " exceeds vocabulary size " +
                    std::to_string(corpus.num_words()));

    const auto stats = build_cooccurrence(corpus);
    const auto candidates = default_candidates(corpus, stats);
    const auto anchors = stable_anchors(stats, config.k, config.anchors.runs,
                                        config.anchors.projection_dim,
                                        derive_seed(config.anchors.seed, "anchors"),
                                        candidates, config.threads);

    SawModel model;
    model.method = config.theta_step ? "saw" : "usaw";
    model.config = config;
    model.topic_model = recover_topics_unsupervised(stats, anchors, config.recovery, config.threads);
    model.word_prob = stats.p;
    model.vocabulary = corpus.vocab.words();
    model.doc_frequency = corpus.doc_frequency();
    model.cox.lambda = config.lambda;
    model.cox.alpha = config.alpha;
    model.cox.beta = Vector::Zero(config.k);

    const FrequencyMatrix Xbar = normalize_columns(corpus);
    const JointProblem problem(stats, Xbar, corpus.labels, model.topic_model.anchors);
    RowMatrix theta = model.topic_model.theta;
    Vector beta = model.cox.beta;
    auto& trace = model.trace;
    double current = problem.objective(theta, beta, config.lambda, config.alpha);
    trace.objective_values.push_back(current);

    for (int it = 1; it <= config.max_outer_iters; ++it) {
        const double start = current;

        const RowMatrix Z = doc_topic_features(theta, Xbar);
        beta = fit_elastic_net_cox(Z, corpus.labels, config.lambda, config.alpha, config.cox, &beta).beta;
        const double after_beta = problem.objective(theta, beta, config.lambda, config.alpha);
        check_descent(current, after_beta, "beta-step", it);
        trace.objective_values.push_back(after_beta);
        current = after_beta;

        if (config.theta_step) {
            theta = update_theta(problem, theta, beta, config.theta_solver).theta;
            const double after_theta = problem.objective(theta, beta, config.lambda, config.alpha);
            check_descent(current, after_theta, "theta-step", it);
            trace.objective_values.push_back(after_theta);
            current = after_theta;
        }
        trace.iterations = it;
        if (start - current < config.outer_tol * std::abs(start)) {
            trace.converged = true;
            break;
        }
    }

    model.topic_model.theta = theta;
    model.topic_model.A = recover_word_topic_matrix(theta, stats.p);
    model.cox.beta = beta;
    if (config.max_outer_iters > 0)
        model.cox.baseline = breslow_baseline(beta, doc_topic_features(theta, Xbar), corpus.labels);
    return model;
}

SawModel fit_usaw(const Corpus& corpus, SawConfig config)
{
    config.theta_step = false;
    config.max_outer_iters = 1;
    return fit_saw(corpus, config);
}

RowMatrix model_features(const SawModel& model, const Corpus& corpus)
{
    if (corpus.vocab.words() != model.vocabulary)
        throw Error("predict: corpus vocabulary does not match the model vocabulary");
    return doc_topic_features(model.topic_model.theta, normalize_columns(corpus));
}

std::vector<PatientPrediction> predict(const SawModel& model, const Corpus& corpus)
{
    const RowMatrix Z = model_features(model, corpus);
    std::vector<PatientPrediction> out;
    out.reserve(static_cast<std::size_t>(Z.rows()));
    for (Index i = 0; i < Z.rows(); ++i) {
        const double risk = Z.row(i).dot(model.cox.beta);
        const auto median = predict_median(model.cox.baseline, risk);
        out.push_back({risk, median.time, median.saturated});
    }
    return out;
}

} // namespace saw
