#pragma once

#include <vector>

#include "saw/common.hpp"
#include "saw/corpus.hpp"

namespace saw {

/// Breslow cumulative baseline hazard, a right-continuous step function that
/// jumps at each distinct event time.
struct BaselineHazard {
    std::vector<double> times;
    std::vector<double> cum_hazard;

    bool empty() const { return times.empty(); }
    bool operator==(const BaselineHazard&) const = default;
};

struct SurvivalCurve {
    std::vector<double> times;
    std::vector<double> survival;
};

struct CoxModel {
    Vector beta;
    BaselineHazard baseline;
    double lambda = 0.0;
    double alpha = 1.0;
};

struct MedianPrediction {
    double time = 0.0;
    bool saturated = false;  // survival never reaches 0.5
};

/// Negative Cox partial log-likelihood as a function of the linear predictor
/// eta = Z beta. Risk sets follow the Breslow convention {j : Y_j >= Y_i}.
/// The time ordering is computed once so repeated evaluations are O(n).
class CoxPartialLikelihood {
public:
    explicit CoxPartialLikelihood(const SurvivalLabels& labels);

    Index size() const { return static_cast<Index>(observed_.size()); }
    Index num_events() const { return num_events_; }
    double value(const Vector& eta) const;
    /// Also fills d_eta with the derivative of the value with respect to eta.
    double value_and_gradient(const Vector& eta, Vector& d_eta) const;

private:
    std::vector<Index> order_;          // by time, descending
    std::vector<std::size_t> groups_;   // boundaries of equal-time runs in order_
    std::vector<bool> observed_;
    Index num_events_ = 0;
};

double cox_nll(const Vector& beta, const RowMatrix& Z, const SurvivalLabels& labels);
Vector cox_gradient(const Vector& beta, const RowMatrix& Z, const SurvivalLabels& labels);

/// lambda * (alpha ||beta||_1 + (1 - alpha) ||beta||_2^2 / 2)
double elastic_net_penalty(const Vector& beta, double lambda, double alpha);

struct CoxFitConfig {
    /// Converged once a subgradient of the penalized objective at the new
    /// iterate has ||g||_inf <= tol * max(1, number of events).
    double tol = 1e-9;
    int max_iters = 20000;
};

struct CoxFitReport {
    int iterations = 0;
    bool converged = false;
    /// Penalized objective after every iteration; non-increasing.
    std::vector<double> objective;
};

/// Monotone accelerated proximal gradient (soft-thresholding prox) with
/// backtracking. Starts from `initial` when given, otherwise from zero, and
/// fits the Breslow baseline at the solution.
CoxModel fit_elastic_net_cox(const RowMatrix& Z, const SurvivalLabels& labels,
                             double lambda, double alpha,
                             const CoxFitConfig& cfg = {},
                             const Vector* initial = nullptr,
                             CoxFitReport* report = nullptr);

BaselineHazard breslow_baseline(const Vector& beta, const RowMatrix& Z,
                                const SurvivalLabels& labels);

/// Smallest baseline time with exp(-H0(t) exp(lp)) <= 0.5, or the last
/// baseline time flagged saturated.
MedianPrediction predict_median(const BaselineHazard& baseline, double linear_predictor);
MedianPrediction predict_median(const CoxModel& model, const Vector& z);

struct KaplanMeier {
    SurvivalCurve curve;
    MedianPrediction median;
};

KaplanMeier kaplan_meier(const SurvivalLabels& labels);

} // namespace saw
