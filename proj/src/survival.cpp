#include "saw/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace saw {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Running log(sum(exp(x))) that never overflows.
struct LogSumExp {
    double shift = kNegInf;
    double sum = 0.0;

    void add(double x)
    {
        if (x == kNegInf) return;
        if (x > shift) {
            sum = sum * std::exp(shift - x) + 1.0;
            shift = x;
        } else {
            sum += std::exp(x - shift);
        }
    }
    double value() const { return shift == kNegInf ? kNegInf : shift + std::log(sum); }
};

double soft_threshold(double v, double t)
{
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

Vector elastic_net_prox(const Vector& v, double step, double lambda, double alpha)
{
    Vector out(v.size());
    const double l1 = step * lambda * alpha;
    const double shrink = 1.0 + step * lambda * (1.0 - alpha);
    for (Index j = 0; j < v.size(); ++j) out[j] = soft_threshold(v[j], l1) / shrink;
    return out;
}

void check_inputs(const RowMatrix& Z, const SurvivalLabels& labels)
{
    labels.validate();
    if (Z.rows() != labels.size())
        throw Error("cox: feature rows (" + std::to_string(Z.rows()) +
                    ") do not match labels (" + std::to_string(labels.size()) + ")");
}

} // namespace

// ---------------------------------------------------------------------------
// Partial likelihood
// ---------------------------------------------------------------------------

CoxPartialLikelihood::CoxPartialLikelihood(const SurvivalLabels& labels)
    : observed_(labels.observed)
{
    labels.validate();
    num_events_ = labels.num_events();
    if (num_events_ == 0) throw Error("cox: no observed events");
    order_.resize(labels.times.size());
    std::iota(order_.begin(), order_.end(), Index{0});
    std::stable_sort(order_.begin(), order_.end(), [&](Index a, Index b) {
        return labels.times[static_cast<std::size_t>(a)] > labels.times[static_cast<std::size_t>(b)];
    });
    groups_.push_back(0);
    for (std::size_t r = 1; r < order_.size(); ++r)
        if (labels.times[static_cast<std::size_t>(order_[r])] != labels.times[static_cast<std::size_t>(order_[r - 1])])
            groups_.push_back(r);
    groups_.push_back(order_.size());
}

double CoxPartialLikelihood::value(const Vector& eta) const
{
    Vector unused;
    return value_and_gradient(eta, unused);
}

double CoxPartialLikelihood::value_and_gradient(const Vector& eta, Vector& d_eta) const
{
    if (eta.size() != size()) throw Error("cox: linear predictor has wrong length");
    const std::size_t n_groups = groups_.size() - 1;
    std::vector<double> log_risk(n_groups);
    std::vector<int> events(n_groups, 0);

    // Descending time: each risk set is the prefix processed so far.
    LogSumExp risk;
    double nll = 0.0;
    for (std::size_t g = 0; g < n_groups; ++g) {
        for (auto r = groups_[g]; r < groups_[g + 1]; ++r) risk.add(eta[order_[r]]);
        log_risk[g] = risk.value();
        for (auto r = groups_[g]; r < groups_[g + 1]; ++r) {
            const Index i = order_[r];
            if (!observed_[static_cast<std::size_t>(i)]) continue;
            ++events[g];
            nll += log_risk[g] - eta[i];
        }
    }

    // d/d eta_j = exp(eta_j) * sum_{event groups at or before Y_j} d_g / S_g - R_j
    d_eta.resize(size());
    LogSumExp hazard;
    for (std::size_t g = n_groups; g-- > 0;) {
        if (events[g] > 0) hazard.add(std::log(static_cast<double>(events[g])) - log_risk[g]);
        const double log_h = hazard.value();
        for (auto r = groups_[g]; r < groups_[g + 1]; ++r) {
            const Index j = order_[r];
            d_eta[j] = std::exp(eta[j] + log_h) - (observed_[static_cast<std::size_t>(j)] ? 1.0 : 0.0);
        }
    }
    return nll;
}

double cox_nll(const Vector& beta, const RowMatrix& Z, const SurvivalLabels& labels)
{
    check_inputs(Z, labels);
    if (beta.size() != Z.cols()) throw Error("cox: beta length does not match features");
    return CoxPartialLikelihood(labels).value(Z * beta);
}

Vector cox_gradient(const Vector& beta, const RowMatrix& Z, const SurvivalLabels& labels)
{
    check_inputs(Z, labels);
    if (beta.size() != Z.cols()) throw Error("cox: beta length does not match features");
    Vector d_eta;
    CoxPartialLikelihood(labels).value_and_gradient(Z * beta, d_eta);
    return Z.transpose() * d_eta;
}

double elastic_net_penalty(const Vector& beta, double lambda, double alpha)
{
    return lambda * (alpha * beta.lpNorm<1>() + 0.5 * (1.0 - alpha) * beta.squaredNorm());
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

CoxModel fit_elastic_net_cox(const RowMatrix& Z, const SurvivalLabels& labels,
                             double lambda, double alpha, const CoxFitConfig& cfg,
                             const Vector* initial, CoxFitReport* report)
{
    check_inputs(Z, labels);
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("cox: lambda must be finite and >= 0");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("cox: alpha must lie in [0, 1]");
    const Index k = Z.cols();
    const CoxPartialLikelihood lik(labels);

    auto smooth = [&](const Vector& b, Vector& grad) {
        Vector d_eta;
        const double v = lik.value_and_gradient(Z * b, d_eta);
        grad = Z.transpose() * d_eta;
        return v;
    };

    Vector x = initial ? *initial : Vector::Zero(k);
    if (x.size() != k) throw Error("cox: initial beta has wrong length");
    Vector gx;
    double fx = smooth(x, gx);
    double Fx = fx + elastic_net_penalty(x, lambda, alpha);

    Vector y = x, gy = gx, x_prev = x;
    double fy = fx;
    double t = 1.0;
    double L = 1.0;
    const double scale = std::max<double>(1.0, static_cast<double>(lik.num_events()));

    CoxFitReport local;
    CoxFitReport& rep = report ? *report : local;
    rep = {};
    for (; rep.iterations < cfg.max_iters; ++rep.iterations) {
        Vector z, gz;
        double fz = 0.0;
        while (true) {
            z = elastic_net_prox(y - gy / L, 1.0 / L, lambda, alpha);
            fz = smooth(z, gz);
            const Vector diff = z - y;
            const double dd = diff.squaredNorm();
            if (!std::isfinite(fz)) {
                // fall through to a larger L
            } else if (std::abs(fz - fy) <= 1e-10 * std::max(1.0, std::abs(fy))) {
                // Function differences are at roundoff level; compare curvature via gradients.
                if ((gz - gy).dot(diff) <= L * dd) break;
            } else if (fz <= fy + gy.dot(diff) + 0.5 * L * dd) {
                break;
            }
            L *= 2.0;
            if (L > 1e300) throw Error("cox: line search diverged");
        }
        // L (y - z) + grad f(z) - grad f(y) is a subgradient of the objective at z.
        const double residual = (L * (y - z) + gz - gy).lpNorm<Eigen::Infinity>();
        const double Fz = fz + elastic_net_penalty(z, lambda, alpha);

        x_prev = x;
        const bool accepted = Fz <= Fx;
        if (accepted) {
            x = z;
            gx = gz;
            Fx = Fz;
            fx = fz;
        }
        rep.objective.push_back(Fx);
        if (accepted && residual <= cfg.tol * scale) {
            rep.converged = true;
            ++rep.iterations;
            break;
        }

        if (accepted) {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = x + ((t - 1.0) / t_next) * (x - x_prev);
            t = t_next;
        } else {
            // Momentum overshot: restart from the incumbent.
            y = x;
            t = 1.0;
        }
        if (y == x) {
            gy = gx;
            fy = fx;
        } else {
            fy = smooth(y, gy);
        }
        L *= 0.9;
    }

    CoxModel model;
    model.beta = x;
    model.lambda = lambda;
    model.alpha = alpha;
    model.baseline = breslow_baseline(x, Z, labels);
    return model;
}

// ---------------------------------------------------------------------------
// Baseline hazard and prediction
// ---------------------------------------------------------------------------

BaselineHazard breslow_baseline(const Vector& beta, const RowMatrix& Z, const SurvivalLabels& labels)
{
    check_inputs(Z, labels);
    if (beta.size() != Z.cols()) throw Error("breslow: beta length does not match features");
    if (labels.num_events() == 0) throw Error("breslow: no observed events");
    const Vector eta = Z * beta;
    const auto n = static_cast<std::size_t>(labels.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return labels.times[a] > labels.times[b]; });

    // Walk descending so the risk set grows; emit steps afterwards in ascending order.
    std::vector<double> times, increments;
    LogSumExp risk;
    for (std::size_t r = 0; r < n;) {
        const double t = labels.times[order[r]];
        int events = 0;
        std::size_t e = r;
        for (; e < n && labels.times[order[e]] == t; ++e) {
            risk.add(eta[static_cast<Index>(order[e])]);
            if (labels.observed[order[e]]) ++events;
        }
        if (events > 0) {
            times.push_back(t);
            increments.push_back(std::exp(std::log(static_cast<double>(events)) - risk.value()));
        }
        r = e;
    }
    BaselineHazard out;
    double cum = 0.0;
    for (std::size_t i = times.size(); i-- > 0;) {
        cum += increments[i];
        out.times.push_back(times[i]);
        out.cum_hazard.push_back(cum);
    }
    return out;
}

MedianPrediction predict_median(const BaselineHazard& baseline, double linear_predictor)
{
    if (baseline.empty()) throw Error("predict_median: empty baseline hazard");
    // S(t) <= 1/2  <=>  H0(t) >= log(2) exp(-lp)
    const double needed = std::log(2.0) * std::exp(-linear_predictor);
    for (std::size_t i = 0; i < baseline.times.size(); ++i)
        if (baseline.cum_hazard[i] >= needed) return {baseline.times[i], false};
    return {baseline.times.back(), true};
}

MedianPrediction predict_median(const CoxModel& model, const Vector& z)
{
    if (z.size() != model.beta.size()) throw Error("predict_median: feature length mismatch");
    return predict_median(model.baseline, model.beta.dot(z));
}

KaplanMeier kaplan_meier(const SurvivalLabels& labels)
{
    if (labels.size() == 0) throw Error("kaplan_meier: no observations");
    labels.validate();
    const auto n = static_cast<std::size_t>(labels.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return labels.times[a] < labels.times[b]; });

    KaplanMeier out;
    double surv = 1.0;
    std::size_t at_risk = n;
    for (std::size_t r = 0; r < n;) {
        const double t = labels.times[order[r]];
        std::size_t e = r;
        int events = 0;
        for (; e < n && labels.times[order[e]] == t; ++e)
            if (labels.observed[order[e]]) ++events;
        if (events > 0) {
            surv *= static_cast<double>(at_risk - events) / static_cast<double>(at_risk);
            out.curve.times.push_back(t);
            out.curve.survival.push_back(surv);
        }
        at_risk -= e - r;
        r = e;
    }
    for (std::size_t i = 0; i < out.curve.times.size(); ++i) {
        if (out.curve.survival[i] <= 0.5) {
            out.median = {out.curve.times[i], false};
            return out;
        }
    }
    out.median = {out.curve.times.empty() ? labels.times[order.back()] : out.curve.times.back(), true};
    return out;
}

} // namespace saw
