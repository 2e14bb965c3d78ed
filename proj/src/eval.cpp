#include "saw/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace saw {

namespace {

class Fenwick {
public:
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
    void add(std::size_t i)
    {
        for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
    }
    /// Count of inserted positions < i.
    long prefix(std::size_t i) const
    {
        long s = 0;
        for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
        return s;
    }

private:
    std::vector<long> tree_;
};

} // namespace

ErrorSummary rmse_mae(std::span<const double> predicted, const SurvivalLabels& labels)
{
    if (static_cast<Index>(predicted.size()) != labels.size())
        throw Error("rmse_mae: predictions and labels differ in length");
    ErrorSummary out;
    double sq = 0.0, abs = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (!labels.observed[i]) continue;
        const double e = predicted[i] - labels.times[i];
        sq += e * e;
        abs += std::abs(e);
        ++out.n;
    }
    if (out.n == 0) throw Error("rmse_mae: no uncensored patients to evaluate");
    out.rmse = std::sqrt(sq / static_cast<double>(out.n));
    out.mae = abs / static_cast<double>(out.n);
    return out;
}

double c_index(std::span<const double> risk, const SurvivalLabels& labels)
{
    const auto n = risk.size();
    if (static_cast<Index>(n) != labels.size()) throw Error("c_index: risks and labels differ in length");
    for (double r : risk)
        if (std::isnan(r)) throw Error("c_index: NaN risk score");

    std::vector<double> levels(risk.begin(), risk.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    auto rank = [&](double r) {
        return static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), r) - levels.begin());
    };

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return labels.times[a] > labels.times[b]; });

    // Walk times descending; the tree holds everyone with a strictly later time.
    Fenwick later(levels.size());
    long inserted = 0;
    long comparable = 0;
    long twice_concordant = 0;
    for (std::size_t r = 0; r < n;) {
        std::size_t e = r;
        while (e < n && labels.times[order[e]] == labels.times[order[r]]) ++e;
        for (std::size_t q = r; q < e; ++q) {
            const auto i = order[q];
            if (!labels.observed[i]) continue;
            const auto ri = rank(risk[i]);
            const long below = later.prefix(ri);
            const long tied = later.prefix(ri + 1) - below;
            comparable += inserted;
            twice_concordant += 2 * below + tied;
        }
        for (std::size_t q = r; q < e; ++q) later.add(rank(risk[order[q]]));
        inserted += static_cast<long>(e - r);
        r = e;
    }
    if (comparable == 0) throw Error("c_index: no comparable pairs");
    return static_cast<double>(twice_concordant) / (2.0 * static_cast<double>(comparable));
}

Metrics evaluate_predictions(const std::vector<PatientPrediction>& predictions,
                             const SurvivalLabels& labels, bool has_risk)
{
    std::vector<double> medians, risks;
    Metrics m;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        medians.push_back(predictions[i].median);
        risks.push_back(predictions[i].risk);
        if (labels.observed.at(i) && predictions[i].saturated) ++m.n_saturated;
    }
    const auto err = rmse_mae(medians, labels);
    m.rmse = err.rmse;
    m.mae = err.mae;
    m.n_evaluated = err.n;
    m.c_index = has_risk ? c_index(risks, labels) : std::numeric_limits<double>::quiet_NaN();
    return m;
}

std::vector<GridCell> default_grid()
{
    std::vector<GridCell> grid;
    for (Index k : {2, 5, 8})
        for (double lambda : {0.01, 0.1, 1.0, 10.0})
            for (double alpha : {0.5, 1.0}) grid.push_back({k, lambda, alpha});
    return grid;
}

double CvResult::mean_score(std::size_t cell) const
{
    if (failed(cell)) return std::numeric_limits<double>::infinity();
    const auto& s = fold_scores[cell];
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

std::vector<int> assign_folds(const SurvivalLabels& labels, int folds, std::uint64_t seed)
{
    if (folds < 2) throw Error("cross-validation: need at least 2 folds");
    const auto n = static_cast<std::size_t>(labels.size());
    if (n < static_cast<std::size_t>(folds)) throw Error("cross-validation: fewer documents than folds");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> fold(n);
    std::vector<int> events(static_cast<std::size_t>(folds), 0);
    for (std::size_t p = 0; p < n; ++p) {
        fold[perm[p]] = static_cast<int>(p % static_cast<std::size_t>(folds));
        if (labels.observed[perm[p]]) ++events[static_cast<std::size_t>(fold[perm[p]])];
    }
    for (int f = 0; f < folds; ++f)
        if (events[static_cast<std::size_t>(f)] == 0)
            throw Error("cross-validation: fold " + std::to_string(f) +
                        " has no observed events; use fewer folds");
    return fold;
}

CvOutcome cross_validate(const Corpus& train, const std::vector<GridCell>& grid, int folds,
                         std::uint64_t seed, const SawConfig& base, const CvObserver& observer)
{
    if (grid.empty()) throw Error("cross-validation: empty grid");
    CvOutcome out;
    CvResult& res = out.result;
    res.grid = grid;
    res.folds = assign_folds(train.labels, folds, seed);
    res.fold_scores.assign(grid.size(), {});
    res.failures.assign(grid.size(), {});

    std::vector<std::vector<Index>> fit_docs(static_cast<std::size_t>(folds)), held_docs(static_cast<std::size_t>(folds));
    for (Index i = 0; i < train.num_docs(); ++i) {
        const int f = res.folds[static_cast<std::size_t>(i)];
        held_docs[static_cast<std::size_t>(f)].push_back(i);
        for (int g = 0; g < folds; ++g)
            if (g != f) fit_docs[static_cast<std::size_t>(g)].push_back(i);
    }

    for (std::size_t c = 0; c < grid.size(); ++c) {
        SawConfig cfg = base;
        cfg.k = grid[c].k;
        cfg.lambda = grid[c].lambda;
        cfg.alpha = grid[c].alpha;
        try {
            std::vector<double> scores;
            for (int f = 0; f < folds; ++f) {
                const Corpus fit_set = train.subset(fit_docs[static_cast<std::size_t>(f)]);
                const Corpus held_out = train.subset(held_docs[static_cast<std::size_t>(f)]);
                if (observer) observer(c, f, fit_set, held_out);
                const auto model = cfg.theta_step ? fit_saw(fit_set, cfg) : fit_usaw(fit_set, cfg);
                std::vector<double> medians;
                for (const auto& p : predict(model, held_out)) medians.push_back(p.median);
                scores.push_back(rmse_mae(medians, held_out.labels).rmse);
            }
            res.fold_scores[c] = std::move(scores);
        } catch (const std::exception& e) {
            res.failures[c] = e.what();
            if (res.failures[c].empty()) res.failures[c] = "unknown failure";
        }
    }

    bool found = false;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        if (res.failed(c)) continue;
        const double s = res.mean_score(c);
        const double b = found ? res.mean_score(res.best) : 0.0;
        if (!found || s < b || (s == b && grid[c] < grid[res.best])) {
            res.best = c;
            found = true;
        }
    }
    if (!found) throw Error("cross-validation: every grid cell failed (first: " + res.failures.front() + ")");

    SawConfig cfg = base;
    cfg.k = grid[res.best].k;
    cfg.lambda = grid[res.best].lambda;
    cfg.alpha = grid[res.best].alpha;
    out.model = cfg.theta_step ? fit_saw(train, cfg) : fit_usaw(train, cfg);
    return out;
}

} // namespace saw
