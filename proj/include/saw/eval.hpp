#pragma once

#include <compare>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "saw/common.hpp"
#include "saw/corpus.hpp"
#include "saw/joint.hpp"

namespace saw {

struct Metrics {
    double rmse = 0.0;  // days
    double mae = 0.0;   // days
    /// NaN when the method produces no risk scores (Kaplan-Meier).
    double c_index = 0.0;
    Index n_evaluated = 0;
    Index n_saturated = 0;
};

struct ErrorSummary {
    double rmse = 0.0;
    double mae = 0.0;
    Index n = 0;
};

/// Errors of predicted times against observed (uncensored) patients only.
ErrorSummary rmse_mae(std::span<const double> predicted, const SurvivalLabels& labels);

/// Harrell's concordance: (i, j) is comparable when Y_i < Y_j and R_i = 1,
/// concordant when risk_i > risk_j, and a risk tie counts one half.
/// O(n log n) via a Fenwick tree over risk ranks.
double c_index(std::span<const double> risk, const SurvivalLabels& labels);

Metrics evaluate_predictions(const std::vector<PatientPrediction>& predictions,
                             const SurvivalLabels& labels, bool has_risk = true);

struct GridCell {
    Index k = 5;
    double lambda = 1.0;
    double alpha = 1.0;

    auto operator<=>(const GridCell&) const = default;
};

/// k in {2, 5, 8}, lambda in {0.01, 0.1, 1, 10}, alpha in {0.5, 1}.
std::vector<GridCell> default_grid();

struct CvResult {
    std::vector<GridCell> grid;
    /// fold_scores[cell][fold] = held-out RMSE; empty for failed cells.
    std::vector<std::vector<double>> fold_scores;
    std::vector<std::string> failures;  // empty string when the cell succeeded
    std::size_t best = 0;
    std::vector<int> folds;  // fold id per training document

    double mean_score(std::size_t cell) const;
    bool failed(std::size_t cell) const { return !failures[cell].empty(); }
};

struct CvOutcome {
    CvResult result;
    SawModel model;  // refit on the full training corpus with the best cell
};

/// Called before each fold fit with the fitting and held-out corpora.
using CvObserver = std::function<void(std::size_t cell, int fold, const Corpus& fit_set,
                                      const Corpus& held_out)>;

/// Seeded fold ids (shuffled, then round-robin). Throws if a fold would hold
/// no observed event.
std::vector<int> assign_folds(const SurvivalLabels& labels, int folds, std::uint64_t seed);

/// K-fold grid search minimizing mean held-out RMSE of predicted medians,
/// then a refit of the winning cell on all of `train`. `base` supplies every
/// setting other than (k, lambda, alpha). Cells whose fit throws are marked
/// failed and skipped.
CvOutcome cross_validate(const Corpus& train, const std::vector<GridCell>& grid, int folds,
                         std::uint64_t seed, const SawConfig& base,
                         const CvObserver& observer = {});

} // namespace saw
