#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "saw/baselines.hpp"
#include "saw/corpus.hpp"
#include "saw/eval.hpp"
#include "saw/joint.hpp"

namespace saw {

// Every text format here is tab-separated, starts with "<kind>\t<version>",
// and writes reals in shortest round-trip form, so writing the same object
// twice yields identical bytes.

void write_corpus(const Corpus& corpus, std::ostream& out);
Corpus read_corpus(std::istream& in);

/// Threshold above which theta is written as sparse triplets.
inline constexpr double kSparseThetaZeroFraction = 0.5;

void write_model(const AnyModel& model, std::ostream& out);
AnyModel read_model(std::istream& in);

struct PredictionRow {
    std::string patient_id;
    PatientPrediction prediction;
};

/// CSV: patient_id,risk_score,predicted_median_days,saturated. NaN risk is
/// written as NA.
void write_predictions(const std::vector<std::string>& patient_ids,
                       const std::vector<PatientPrediction>& predictions, std::ostream& out);
std::vector<PredictionRow> read_predictions(std::istream& in);

struct MetricsRow {
    std::string method;
    Metrics metrics;
};

/// CSV: method,rmse,mae,c_index,n_evaluated,n_saturated.
void write_metrics(const std::vector<MetricsRow>& rows, std::ostream& out);
std::vector<MetricsRow> read_metrics(std::istream& in);

void write_cv_result(const CvResult& result, std::ostream& out);

/// Topic report: per topic, its anchor word, beta, and the top words by A.
void write_topic_report(const SawModel& model, std::size_t top_n, std::ostream& out);
/// Anchor report: topic, anchor index, word, stability count, document frequency.
void write_anchor_report(const SawModel& model, std::ostream& out);

} // namespace saw
