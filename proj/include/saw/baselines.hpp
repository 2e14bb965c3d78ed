#pragma once

#include <string>
#include <variant>
#include <vector>

#include "saw/corpus.hpp"
#include "saw/joint.hpp"
#include "saw/survival.hpp"

namespace saw {

/// Elastic-net Cox directly on normalized word frequencies (one coefficient
/// per word, no topics).
struct EncoxModel {
    CoxModel cox;
    std::vector<std::string> vocabulary;
};

/// Kaplan-Meier: one population median for every patient, no risk score.
struct KmModel {
    KaplanMeier km;
};

using AnyModel = std::variant<SawModel, EncoxModel, KmModel>;

EncoxModel fit_encox(const Corpus& corpus, double lambda, double alpha,
                     const CoxFitConfig& cfg = {});
KmModel fit_km(const Corpus& corpus);

std::vector<PatientPrediction> predict(const EncoxModel& model, const Corpus& corpus);
/// Risk is NaN for every patient.
std::vector<PatientPrediction> predict(const KmModel& model, const Corpus& corpus);
std::vector<PatientPrediction> predict_any(const AnyModel& model, const Corpus& corpus);

std::string method_name(const AnyModel& model);
/// False for Kaplan-Meier.
bool has_risk_scores(const AnyModel& model);

} // namespace saw
