#include "saw/baselines.hpp"

#include <limits>

namespace saw {

namespace {

RowMatrix word_features(const Corpus& corpus)
{
    return RowMatrix(normalize_columns(corpus).transpose());
}

} // namespace

EncoxModel fit_encox(const Corpus& corpus, double lambda, double alpha, const CoxFitConfig& cfg)
{
    corpus.validate();
    EncoxModel model;
    model.cox = fit_elastic_net_cox(word_features(corpus), corpus.labels, lambda, alpha, cfg);
    model.vocabulary = corpus.vocab.words();
    return model;
}

KmModel fit_km(const Corpus& corpus)
{
    if (corpus.labels.num_events() == 0) throw Error("km: no observed events");
    return {kaplan_meier(corpus.labels)};
}

std::vector<PatientPrediction> predict(const EncoxModel& model, const Corpus& corpus)
{
    if (corpus.vocab.words() != model.vocabulary)
        throw Error("predict: corpus vocabulary does not match the model vocabulary");
    const RowMatrix Z = word_features(corpus);
    std::vector<PatientPrediction> out;
    for (Index i = 0; i < Z.rows(); ++i) {
        const double risk = Z.row(i).dot(model.cox.beta);
        const auto median = predict_median(model.cox.baseline, risk);
        out.push_back({risk, median.time, median.saturated});
    }
    return out;
}

std::vector<PatientPrediction> predict(const KmModel& model, const Corpus& corpus)
{
    const PatientPrediction p{std::numeric_limits<double>::quiet_NaN(), model.km.median.time,
                              model.km.median.saturated};
    return std::vector<PatientPrediction>(static_cast<std::size_t>(corpus.num_docs()), p);
}

std::vector<PatientPrediction> predict_any(const AnyModel& model, const Corpus& corpus)
{
    return std::visit([&](const auto& m) { return predict(m, corpus); }, model);
}

std::string method_name(const AnyModel& model)
{
    if (const auto* s = std::get_if<SawModel>(&model)) return s->method;
    if (std::holds_alternative<EncoxModel>(model)) return "encox";
    return "km";
}

bool has_risk_scores(const AnyModel& model)
{
    return !std::holds_alternative<KmModel>(model);
}

} // namespace saw
