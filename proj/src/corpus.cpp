#include "saw/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <random>
#include <sstream>

namespace saw {

namespace {

std::vector<std::string_view> split_fields(std::string_view line)
{
    const char delim = line.find('\t') != std::string_view::npos ? '\t' : ',';
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string value_string(const std::variant<std::string, double>& v)
{
    if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
    return std::get<std::string>(v);
}

CountMatrix columns_of(const CountMatrix& counts, const std::vector<Index>& docs)
{
    std::vector<Eigen::Triplet<int>> trips;
    for (std::size_t j = 0; j < docs.size(); ++j) {
        for (CountMatrix::InnerIterator it(counts, docs[j]); it; ++it)
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(j), it.value());
    }
    CountMatrix out(counts.rows(), static_cast<Index>(docs.size()));
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// SurvivalLabels
// ---------------------------------------------------------------------------

Index SurvivalLabels::num_events() const
{
    return std::count(observed.begin(), observed.end(), true);
}

void SurvivalLabels::validate() const
{
    if (times.size() != observed.size())
        throw Error("survival labels: times and observed differ in length");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] <= 0.0)
            throw Error("survival labels: time at position " + std::to_string(i) +
                        " is not a positive finite number");
    }
}

SurvivalLabels SurvivalLabels::subset(const std::vector<Index>& rows) const
{
    SurvivalLabels out;
    out.times.reserve(rows.size());
    out.observed.reserve(rows.size());
    for (auto r : rows) {
        out.times.push_back(times.at(static_cast<std::size_t>(r)));
        out.observed.push_back(observed.at(static_cast<std::size_t>(r)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> words,
                       std::map<std::string, std::vector<double>> bin_edges)
    : words_(std::move(words)), bin_edges_(std::move(bin_edges))
{
    index_.reserve(words_.size());
    for (std::size_t w = 0; w < words_.size(); ++w) {
        if (!index_.emplace(words_[w], static_cast<Index>(w)).second)
            throw Error("vocabulary: duplicate word '" + words_[w] + "'");
    }
}

std::optional<Index> Vocabulary::find(const std::string& word) const
{
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t Vocabulary::hash() const
{
    std::uint64_t h = fnv1a64("");
    for (const auto& w : words_) {
        h = fnv1a64(w, h);
        h = fnv1a64(std::string_view("\n", 1), h);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

std::vector<int> Corpus::doc_frequency() const
{
    std::vector<int> df(static_cast<std::size_t>(num_words()), 0);
    for (Index i = 0; i < counts.outerSize(); ++i)
        for (CountMatrix::InnerIterator it(counts, i); it; ++it)
            if (it.value() > 0) ++df[static_cast<std::size_t>(it.row())];
    return df;
}

Corpus Corpus::subset(const std::vector<Index>& docs) const
{
    Corpus out;
    out.counts = columns_of(counts, docs);
    out.labels = labels.subset(docs);
    out.vocab = vocab;
    for (auto i : docs) {
        out.doc_lengths.push_back(doc_lengths.at(static_cast<std::size_t>(i)));
        out.patient_ids.push_back(patient_ids.at(static_cast<std::size_t>(i)));
    }
    return out;
}

void Corpus::validate() const
{
    if (counts.rows() != vocab.size())
        throw Error("corpus: count rows do not match vocabulary size");
    const auto n = static_cast<std::size_t>(counts.cols());
    if (doc_lengths.size() != n || patient_ids.size() != n ||
        static_cast<std::size_t>(labels.size()) != n)
        throw Error("corpus: per-document arrays disagree with column count");
    labels.validate();
    for (Index i = 0; i < counts.cols(); ++i) {
        long sum = 0;
        for (CountMatrix::InnerIterator it(counts, i); it; ++it) {
            if (it.value() < 0) throw Error("corpus: negative count");
            sum += it.value();
        }
        if (sum != doc_lengths[static_cast<std::size_t>(i)])
            throw Error("corpus: document length mismatch for " + patient_ids[static_cast<std::size_t>(i)]);
    }
}

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

std::vector<EventRecord> ingest_events(std::istream& in)
{
    std::vector<EventRecord> out;
    std::string line;
    std::size_t row = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 4)
            throw ParseError(row, "expected 4 fields, found " + std::to_string(fields.size()));
        const bool first = !seen_content;
        seen_content = true;
        if (first && lower(fields[1]) == "time") continue;

        EventRecord rec;
        rec.patient_id = std::string(fields[0]);
        if (rec.patient_id.empty()) throw ParseError(row, "empty patient id");
        if (!parse_double(fields[1], rec.time) || !std::isfinite(rec.time))
            throw ParseError(row, "unparseable time '" + std::string(fields[1]) + "'");
        if (rec.time < 0.0) throw ParseError(row, "negative time");
        rec.event = std::string(fields[2]);
        if (rec.event.empty()) throw ParseError(row, "empty event");
        double v = 0.0;
        if (parse_double(fields[3], v) && std::isfinite(v))
            rec.value = v;
        else
            rec.value = std::string(fields[3]);
        out.push_back(std::move(rec));
    }
    return out;
}

LabelMap read_labels(std::istream& in)
{
    LabelMap out;
    std::string line;
    std::size_t row = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 3)
            throw ParseError(row, "expected 3 fields (patient_id, Y, R), found " +
                                      std::to_string(fields.size()));
        const bool first = !seen_content;
        seen_content = true;
        double y = 0.0;
        if (!parse_double(fields[1], y)) {
            if (first) continue;  // header
            throw ParseError(row, "unparseable time '" + std::string(fields[1]) + "'");
        }
        if (!std::isfinite(y) || y <= 0.0) throw ParseError(row, "Y must be positive");
        if (fields[2] != "0" && fields[2] != "1") throw ParseError(row, "R must be 0 or 1");
        if (!out.emplace(std::string(fields[0]), PatientLabel{y, fields[2] == "1"}).second)
            throw ParseError(row, "duplicate patient '" + std::string(fields[0]) + "'");
    }
    return out;
}

std::vector<double> equal_frequency_edges(std::vector<double> values, int bins)
{
    if (bins < 1) throw Error("bin count must be at least 1");
    if (values.empty()) return {};
    std::sort(values.begin(), values.end());
    std::vector<double> edges;
    const double last = static_cast<double>(values.size() - 1);
    for (int j = 1; j < bins; ++j) {
        const double pos = last * j / bins;
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        const double q = values[lo] + frac * (values[hi] - values[lo]);
        if (edges.empty() || q > edges.back()) edges.push_back(q);
    }
    // An edge at the maximum would leave an empty top bin.
    while (!edges.empty() && edges.back() >= values.back()) edges.pop_back();
    return edges;
}

int bin_of(double value, const std::vector<double>& edges)
{
    const auto it = std::lower_bound(edges.begin(), edges.end(), value);
    return static_cast<int>(it - edges.begin()) + 1;
}

CorpusBuild build_corpus(const std::vector<EventRecord>& events,
                         const LabelMap& labels,
                         const IngestConfig& cfg)
{
    if (cfg.default_bins < 1) throw Error("ingest: default bin count must be >= 1");
    if (cfg.min_doc_freq < 0) throw Error("ingest: negative minimum document frequency");

    std::set<std::string> unlabeled;
    for (const auto& e : events)
        if (!labels.count(e.patient_id)) unlabeled.insert(e.patient_id);
    if (!unlabeled.empty()) {
        std::string ids;
        for (const auto& id : unlabeled) ids += (ids.empty() ? "" : ", ") + id;
        throw Error("patients with events but no label: " + ids);
    }

    auto retained = [&](const EventRecord& e) {
        if (cfg.global_cutoff && e.time >= *cfg.global_cutoff) return false;
        auto it = cfg.cutoffs.find(e.patient_id);
        return it == cfg.cutoffs.end() || e.time < it->second;
    };
    auto in_vocab_set = [&](const std::string& pid) {
        return !cfg.vocab_patients || cfg.vocab_patients->count(pid) > 0;
    };

    // An event is binned when every value is numeric and it has more distinct
    // values than bins.
    std::map<std::string, std::vector<double>> numeric_values;
    std::set<std::string> categorical;
    for (const auto& e : events) {
        if (!retained(e)) continue;
        if (const auto* v = std::get_if<double>(&e.value)) {
            if (in_vocab_set(e.patient_id)) numeric_values[e.event].push_back(*v);
            else numeric_values[e.event];
        } else {
            categorical.insert(e.event);
        }
    }
    std::map<std::string, std::vector<double>> edges;
    for (auto& [event, values] : numeric_values) {
        if (categorical.count(event)) continue;
        auto bins_it = cfg.bins_per_event.find(event);
        const int bins = bins_it == cfg.bins_per_event.end() ? cfg.default_bins : bins_it->second;
        std::vector<double> distinct = values;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (static_cast<int>(distinct.size()) > bins)
            edges.emplace(event, equal_frequency_edges(values, bins));
    }

    auto word_of = [&](const EventRecord& e) {
        auto it = edges.find(e.event);
        if (it != edges.end())
            return e.event + ":bin" + std::to_string(bin_of(std::get<double>(e.value), it->second));
        const auto v = value_string(e.value);
        return v.empty() ? e.event : e.event + "=" + v;
    };

    // patient -> word -> count
    std::map<std::string, std::map<std::string, int>> docs;
    for (const auto& [pid, label] : labels) docs[pid];
    for (const auto& e : events)
        if (retained(e)) ++docs[e.patient_id][word_of(e)];

    std::map<std::string, int> df;
    for (const auto& [pid, words] : docs)
        if (in_vocab_set(pid))
            for (const auto& [w, c] : words) ++df[w];
    for (const auto& [pid, words] : docs)
        for (const auto& [w, c] : words) df.try_emplace(w, 0);

    CorpusBuild result;
    std::vector<std::string> kept;
    for (const auto& [w, f] : df) {
        if (f >= cfg.min_doc_freq) kept.push_back(w);
        else result.filtered_words.push_back(w);
    }

    if (cfg.variance_threshold > 0.0 && !kept.empty()) {
        // Population variance of normalized frequency across vocabulary docs.
        std::map<std::string, double> sum, sumsq;
        std::set<std::string> keep_set(kept.begin(), kept.end());
        double n_docs = 0;
        for (const auto& [pid, words] : docs) {
            if (!in_vocab_set(pid)) continue;
            double m = 0;
            for (const auto& [w, c] : words)
                if (keep_set.count(w)) m += c;
            if (m <= 0) continue;
            n_docs += 1;
            for (const auto& [w, c] : words) {
                if (!keep_set.count(w)) continue;
                sum[w] += c / m;
                sumsq[w] += (c / m) * (c / m);
            }
        }
        std::vector<std::string> survivors;
        for (const auto& w : kept) {
            const double mean = n_docs > 0 ? sum[w] / n_docs : 0.0;
            const double var = n_docs > 0 ? sumsq[w] / n_docs - mean * mean : 0.0;
            if (var >= cfg.variance_threshold) survivors.push_back(w);
            else result.filtered_words.push_back(w);
        }
        kept = std::move(survivors);
        std::sort(result.filtered_words.begin(), result.filtered_words.end());
    }
    if (kept.empty()) throw Error("ingest: no words survive the vocabulary filters");

    Vocabulary vocab(kept, edges);
    std::vector<Eigen::Triplet<int>> trips;
    Corpus& corpus = result.corpus;
    int col = 0;
    for (const auto& [pid, words] : docs) {
        int m = 0;
        for (const auto& [w, c] : words)
            if (vocab.find(w)) m += c;
        if (m < 2) {
            result.dropped_patients.push_back(pid);
            continue;
        }
        for (const auto& [w, c] : words)
            if (auto idx = vocab.find(w)) trips.emplace_back(static_cast<int>(*idx), col, c);
        const auto& label = labels.at(pid);
        corpus.patient_ids.push_back(pid);
        corpus.doc_lengths.push_back(m);
        corpus.labels.times.push_back(label.time);
        corpus.labels.observed.push_back(label.observed);
        ++col;
    }
    if (col == 0) throw Error("ingest: no patient has at least two retained words");
    corpus.counts.resize(vocab.size(), col);
    corpus.counts.setFromTriplets(trips.begin(), trips.end());
    corpus.vocab = std::move(vocab);
    corpus.validate();
    return result;
}

FrequencyMatrix normalize_columns(const Corpus& corpus)
{
    FrequencyMatrix out = corpus.counts.cast<double>();
    for (Index i = 0; i < out.outerSize(); ++i) {
        double m = 0.0;
        for (FrequencyMatrix::InnerIterator it(out, i); it; ++it) m += it.value();
        if (m <= 0.0)
            throw Error("normalize_columns: document " + std::to_string(i) + " has zero length");
        for (FrequencyMatrix::InnerIterator it(out, i); it; ++it) it.valueRef() /= m;
    }
    return out;
}

std::pair<std::vector<Index>, std::vector<Index>>
split_indices(Index n, double train_fraction, std::uint64_t seed)
{
    if (n < 2) throw Error("split: need at least 2 documents");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error("split: train fraction must lie in (0, 1)");
    std::vector<Index> perm(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    const Index n_train =
        std::clamp<Index>(std::llround(train_fraction * static_cast<double>(n)), 1, n - 1);
    std::vector<Index> train(perm.begin(), perm.begin() + n_train);
    std::vector<Index> test(perm.begin() + n_train, perm.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

std::pair<Corpus, Corpus> split(const Corpus& corpus, double train_fraction,
                                std::uint64_t seed)
{
    auto [train, test] = split_indices(corpus.num_docs(), train_fraction, seed);
    return {corpus.subset(train), corpus.subset(test)};
}

} // namespace saw
