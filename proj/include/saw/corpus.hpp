#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "saw/common.hpp"

namespace saw {

/// One row of a 4-column event file: patient id, time (hours since
/// admission), event label, event value.
struct EventRecord {
    std::string patient_id;
    double time = 0.0;
    std::string event;
    std::variant<std::string, double> value;

    bool operator==(const EventRecord&) const = default;
};

/// Per-patient survival labels. times[i] is the length of stay in days when
/// observed[i] is set, otherwise a censoring time (a lower bound).
struct SurvivalLabels {
    std::vector<double> times;
    std::vector<bool> observed;

    Index size() const { return static_cast<Index>(times.size()); }
    Index num_events() const;
    /// Throws unless sizes agree and every time is finite and positive.
    void validate() const;
    SurvivalLabels subset(const std::vector<Index>& rows) const;

    bool operator==(const SurvivalLabels&) const = default;
};

struct PatientLabel {
    double time = 0.0;
    bool observed = false;
};
using LabelMap = std::unordered_map<std::string, PatientLabel>;

class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> words,
                        std::map<std::string, std::vector<double>> bin_edges = {});

    Index size() const { return static_cast<Index>(words_.size()); }
    const std::vector<std::string>& words() const { return words_; }
    const std::string& word(Index w) const { return words_.at(static_cast<std::size_t>(w)); }
    std::optional<Index> find(const std::string& word) const;
    /// Cut points of every binned (continuous) event.
    const std::map<std::string, std::vector<double>>& bin_edges() const { return bin_edges_; }
    /// FNV-1a over the ordered word list; identifies a vocabulary across files.
    std::uint64_t hash() const;

    bool operator==(const Vocabulary& other) const
    {
        return words_ == other.words_ && bin_edges_ == other.bin_edges_;
    }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, Index> index_;
    std::map<std::string, std::vector<double>> bin_edges_;
};

struct Corpus {
    CountMatrix counts;  // d x n
    std::vector<int> doc_lengths;
    SurvivalLabels labels;
    Vocabulary vocab;
    std::vector<std::string> patient_ids;

    Index num_words() const { return counts.rows(); }
    Index num_docs() const { return counts.cols(); }
    /// Number of documents in which each word occurs.
    std::vector<int> doc_frequency() const;
    /// Columns `docs` in the given order; vocabulary is shared.
    Corpus subset(const std::vector<Index>& docs) const;
    void validate() const;
};

struct IngestConfig {
    int default_bins = 5;
    std::map<std::string, int> bins_per_event;
    /// Events at or after a patient's cutoff are dropped.
    std::map<std::string, double> cutoffs;
    std::optional<double> global_cutoff;
    int min_doc_freq = 3;
    /// Drop words whose normalized-frequency variance across documents is
    /// below this value. Zero disables the filter.
    double variance_threshold = 0.0;
    /// When set, bin edges and word filters use only these patients
    /// (train-only vocabulary). Otherwise all patients are used.
    std::optional<std::set<std::string>> vocab_patients;
};

struct CorpusBuild {
    Corpus corpus;
    std::vector<std::string> dropped_patients;  // m_i < 2 after filtering
    std::vector<std::string> filtered_words;
};

/// Parses comma- or tab-delimited 4-column rows. A first row whose time field
/// reads "time" is a header. Blank lines are skipped.
std::vector<EventRecord> ingest_events(std::istream& in);
/// Parses rows of patient_id, Y (days, > 0), R (0/1); optional header.
LabelMap read_labels(std::istream& in);

/// Equal-frequency cut points (linear-interpolated quantiles at j/bins),
/// deduplicated. Values equal to an edge fall in the lower bin.
std::vector<double> equal_frequency_edges(std::vector<double> values, int bins);
/// 1-based bin of `value` given sorted edges.
int bin_of(double value, const std::vector<double>& edges);

CorpusBuild build_corpus(const std::vector<EventRecord>& events,
                         const LabelMap& labels,
                         const IngestConfig& cfg = {});

/// X̄ with X̄[w,i] = counts[w,i] / m_i.
FrequencyMatrix normalize_columns(const Corpus& corpus);

/// Seeded partition into (train, test); train size is round(fraction * n),
/// clamped so both parts are nonempty.
std::pair<Corpus, Corpus> split(const Corpus& corpus, double train_fraction,
                                std::uint64_t seed);
/// Train/test column indices used by split(), each sorted ascending.
std::pair<std::vector<Index>, std::vector<Index>>
split_indices(Index n, double train_fraction, std::uint64_t seed);

} // namespace saw
