#include "saw/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

namespace saw {

namespace {

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
    return buf;
}

void check_token(const std::string& s, const char* what)
{
    if (s.empty() || s.find_first_of("\t\n\r") != std::string::npos)
        throw Error(std::string("cannot serialize ") + what + " '" + s +
                    "': empty or contains tab/newline");
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::vector<std::string> next()
    {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::vector<std::string> fields;
            std::size_t start = 0;
            while (true) {
                const auto pos = line.find('\t', start);
                fields.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
                if (pos == std::string::npos) break;
                start = pos + 1;
            }
            return fields;
        }
        throw ParseError(line_ + 1, "unexpected end of file");
    }

    std::vector<std::string> expect(const std::string& key, std::size_t min_fields = 1)
    {
        auto f = next();
        if (f[0] != key) throw ParseError(line_, "expected '" + key + "', found '" + f[0] + "'");
        if (f.size() < min_fields) throw ParseError(line_, "too few fields for '" + key + "'");
        return f;
    }

    double real(const std::string& s) const
    {
        double v = 0.0;
        if (!parse_double(s, v)) throw ParseError(line_, "bad number '" + s + "'");
        return v;
    }

    long integer(const std::string& s) const
    {
        double v = real(s);
        if (v != std::floor(v)) throw ParseError(line_, "expected integer, found '" + s + "'");
        return static_cast<long>(v);
    }

    std::size_t line() const { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

void header(std::ostream& out, const char* kind)
{
    out << kind << "\t1\n";
}

void read_header(Reader& r, const char* kind)
{
    const auto f = r.next();
    if (f[0] != kind) throw ParseError(r.line(), std::string("not a ") + kind + " file");
    if (f.size() < 2 || f[1] != "1") throw ParseError(r.line(), std::string("unsupported ") + kind + " version");
}

void write_words(const std::vector<std::string>& words, std::ostream& out)
{
    out << "words\t" << words.size() << '\n';
    for (const auto& w : words) {
        check_token(w, "word");
        out << w << '\n';
    }
}

std::vector<std::string> read_words(Reader& r)
{
    const auto n = r.integer(r.expect("words", 2)[1]);
    std::vector<std::string> words;
    for (long i = 0; i < n; ++i) {
        auto f = r.next();
        words.push_back(f[0]);
    }
    return words;
}

void write_vector_line(const char* key, const Vector& v, std::ostream& out)
{
    out << key << '\t' << v.size();
    for (Index i = 0; i < v.size(); ++i) out << '\t' << format_double(v[i]);
    out << '\n';
}

Vector read_vector_line(Reader& r, const std::string& key)
{
    const auto f = r.expect(key, 2);
    const auto n = r.integer(f[1]);
    if (static_cast<long>(f.size()) != n + 2) throw ParseError(r.line(), "wrong length for '" + key + "'");
    Vector v(n);
    for (long i = 0; i < n; ++i) v[i] = r.real(f[static_cast<std::size_t>(i) + 2]);
    return v;
}

void write_baseline(const BaselineHazard& b, std::ostream& out)
{
    out << "baseline\t" << b.times.size() << '\n';
    for (std::size_t i = 0; i < b.times.size(); ++i)
        out << format_double(b.times[i]) << '\t' << format_double(b.cum_hazard[i]) << '\n';
}

BaselineHazard read_baseline(Reader& r)
{
    BaselineHazard b;
    const auto n = r.integer(r.expect("baseline", 2)[1]);
    for (long i = 0; i < n; ++i) {
        const auto f = r.next();
        if (f.size() != 2) throw ParseError(r.line(), "baseline rows need 2 fields");
        b.times.push_back(r.real(f[0]));
        b.cum_hazard.push_back(r.real(f[1]));
    }
    return b;
}

std::vector<std::pair<std::string, std::string>> config_entries(const SawConfig& c)
{
    return {
        {"k", std::to_string(c.k)},
        {"lambda", format_double(c.lambda)},
        {"alpha", format_double(c.alpha)},
        {"outer_tol", format_double(c.outer_tol)},
        {"max_outer_iters", std::to_string(c.max_outer_iters)},
        {"theta_inner_iters", std::to_string(c.theta_solver.inner_iters)},
        {"theta_initial_step", format_double(c.theta_solver.initial_step)},
        {"theta_gap_tol", format_double(c.theta_solver.gap_tol)},
        {"anchor_runs", std::to_string(c.anchors.runs)},
        {"projection_dim", std::to_string(c.anchors.projection_dim)},
        {"anchor_seed", std::to_string(c.anchors.seed)},
        {"recovery_tol", format_double(c.recovery.tol)},
        {"recovery_max_iters", std::to_string(c.recovery.max_iters)},
        {"recovery_initial_step", format_double(c.recovery.initial_step)},
        {"cox_tol", format_double(c.cox.tol)},
        {"cox_max_iters", std::to_string(c.cox.max_iters)},
        {"theta_step", c.theta_step ? "1" : "0"},
    };
}

void apply_config_entry(SawConfig& c, const std::string& key, const std::string& value, Reader& r)
{
    if (key == "k") c.k = r.integer(value);
    else if (key == "lambda") c.lambda = r.real(value);
    else if (key == "alpha") c.alpha = r.real(value);
    else if (key == "outer_tol") c.outer_tol = r.real(value);
    else if (key == "max_outer_iters") c.max_outer_iters = static_cast<int>(r.integer(value));
    else if (key == "theta_inner_iters") c.theta_solver.inner_iters = static_cast<int>(r.integer(value));
    else if (key == "theta_initial_step") c.theta_solver.initial_step = r.real(value);
    else if (key == "theta_gap_tol") c.theta_solver.gap_tol = r.real(value);
    else if (key == "anchor_runs") c.anchors.runs = static_cast<int>(r.integer(value));
    else if (key == "projection_dim") c.anchors.projection_dim = r.integer(value);
    else if (key == "anchor_seed") c.anchors.seed = std::stoull(value);
    else if (key == "recovery_tol") c.recovery.tol = r.real(value);
    else if (key == "recovery_max_iters") c.recovery.max_iters = static_cast<int>(r.integer(value));
    else if (key == "recovery_initial_step") c.recovery.initial_step = r.real(value);
    else if (key == "cox_tol") c.cox.tol = r.real(value);
    else if (key == "cox_max_iters") c.cox.max_iters = static_cast<int>(r.integer(value));
    else if (key == "theta_step") c.theta_step = value == "1";
    else throw ParseError(r.line(), "unknown config key '" + key + "'");
}

// --- SawModel -------------------------------------------------------------

void write_saw(const SawModel& m, std::ostream& out)
{
    const Index d = m.topic_model.theta.rows();
    const Index k = m.topic_model.theta.cols();
    out << "method\t" << m.method << '\n';
    out << "vocab_hash\t" << hex64(Vocabulary(m.vocabulary).hash()) << '\n';
    write_words(m.vocabulary, out);
    write_vector_line("word_prob", m.word_prob, out);
    out << "doc_freq\t" << m.doc_frequency.size();
    for (int f : m.doc_frequency) out << '\t' << f;
    out << '\n';
    for (const auto& [key, value] : config_entries(m.config)) out << "config\t" << key << '\t' << value << '\n';

    const auto& a = m.topic_model.anchors;
    out << "anchors\t" << a.indices.size() << '\t' << a.runs << '\t' << a.projection_dim << '\n';
    for (auto w : a.indices) out << w << '\n';
    out << "stability\t" << a.stability.size() << '\n';
    for (const auto& [w, c] : a.stability) out << w << '\t' << c << '\n';
    write_vector_line("residuals", m.topic_model.residuals, out);

    const auto zeros = (m.topic_model.theta.array() == 0.0).count();
    if (d * k > 0 && static_cast<double>(zeros) > kSparseThetaZeroFraction * static_cast<double>(d * k)) {
        out << "theta\tsparse\t" << d << '\t' << k << '\t' << (d * k - zeros) << '\n';
        for (Index w = 0; w < d; ++w)
            for (Index g = 0; g < k; ++g)
                if (m.topic_model.theta(w, g) != 0.0)
                    out << w << '\t' << g << '\t' << format_double(m.topic_model.theta(w, g)) << '\n';
    } else {
        out << "theta\tdense\t" << d << '\t' << k << '\n';
        for (Index w = 0; w < d; ++w) {
            for (Index g = 0; g < k; ++g) out << (g ? "\t" : "") << format_double(m.topic_model.theta(w, g));
            out << '\n';
        }
    }
    write_vector_line("beta", m.cox.beta, out);
    write_baseline(m.cox.baseline, out);
    out << "trace\t" << (m.trace.converged ? 1 : 0) << '\t' << m.trace.iterations << '\t'
        << m.trace.objective_values.size() << '\n';
    for (double v : m.trace.objective_values) out << format_double(v) << '\n';
}

SawModel read_saw(Reader& r, const std::string& method)
{
    SawModel m;
    m.method = method;
    const auto hash = r.expect("vocab_hash", 2)[1];
    m.vocabulary = read_words(r);
    if (hex64(Vocabulary(m.vocabulary).hash()) != hash) throw ParseError(r.line(), "vocabulary hash mismatch");
    m.word_prob = read_vector_line(r, "word_prob");
    const auto df = r.expect("doc_freq", 2);
    for (std::size_t i = 2; i < df.size(); ++i) m.doc_frequency.push_back(static_cast<int>(r.integer(df[i])));

    std::vector<std::string> f;
    while ((f = r.next())[0] == "config") {
        if (f.size() != 3) throw ParseError(r.line(), "config rows need a key and a value");
        apply_config_entry(m.config, f[1], f[2], r);
    }
    if (f[0] != "anchors" || f.size() != 4) throw ParseError(r.line(), "expected anchors");
    auto& a = m.topic_model.anchors;
    const auto k = r.integer(f[1]);
    a.runs = static_cast<int>(r.integer(f[2]));
    a.projection_dim = r.integer(f[3]);
    for (long g = 0; g < k; ++g) a.indices.push_back(r.integer(r.next()[0]));
    const auto n_stab = r.integer(r.expect("stability", 2)[1]);
    for (long i = 0; i < n_stab; ++i) {
        const auto s = r.next();
        if (s.size() != 2) throw ParseError(r.line(), "stability rows need 2 fields");
        a.stability[r.integer(s[0])] = static_cast<int>(r.integer(s[1]));
    }
    m.topic_model.residuals = read_vector_line(r, "residuals");

    const auto th = r.expect("theta", 4);
    const auto d = r.integer(th[2]);
    const auto kk = r.integer(th[3]);
    m.topic_model.theta = RowMatrix::Zero(d, kk);
    if (th[1] == "dense") {
        for (long w = 0; w < d; ++w) {
            const auto row = r.next();
            if (static_cast<long>(row.size()) != kk) throw ParseError(r.line(), "theta row has wrong width");
            for (long g = 0; g < kk; ++g) m.topic_model.theta(w, g) = r.real(row[static_cast<std::size_t>(g)]);
        }
    } else if (th[1] == "sparse" && th.size() == 5) {
        const auto nnz = r.integer(th[4]);
        for (long e = 0; e < nnz; ++e) {
            const auto t = r.next();
            if (t.size() != 3) throw ParseError(r.line(), "theta triplets need 3 fields");
            m.topic_model.theta(r.integer(t[0]), r.integer(t[1])) = r.real(t[2]);
        }
    } else {
        throw ParseError(r.line(), "unknown theta layout '" + th[1] + "'");
    }
    m.topic_model.A = recover_word_topic_matrix(m.topic_model.theta, m.word_prob);

    m.cox.beta = read_vector_line(r, "beta");
    m.cox.lambda = m.config.lambda;
    m.cox.alpha = m.config.alpha;
    m.cox.baseline = read_baseline(r);
    const auto tr = r.expect("trace", 4);
    m.trace.converged = tr[1] == "1";
    m.trace.iterations = static_cast<int>(r.integer(tr[2]));
    const auto len = r.integer(tr[3]);
    for (long i = 0; i < len; ++i) m.trace.objective_values.push_back(r.real(r.next()[0]));
    return m;
}

} // namespace

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

void write_corpus(const Corpus& corpus, std::ostream& out)
{
    corpus.validate();
    header(out, "saw-corpus");
    out << "vocab_hash\t" << hex64(corpus.vocab.hash()) << '\n';
    write_words(corpus.vocab.words(), out);
    out << "bins\t" << corpus.vocab.bin_edges().size() << '\n';
    for (const auto& [event, edges] : corpus.vocab.bin_edges()) {
        check_token(event, "event");
        out << event << '\t' << edges.size();
        for (double e : edges) out << '\t' << format_double(e);
        out << '\n';
    }
    out << "patients\t" << corpus.num_docs() << '\n';
    for (Index i = 0; i < corpus.num_docs(); ++i) {
        const auto& id = corpus.patient_ids[static_cast<std::size_t>(i)];
        check_token(id, "patient id");
        out << id << '\t' << format_double(corpus.labels.times[static_cast<std::size_t>(i)]) << '\t'
            << (corpus.labels.observed[static_cast<std::size_t>(i)] ? 1 : 0) << '\n';
    }
    out << "counts\t" << corpus.counts.nonZeros() << '\n';
    for (Index i = 0; i < corpus.counts.outerSize(); ++i)
        for (CountMatrix::InnerIterator it(corpus.counts, i); it; ++it)
            out << it.row() << '\t' << it.col() << '\t' << it.value() << '\n';
    out << "end\n";
}

Corpus read_corpus(std::istream& in)
{
    Reader r(in);
    read_header(r, "saw-corpus");
    const auto hash = r.expect("vocab_hash", 2)[1];
    auto words = read_words(r);

    std::map<std::string, std::vector<double>> edges;
    const auto n_bins = r.integer(r.expect("bins", 2)[1]);
    for (long b = 0; b < n_bins; ++b) {
        const auto f = r.next();
        if (f.size() < 2) throw ParseError(r.line(), "bin rows need an event and a count");
        const auto ne = r.integer(f[1]);
        if (static_cast<long>(f.size()) != ne + 2) throw ParseError(r.line(), "bin edge count mismatch");
        auto& e = edges[f[0]];
        for (long j = 0; j < ne; ++j) e.push_back(r.real(f[static_cast<std::size_t>(j) + 2]));
    }

    Corpus c;
    c.vocab = Vocabulary(std::move(words), std::move(edges));
    if (hex64(c.vocab.hash()) != hash) throw ParseError(r.line(), "vocabulary hash mismatch");
    const auto n = r.integer(r.expect("patients", 2)[1]);
    for (long i = 0; i < n; ++i) {
        const auto f = r.next();
        if (f.size() != 3) throw ParseError(r.line(), "patient rows need 3 fields");
        c.patient_ids.push_back(f[0]);
        c.labels.times.push_back(r.real(f[1]));
        if (f[2] != "0" && f[2] != "1") throw ParseError(r.line(), "observed flag must be 0 or 1");
        c.labels.observed.push_back(f[2] == "1");
    }
    const auto nnz = r.integer(r.expect("counts", 2)[1]);
    std::vector<Eigen::Triplet<int>> trips;
    c.doc_lengths.assign(static_cast<std::size_t>(n), 0);
    for (long e = 0; e < nnz; ++e) {
        const auto f = r.next();
        if (f.size() != 3) throw ParseError(r.line(), "count rows need 3 fields");
        const auto w = r.integer(f[0]), i = r.integer(f[1]), v = r.integer(f[2]);
        if (w < 0 || w >= c.vocab.size() || i < 0 || i >= n || v < 0)
            throw ParseError(r.line(), "count triplet out of range");
        trips.emplace_back(static_cast<int>(w), static_cast<int>(i), static_cast<int>(v));
        c.doc_lengths[static_cast<std::size_t>(i)] += static_cast<int>(v);
    }
    r.expect("end");
    c.counts.resize(c.vocab.size(), n);
    c.counts.setFromTriplets(trips.begin(), trips.end());
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

void write_model(const AnyModel& model, std::ostream& out)
{
    header(out, "saw-model");
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SawModel>) {
                write_saw(m, out);
            } else if constexpr (std::is_same_v<T, EncoxModel>) {
                out << "method\tencox\n";
                out << "vocab_hash\t" << hex64(Vocabulary(m.vocabulary).hash()) << '\n';
                write_words(m.vocabulary, out);
                out << "lambda\t" << format_double(m.cox.lambda) << '\n';
                out << "alpha\t" << format_double(m.cox.alpha) << '\n';
                write_vector_line("beta", m.cox.beta, out);
                write_baseline(m.cox.baseline, out);
            } else {
                out << "method\tkm\n";
                out << "curve\t" << m.km.curve.times.size() << '\n';
                for (std::size_t i = 0; i < m.km.curve.times.size(); ++i)
                    out << format_double(m.km.curve.times[i]) << '\t'
                        << format_double(m.km.curve.survival[i]) << '\n';
                out << "median\t" << format_double(m.km.median.time) << '\t'
                    << (m.km.median.saturated ? 1 : 0) << '\n';
            }
        },
        model);
    out << "end\n";
}

AnyModel read_model(std::istream& in)
{
    Reader r(in);
    read_header(r, "saw-model");
    const auto method = r.expect("method", 2)[1];
    AnyModel result;
    if (method == "saw" || method == "usaw") {
        result = read_saw(r, method);
    } else if (method == "encox") {
        EncoxModel m;
        const auto hash = r.expect("vocab_hash", 2)[1];
        m.vocabulary = read_words(r);
        if (hex64(Vocabulary(m.vocabulary).hash()) != hash) throw ParseError(r.line(), "vocabulary hash mismatch");
        m.cox.lambda = r.real(r.expect("lambda", 2)[1]);
        m.cox.alpha = r.real(r.expect("alpha", 2)[1]);
        m.cox.beta = read_vector_line(r, "beta");
        m.cox.baseline = read_baseline(r);
        result = std::move(m);
    } else if (method == "km") {
        KmModel m;
        const auto n = r.integer(r.expect("curve", 2)[1]);
        for (long i = 0; i < n; ++i) {
            const auto f = r.next();
            if (f.size() != 2) throw ParseError(r.line(), "curve rows need 2 fields");
            m.km.curve.times.push_back(r.real(f[0]));
            m.km.curve.survival.push_back(r.real(f[1]));
        }
        const auto med = r.expect("median", 3);
        m.km.median = {r.real(med[1]), med[2] == "1"};
        result = std::move(m);
    } else {
        throw ParseError(r.line(), "unknown method '" + method + "'");
    }
    r.expect("end");
    return result;
}

// ---------------------------------------------------------------------------
// Predictions and metrics
// ---------------------------------------------------------------------------

void write_predictions(const std::vector<std::string>& patient_ids,
                       const std::vector<PatientPrediction>& predictions, std::ostream& out)
{
    if (patient_ids.size() != predictions.size())
        throw Error("write_predictions: ids and predictions differ in length");
    out << "patient_id,risk_score,predicted_median_days,saturated\n";
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto& p = predictions[i];
        out << patient_ids[i] << ',' << (std::isnan(p.risk) ? "NA" : format_double(p.risk)) << ','
            << format_double(p.median) << ',' << (p.saturated ? 1 : 0) << '\n';
    }
}

std::vector<PredictionRow> read_predictions(std::istream& in)
{
    std::vector<PredictionRow> rows;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        if (row == 1 && line.rfind("patient_id,", 0) == 0) continue;
        // The id may itself contain commas; the last three fields are fixed.
        std::vector<std::string> tail;
        std::string rest = std::string(trim(line));
        for (int f = 0; f < 3; ++f) {
            const auto pos = rest.rfind(',');
            if (pos == std::string::npos) throw ParseError(row, "expected 4 comma-separated fields");
            tail.push_back(rest.substr(pos + 1));
            rest.resize(pos);
        }
        PredictionRow pr;
        pr.patient_id = rest;
        const auto& risk = tail[2];
        if (risk == "NA") pr.prediction.risk = std::numeric_limits<double>::quiet_NaN();
        else if (!parse_double(risk, pr.prediction.risk)) throw ParseError(row, "bad risk score");
        if (!parse_double(tail[1], pr.prediction.median)) throw ParseError(row, "bad median");
        if (tail[0] != "0" && tail[0] != "1") throw ParseError(row, "saturated must be 0 or 1");
        pr.prediction.saturated = tail[0] == "1";
        rows.push_back(std::move(pr));
    }
    return rows;
}

void write_metrics(const std::vector<MetricsRow>& rows, std::ostream& out)
{
    out << "method,rmse,mae,c_index,n_evaluated,n_saturated\n";
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        out << r.method << ',' << format_double(m.rmse) << ',' << format_double(m.mae) << ','
            << (std::isnan(m.c_index) ? "NA" : format_double(m.c_index)) << ',' << m.n_evaluated << ','
            << m.n_saturated << '\n';
    }
}

std::vector<MetricsRow> read_metrics(std::istream& in)
{
    std::vector<MetricsRow> rows;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty() || line.rfind("method,", 0) == 0) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        const std::string t(trim(line));
        while (true) {
            const auto pos = t.find(',', start);
            f.push_back(t.substr(start, pos == std::string::npos ? pos : pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        if (f.size() != 6) throw ParseError(row, "metrics rows need 6 fields");
        MetricsRow r;
        r.method = f[0];
        double n_eval = 0, n_sat = 0;
        if (!parse_double(f[1], r.metrics.rmse) || !parse_double(f[2], r.metrics.mae) ||
            !parse_double(f[4], n_eval) || !parse_double(f[5], n_sat))
            throw ParseError(row, "bad number in metrics row");
        if (f[3] == "NA") r.metrics.c_index = std::numeric_limits<double>::quiet_NaN();
        else if (!parse_double(f[3], r.metrics.c_index)) throw ParseError(row, "bad c-index");
        r.metrics.n_evaluated = static_cast<Index>(n_eval);
        r.metrics.n_saturated = static_cast<Index>(n_sat);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_cv_result(const CvResult& result, std::ostream& out)
{
    header(out, "saw-cv");
    const auto folds = result.folds.empty() ? 0 : *std::max_element(result.folds.begin(), result.folds.end()) + 1;
    out << "folds\t" << folds << '\n';
    const auto& b = result.grid.at(result.best);
    out << "best\t" << result.best << '\t' << b.k << '\t' << format_double(b.lambda) << '\t'
        << format_double(b.alpha) << '\t' << format_double(result.mean_score(result.best)) << '\n';
    out << "cells\t" << result.grid.size() << '\n';
    for (std::size_t c = 0; c < result.grid.size(); ++c) {
        const auto& g = result.grid[c];
        out << g.k << '\t' << format_double(g.lambda) << '\t' << format_double(g.alpha) << '\t';
        if (result.failed(c)) {
            std::string msg = result.failures[c];
            std::replace_if(msg.begin(), msg.end(), [](char ch) { return ch == '\t' || ch == '\n'; }, ' ');
            out << "failed\t" << msg << '\n';
            continue;
        }
        out << "ok\t" << format_double(result.mean_score(c));
        for (double s : result.fold_scores[c]) out << '\t' << format_double(s);
        out << '\n';
    }
    out << "assignment\t" << result.folds.size();
    for (int f : result.folds) out << '\t' << f;
    out << "\nend\n";
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

void write_topic_report(const SawModel& model, std::size_t top_n, std::ostream& out)
{
    const auto& tm = model.topic_model;
    const RowMatrix A = tm.A.size() ? tm.A : recover_word_topic_matrix(tm.theta, model.word_prob);
    for (Index g = 0; g < A.cols(); ++g) {
        const Index anchor = tm.anchors.indices.at(static_cast<std::size_t>(g));
        const double beta = g < model.cox.beta.size() ? model.cox.beta[g] : 0.0;
        out << "topic " << g << "\tanchor " << model.vocabulary.at(static_cast<std::size_t>(anchor))
            << "\tbeta " << format_double(beta) << '\n';
        std::vector<Index> order(static_cast<std::size_t>(A.rows()));
        std::iota(order.begin(), order.end(), Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return A(a, g) > A(b, g); });
        for (std::size_t i = 0; i < std::min(top_n, order.size()); ++i) {
            const Index w = order[i];
            out << "  " << model.vocabulary.at(static_cast<std::size_t>(w)) << '\t' << format_double(A(w, g))
                << '\n';
        }
    }
}

void write_anchor_report(const SawModel& model, std::ostream& out)
{
    const auto& a = model.topic_model.anchors;
    out << "topic\tanchor_index\tword\tstability\tdoc_freq\n";
    for (std::size_t g = 0; g < a.indices.size(); ++g) {
        const Index w = a.indices[g];
        const auto it = a.stability.find(w);
        out << g << '\t' << w << '\t' << model.vocabulary.at(static_cast<std::size_t>(w)) << '\t'
            << (it == a.stability.end() ? 0 : it->second) << '\t'
            << (static_cast<std::size_t>(w) < model.doc_frequency.size() ? model.doc_frequency[static_cast<std::size_t>(w)] : 0)
            << '\n';
    }
    out << "runs\t" << a.runs << "\tprojection_dim\t" << a.projection_dim << '\n';
}

} // namespace saw
