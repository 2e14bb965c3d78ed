#include "saw/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "saw/baselines.hpp"
#include "saw/cooccur.hpp"
#include "saw/corpus.hpp"
#include "saw/eval.hpp"
#include "saw/io.hpp"
#include "saw/joint.hpp"
#include "saw/synthgen.hpp"

namespace saw::cli {

namespace {

const std::vector<std::string> kCommands = {"ingest", "synth", "train", "predict", "evaluate", "cv", "report"};

std::string to_text(const std::string& v) { return v; }
std::string to_text(double v) { return format_double(v); }
std::string to_text(bool v) { return v ? "true" : "false"; }
template <class T>
std::enable_if_t<std::is_integral_v<T>, std::string> to_text(T v)
{
    return std::to_string(v);
}

/// Binds options to variables and remembers how to print their resolved
/// values, so every run can record its complete configuration.
class Options {
public:
    explicit Options(CLI::App& app) : app_(app) {}

    template <class T>
    CLI::Option* add(const std::string& name, T& var, const std::string& help)
    {
        entries_.emplace_back(name, [&var] { return to_text(var); });
        return app_.add_option("--" + name, var, help);
    }

    CLI::Option* flag(const std::string& name, bool& var, const std::string& help)
    {
        entries_.emplace_back(name, [&var] { return to_text(var); });
        return app_.add_flag("--" + name, var, help);
    }

    void write(const std::string& command, std::ostream& out) const
    {
        out << "# saw " << command << '\n';
        for (const auto& [name, value] : entries_) out << name << '=' << value() << '\n';
    }

private:
    CLI::App& app_;
    std::vector<std::pair<std::string, std::function<std::string()>>> entries_;
};

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    return out;
}

template <class Fn>
void write_file(const std::string& path, Fn&& fn)
{
    auto out = open_out(path);
    fn(out);
    out.flush();
    if (!out) throw Error("failed writing '" + path + "'");
}

Corpus load_corpus(const std::string& path)
{
    auto in = open_in(path);
    try {
        return read_corpus(in);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

AnyModel load_model(const std::string& path)
{
    auto in = open_in(path);
    try {
        return read_model(in);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

std::vector<std::string> split_list(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        const auto t = trim(item);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::vector<double> parse_reals(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    for (const auto& item : split_list(text, ',')) {
        double v = 0.0;
        if (!parse_double(item, v)) throw Error(what + ": bad number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

/// "name=value;name=value" into a map.
std::map<std::string, double> parse_pairs(const std::string& text, const std::string& what)
{
    std::map<std::string, double> out;
    for (const auto& item : split_list(text, ';')) {
        const auto eq = item.rfind('=');
        double v = 0.0;
        if (eq == std::string::npos || eq == 0 || !parse_double(item.substr(eq + 1), v))
            throw Error(what + ": expected name=value, found '" + item + "'");
        out[item.substr(0, eq)] = v;
    }
    return out;
}

/// Reads a flat key=value file. Blank lines and '#' comments are ignored.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path)
{
    auto in = open_in(path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw Error(path + ": row " + std::to_string(row) + ": expected key=value");
        out.emplace_back(std::string(trim(t.substr(0, eq))), std::string(trim(t.substr(eq + 1))));
    }
    return out;
}

bool given(const std::vector<std::string>& args, const std::string& key)
{
    const auto flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
    });
}

/// Prepends config-file entries the command line does not already set.
std::vector<std::string> merge_config(const std::vector<std::string>& args)
{
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (!path) return args;
    std::vector<std::string> merged;
    for (const auto& [key, value] : read_config_file(*path)) {
        if (key == "config") continue;
        if (!given(args, key)) merged.push_back("--" + key + "=" + value);
    }
    merged.insert(merged.end(), args.begin(), args.end());
    return merged;
}

struct SolverFlags {
    std::string method = "saw";
    Index k = 5;
    double lambda = 1.0;
    double alpha = 1.0;
    double outer_tol = 1e-6;
    int max_outer_iters = 50;
    int theta_inner_iters = 50;
    int anchor_runs = 10;
    Index projection_dim = 0;
    double recovery_tol = 1e-10;
    int recovery_max_iters = 1000;
    double cox_tol = 1e-9;
    int cox_max_iters = 20000;

    void bind(Options& o)
    {
        o.add("method", method, "saw, usaw, encox or km")
            ->check(CLI::IsMember({"saw", "usaw", "encox", "km"}));
        o.add("k", k, "number of topics");
        o.add("lambda", lambda, "elastic-net strength");
        o.add("alpha", alpha, "L1 share of the elastic-net penalty, in [0, 1]");
        o.add("outer-tol", outer_tol, "relative objective decrease that stops alternation");
        o.add("max-outer-iters", max_outer_iters, "alternation budget");
        o.add("theta-inner-iters", theta_inner_iters, "exponentiated-gradient steps per theta update");
        o.add("anchor-runs", anchor_runs, "random projections voted over for anchor selection");
        o.add("projection-dim", projection_dim, "projection dimension, 0 for min(d, 1000)");
        o.add("recovery-tol", recovery_tol, "duality-gap tolerance of unsupervised recovery");
        o.add("recovery-max-iters", recovery_max_iters, "iteration cap of unsupervised recovery");
        o.add("cox-tol", cox_tol, "Cox solver tolerance");
        o.add("cox-max-iters", cox_max_iters, "Cox solver iteration cap");
    }

    SawConfig config(std::uint64_t seed, int threads) const
    {
        SawConfig c;
        c.k = k;
        c.lambda = lambda;
        c.alpha = alpha;
        c.outer_tol = outer_tol;
        c.max_outer_iters = max_outer_iters;
        c.theta_solver.inner_iters = theta_inner_iters;
        c.anchors.runs = anchor_runs;
        c.anchors.projection_dim = projection_dim;
        c.anchors.seed = seed;
        c.recovery.tol = recovery_tol;
        c.recovery.max_iters = recovery_max_iters;
        c.cox.tol = cox_tol;
        c.cox.max_iters = cox_max_iters;
        c.threads = threads;
        c.theta_step = method != "usaw";
        c.validate();
        return c;
    }
};

struct SplitFlags {
    double train_fraction = 0.0;
    std::string train_out;
    std::string test_out;

    void bind(Options& o)
    {
        o.add("train-fraction", train_fraction, "fraction of patients in the training split, 0 for no split");
        o.add("train-out", train_out, "training corpus path (with --train-fraction)");
        o.add("test-out", test_out, "test corpus path (with --train-fraction)");
    }

    bool enabled() const
    {
        if (train_fraction == 0.0) return false;
        if (!(train_fraction > 0.0 && train_fraction < 1.0))
            throw Error("--train-fraction must lie in (0, 1)");
        if (train_out.empty() || test_out.empty())
            throw Error("--train-fraction needs both --train-out and --test-out");
        return true;
    }

    void write(const Corpus& train, const Corpus& test) const
    {
        write_file(train_out, [&](std::ostream& f) { write_corpus(train, f); });
        write_file(test_out, [&](std::ostream& f) { write_corpus(test, f); });
    }
};

AnyModel train_model(const Corpus& corpus, const SolverFlags& s, std::uint64_t seed, int threads)
{
    const SawConfig cfg = s.config(seed, threads);
    if (s.method == "saw") return fit_saw(corpus, cfg);
    if (s.method == "usaw") return fit_usaw(corpus, cfg);
    if (s.method == "encox") return fit_encox(corpus, cfg.lambda, cfg.alpha, cfg.cox);
    return fit_km(corpus);
}

SurvivalLabels labels_for(const std::vector<PredictionRow>& rows, const std::vector<std::string>& ids,
                          const SurvivalLabels& labels)
{
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = i;
    SurvivalLabels out;
    for (const auto& r : rows) {
        const auto it = pos.find(r.patient_id);
        if (it == pos.end()) throw Error("evaluate: no label for patient '" + r.patient_id + "'");
        out.times.push_back(labels.times[it->second]);
        out.observed.push_back(labels.observed[it->second]);
    }
    return out;
}

struct Common {
    std::uint64_t seed = 0;
    int threads = 1;
    std::string config;

    void bind(Options& o, CLI::App& app)
    {
        o.add("seed", seed, "master seed; stage seeds are derived from it");
        o.add("threads", threads, "worker threads")->check(CLI::PositiveNumber);
        app.add_option("--config", config, "flat key=value file; flags override it");
    }
};

void write_resolved(const Options& o, const std::string& command, const std::string& out_path)
{
    write_file(out_path + ".config", [&](std::ostream& f) { o.write(command, f); });
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Survival-supervised anchor-word topic models"};
    app.name("saw");
    app.require_subcommand(1);

    auto usage = [&] {
        err << app.help();
    };
    if (raw_args.empty() || std::find(kCommands.begin(), kCommands.end(), raw_args.front()) == kCommands.end()) {
        if (!raw_args.empty() && (raw_args.front() == "-h" || raw_args.front() == "--help")) {
            out << app.help();
            return 0;
        }
        err << "saw: unknown or missing subcommand" << (raw_args.empty() ? "" : " '" + raw_args.front() + "'")
            << "\nsubcommands: ingest synth train predict evaluate cv report\n";
        return 2;
    }

    std::vector<std::string> sub_args(raw_args.begin() + 1, raw_args.end());
    std::vector<std::string> args;
    try {
        args = merge_config(sub_args);
    } catch (const std::exception& e) {
        err << "saw: " << e.what() << '\n';
        return 1;
    }
    args.insert(args.begin(), raw_args.front());

    std::function<void()> action;
    std::string command = raw_args.front();
    const std::string* out_path = nullptr;
    std::unique_ptr<Options> options;
    Common common;

    // ingest ---------------------------------------------------------------
    auto* ingest = app.add_subcommand("ingest", "events + labels -> corpus");
    struct {
        std::string events, labels, out, event_bins, event_cutoffs, dump_q;
        int bins = 5, min_doc_freq = 3;
        double variance_threshold = 0.0, cutoff_hours = 0.0;
        bool vocab_from_train = false;
        SplitFlags split;
    } ing;
    // synth ----------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "planted model -> corpus + ground truth");
    struct {
        Index d = 60, k = 5, n = 1000;
        int length = 300, length_max = 0;
        double a0 = 0.1, anchor_mass = 0.3, base_rate = 0.1, censor_fraction = 0.2;
        std::string beta, out, truth_out;
        SplitFlags split;
    } syn;
    // train ----------------------------------------------------------------
    auto* train = app.add_subcommand("train", "corpus -> model");
    struct {
        std::string corpus, out;
        SolverFlags solver;
    } trn;
    // predict --------------------------------------------------------------
    auto* pred = app.add_subcommand("predict", "model + corpus -> predictions");
    struct {
        std::string model, corpus, out;
    } prd;
    // evaluate -------------------------------------------------------------
    auto* evaluate = app.add_subcommand("evaluate", "predictions + labels -> metrics");
    struct {
        std::string predictions, corpus, labels, out, method = "model";
        bool append = false;
    } evl;
    // cv -------------------------------------------------------------------
    auto* cv = app.add_subcommand("cv", "grid search by k-fold cross-validation, then refit");
    struct {
        std::string corpus, out, model_out, grid_k = "2,5,8", grid_lambda = "0.01,0.1,1,10", grid_alpha = "0.5,1";
        int folds = 5;
        SolverFlags solver;
    } cvf;
    // report ---------------------------------------------------------------
    auto* report = app.add_subcommand("report", "model -> topic and anchor report");
    struct {
        std::string model, out;
        int top = 10;
    } rep;

    CLI::App* chosen = app.get_subcommand(command);
    options = std::make_unique<Options>(*chosen);
    auto& o = *options;
    common.bind(o, *chosen);

    if (chosen == ingest) {
        o.add("events", ing.events, "event file (patient_id, time, event, value)")->required();
        o.add("labels", ing.labels, "label file (patient_id, Y, R)")->required();
        o.add("out", ing.out, "corpus output path")->required();
        o.add("bins", ing.bins, "default bin count for continuous events")->check(CLI::PositiveNumber);
        o.add("event-bins", ing.event_bins, "per-event bin counts, name=B;name=B");
        o.add("cutoff-hours", ing.cutoff_hours, "drop events at or after this hour, 0 disables");
        o.add("event-cutoffs", ing.event_cutoffs, "per-event cutoffs in hours, name=H;name=H");
        o.add("min-doc-freq", ing.min_doc_freq, "minimum document frequency of a word");
        o.add("variance-threshold", ing.variance_threshold, "minimum frequency variance of a word, 0 disables");
        o.flag("vocab-from-train", ing.vocab_from_train, "build the vocabulary from the training split only");
        o.add("dump-q", ing.dump_q, "write the co-occurrence matrix (binary) to this path");
        ing.split.bind(o);
        out_path = &ing.out;
        action = [&] {
            std::vector<EventRecord> events;
            {
                auto in = open_in(ing.events);
                try {
                    events = ingest_events(in);
                } catch (const Error& e) {
                    throw Error(ing.events + ": " + e.what());
                }
            }
            LabelMap labels;
            {
                auto in = open_in(ing.labels);
                try {
                    labels = read_labels(in);
                } catch (const Error& e) {
                    throw Error(ing.labels + ": " + e.what());
                }
            }
            IngestConfig cfg;
            cfg.default_bins = ing.bins;
            for (const auto& [name, b] : parse_pairs(ing.event_bins, "--event-bins"))
                cfg.bins_per_event[name] = static_cast<int>(b);
            cfg.cutoffs = parse_pairs(ing.event_cutoffs, "--event-cutoffs");
            if (ing.cutoff_hours > 0.0) cfg.global_cutoff = ing.cutoff_hours;
            cfg.min_doc_freq = ing.min_doc_freq;
            cfg.variance_threshold = ing.variance_threshold;

            const bool do_split = ing.split.enabled();
            std::set<std::string> train_ids;
            if (do_split) {
                std::set<std::string> id_set;
                for (const auto& e : events) id_set.insert(e.patient_id);
                const std::vector<std::string> ids(id_set.begin(), id_set.end());
                const auto parts = split_indices(static_cast<Index>(ids.size()), ing.split.train_fraction,
                                                 derive_seed(common.seed, "split"));
                for (Index i : parts.first) train_ids.insert(ids[static_cast<std::size_t>(i)]);
                if (ing.vocab_from_train) cfg.vocab_patients = train_ids;
            } else if (ing.vocab_from_train) {
                throw Error("--vocab-from-train needs --train-fraction");
            }

            const auto built = build_corpus(events, labels, cfg);
            for (const auto& id : built.dropped_patients)
                err << "note: dropped patient '" << id << "' (fewer than 2 words)\n";
            write_file(ing.out, [&](std::ostream& f) { write_corpus(built.corpus, f); });
            if (!ing.dump_q.empty()) {
                const auto stats = build_cooccurrence(built.corpus);
                write_file(ing.dump_q, [&](std::ostream& f) { write_q_binary(stats, f); });
            }
            if (do_split) {
                std::vector<Index> tr, te;
                for (Index i = 0; i < built.corpus.num_docs(); ++i)
                    (train_ids.count(built.corpus.patient_ids[static_cast<std::size_t>(i)]) ? tr : te).push_back(i);
                if (tr.empty() || te.empty()) throw Error("split left an empty partition");
                ing.split.write(built.corpus.subset(tr), built.corpus.subset(te));
            }
            out << "corpus: " << built.corpus.num_docs() << " documents, " << built.corpus.num_words()
                << " words\n";
        };
    } else if (chosen == synth) {
        o.add("d", syn.d, "vocabulary size");
        o.add("k", syn.k, "number of topics");
        o.add("n", syn.n, "number of documents");
        o.add("doc-length", syn.length, "document length (minimum when --doc-length-max is set)");
        o.add("doc-length-max", syn.length_max, "maximum document length, 0 for fixed length");
        o.add("a0", syn.a0, "symmetric Dirichlet concentration");
        o.add("anchor-mass", syn.anchor_mass, "probability of each anchor word within its topic");
        o.add("beta", syn.beta, "comma-separated true coefficients, empty for zeros");
        o.add("base-rate", syn.base_rate, "baseline event rate per day");
        o.add("censor-fraction", syn.censor_fraction, "expected fraction of censored patients");
        o.add("out", syn.out, "corpus output path")->required();
        o.add("truth-out", syn.truth_out, "ground-truth output path");
        syn.split.bind(o);
        out_path = &syn.out;
        action = [&] {
            SyntheticSpec spec;
            spec.d = syn.d;
            spec.k = syn.k;
            spec.n = syn.n;
            spec.length = {syn.length, syn.length_max > 0 ? syn.length_max : syn.length};
            spec.a0 = syn.a0;
            spec.anchor_mass = syn.anchor_mass;
            const auto beta = parse_reals(syn.beta, "--beta");
            if (!beta.empty()) spec.beta = Eigen::Map<const Vector>(beta.data(), static_cast<Index>(beta.size()));
            spec.base_rate = syn.base_rate;
            spec.censor_fraction = syn.censor_fraction;
            spec.seed = common.seed;
            const bool do_split = syn.split.enabled();
            const auto data = generate_dataset(spec);
            write_file(syn.out, [&](std::ostream& f) { write_corpus(data.corpus, f); });
            if (!syn.truth_out.empty())
                write_file(syn.truth_out, [&](std::ostream& f) { write_ground_truth(data.truth, f); });
            if (do_split) {
                const auto [tr, te] = saw::split(data.corpus, syn.split.train_fraction, derive_seed(common.seed, "split"));
                syn.split.write(tr, te);
            }
            out << "synthetic corpus: " << data.corpus.num_docs() << " documents, " << data.corpus.num_words()
                << " words, " << data.corpus.labels.num_events() << " events\n";
        };
    } else if (chosen == train) {
        o.add("corpus", trn.corpus, "training corpus")->required();
        o.add("out", trn.out, "model output path")->required();
        trn.solver.bind(o);
        out_path = &trn.out;
        action = [&] {
            const auto corpus = load_corpus(trn.corpus);
            const auto model = train_model(corpus, trn.solver, common.seed, common.threads);
            write_file(trn.out, [&](std::ostream& f) { write_model(model, f); });
            out << "trained " << method_name(model) << " on " << corpus.num_docs() << " documents\n";
        };
    } else if (chosen == pred) {
        o.add("model", prd.model, "model file")->required();
        o.add("corpus", prd.corpus, "corpus to score")->required();
        o.add("out", prd.out, "predictions CSV path")->required();
        out_path = &prd.out;
        action = [&] {
            const auto model = load_model(prd.model);
            const auto corpus = load_corpus(prd.corpus);
            const auto preds = predict_any(model, corpus);
            write_file(prd.out, [&](std::ostream& f) { write_predictions(corpus.patient_ids, preds, f); });
        };
    } else if (chosen == evaluate) {
        o.add("predictions", evl.predictions, "predictions CSV")->required();
        o.add("corpus", evl.corpus, "corpus holding the true labels");
        o.add("labels", evl.labels, "label file (patient_id, Y, R), instead of --corpus");
        o.add("method", evl.method, "method name written to the metrics row");
        o.add("out", evl.out, "metrics CSV path")->required();
        o.flag("append", evl.append, "append a row to an existing metrics file");
        out_path = &evl.out;
        action = [&] {
            if (evl.corpus.empty() == evl.labels.empty()) throw Error("evaluate needs exactly one of --corpus or --labels");
            std::vector<PredictionRow> rows;
            {
                auto in = open_in(evl.predictions);
                rows = read_predictions(in);
            }
            std::vector<std::string> ids;
            SurvivalLabels truth;
            if (!evl.corpus.empty()) {
                const auto c = load_corpus(evl.corpus);
                ids = c.patient_ids;
                truth = c.labels;
            } else {
                auto in = open_in(evl.labels);
                LabelMap lm = read_labels(in);
                for (const auto& [id, l] : lm) {
                    ids.push_back(id);
                    truth.times.push_back(l.time);
                    truth.observed.push_back(l.observed);
                }
            }
            const auto labels = labels_for(rows, ids, truth);
            std::vector<PatientPrediction> preds;
            bool has_risk = !rows.empty();
            for (const auto& r : rows) {
                preds.push_back(r.prediction);
                if (std::isnan(r.prediction.risk)) has_risk = false;
            }
            std::vector<MetricsRow> table;
            if (evl.append) {
                std::ifstream in(evl.out, std::ios::binary);
                if (in) table = read_metrics(in);
            }
            table.push_back({evl.method, evaluate_predictions(preds, labels, has_risk)});
            write_file(evl.out, [&](std::ostream& f) { write_metrics(table, f); });
            const auto& m = table.back().metrics;
            out << evl.method << ": rmse " << format_double(m.rmse) << ", mae " << format_double(m.mae)
                << ", c-index " << (std::isnan(m.c_index) ? std::string("NA") : format_double(m.c_index)) << '\n';
        };
    } else if (chosen == cv) {
        o.add("corpus", cvf.corpus, "training corpus")->required();
        o.add("out", cvf.out, "cross-validation result path")->required();
        o.add("model-out", cvf.model_out, "refit model path")->required();
        o.add("folds", cvf.folds, "number of folds");
        o.add("grid-k", cvf.grid_k, "comma-separated topic counts");
        o.add("grid-lambda", cvf.grid_lambda, "comma-separated penalty strengths");
        o.add("grid-alpha", cvf.grid_alpha, "comma-separated L1 shares");
        cvf.solver.bind(o);
        out_path = &cvf.out;
        action = [&] {
            if (cvf.solver.method != "saw" && cvf.solver.method != "usaw")
                throw Error("cv supports methods saw and usaw");
            std::vector<GridCell> grid;
            for (double k : parse_reals(cvf.grid_k, "--grid-k"))
                for (double l : parse_reals(cvf.grid_lambda, "--grid-lambda"))
                    for (double a : parse_reals(cvf.grid_alpha, "--grid-alpha"))
                        grid.push_back({static_cast<Index>(k), l, a});
            const auto corpus = load_corpus(cvf.corpus);
            const auto base = cvf.solver.config(common.seed, common.threads);
            const auto res = cross_validate(corpus, grid, cvf.folds, derive_seed(common.seed, "cv-folds"), base);
            write_file(cvf.out, [&](std::ostream& f) { write_cv_result(res.result, f); });
            write_file(cvf.model_out, [&](std::ostream& f) { write_model(AnyModel(res.model), f); });
            const auto& b = res.result.grid[res.result.best];
            out << "best: k=" << b.k << " lambda=" << format_double(b.lambda) << " alpha=" << format_double(b.alpha)
                << " rmse=" << format_double(res.result.mean_score(res.result.best)) << '\n';
        };
    } else if (chosen == report) {
        o.add("model", rep.model, "saw or usaw model file")->required();
        o.add("out", rep.out, "report path")->required();
        o.add("top", rep.top, "words listed per topic")->check(CLI::PositiveNumber);
        out_path = &rep.out;
        action = [&] {
            const auto model = load_model(rep.model);
            const auto* saw_model = std::get_if<SawModel>(&model);
            if (!saw_model) throw Error("report needs a saw or usaw model, found " + method_name(model));
            write_file(rep.out, [&](std::ostream& f) {
                write_topic_report(*saw_model, static_cast<std::size_t>(rep.top), f);
                f << '\n';
                write_anchor_report(*saw_model, f);
            });
        };
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << chosen->help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "saw " << command << ": " << e.what() << '\n';
        usage();
        return 2;
    }

    try {
        action();
        write_resolved(o, command, *out_path);
    } catch (const std::exception& e) {
        err << "saw " << command << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace saw::cli
