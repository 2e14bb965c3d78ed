#include "saw/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace saw {

GroundTruth generate_topic_model(Index d, Index k, double anchor_mass, std::uint64_t seed)
{
    if (k < 1) throw Error("synth: k must be at least 1");
    if (d < k) throw Error("synth: d must be at least k");
    if (!(anchor_mass > 0.0 && anchor_mass <= 1.0)) throw Error("synth: anchor_mass must lie in (0, 1]");

    std::mt19937_64 rng(seed);
    std::vector<Index> words(static_cast<std::size_t>(d));
    std::iota(words.begin(), words.end(), Index{0});
    std::shuffle(words.begin(), words.end(), rng);
    std::vector<Index> anchors(words.begin(), words.begin() + k);
    std::sort(anchors.begin(), anchors.end());

    GroundTruth truth;
    truth.anchor_indices = anchors;
    truth.A_true = RowMatrix::Zero(d, k);
    std::vector<bool> is_anchor(static_cast<std::size_t>(d), false);
    for (auto a : anchors) is_anchor[static_cast<std::size_t>(a)] = true;

    std::uniform_real_distribution<double> weight(0.1, 1.0);
    for (Index g = 0; g < k; ++g) {
        double rest = 0.0;
        for (Index w = 0; w < d; ++w) {
            if (is_anchor[static_cast<std::size_t>(w)]) continue;
            truth.A_true(w, g) = weight(rng);
            rest += truth.A_true(w, g);
        }
        if (rest > 0.0) truth.A_true.col(g) *= (1.0 - anchor_mass) / rest;
        truth.A_true(anchors[static_cast<std::size_t>(g)], g) = anchor_mass;
        truth.A_true.col(g) /= truth.A_true.col(g).sum();
    }
    return truth;
}

Corpus generate_corpus(GroundTruth& truth, Index n, DocLength length, double a0,
                       std::uint64_t seed)
{
    if (length.min < 2) throw Error("synth: documents need at least two words");
    if (length.max < length.min) throw Error("synth: invalid document length range");
    if (!(a0 > 0.0)) throw Error("synth: Dirichlet concentration must be positive");
    if (n < 1) throw Error("synth: need at least one document");
    const Index d = truth.A_true.rows();
    const Index k = truth.A_true.cols();

    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gamma(a0, 1.0);
    std::uniform_int_distribution<int> doc_len(length.min, length.max);

    truth.W_true.resize(k, n);
    for (Index i = 0; i < n; ++i) {
        double total = 0.0;
        while (!(total > 0.0)) {
            for (Index g = 0; g < k; ++g) total += (truth.W_true(g, i) = gamma(rng));
        }
        truth.W_true.col(i) /= total;
    }
    truth.M_true = truth.A_true * truth.W_true;

    std::vector<Eigen::Triplet<int>> trips;
    std::vector<int> counts(static_cast<std::size_t>(d));
    Corpus corpus;
    for (Index i = 0; i < n; ++i) {
        const int m = doc_len(rng);
        std::vector<double> column(static_cast<std::size_t>(d));
        for (Index w = 0; w < d; ++w) column[static_cast<std::size_t>(w)] = truth.M_true(w, i);
        std::discrete_distribution<int> word(column.begin(), column.end());
        std::fill(counts.begin(), counts.end(), 0);
        for (int t = 0; t < m; ++t) ++counts[static_cast<std::size_t>(word(rng))];
        for (Index w = 0; w < d; ++w)
            if (counts[static_cast<std::size_t>(w)] > 0)
                trips.emplace_back(static_cast<int>(w), static_cast<int>(i), counts[static_cast<std::size_t>(w)]);
        corpus.doc_lengths.push_back(m);
        corpus.patient_ids.push_back("doc" + std::to_string(i));
    }
    corpus.counts.resize(d, n);
    corpus.counts.setFromTriplets(trips.begin(), trips.end());
    std::vector<std::string> words;
    for (Index w = 0; w < d; ++w) words.push_back("w" + std::to_string(w));
    corpus.vocab = Vocabulary(std::move(words));
    corpus.labels.times.assign(static_cast<std::size_t>(n), 1.0);
    corpus.labels.observed.assign(static_cast<std::size_t>(n), true);
    return corpus;
}

SurvivalLabels generate_survival(const RowMatrix& W_true, const Vector& beta_true,
                                 double base_rate, double censor_fraction,
                                 std::uint64_t seed)
{
    if (!(base_rate > 0.0)) throw Error("synth: base_rate must be positive");
    if (!(censor_fraction >= 0.0 && censor_fraction < 1.0))
        throw Error("synth: censor_fraction must lie in [0, 1)");
    if (beta_true.size() != W_true.rows()) throw Error("synth: beta length does not match topic count");
    const Index n = W_true.cols();
    const Vector rates = base_rate * (W_true.transpose() * beta_true).array().exp();

    double censor_rate = 0.0;
    if (censor_fraction > 0.0) {
        auto censored = [&](double c) { return (c / (c + rates.array())).mean(); };
        double lo = 0.0, hi = rates.maxCoeff();
        while (censored(hi) < censor_fraction) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (censored(mid) < censor_fraction ? lo : hi) = mid;
        }
        censor_rate = 0.5 * (lo + hi);
    }

    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> unit(1.0);
    SurvivalLabels labels;
    for (Index i = 0; i < n; ++i) {
        const double t = unit(rng) / rates[i];
        const double c = censor_rate > 0.0 ? unit(rng) / censor_rate : INFINITY;
        labels.times.push_back(std::max(std::min(t, c), std::numeric_limits<double>::min()));
        labels.observed.push_back(t <= c);
    }
    return labels;
}

RowMatrix analytic_theta(const RowMatrix& A_true, const Vector& prior)
{
    if (prior.size() != A_true.cols()) throw Error("analytic_theta: prior length mismatch");
    RowMatrix theta = A_true.array().rowwise() * prior.transpose().array();
    for (Index w = 0; w < theta.rows(); ++w) {
        const double s = theta.row(w).sum();
        if (s > 0.0) theta.row(w) /= s;
        else theta.row(w).setConstant(1.0 / static_cast<double>(theta.cols()));
    }
    return theta;
}

SyntheticDataset generate_dataset(const SyntheticSpec& spec)
{
    SyntheticDataset out;
    out.truth = generate_topic_model(spec.d, spec.k, spec.anchor_mass, derive_seed(spec.seed, "synth-topics"));
    out.corpus = generate_corpus(out.truth, spec.n, spec.length, spec.a0, derive_seed(spec.seed, "synth-corpus"));
    out.truth.beta_true = spec.beta.size() ? spec.beta : Vector::Zero(spec.k);
    out.corpus.labels = generate_survival(out.truth.W_true, out.truth.beta_true, spec.base_rate,
                                          spec.censor_fraction, derive_seed(spec.seed, "synth-survival"));
    return out;
}

// ---------------------------------------------------------------------------
// Sidecar file
// ---------------------------------------------------------------------------

namespace {

void write_matrix(std::ostream& out, const char* name, const RowMatrix& M)
{
    out << name << '\t' << M.rows() << '\t' << M.cols() << '\n';
    for (Index r = 0; r < M.rows(); ++r) {
        for (Index c = 0; c < M.cols(); ++c) out << (c ? "\t" : "") << format_double(M(r, c));
        out << '\n';
    }
}

RowMatrix read_matrix(std::istream& in, const std::string& name)
{
    std::string tag;
    Index rows = 0, cols = 0;
    if (!(in >> tag >> rows >> cols) || tag != name) throw Error("ground truth: expected section " + name);
    RowMatrix M(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) {
            std::string tok;
            if (!(in >> tok) || !parse_double(tok, M(r, c))) throw Error("ground truth: bad entry in " + name);
        }
    return M;
}

} // namespace

void write_ground_truth(const GroundTruth& truth, std::ostream& out)
{
    out << "saw-ground-truth\t1\n";
    out << "anchors\t" << truth.anchor_indices.size();
    for (auto a : truth.anchor_indices) out << '\t' << a;
    out << '\n';
    out << "beta\t" << truth.beta_true.size();
    for (Index g = 0; g < truth.beta_true.size(); ++g) out << '\t' << format_double(truth.beta_true[g]);
    out << '\n';
    write_matrix(out, "A_true", truth.A_true);
    write_matrix(out, "W_true", truth.W_true);
}

GroundTruth read_ground_truth(std::istream& in)
{
    std::string tag;
    int version = 0;
    if (!(in >> tag >> version) || tag != "saw-ground-truth" || version != 1)
        throw Error("ground truth: unrecognized header");
    GroundTruth truth;
    std::size_t k = 0;
    if (!(in >> tag >> k) || tag != "anchors") throw Error("ground truth: expected anchors");
    truth.anchor_indices.resize(k);
    for (auto& a : truth.anchor_indices)
        if (!(in >> a)) throw Error("ground truth: bad anchor");
    Index kb = 0;
    if (!(in >> tag >> kb) || tag != "beta") throw Error("ground truth: expected beta");
    truth.beta_true.resize(kb);
    for (Index g = 0; g < kb; ++g) {
        std::string tok;
        if (!(in >> tok) || !parse_double(tok, truth.beta_true[g])) throw Error("ground truth: bad beta");
    }
    truth.A_true = read_matrix(in, "A_true");
    truth.W_true = read_matrix(in, "W_true");
    truth.M_true = truth.A_true * truth.W_true;
    return truth;
}

} // namespace saw
