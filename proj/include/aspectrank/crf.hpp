#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "aspectrank/corpus.hpp"
#include "aspectrank/errors.hpp"
#include "aspectrank/pos.hpp"

namespace aspectrank {

// Label alphabet is fixed: index order defines the tie-break order.
enum class BioLabel : int { BAsp = 0, IAsp = 1, Outside = 2 };

constexpr int kNumLabels = 3;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline const char* to_string(BioLabel l) {
    switch (l) {
        case BioLabel::BAsp: return "B-ASP";
        case BioLabel::IAsp: return "I-ASP";
        case BioLabel::Outside: return "O";
    }
    return "O";
}

inline BioLabel parse_bio_label(const std::string& name) {
    if (name == "B-ASP") return BioLabel::BAsp;
    if (name == "I-ASP") return BioLabel::IAsp;
    if (name == "O") return BioLabel::Outside;
    throw MalformedRecord("unknown BIO label: " + name);
}

// I-ASP may only continue a span: never at position 0, never after O.
inline bool valid_bio_transition(int prev, int cur) {
    return !(cur == static_cast<int>(BioLabel::IAsp) &&
             prev == static_cast<int>(BioLabel::Outside));
}

inline bool valid_bio_start(int label) { return label != static_cast<int>(BioLabel::IAsp); }

struct LabeledSequence {
    std::vector<Token> tokens;
    std::vector<BioLabel> labels;
};

inline void validate_labeled_sequence(const LabeledSequence& seq, const std::string& where) {
    if (seq.tokens.size() != seq.labels.size())
        throw LengthMismatch(where + ": token/label length mismatch");
    for (std::size_t t = 0; t < seq.labels.size(); ++t) {
        int cur = static_cast<int>(seq.labels[t]);
        bool ok = (t == 0) ? valid_bio_start(cur)
                           : valid_bio_transition(static_cast<int>(seq.labels[t - 1]), cur);
        if (!ok) throw MalformedRecord(where + ": I-ASP at start or after O");
    }
}

// One feature-string vector per token position.
using SentenceFeatures = std::vector<std::vector<std::string>>;

inline SentenceFeatures extract_features(std::span<const Token> tokens,
                                         std::span<const PosClass> pos) {
    SentenceFeatures feats(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        auto& f = feats[t];
        const std::string& lower = tokens[t].lower;
        f.push_back("w=" + tokens[t].surface);
        f.push_back("lw=" + lower);
        if (lower.size() >= 2) f.push_back("suf2=" + lower.substr(lower.size() - 2));
        if (lower.size() >= 3) f.push_back("suf3=" + lower.substr(lower.size() - 3));
        f.push_back(std::string("pos=") + to_string(pos[t]));
        f.push_back(std::string("pos-1=") + (t > 0 ? to_string(pos[t - 1]) : "BOS"));
        f.push_back(std::string("pos+1=") + (t + 1 < tokens.size() ? to_string(pos[t + 1]) : "EOS"));
    }
    return feats;
}

struct CrfModel {
    // feature string -> per-label weights, indexed by BioLabel order
    std::unordered_map<std::string, std::array<double, kNumLabels>> emission;
    std::array<std::array<double, kNumLabels>, kNumLabels> transition{};
    // lowercased token forms seen inside aspect spans during training
    std::vector<std::string> aspect_vocabulary;

    double emission_weight(const std::string& feature, int label) const {
        auto it = emission.find(feature);
        return it == emission.end() ? 0.0 : it->second[label];
    }

    double emission_score(const SentenceFeatures& feats, std::size_t t, int label) const {
        double s = 0.0;
        for (const std::string& f : feats[t]) s += emission_weight(f, label);
        return s;
    }

    bool in_aspect_vocabulary(const std::string& lower) const {
        return std::binary_search(aspect_vocabulary.begin(), aspect_vocabulary.end(), lower);
    }
};

inline SentenceFeatures model_features(std::span<const Token> tokens, const PosLexicon& lex) {
    std::vector<PosClass> pos = pos_tag(tokens, lex);
    return extract_features(tokens, pos);
}

// Unnormalized log-score of one labeling.
inline double crf_score(const CrfModel& model, const SentenceFeatures& feats,
                        std::span<const BioLabel> labels) {
    if (feats.size() != labels.size()) throw LengthMismatch("crf_score: length mismatch");
    double s = 0.0;
    for (std::size_t t = 0; t < feats.size(); ++t) {
        s += model.emission_score(feats, t, static_cast<int>(labels[t]));
        if (t > 0)
            s += model.transition[static_cast<int>(labels[t - 1])][static_cast<int>(labels[t])];
    }
    return s;
}

inline double crf_score(const CrfModel& model, std::span<const Token> tokens,
                        std::span<const BioLabel> labels, const PosLexicon& lex) {
    if (tokens.size() != labels.size()) throw LengthMismatch("crf_score: length mismatch");
    return crf_score(model, model_features(tokens, lex), labels);
}

namespace detail {

inline double log_sum_exp3(const std::array<double, kNumLabels>& v) {
    double m = std::max({v[0], v[1], v[2]});
    if (m == kNegInf) return kNegInf;
    return m + std::log(std::exp(v[0] - m) + std::exp(v[1] - m) + std::exp(v[2] - m));
}

}  // namespace detail

// Forward algorithm in log space, summing over all label sequences.
inline double crf_log_partition(const CrfModel& model, const SentenceFeatures& feats) {
    if (feats.empty()) throw EmptySequence("crf_log_partition: empty sequence");
    std::array<double, kNumLabels> alpha{};
    for (int y = 0; y < kNumLabels; ++y) alpha[y] = model.emission_score(feats, 0, y);
    for (std::size_t t = 1; t < feats.size(); ++t) {
        std::array<double, kNumLabels> next{};
        for (int y = 0; y < kNumLabels; ++y) {
            std::array<double, kNumLabels> terms{};
            for (int p = 0; p < kNumLabels; ++p) terms[p] = alpha[p] + model.transition[p][y];
            next[y] = detail::log_sum_exp3(terms) + model.emission_score(feats, t, y);
        }
        alpha = next;
    }
    return detail::log_sum_exp3(alpha);
}

inline double crf_log_partition(const CrfModel& model, std::span<const Token> tokens,
                                const PosLexicon& lex) {
    if (tokens.empty()) throw EmptySequence("crf_log_partition: empty sequence");
    return crf_log_partition(model, model_features(tokens, lex));
}

// Viterbi decode under BIO structural constraints (start->I-ASP and O->I-ASP
// score -inf). Ties prefer the smallest label index, applied to the final
// label and at each backtrack step.
inline std::vector<BioLabel> crf_viterbi_labels(const CrfModel& model,
                                                const SentenceFeatures& feats) {
    if (feats.empty()) throw EmptySequence("crf_viterbi: empty sequence");
    const std::size_t n = feats.size();
    std::vector<std::array<double, kNumLabels>> delta(n);
    std::vector<std::array<int, kNumLabels>> back(n);
    for (int y = 0; y < kNumLabels; ++y)
        delta[0][y] = valid_bio_start(y) ? model.emission_score(feats, 0, y) : kNegInf;
    for (std::size_t t = 1; t < n; ++t) {
        for (int y = 0; y < kNumLabels; ++y) {
            double best = kNegInf;
            int best_prev = 0;
            for (int p = 0; p < kNumLabels; ++p) {
                if (!valid_bio_transition(p, y)) continue;
                double cand = delta[t - 1][p] + model.transition[p][y];
                if (cand > best) {
                    best = cand;
                    best_prev = p;
                }
            }
            delta[t][y] = best == kNegInf ? kNegInf : best + model.emission_score(feats, t, y);
            back[t][y] = best_prev;
        }
    }
    int y = 0;
    double best = delta[n - 1][0];
    for (int c = 1; c < kNumLabels; ++c)
        if (delta[n - 1][c] > best) {
            best = delta[n - 1][c];
            y = c;
        }
    std::vector<BioLabel> labels(n);
    labels[n - 1] = static_cast<BioLabel>(y);
    for (std::size_t t = n - 1; t > 0; --t) {
        y = back[t][y];
        labels[t - 1] = static_cast<BioLabel>(y);
    }
    return labels;
}

inline LabeledSequence crf_viterbi(const CrfModel& model, std::span<const Token> tokens,
                                   const PosLexicon& lex) {
    if (tokens.empty()) throw EmptySequence("crf_viterbi: empty sequence");
    LabeledSequence out;
    out.tokens.assign(tokens.begin(), tokens.end());
    out.labels = crf_viterbi_labels(model, model_features(tokens, lex));
    return out;
}

struct Marginals {
    // unary[t][y] = p(y_t = y | x); pairwise[t][a][b] = p(y_{t-1}=a, y_t=b | x)
    std::vector<std::array<double, kNumLabels>> unary;
    std::vector<std::array<std::array<double, kNumLabels>, kNumLabels>> pairwise;
    double log_partition = 0.0;
};

inline Marginals forward_backward(const CrfModel& model, const SentenceFeatures& feats) {
    if (feats.empty()) throw EmptySequence("forward_backward: empty sequence");
    const std::size_t n = feats.size();
    std::vector<std::array<double, kNumLabels>> emit(n);
    for (std::size_t t = 0; t < n; ++t)
        for (int y = 0; y < kNumLabels; ++y) emit[t][y] = model.emission_score(feats, t, y);

    std::vector<std::array<double, kNumLabels>> alpha(n), beta(n);
    alpha[0] = emit[0];
    for (std::size_t t = 1; t < n; ++t) {
        for (int y = 0; y < kNumLabels; ++y) {
            std::array<double, kNumLabels> terms{};
            for (int p = 0; p < kNumLabels; ++p) terms[p] = alpha[t - 1][p] + model.transition[p][y];
            alpha[t][y] = detail::log_sum_exp3(terms) + emit[t][y];
        }
    }
    for (int y = 0; y < kNumLabels; ++y) beta[n - 1][y] = 0.0;
    for (std::size_t t = n - 1; t > 0; --t) {
        for (int p = 0; p < kNumLabels; ++p) {
            std::array<double, kNumLabels> terms{};
            for (int y = 0; y < kNumLabels; ++y)
                terms[y] = model.transition[p][y] + emit[t][y] + beta[t][y];
            beta[t - 1][p] = detail::log_sum_exp3(terms);
        }
    }

    Marginals m;
    m.log_partition = detail::log_sum_exp3(alpha[n - 1]);
    m.unary.resize(n);
    for (std::size_t t = 0; t < n; ++t)
        for (int y = 0; y < kNumLabels; ++y)
            m.unary[t][y] = std::exp(alpha[t][y] + beta[t][y] - m.log_partition);
    m.pairwise.resize(n);  // slot 0 unused
    for (std::size_t t = 1; t < n; ++t)
        for (int a = 0; a < kNumLabels; ++a)
            for (int b = 0; b < kNumLabels; ++b)
                m.pairwise[t][a][b] = std::exp(alpha[t - 1][a] + model.transition[a][b] +
                                               emit[t][b] + beta[t][b] - m.log_partition);
    return m;
}

// Gradient has the same shape as the weights.
struct CrfGradient {
    std::unordered_map<std::string, std::array<double, kNumLabels>> emission;
    std::array<std::array<double, kNumLabels>, kNumLabels> transition{};

    double max_abs() const {
        double m = 0.0;
        for (const auto& [f, w] : emission)
            for (double v : w) m = std::max(m, std::fabs(v));
        for (const auto& row : transition)
            for (double v : row) m = std::max(m, std::fabs(v));
        return m;
    }
};

namespace detail {

inline void accumulate_sequence_gradient(const CrfModel& model, const SentenceFeatures& feats,
                                         std::span<const BioLabel> labels, double scale,
                                         CrfGradient& grad) {
    if (feats.size() != labels.size())
        throw LengthMismatch("crf_gradient: token/label length mismatch");
    Marginals m = forward_backward(model, feats);
    for (std::size_t t = 0; t < feats.size(); ++t) {
        int gold = static_cast<int>(labels[t]);
        for (const std::string& f : feats[t]) {
            auto& g = grad.emission[f];
            g[gold] += scale;
            for (int y = 0; y < kNumLabels; ++y) g[y] -= scale * m.unary[t][y];
        }
        if (t > 0) {
            grad.transition[static_cast<int>(labels[t - 1])][gold] += scale;
            for (int a = 0; a < kNumLabels; ++a)
                for (int b = 0; b < kNumLabels; ++b)
                    grad.transition[a][b] -= scale * m.pairwise[t][a][b];
        }
    }
}

}  // namespace detail

// Gradient of the mean conditional log-likelihood minus the L2 term
// lambda * w. Features unseen by the model contribute at weight zero.
inline CrfGradient crf_gradient(const CrfModel& model,
                                std::span<const LabeledSequence> batch,
                                const PosLexicon& lex, double lambda = 0.0) {
    if (batch.empty()) throw EmptyTrainingSet("crf_gradient: empty batch");
    CrfGradient grad;
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (const LabeledSequence& seq : batch) {
        SentenceFeatures feats = model_features(seq.tokens, lex);
        detail::accumulate_sequence_gradient(model, feats, seq.labels, scale, grad);
    }
    if (lambda != 0.0) {
        for (const auto& [f, w] : model.emission) {
            auto& g = grad.emission[f];
            for (int y = 0; y < kNumLabels; ++y) g[y] -= lambda * w[y];
        }
        for (int a = 0; a < kNumLabels; ++a)
            for (int b = 0; b < kNumLabels; ++b)
                grad.transition[a][b] -= lambda * model.transition[a][b];
    }
    return grad;
}

// Mean log-likelihood of the batch minus (lambda/2)*||w||^2; the objective
// whose gradient crf_gradient returns.
inline double mean_log_likelihood(const CrfModel& model,
                                  std::span<const LabeledSequence> batch,
                                  const PosLexicon& lex, double lambda = 0.0) {
    if (batch.empty()) throw EmptyTrainingSet("mean_log_likelihood: empty batch");
    double ll = 0.0;
    for (const LabeledSequence& seq : batch) {
        SentenceFeatures feats = model_features(seq.tokens, lex);
        ll += crf_score(model, feats, seq.labels) - crf_log_partition(model, feats);
    }
    ll /= static_cast<double>(batch.size());
    if (lambda != 0.0) {
        double sq = 0.0;
        for (const auto& [f, w] : model.emission)
            for (double v : w) sq += v * v;
        for (const auto& row : model.transition)
            for (double v : row) sq += v * v;
        ll -= 0.5 * lambda * sq;
    }
    return ll;
}

struct TrainConfig {
    int epochs = 20;
    double learning_rate = 0.1;
    double lambda = 1e-3;
    std::uint64_t seed = 0;
};

struct TrainStats {
    std::vector<double> epoch_log_likelihood;  // mean LL after each epoch
    double initial_log_likelihood = 0.0;
    double final_log_likelihood = 0.0;
};

// Stochastic gradient ascent on the L2-regularized conditional log-likelihood.
// Deterministic for a fixed seed: seeded shuffling, fixed reduction order.
inline CrfModel crf_train(std::span<const LabeledSequence> data, const PosLexicon& lex,
                          const TrainConfig& config, TrainStats* stats = nullptr) {
    if (data.empty()) throw EmptyTrainingSet("crf_train: no training sequences");

    CrfModel model;
    std::set<std::string> vocab;
    std::vector<SentenceFeatures> feats(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        validate_labeled_sequence(data[i], "crf_train sequence " + std::to_string(i));
        feats[i] = model_features(data[i].tokens, lex);
        for (const auto& position : feats[i])
            for (const std::string& f : position) model.emission.try_emplace(f);
        for (std::size_t t = 0; t < data[i].labels.size(); ++t)
            if (data[i].labels[t] != BioLabel::Outside) vocab.insert(data[i].tokens[t].lower);
    }
    model.aspect_vocabulary.assign(vocab.begin(), vocab.end());

    if (stats) {
        stats->initial_log_likelihood = mean_log_likelihood(model, data, lex);
        stats->epoch_log_likelihood.clear();
    }

    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(config.seed);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            CrfGradient grad;
            detail::accumulate_sequence_gradient(model, feats[idx], data[idx].labels, 1.0, grad);
            const double lr = config.learning_rate;
            const double decay = lr * config.lambda;
            for (auto& [f, w] : model.emission) {
                auto git = grad.emission.find(f);
                for (int y = 0; y < kNumLabels; ++y) {
                    double g = git == grad.emission.end() ? 0.0 : git->second[y];
                    w[y] += lr * g - decay * w[y];
                }
            }
            for (int a = 0; a < kNumLabels; ++a)
                for (int b = 0; b < kNumLabels; ++b)
                    model.transition[a][b] +=
                        lr * grad.transition[a][b] - decay * model.transition[a][b];
        }
        if (stats) stats->epoch_log_likelihood.push_back(mean_log_likelihood(model, data, lex));
    }
    if (stats && !stats->epoch_log_likelihood.empty())
        stats->final_log_likelihood = stats->epoch_log_likelihood.back();
    return model;
}

struct AspectMention {
    std::string term;  // lowercased, space-joined
    SentenceRef sentence_ref;
    std::size_t start = 0;  // token span [start, end)
    std::size_t end = 0;

    bool operator==(const AspectMention&) const = default;
};

inline std::vector<AspectMention> mentions_from_labels(std::span<const Token> tokens,
                                                       std::span<const BioLabel> labels,
                                                       const SentenceRef& ref) {
    std::vector<AspectMention> mentions;
    std::size_t t = 0;
    while (t < tokens.size()) {
        if (labels[t] != BioLabel::BAsp) {
            ++t;
            continue;
        }
        std::size_t start = t;
        std::string term = tokens[t].lower;
        ++t;
        while (t < tokens.size() && labels[t] == BioLabel::IAsp) {
            term += ' ';
            term += tokens[t].lower;
            ++t;
        }
        mentions.push_back(AspectMention{std::move(term), ref, start, t});
    }
    return mentions;
}

inline std::vector<AspectMention> extract_aspects(const CrfModel& model,
                                                  std::span<const Token> tokens,
                                                  const PosLexicon& lex,
                                                  const SentenceRef& ref = {}) {
    if (tokens.empty()) return {};
    std::vector<BioLabel> labels = crf_viterbi_labels(model, model_features(tokens, lex));
    return mentions_from_labels(tokens, labels, ref);
}

// --- CoNLL-style training data: "surface<TAB>label", blank line between sentences.

inline std::vector<LabeledSequence> read_conll(std::istream& in,
                                               const std::string& source_name = "<stream>") {
    std::vector<LabeledSequence> out;
    LabeledSequence cur;
    std::string line;
    std::size_t lineno = 0;
    auto flush = [&] {
        if (cur.tokens.empty()) return;
        validate_labeled_sequence(cur, source_name);
        out.push_back(std::move(cur));
        cur = {};
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw MalformedRecord(source_name + ":" + std::to_string(lineno) +
                                  ": expected surface<TAB>label");
        Token t;
        t.surface = line.substr(0, tab);
        t.lower = to_lower_ascii(t.surface);
        t.position = cur.tokens.size();
        cur.tokens.push_back(std::move(t));
        cur.labels.push_back(parse_bio_label(line.substr(tab + 1)));
    }
    flush();
    return out;
}

inline std::vector<LabeledSequence> read_conll_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open training file: " + path);
    return read_conll(in, path);
}

// --- Model persistence: versioned JSON, exact double round-trip.

constexpr const char* kCrfFormatName = "aspectrank.crf";
constexpr int kCrfFormatVersion = 1;

inline void save_model(const CrfModel& model, std::ostream& out) {
    nlohmann::json j;
    j["format"] = kCrfFormatName;
    j["version"] = kCrfFormatVersion;
    j["labels"] = {"B-ASP", "I-ASP", "O"};
    j["templates"] = {"w", "lw", "suf2", "suf3", "pos", "pos-1", "pos+1"};
    std::map<std::string, std::array<double, kNumLabels>> sorted(model.emission.begin(),
                                                                 model.emission.end());
    nlohmann::json em = nlohmann::json::object();
    for (const auto& [f, w] : sorted) em[f] = w;
    j["emission"] = std::move(em);
    j["transition"] = model.transition;
    j["aspect_vocabulary"] = model.aspect_vocabulary;
    out << j.dump(1) << '\n';
}

inline void save_model(const CrfModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path);
    save_model(model, out);
}

inline CrfModel load_model(std::istream& in, const std::string& source_name = "<stream>") {
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || j.value("format", "") != kCrfFormatName)
        throw MalformedRecord(source_name + ": not an aspectrank CRF model file");
    if (j.value("version", 0) != kCrfFormatVersion)
        throw MalformedRecord(source_name + ": unsupported model version");
    CrfModel model;
    for (const auto& [f, w] : j.at("emission").items())
        model.emission[f] = w.get<std::array<double, kNumLabels>>();
    model.transition = j.at("transition").get<std::array<std::array<double, kNumLabels>, kNumLabels>>();
    model.aspect_vocabulary = j.at("aspect_vocabulary").get<std::vector<std::string>>();
    return model;
}

inline CrfModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    return load_model(in, path);
}

}  // namespace aspectrank
