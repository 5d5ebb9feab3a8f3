// Standalone acceptance harness: one PASS/FAIL line per criterion, exit code
// is the number of failures. Each criterion is self-contained and carries its
// own runtime budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <aspectrank/aspectrank.hpp>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace aspectrank;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Harness {
    int failures = 0;

    void report(int n, bool ok, const std::string& what, const std::string& detail) {
        std::printf("criterion %d: %s - %s%s\n", n, ok ? "PASS" : "FAIL", what.c_str(),
                    detail.empty() ? "" : ("; " + detail).c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }

    template <typename Body>
    void criterion(int n, const std::string& what, double budget_s, Body body) {
        std::string detail;
        bool ok = false;
        auto t0 = Clock::now();
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double dt = seconds_since(t0);
        if (ok && dt > budget_s) {
            ok = false;
            detail = "over time budget";
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2fs of %.0fs", dt, budget_s);
        if (!detail.empty()) detail += ", ";
        detail += buf;
        report(n, ok, what, detail);
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// --- shared fixture builders --------------------------------------------------

Lexicon example_lexicon() {
    Lexicon lex;
    lex.add("very", PosClass::ADV, 0.9);
    lex.add("stable", PosClass::ADJ, 0.7);
    lex.add("good", PosClass::ADJ, 0.8);
    lex.add("bad", PosClass::ADJ, -0.8);
    lex.add("car", PosClass::NOUN, 0.0);
    lex.add("handling", PosClass::NOUN, 0.0);
    return lex;
}

std::string lexicon_tsv() {
    std::ostringstream out;
    for (const SynthWord& w : synth_vocabulary())
        out << w.word << "\t" << w.pos << "\t" << w.polarity << "\n";
    return out.str();
}

std::string corpus_jsonl(const Corpus& corpus) {
    std::ostringstream out;
    for (const Review& r : corpus.reviews) {
        nlohmann::json j;
        j["entity_id"] = r.entity_id;
        j["review_id"] = r.review_id;
        j["text"] = r.text;
        out << j.dump() << "\n";
    }
    return out.str();
}

// --- criterion bodies ----------------------------------------------------------

bool check_centroids(std::string& detail) {
    struct Case {
        Level level;
        double input;   // fuzzifies to membership 1.0 in `level`
        double expect;  // closed-form centroid of the full output triangle
    };
    const Case cases[] = {
        {Level::Low, 0.0, 1.0 / 6.0},
        {Level::Moderate, 0.5, 0.5},
        {Level::High, 1.0, 5.0 / 6.0},
    };
    for (const Case& c : cases) {
        FuzzySystem sys;
        sys.rules = {Rule{{{"adv", c.level}}, c.level, {}}};
        double got = defuzzify_centroid(infer(sys, {{"adv", c.input}}), 1000);
        if (std::abs(got - c.expect) > 1e-3) {
            detail = std::string(to_string(c.level)) + " centroid " + fmt(got) + " != " +
                     fmt(c.expect);
            return false;
        }
    }
    return true;
}

bool check_chain_exactness(std::string& detail) {
    Lexicon lex = example_lexicon();
    PosLexicon pos_lexicon = pos_lexicon_from(lex);
    const std::vector<std::string> pool = {"very", "stable", "handling", "good", "car", "it"};
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        std::mt19937_64 rng(trial * 7919 + 17);
        for (std::size_t len = 1; len <= 4; ++len) {
            std::string text;
            for (std::size_t i = 0; i < len; ++i) {
                if (!text.empty()) text += " ";
                text += pool[rng() % pool.size()];
            }
            std::vector<Token> tokens = tokenize(text);
            SentenceFeatures feats = model_features(tokens, pos_lexicon);
            CrfModel model = oracle::random_model(feats, trial + 1);

            double fast = crf_log_partition(model, feats);
            double brute = oracle::brute_log_partition(model, feats);
            if (std::abs(fast - brute) > 1e-9) {
                detail = "log-partition " + fmt(fast) + " vs brute " + fmt(brute) + " (trial " +
                         std::to_string(trial) + ", len " + std::to_string(len) + ")";
                return false;
            }
            std::vector<BioLabel> fast_path = crf_viterbi_labels(model, feats);
            std::vector<BioLabel> brute_path = oracle::brute_viterbi(model, feats);
            if (fast_path != brute_path) {
                detail = "best-path mismatch (trial " + std::to_string(trial) + ", len " +
                         std::to_string(len) + ")";
                return false;
            }
        }
    }
    return true;
}

bool check_gradient(std::string& detail) {
    Lexicon lex = example_lexicon();
    PosLexicon pos_lexicon = pos_lexicon_from(lex);
    const double lambda = 0.5;
    const double h = 1e-5;
    const std::vector<std::string> pool = {"very", "stable", "handling", "good"};
    for (std::uint64_t inst = 0; inst < 20; ++inst) {
        std::mt19937_64 rng(inst * 104729 + 3);
        std::string text;
        for (int i = 0; i < 3; ++i) {
            if (!text.empty()) text += " ";
            text += pool[rng() % pool.size()];
        }
        LabeledSequence seq;
        seq.tokens = tokenize(text);
        seq.labels = {BioLabel::Outside, BioLabel::BAsp,
                      (rng() % 2 == 0) ? BioLabel::IAsp : BioLabel::Outside};
        SentenceFeatures feats = model_features(seq.tokens, pos_lexicon);
        CrfModel model = oracle::random_model(feats, inst + 11);

        std::vector<LabeledSequence> batch = {seq};
        CrfGradient grad = crf_gradient(model, batch, pos_lexicon, lambda);

        for (const auto& [feature, weights] : grad.emission) {
            (void)weights;
            for (int y = 0; y < kNumLabels; ++y) {
                double fd = oracle::finite_difference(
                    model, batch, pos_lexicon, lambda,
                    [&feature = feature, y](CrfModel& m, double d) { m.emission[feature][y] += d; },
                    h);
                if (std::abs(grad.emission.at(feature)[y] - fd) > 1e-5) {
                    detail = "emission d/dw[" + feature + "][" + std::to_string(y) + "] " +
                             fmt(grad.emission.at(feature)[y]) + " vs fd " + fmt(fd);
                    return false;
                }
            }
        }
        for (int a = 0; a < kNumLabels; ++a) {
            for (int b = 0; b < kNumLabels; ++b) {
                double fd = oracle::finite_difference(
                    model, batch, pos_lexicon, lambda,
                    [a, b](CrfModel& m, double d) { m.transition[a][b] += d; }, h);
                if (std::abs(grad.transition[a][b] - fd) > 1e-5) {
                    detail = "transition d/dw[" + std::to_string(a) + "][" + std::to_string(b) +
                             "] " + fmt(grad.transition[a][b]) + " vs fd " + fmt(fd);
                    return false;
                }
            }
        }
    }
    return true;
}

bool check_worked_example(std::string& detail) {
    Lexicon lex = example_lexicon();
    std::vector<Token> tokens = tokenize("The car is good having very stable handling");
    std::vector<PosClass> pos = pos_tag(tokens, pos_lexicon_from(lex));
    std::vector<AspectMention> mentions = {AspectMention{"handling", {}, 7, 8}};
    std::vector<OpinionTuple> tuples = associate_opinions(tokens, pos, mentions, lex);
    if (tuples.size() != 1) {
        detail = "expected one opinion tuple, got " + std::to_string(tuples.size());
        return false;
    }
    const OpinionTuple& t = tuples[0];
    if (t.adv_word != "very" || t.adj_word != "stable" || !t.verb_word.empty() ||
        !t.noun_word.empty() || t.negated) {
        detail = "selected words adv='" + t.adv_word + "' adj='" + t.adj_word + "' verb='" +
                 t.verb_word + "' noun='" + t.noun_word + "'";
        return false;
    }
    SentenceScore score = score_sentence(FuzzySystem::defaults(), t);
    if (score.signed_score <= 0.0 || score.orientation != 1) {
        detail = "signed score " + fmt(score.signed_score) + " not positive";
        return false;
    }
    if (score.granularity != Granularity::Strong && score.granularity != Granularity::VeryStrong) {
        detail = std::string("granularity '") + to_string(score.granularity) +
                 "' not in {strong, very strong} (strength " + fmt(score.strength) + ")";
        return false;
    }
    return true;
}

bool check_bm25_pin(std::string& detail) {
    Corpus corpus = make_corpus({Review{"e1", "r1", "good handling handling", {}},
                                 Review{"e2", "r2", "bad", {}}});
    Bm25Index index = bm25_build(corpus, 1.2, 0.75);
    double got = bm25_score(index, std::vector<std::string>{"handling"}, std::string("e1"));
    if (std::abs(got - 0.8356) > 1e-4) {
        detail = "score " + fmt(got) + " != 0.8356";
        return false;
    }
    return true;
}

bool check_kendall_pin(std::string& detail) {
    const std::vector<std::size_t> other = {8, 7, 5, 2, 4, 1, 6, 3};
    RankedList identity, shuffled;
    for (std::size_t i = 0; i < other.size(); ++i) {
        std::string id = "e" + std::to_string(i + 1);
        identity.entries.push_back(RankedEntry{i + 1, id, static_cast<double>(other.size() - i)});
        shuffled.entries.push_back(
            RankedEntry{other[i], id, static_cast<double>(other.size() - other[i] + 1)});
    }
    RankComparison cmp = compare_rankings(identity, shuffled);
    if (!cmp.kendall_tau) {
        detail = "tau not computed";
        return false;
    }
    if (*cmp.kendall_tau != -0.5) {
        detail = "tau " + fmt(*cmp.kendall_tau) + " != -0.5 exactly";
        return false;
    }
    return true;
}

bool check_planted_ordering(std::string& detail) {
    Lexicon lex = synth_lexicon();
    PosLexicon pos_lexicon = pos_lexicon_from(lex);
    std::vector<LabeledSequence> training = synth_training_sequences(150, 3);
    TrainConfig tc;
    tc.epochs = 6;
    tc.seed = 3;
    CrfModel model = crf_train(training, pos_lexicon, tc);

    Corpus corpus = synth_corpus({{"alpha", 0.95}, {"beta", 0.5}, {"gamma", 0.05}}, 12, 7, 2,
                                 {"handling", "mileage"});
    FuzzySystem system = FuzzySystem::defaults();
    ScoreResult result =
        score_corpus(corpus, model, pos_lexicon, lex, system, AssociationConfig{}, nullptr, 1);
    std::vector<EntityAspectScore> scores =
        aggregate_entity_scores(to_contributions(result.mentions), Aggregation::Mean);

    auto order_for = [&](const std::string& query) {
        ParsedQuery parsed =
            parse_query(query, model, pos_lexicon, lex, system, AssociationConfig{});
        RankedList ranked = rank_entities(parsed, scores);
        std::vector<std::string> ids;
        for (const RankedEntry& e : ranked.entries) ids.push_back(e.entity_id);
        return ids;
    };

    std::vector<std::string> plain = order_for("handling");
    if (plain != std::vector<std::string>{"alpha", "beta", "gamma"}) {
        detail = "'handling' order:";
        for (const std::string& id : plain) detail += " " + id;
        return false;
    }
    std::vector<std::string> reversed = order_for("bad handling");
    if (reversed != std::vector<std::string>{"gamma", "beta", "alpha"}) {
        detail = "'bad handling' order:";
        for (const std::string& id : reversed) detail += " " + id;
        return false;
    }
    return true;
}

bool check_scaling(std::string& detail) {
    RunConfig config;
    config.seed = 1;
    BenchReport report = run_bench(config, {40, 80, 160, 320}, 3);
    if (!report.r_squared) {
        detail = "no linear fit computed";
        return false;
    }
    if (*report.r_squared < 0.95) {
        detail = "r_squared " + fmt(*report.r_squared) + " < 0.95";
        return false;
    }
    detail = "r_squared " + fmt(*report.r_squared);
    return true;
}

bool check_determinism(std::string& detail) {
    auto fixtures = testutil::temp_dir("accept_fixtures");
    testutil::write_file(fixtures, "lexicon.tsv", lexicon_tsv());
    {
        std::ostringstream conll;
        write_conll(synth_training_sequences(150, 11), conll);
        testutil::write_file(fixtures, "train.conll", conll.str());
    }
    Corpus corpus = synth_corpus({{"alpha", 0.9}, {"beta", 0.3}}, 10, 7, 2, {"handling"});
    testutil::write_file(fixtures, "reviews.jsonl", corpus_jsonl(corpus));

    RunConfig base;
    base.lexicon_path = (fixtures / "lexicon.tsv").string();
    base.train_path = (fixtures / "train.conll").string();
    base.corpus_path = (fixtures / "reviews.jsonl").string();
    base.epochs = 8;
    base.seed = 42;
    base.seed_set = true;

    auto train_into = [&](const std::string& tag) -> std::filesystem::path {
        auto dir = testutil::temp_dir(tag);
        RunConfig config = base;
        config.output_dir = dir.string();
        std::ostringstream out, err;
        if (cmd_train(config, out, err) != kExitOk)
            throw std::runtime_error("train failed: " + err.str());
        return dir;
    };
    auto train_a = train_into("accept_train_a");
    auto train_b = train_into("accept_train_b");
    for (const char* name : {"model.json", "train_report.json"}) {
        if (testutil::read_file(train_a / name) != testutil::read_file(train_b / name)) {
            detail = std::string(name) + " differs between identical training runs";
            return false;
        }
    }

    auto index_into = [&](const std::string& tag, unsigned threads) -> std::filesystem::path {
        auto dir = testutil::temp_dir(tag);
        RunConfig config = base;
        config.model_path = (train_a / "model.json").string();
        config.output_dir = dir.string();
        config.threads = threads;
        std::ostringstream out, err;
        if (cmd_index(config, out, err) != kExitOk)
            throw std::runtime_error("index failed: " + err.str());
        return dir;
    };
    auto idx_one = index_into("accept_idx_t1", 1);
    auto idx_four = index_into("accept_idx_t4", 4);
    auto idx_again = index_into("accept_idx_t1b", 1);
    for (const char* name : {"scores.tsv", "sentences.tsv", "bm25.json"}) {
        std::string reference = testutil::read_file(idx_one / name);
        if (reference.empty()) {
            detail = std::string(name) + " is empty";
            return false;
        }
        if (testutil::read_file(idx_four / name) != reference) {
            detail = std::string(name) + " differs between 1 and 4 worker threads";
            return false;
        }
        if (testutil::read_file(idx_again / name) != reference) {
            detail = std::string(name) + " differs between repeated runs";
            return false;
        }
    }
    return true;
}

}  // namespace

int main() {
    Harness h;
    h.criterion(1, "single fully-fired rule centroids match the closed forms", 1.0,
                check_centroids);
    h.criterion(2, "chain inference matches brute-force enumeration on 100 seeded trials", 10.0,
                check_chain_exactness);
    h.criterion(3, "training gradient matches central finite differences on 20 instances", 10.0,
                check_gradient);
    h.criterion(4, "worked example picks {very, stable} and scores strong positive", 5.0,
                check_worked_example);
    h.criterion(5, "two-document relevance score matches the hand computation", 1.0,
                check_bm25_pin);
    h.criterion(6, "rank correlation of the fixed permutation is exactly -0.5", 1.0,
                check_kendall_pin);
    h.criterion(7, "planted three-entity corpus ranks in order and reverses on negation", 5.0,
                check_planted_ordering);
    h.criterion(8, "indexing time grows linearly over an 8x size span", 60.0, check_scaling);
    h.criterion(9, "training and indexing are byte-identical across runs and thread counts", 60.0,
                check_determinism);
    return h.failures;
}
