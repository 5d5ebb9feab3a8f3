#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "aspectrank/bm25.hpp"
#include "aspectrank/config.hpp"
#include "aspectrank/corpus.hpp"
#include "aspectrank/crf.hpp"
#include "aspectrank/errors.hpp"
#include "aspectrank/fuzzy.hpp"
#include "aspectrank/lexicon.hpp"
#include "aspectrank/pipeline.hpp"
#include "aspectrank/rank.hpp"
#include "aspectrank/synth.hpp"

namespace aspectrank {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitEmptyQuery = 3;

namespace detail {

// Per-stage wall-clock logging; stderr only, so command outputs stay
// byte-reproducible.
class StageTimer {
public:
    StageTimer(std::ostream& err, const char* command)
        : err_(err), command_(command), last_(std::chrono::steady_clock::now()) {}

    void stage(const char* name) {
        auto now = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        char buf[160];
        std::snprintf(buf, sizeof buf, "[%s] %s: %.1f ms", command_, name, ms);
        err_ << buf << "\n";
    }

private:
    std::ostream& err_;
    const char* command_;
    std::chrono::steady_clock::time_point last_;
};

inline std::string join_path(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

inline const std::string& require_path(const std::string& path, const char* what) {
    if (path.empty()) throw IoError(std::string("no ") + what + " configured");
    return path;
}

inline ReviewFormat detect_format(const std::string& path, const std::string& configured) {
    if (configured == "jsonl") return ReviewFormat::jsonl;
    if (configured == "csv") return ReviewFormat::csv;
    std::string ext = std::filesystem::path(path).extension().string();
    return ext == ".csv" ? ReviewFormat::csv : ReviewFormat::jsonl;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

inline std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace detail

inline std::string resolved_model_path(const RunConfig& config) {
    return config.model_path.empty() ? detail::join_path(config.output_dir, "model.json")
                                     : config.model_path;
}

inline std::string score_table_path(const RunConfig& config) {
    return detail::join_path(config.output_dir, "scores.tsv");
}

inline std::string sentence_detail_path(const RunConfig& config) {
    return detail::join_path(config.output_dir, "sentences.tsv");
}

inline std::string bm25_index_path(const RunConfig& config) {
    return detail::join_path(config.output_dir, "bm25.json");
}

inline std::string train_report_path(const RunConfig& config) {
    return detail::join_path(config.output_dir, "train_report.json");
}

inline FuzzySystem load_configured_fuzzy_system(const RunConfig& config) {
    FuzzySystem system =
        config.rules_path.empty() ? FuzzySystem::defaults() : load_fuzzy_system_file(config.rules_path);
    system.resolution = config.resolution;
    return system;
}

// --- tagger evaluation -----------------------------------------------------

struct HeldOutEval {
    std::size_t sequences = 0;
    std::size_t tokens = 0;
    std::size_t correct = 0;
    std::size_t tp = 0, fp = 0, fn = 0;  // aspect tokens (B or I) as positive class

    double accuracy() const { return tokens == 0 ? 1.0 : static_cast<double>(correct) / tokens; }
    double precision() const { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp); }
    double recall() const { return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn); }
    double f1() const {
        double p = precision(), r = recall();
        return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    }
};

inline HeldOutEval evaluate_tagger(const CrfModel& model, std::span<const LabeledSequence> data,
                                   const PosLexicon& lex) {
    HeldOutEval ev;
    for (const LabeledSequence& seq : data) {
        ++ev.sequences;
        std::vector<BioLabel> pred = crf_viterbi_labels(model, model_features(seq.tokens, lex));
        for (std::size_t t = 0; t < seq.labels.size(); ++t) {
            ++ev.tokens;
            if (pred[t] == seq.labels[t]) ++ev.correct;
            bool gold_aspect = seq.labels[t] != BioLabel::Outside;
            bool pred_aspect = pred[t] != BioLabel::Outside;
            if (gold_aspect && pred_aspect) ++ev.tp;
            else if (pred_aspect) ++ev.fp;
            else if (gold_aspect) ++ev.fn;
        }
    }
    return ev;
}

// Deterministic split: every stride-th sequence is held out.
inline void split_holdout(const std::vector<LabeledSequence>& data, double holdout,
                          std::vector<LabeledSequence>& train, std::vector<LabeledSequence>& held) {
    train.clear();
    held.clear();
    if (holdout <= 0.0) {
        train = data;
        return;
    }
    std::size_t stride = std::max<std::size_t>(2, static_cast<std::size_t>(1.0 / holdout + 0.5));
    for (std::size_t i = 0; i < data.size(); ++i)
        ((i % stride == stride - 1) ? held : train).push_back(data[i]);
}

// --- train ------------------------------------------------------------------

inline int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        config.validate();
        if (!config.seed_set) throw DomainError("train: an explicit seed is required");
        detail::StageTimer timer(err, "train");

        Lexicon sentiment = load_lexicon_file(detail::require_path(config.lexicon_path, "lexicon"));
        PosLexicon pos_lexicon = pos_lexicon_from(sentiment);
        std::vector<LabeledSequence> data =
            read_conll_file(detail::require_path(config.train_path, "training file"));
        if (data.empty()) throw EmptyTrainingSet("train: no training sequences in " + config.train_path);
        timer.stage("read");

        std::vector<LabeledSequence> train_split, held_split;
        split_holdout(data, config.holdout, train_split, held_split);

        TrainConfig tc;
        tc.epochs = config.epochs;
        tc.learning_rate = config.learning_rate;
        tc.lambda = config.lambda;
        tc.seed = config.seed;
        TrainStats stats;
        CrfModel model = crf_train(train_split, pos_lexicon, tc, &stats);
        timer.stage("train");

        HeldOutEval eval = evaluate_tagger(model, held_split, pos_lexicon);
        timer.stage("evaluate");

        std::filesystem::create_directories(config.output_dir);
        {
            auto f = detail::open_output(resolved_model_path(config));
            save_model(model, f);
        }
        nlohmann::json report;
        report["epochs"] = config.epochs;
        report["learning_rate"] = config.learning_rate;
        report["lambda"] = config.lambda;
        report["seed"] = config.seed;
        report["sequences"] = {{"train", train_split.size()}, {"held_out", held_split.size()}};
        report["log_likelihood"] = {{"initial", stats.initial_log_likelihood},
                                    {"per_epoch", stats.epoch_log_likelihood},
                                    {"final", stats.final_log_likelihood}};
        report["held_out"] = {{"tokens", eval.tokens},
                              {"token_accuracy", eval.accuracy()},
                              {"aspect_precision", eval.precision()},
                              {"aspect_recall", eval.recall()},
                              {"aspect_f1", eval.f1()}};
        {
            auto f = detail::open_output(train_report_path(config));
            f << report.dump(1) << "\n";
        }
        timer.stage("write");

        out << "trained on " << train_split.size() << " sequences (" << held_split.size()
            << " held out)\n";
        out << "mean log-likelihood " << detail::fixed4(stats.initial_log_likelihood) << " -> "
            << detail::fixed4(stats.final_log_likelihood) << "\n";
        out << "held-out token accuracy " << detail::fixed4(eval.accuracy()) << ", aspect F1 "
            << detail::fixed4(eval.f1()) << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

// --- index -------------------------------------------------------------------

inline int cmd_index(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        config.validate();
        detail::StageTimer timer(err, "index");

        const std::string& corpus_path = detail::require_path(config.corpus_path, "corpus");
        Corpus corpus =
            ingest_reviews(corpus_path, detail::detect_format(corpus_path, config.corpus_format));
        if (corpus.reviews.empty()) throw EmptyCorpus("index: corpus has no reviews: " + corpus_path);
        timer.stage("ingest");

        Lexicon sentiment = load_lexicon_file(detail::require_path(config.lexicon_path, "lexicon"));
        PosLexicon pos_lexicon = pos_lexicon_from(sentiment);
        CrfModel model = load_model(resolved_model_path(config));
        FuzzySystem system = load_configured_fuzzy_system(config);
        DependencyFile deps;
        bool have_deps = !config.dependencies_path.empty();
        if (have_deps) deps = DependencyFile::parse_file(config.dependencies_path);
        timer.stage("load");

        ScoreResult result =
            score_corpus(corpus, model, pos_lexicon, sentiment, system, config.association(),
                         have_deps ? &deps : nullptr, config.threads);
        timer.stage("score");

        std::vector<EntityAspectScore> scores =
            aggregate_entity_scores(to_contributions(result.mentions),
                                    parse_aggregation(config.aggregation));
        Bm25Index bm25 = bm25_build(corpus, config.k1, config.b);
        timer.stage("aggregate");

        std::filesystem::create_directories(config.output_dir);
        {
            auto f = detail::open_output(score_table_path(config));
            write_score_table(scores, f);
        }
        {
            auto f = detail::open_output(sentence_detail_path(config));
            write_sentence_details(result.mentions, f);
        }
        {
            auto f = detail::open_output(bm25_index_path(config));
            save_bm25(bm25, f);
        }
        timer.stage("write");

        err << "[index] " << result.stats.reviews << " reviews, " << result.stats.sentences
            << " sentences, " << result.stats.mentions << " aspect mentions ("
            << result.stats.scored << " scored, " << result.stats.without_opinion
            << " without opinion words, " << result.stats.failed << " failed)\n";
        if (scores.empty()) err << "warning: no aspect mentions scored; score table is empty\n";

        out << "indexed " << corpus.entity_count() << " entities, " << corpus.reviews.size()
            << " reviews -> " << scores.size() << " aspect score rows\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

// --- query -------------------------------------------------------------------

inline int cmd_query(const RunConfig& config, const std::string& query, bool explain,
                     std::ostream& out, std::ostream& err) {
    try {
        config.validate();
        Lexicon sentiment = load_lexicon_file(detail::require_path(config.lexicon_path, "lexicon"));
        PosLexicon pos_lexicon = pos_lexicon_from(sentiment);
        CrfModel model = load_model(resolved_model_path(config));
        FuzzySystem system = load_configured_fuzzy_system(config);
        std::vector<EntityAspectScore> scores = read_score_table_file(score_table_path(config));

        ParsedQuery parsed;
        try {
            parsed = parse_query(query, model, pos_lexicon, sentiment, system, config.association());
        } catch (const NoAspectFound& e) {
            err << "error: " << e.what() << "\n";
            return kExitEmptyQuery;
        }

        RankedList ranked = rank_entities(parsed, scores);
        if (ranked.entries.empty()) {
            err << "error: no entity has scores for query: " << query << "\n";
            return kExitEmptyQuery;
        }

        out << "rank\tentity_id\tscore\n";
        for (const RankedEntry& e : ranked.entries)
            out << e.rank << "\t" << e.entity_id << "\t" << detail::fixed4(e.score) << "\n";

        if (explain) {
            std::set<std::string> wanted;
            for (const QueryAspect& qa : parsed.aspects) wanted.insert(qa.term);
            std::vector<SentenceDetailRow> rows =
                read_sentence_details_file(sentence_detail_path(config));
            for (const RankedEntry& e : ranked.entries) {
                out << "\n" << e.entity_id << "\n";
                for (const SentenceDetailRow& r : rows) {
                    if (r.entity_id != e.entity_id || wanted.count(r.aspect) == 0) continue;
                    std::string words;
                    for (const std::string& w : {r.adv, r.adj, r.verb, r.noun}) {
                        if (w == "-") continue;
                        if (!words.empty()) words += " ";
                        words += w;
                    }
                    out << "  [" << r.review_id << ":" << r.sentence_index << "] " << r.aspect
                        << ": " << (words.empty() ? "-" : words)
                        << (r.negated ? " (negated)" : "") << " -> " << r.label << " "
                        << detail::fixed4(r.signed_score) << "\n";
                }
            }
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

// --- compare -------------------------------------------------------------------

inline int cmd_compare(const RunConfig& config, const std::string& query, std::ostream& out,
                       std::ostream& err) {
    try {
        config.validate();
        Lexicon sentiment = load_lexicon_file(detail::require_path(config.lexicon_path, "lexicon"));
        PosLexicon pos_lexicon = pos_lexicon_from(sentiment);
        CrfModel model = load_model(resolved_model_path(config));
        FuzzySystem system = load_configured_fuzzy_system(config);
        std::vector<EntityAspectScore> scores = read_score_table_file(score_table_path(config));
        Bm25Index bm25 = load_bm25_file(bm25_index_path(config));

        ParsedQuery parsed;
        try {
            parsed = parse_query(query, model, pos_lexicon, sentiment, system, config.association());
        } catch (const NoAspectFound& e) {
            err << "error: " << e.what() << "\n";
            return kExitEmptyQuery;
        }

        RankedList proposed = rank_entities(parsed, scores);
        if (proposed.entries.empty()) {
            err << "error: no entity has scores for query: " << query << "\n";
            return kExitEmptyQuery;
        }

        // baseline restricted to the same entity set so ranks are comparable
        std::vector<std::pair<std::string, double>> baseline_scores;
        for (const RankedEntry& e : proposed.entries)
            baseline_scores.emplace_back(e.entity_id, bm25_score(bm25, parsed.terms, e.entity_id));
        RankedList baseline = make_ranked_list(std::move(baseline_scores));

        RankComparison cmp = compare_rankings(proposed, baseline);
        out << "entity_id\trank_fuzzy\tscore_fuzzy\trank_bm25\tscore_bm25\n";
        for (const ComparisonRow& r : cmp.rows)
            out << r.entity_id << "\t" << r.rank_a << "\t" << detail::fixed4(r.score_a) << "\t"
                << r.rank_b << "\t" << detail::fixed4(r.score_b) << "\n";
        out << "# kendall_tau\t"
            << (cmp.kendall_tau ? detail::fixed4(*cmp.kendall_tau) : std::string("n/a")) << "\n";
        out << "# spearman_rho\t"
            << (cmp.spearman_rho ? detail::fixed4(*cmp.spearman_rho) : std::string("n/a")) << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

// --- bench -------------------------------------------------------------------

struct BenchRow {
    std::size_t size = 0;        // reviews in the synthesized corpus
    double wall_ms = 0.0;        // best of `repeats` index passes
    std::size_t peak_workers = 0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::optional<double> r_squared;  // linear fit wall_ms ~ size
};

inline std::optional<double> linear_fit_r_squared(const std::vector<BenchRow>& rows) {
    std::size_t n = rows.size();
    if (n < 2) return std::nullopt;
    double sx = 0, sy = 0;
    for (const BenchRow& r : rows) {
        sx += static_cast<double>(r.size);
        sy += r.wall_ms;
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const BenchRow& r : rows) {
        double dx = static_cast<double>(r.size) - mx;
        double dy = r.wall_ms - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    double slope = sxy / sxx;
    double ss_res = 0;
    for (const BenchRow& r : rows) {
        double fit = my + slope * (static_cast<double>(r.size) - mx);
        double e = r.wall_ms - fit;
        ss_res += e * e;
    }
    return 1.0 - ss_res / syy;
}

inline BenchReport run_bench(const RunConfig& config, const std::vector<std::size_t>& sizes,
                             int repeats = 3) {
    config.validate();
    Lexicon sentiment = synth_lexicon();
    PosLexicon pos_lexicon = pos_lexicon_from(sentiment);
    FuzzySystem system = FuzzySystem::defaults();
    system.resolution = config.resolution;

    TrainConfig tc;
    tc.epochs = 5;
    tc.seed = config.seed;
    std::vector<LabeledSequence> training = synth_training_sequences(150, config.seed);
    CrfModel model = crf_train(training, pos_lexicon, tc);

    BenchReport report;
    for (std::size_t size : sizes) {
        Corpus corpus = synth_corpus(size, 6, config.seed + size);
        BenchRow row;
        row.size = size;
        row.wall_ms = std::numeric_limits<double>::infinity();
        for (int rep = 0; rep < std::max(1, repeats); ++rep) {
            auto t0 = std::chrono::steady_clock::now();
            ScoreResult result = score_corpus(corpus, model, pos_lexicon, sentiment, system,
                                              config.association(), nullptr, config.threads);
            std::vector<EntityAspectScore> scores = aggregate_entity_scores(
                to_contributions(result.mentions), parse_aggregation(config.aggregation));
            double sink = scores.empty() ? 0.0 : scores.front().score;
            if (!corpus.reviews.empty()) sink += bm25_build(corpus, config.k1, config.b).avgdl;
            auto t1 = std::chrono::steady_clock::now();
            volatile double keep = sink;  // keep the timed work observable
            (void)keep;
            row.wall_ms =
                std::min(row.wall_ms, std::chrono::duration<double, std::milli>(t1 - t0).count());
            row.peak_workers = std::max(row.peak_workers, result.stats.peak_workers);
        }
        report.rows.push_back(row);
    }
    report.r_squared = linear_fit_r_squared(report.rows);
    return report;
}

inline int cmd_bench(const RunConfig& config, const std::vector<std::size_t>& sizes,
                     std::ostream& out, std::ostream& err, int repeats = 3) {
    try {
        if (sizes.empty()) throw DomainError("bench: no sizes given");
        BenchReport report = run_bench(config, sizes, repeats);
        out << "size,wall_ms,peak_workers\n";
        for (const BenchRow& r : report.rows) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%zu,%.3f,%zu", r.size, r.wall_ms, r.peak_workers);
            out << buf << "\n";
        }
        out << "# r_squared = "
            << (report.r_squared ? detail::fixed4(*report.r_squared) : std::string("n/a")) << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace aspectrank
