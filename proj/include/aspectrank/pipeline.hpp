#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "aspectrank/associate.hpp"
#include "aspectrank/corpus.hpp"
#include "aspectrank/crf.hpp"
#include "aspectrank/errors.hpp"
#include "aspectrank/fuzzy.hpp"
#include "aspectrank/lexicon.hpp"
#include "aspectrank/rank.hpp"

namespace aspectrank {

struct ScoredMention {
    SentenceRef ref;
    OpinionTuple tuple;
    SentenceScore score;
};

struct PipelineStats {
    std::size_t reviews = 0;
    std::size_t sentences = 0;
    std::size_t mentions = 0;
    std::size_t scored = 0;
    std::size_t without_opinion = 0;  // mentions with no opinion word in reach
    std::size_t failed = 0;           // rule base produced nothing usable
    std::size_t peak_workers = 0;     // observed concurrency; not persisted
};

struct ScoreResult {
    std::vector<ScoredMention> mentions;  // review order, then sentence, then span
    PipelineStats stats;
};

// Reviews are processed in parallel blocks and merged back in review order,
// so the result is identical for any thread count.
inline ScoreResult score_corpus(const Corpus& corpus, const CrfModel& model,
                                const PosLexicon& pos_lexicon, const Lexicon& sentiment,
                                const FuzzySystem& system, const AssociationConfig& config = {},
                                const DependencyFile* deps = nullptr, unsigned threads = 1) {
    const std::size_t n = corpus.reviews.size();
    std::vector<std::vector<ScoredMention>> per_review(n);
    std::vector<PipelineStats> per_thread_stats;

    if (threads == 0) threads = 1;
    unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n == 0 ? 1 : n));
    per_thread_stats.resize(workers);

    std::atomic<std::size_t> active{0};
    std::atomic<std::size_t> peak{0};

    auto process_block = [&](unsigned worker, std::size_t begin, std::size_t end) {
        std::size_t now = ++active;
        std::size_t seen = peak.load();
        while (seen < now && !peak.compare_exchange_weak(seen, now)) {
        }
        PipelineStats& stats = per_thread_stats[worker];
        for (std::size_t i = begin; i < end; ++i) {
            const Review& review = corpus.reviews[i];
            ++stats.reviews;
            for (const Sentence& sentence : review.sentences) {
                ++stats.sentences;
                SentenceRef ref{review.entity_id, review.review_id, sentence.index};
                std::vector<PosClass> pos = pos_tag(sentence.tokens, pos_lexicon);
                std::vector<AspectMention> aspects =
                    extract_aspects(model, sentence.tokens, pos_lexicon, ref);
                if (aspects.empty()) continue;
                const DependencyArcs* arcs =
                    deps == nullptr ? nullptr : deps->find(review.review_id, sentence.index);
                std::vector<OpinionTuple> tuples =
                    associate_opinions(sentence.tokens, pos, aspects, sentiment, arcs, config);
                for (OpinionTuple& tuple : tuples) {
                    ++stats.mentions;
                    if (!tuple.has_opinion()) {
                        ++stats.without_opinion;
                        continue;
                    }
                    try {
                        SentenceScore score = score_sentence(system, tuple);
                        per_review[i].push_back(ScoredMention{ref, std::move(tuple), score});
                        ++stats.scored;
                    } catch (const Error&) {
                        ++stats.failed;
                    }
                }
            }
        }
        --active;
    };

    if (workers <= 1) {
        process_block(0, 0, n);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (n + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            std::size_t begin = std::min<std::size_t>(w * chunk, n);
            std::size_t end = std::min<std::size_t>(begin + chunk, n);
            pool.emplace_back(process_block, w, begin, end);
        }
        for (std::thread& t : pool) t.join();
    }

    ScoreResult result;
    for (const PipelineStats& s : per_thread_stats) {
        result.stats.reviews += s.reviews;
        result.stats.sentences += s.sentences;
        result.stats.mentions += s.mentions;
        result.stats.scored += s.scored;
        result.stats.without_opinion += s.without_opinion;
        result.stats.failed += s.failed;
    }
    result.stats.peak_workers = peak.load();
    for (std::size_t i = 0; i < n; ++i)
        for (ScoredMention& m : per_review[i]) result.mentions.push_back(std::move(m));
    return result;
}

inline std::vector<SentenceContribution> to_contributions(
    const std::vector<ScoredMention>& mentions) {
    std::vector<SentenceContribution> out;
    out.reserve(mentions.size());
    for (const ScoredMention& m : mentions)
        out.push_back(
            SentenceContribution{m.ref.entity_id, m.tuple.aspect.term, m.score.signed_score});
    return out;
}

// Round-trippable double formatting for the TSV artifacts.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_score_table(const std::vector<EntityAspectScore>& scores, std::ostream& out) {
    out << "entity_id\taspect\tscore\tsupport\n";
    for (const EntityAspectScore& s : scores)
        out << s.entity_id << "\t" << s.aspect << "\t" << format_double(s.score) << "\t"
            << s.support << "\n";
}

namespace detail {

inline std::vector<std::string> split_tsv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

inline double parse_double_field(const std::string& field, const std::string& where) {
    char* end = nullptr;
    double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size() || field.empty())
        throw MalformedRow(where + ": not a number: '" + field + "'");
    return v;
}

}  // namespace detail

inline std::vector<EntityAspectScore> read_score_table(std::istream& in,
                                                       const std::string& source_name = "<stream>") {
    std::string line;
    if (!std::getline(in, line) || line != "entity_id\taspect\tscore\tsupport")
        throw MalformedRow(source_name + ": missing score table header");
    std::vector<EntityAspectScore> scores;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string where = source_name + ":" + std::to_string(lineno);
        std::vector<std::string> f = detail::split_tsv(line);
        if (f.size() != 4) throw MalformedRow(where + ": expected 4 fields");
        EntityAspectScore s;
        s.entity_id = f[0];
        s.aspect = f[1];
        s.score = detail::parse_double_field(f[2], where);
        s.support = static_cast<std::size_t>(detail::parse_double_field(f[3], where));
        scores.push_back(std::move(s));
    }
    return scores;
}

inline std::vector<EntityAspectScore> read_score_table_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open score table: " + path);
    return read_score_table(in, path);
}

// Per-sentence evidence rows behind the aggregated table; feeds --explain.
struct SentenceDetailRow {
    std::string entity_id, review_id;
    std::size_t sentence_index = 0;
    std::string aspect;
    std::string adv, adj, verb, noun;  // "-" when the slot is empty
    bool negated = false;
    double strength = 0.0;
    int orientation = 0;
    double signed_score = 0.0;
    std::string label;  // e.g. "strong positive"
};

inline constexpr const char* kSentenceDetailHeader =
    "entity_id\treview_id\tsentence\taspect\tadv\tadj\tverb\tnoun\tnegated\tstrength\torientation"
    "\tsigned_score\tlabel";

inline void write_sentence_details(const std::vector<ScoredMention>& mentions, std::ostream& out) {
    out << kSentenceDetailHeader << "\n";
    auto cell = [](const std::string& word) { return word.empty() ? "-" : word.c_str(); };
    for (const ScoredMention& m : mentions) {
        out << m.ref.entity_id << "\t" << m.ref.review_id << "\t" << m.ref.sentence_index << "\t"
            << m.tuple.aspect.term << "\t" << cell(m.tuple.adv_word) << "\t"
            << cell(m.tuple.adj_word) << "\t" << cell(m.tuple.verb_word) << "\t"
            << cell(m.tuple.noun_word) << "\t" << (m.tuple.negated ? 1 : 0) << "\t"
            << format_double(m.score.strength) << "\t" << m.score.orientation << "\t"
            << format_double(m.score.signed_score) << "\t" << m.score.label() << "\n";
    }
}

inline std::vector<SentenceDetailRow> read_sentence_details(
    std::istream& in, const std::string& source_name = "<stream>") {
    std::string line;
    if (!std::getline(in, line) || line != kSentenceDetailHeader)
        throw MalformedRow(source_name + ": missing sentence detail header");
    std::vector<SentenceDetailRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string where = source_name + ":" + std::to_string(lineno);
        std::vector<std::string> f = detail::split_tsv(line);
        if (f.size() != 13) throw MalformedRow(where + ": expected 13 fields");
        SentenceDetailRow r;
        r.entity_id = f[0];
        r.review_id = f[1];
        r.sentence_index = static_cast<std::size_t>(detail::parse_double_field(f[2], where));
        r.aspect = f[3];
        r.adv = f[4];
        r.adj = f[5];
        r.verb = f[6];
        r.noun = f[7];
        r.negated = f[8] == "1";
        r.strength = detail::parse_double_field(f[9], where);
        r.orientation = static_cast<int>(detail::parse_double_field(f[10], where));
        r.signed_score = detail::parse_double_field(f[11], where);
        r.label = f[12];
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<SentenceDetailRow> read_sentence_details_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open sentence details: " + path);
    return read_sentence_details(in, path);
}

}  // namespace aspectrank
