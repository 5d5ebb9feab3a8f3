#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aspectrank/associate.hpp"
#include "aspectrank/crf.hpp"
#include "aspectrank/errors.hpp"
#include "aspectrank/fuzzy.hpp"
#include "aspectrank/lexicon.hpp"

namespace aspectrank {

struct EntityAspectScore {
    std::string entity_id;
    std::string aspect;
    double score = 0.0;       // aggregated signed score
    std::size_t support = 0;  // number of scored sentences behind it
};

enum class Aggregation { Mean, Sum };

inline Aggregation parse_aggregation(const std::string& name) {
    if (name == "mean") return Aggregation::Mean;
    if (name == "sum") return Aggregation::Sum;
    throw MalformedRow("unknown aggregation: " + name + " (expected mean or sum)");
}

inline const char* to_string(Aggregation agg) {
    return agg == Aggregation::Mean ? "mean" : "sum";
}

struct SentenceContribution {
    std::string entity_id;
    std::string aspect;
    double signed_score = 0.0;
};

inline std::vector<EntityAspectScore> aggregate_entity_scores(
    const std::vector<SentenceContribution>& contributions, Aggregation agg = Aggregation::Mean) {
    std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> acc;
    for (const SentenceContribution& c : contributions) {
        auto& slot = acc[{c.entity_id, c.aspect}];
        slot.first += c.signed_score;
        slot.second += 1;
    }
    std::vector<EntityAspectScore> out;
    out.reserve(acc.size());
    for (const auto& [key, slot] : acc) {
        double value = agg == Aggregation::Mean ? slot.first / static_cast<double>(slot.second)
                                                : slot.first;
        out.push_back(EntityAspectScore{key.first, key.second, value, slot.second});
    }
    return out;  // map iteration: sorted by (entity_id, aspect)
}

struct QueryAspect {
    std::string term;
    int orientation = 1;     // -1, 0, +1; bare aspects default to +1
    double strength = 1.0;   // bare aspects default to 1.0
    bool scored = false;     // true when query opinion words produced the strength
};

struct ParsedQuery {
    std::vector<QueryAspect> aspects;
    std::vector<std::string> terms;  // lowercased query tokens, for the lexical baseline
};

// Aspect terms come from the tagger; if it finds none, query tokens that
// appear in the model's aspect vocabulary are used instead. Opinion words in
// the query modulate orientation and strength; a bare aspect means
// "rank by this aspect, positive first".
inline ParsedQuery parse_query(const std::string& query, const CrfModel& model,
                               const PosLexicon& pos_lexicon, const Lexicon& sentiment,
                               const FuzzySystem& system, const AssociationConfig& config = {}) {
    ParsedQuery parsed;
    std::vector<Token> tokens = tokenize(query);
    for (const Token& tok : tokens) parsed.terms.push_back(tok.lower);
    if (tokens.empty()) throw NoAspectFound("query has no word tokens");

    std::vector<AspectMention> mentions = extract_aspects(model, tokens, pos_lexicon);
    if (mentions.empty()) {
        for (const Token& tok : tokens)
            if (model.in_aspect_vocabulary(tok.lower))
                mentions.push_back(AspectMention{tok.lower, {}, tok.position, tok.position + 1});
    }
    if (mentions.empty()) throw NoAspectFound("no aspect recognized in query: " + query);

    std::vector<PosClass> pos = pos_tag(tokens, pos_lexicon);
    std::set<std::string> seen;
    for (const AspectMention& mention : mentions) {
        if (!seen.insert(mention.term).second) continue;
        QueryAspect qa;
        qa.term = mention.term;
        std::vector<AspectMention> one{mention};
        OpinionTuple tuple = associate_opinions(tokens, pos, one, sentiment, nullptr, config)[0];
        if (tuple.has_opinion()) {
            try {
                SentenceScore s = score_sentence(system, tuple);
                qa.orientation = s.orientation;
                qa.strength = s.strength;
                qa.scored = true;
            } catch (const Error&) {
                // fall through to bare-aspect defaults
            }
        }
        parsed.aspects.push_back(std::move(qa));
    }
    return parsed;
}

struct RankedEntry {
    std::size_t rank = 0;  // 1-based, no gaps
    std::string entity_id;
    double score = 0.0;
};

struct RankedList {
    std::vector<RankedEntry> entries;

    std::size_t rank_of(const std::string& entity_id) const {
        for (const RankedEntry& e : entries)
            if (e.entity_id == entity_id) return e.rank;
        throw UnknownEntity("ranking does not contain entity: " + entity_id);
    }
};

inline RankedList make_ranked_list(std::vector<std::pair<std::string, double>> scored) {
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
    });
    RankedList list;
    list.entries.reserve(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i)
        list.entries.push_back(RankedEntry{i + 1, scored[i].first, scored[i].second});
    return list;
}

// Entity score = sum over query aspects of orientation * strength * aggregated
// aspect score. Entities with none of the query aspects are left out.
inline RankedList rank_entities(const ParsedQuery& query,
                                const std::vector<EntityAspectScore>& scores) {
    std::map<std::pair<std::string, std::string>, double> by_key;
    std::set<std::string> entities;
    for (const EntityAspectScore& s : scores) {
        by_key[{s.entity_id, s.aspect}] = s.score;
        entities.insert(s.entity_id);
    }
    std::vector<std::pair<std::string, double>> scored;
    for (const std::string& entity : entities) {
        double total = 0.0;
        bool has_any = false;
        for (const QueryAspect& qa : query.aspects) {
            auto it = by_key.find({entity, qa.term});
            if (it == by_key.end()) continue;
            has_any = true;
            total += qa.orientation * qa.strength * it->second;
        }
        if (has_any) scored.emplace_back(entity, total);
    }
    return make_ranked_list(std::move(scored));
}

struct ComparisonRow {
    std::string entity_id;
    std::size_t rank_a = 0;
    double score_a = 0.0;
    std::size_t rank_b = 0;
    double score_b = 0.0;
};

struct RankComparison {
    std::vector<ComparisonRow> rows;              // ordered by rank_a
    std::optional<double> kendall_tau;            // unset when n < 2
    std::optional<double> spearman_rho;           // unset when n < 2
};

// Kendall tau-a over two strict rankings of the same entity set, by direct
// pair counting; Spearman rho from squared rank differences.
inline RankComparison compare_rankings(const RankedList& a, const RankedList& b) {
    std::map<std::string, const RankedEntry*> in_b;
    for (const RankedEntry& e : b.entries) in_b[e.entity_id] = &e;
    if (a.entries.size() != b.entries.size())
        throw EntitySetMismatch("rankings cover different numbers of entities");

    RankComparison cmp;
    for (const RankedEntry& ea : a.entries) {
        auto it = in_b.find(ea.entity_id);
        if (it == in_b.end())
            throw EntitySetMismatch("entity missing from second ranking: " + ea.entity_id);
        cmp.rows.push_back(
            ComparisonRow{ea.entity_id, ea.rank, ea.score, it->second->rank, it->second->score});
    }

    std::size_t n = cmp.rows.size();
    if (n < 2) return cmp;

    long long concordant = 0, discordant = 0;
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double di = static_cast<double>(cmp.rows[i].rank_a) - static_cast<double>(cmp.rows[i].rank_b);
        d2 += di * di;
        for (std::size_t j = i + 1; j < n; ++j) {
            auto sign = [](long long v) { return v > 0 ? 1 : v < 0 ? -1 : 0; };
            long long da = static_cast<long long>(cmp.rows[i].rank_a) -
                           static_cast<long long>(cmp.rows[j].rank_a);
            long long db = static_cast<long long>(cmp.rows[i].rank_b) -
                           static_cast<long long>(cmp.rows[j].rank_b);
            int s = sign(da) * sign(db);
            if (s > 0) ++concordant;
            if (s < 0) ++discordant;
        }
    }
    double pairs = static_cast<double>(n) * (n - 1) / 2.0;
    double nn = static_cast<double>(n);
    cmp.kendall_tau = static_cast<double>(concordant - discordant) / pairs;
    cmp.spearman_rho = 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
    return cmp;
}

}  // namespace aspectrank
