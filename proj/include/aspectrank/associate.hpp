#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aspectrank/corpus.hpp"
#include "aspectrank/crf.hpp"
#include "aspectrank/errors.hpp"
#include "aspectrank/lexicon.hpp"
#include "aspectrank/pos.hpp"

namespace aspectrank {

struct OpinionTuple {
    AspectMention aspect;
    std::optional<double> adv;
    std::optional<double> adj;
    std::optional<double> verb;
    std::optional<double> noun;
    std::string adv_word, adj_word, verb_word, noun_word;  // chosen surfaces, lowercased
    bool negated = false;

    bool has_opinion() const {
        return adv.has_value() || adj.has_value() || verb.has_value() || noun.has_value();
    }
};

// Heads are token positions (0-based) or -1 for the root attachment.
struct DependencyArcs {
    std::vector<int> head;
};

struct AssociationConfig {
    std::size_t window = 5;       // tokens on either side of the aspect span
    bool negation = true;         // mark tuples negated by nearby NEG tokens
    std::size_t negation_window = 3;
    std::size_t dependency_hops = 2;
};

namespace detail {

// Candidate positions in dependency mode: within `hops` undirected arcs of
// the aspect head (last token of the span). The virtual root is not a node.
inline std::vector<bool> dependency_reachable(const DependencyArcs& arcs, std::size_t head_pos,
                                              std::size_t hops, std::size_t n) {
    std::vector<std::size_t> dist(n, static_cast<std::size_t>(-1));
    std::vector<std::vector<std::size_t>> adjacent(n);
    for (std::size_t i = 0; i < n && i < arcs.head.size(); ++i) {
        int h = arcs.head[i];
        if (h >= 0 && static_cast<std::size_t>(h) < n) {
            adjacent[i].push_back(static_cast<std::size_t>(h));
            adjacent[static_cast<std::size_t>(h)].push_back(i);
        }
    }
    std::vector<std::size_t> frontier{head_pos};
    dist[head_pos] = 0;
    for (std::size_t d = 1; d <= hops && !frontier.empty(); ++d) {
        std::vector<std::size_t> next;
        for (std::size_t u : frontier)
            for (std::size_t v : adjacent[u])
                if (dist[v] == static_cast<std::size_t>(-1)) {
                    dist[v] = d;
                    next.push_back(v);
                }
        frontier = std::move(next);
    }
    std::vector<bool> reach(n, false);
    for (std::size_t i = 0; i < n; ++i) reach[i] = dist[i] != static_cast<std::size_t>(-1);
    return reach;
}

}  // namespace detail

// For each aspect, pick the nearest lexicon-scored word per POS class from
// the surrounding window (or, with arcs, from tokens within two hops of the
// aspect head). Zero-polarity lexicon entries carry no opinion and are
// skipped. A NEG token within negation_window tokens before any selected
// word marks the tuple negated.
inline std::vector<OpinionTuple> associate_opinions(std::span<const Token> tokens,
                                                    std::span<const PosClass> pos,
                                                    std::span<const AspectMention> aspects,
                                                    const Lexicon& lex,
                                                    const DependencyArcs* arcs = nullptr,
                                                    const AssociationConfig& config = {}) {
    if (tokens.size() != pos.size())
        throw LengthMismatch("associate_opinions: token/POS length mismatch");
    const std::size_t n = tokens.size();

    std::vector<bool> in_aspect(n, false);
    for (const AspectMention& a : aspects)
        for (std::size_t p = a.start; p < a.end && p < n; ++p) in_aspect[p] = true;

    std::vector<OpinionTuple> out;
    out.reserve(aspects.size());
    for (const AspectMention& aspect : aspects) {
        OpinionTuple tuple;
        tuple.aspect = aspect;

        std::vector<bool> reachable;
        if (arcs != nullptr && aspect.end > 0) {
            std::size_t head_pos = aspect.end - 1;
            reachable = detail::dependency_reachable(*arcs, head_pos, config.dependency_hops, n);
        }

        struct Pick {
            std::size_t position = 0;
            std::size_t distance = 0;
            double polarity = 0.0;
            bool set = false;
        };
        Pick picks[4];  // ADV, ADJ, VERB, NOUN
        auto slot = [](PosClass c) -> int {
            switch (c) {
                case PosClass::ADV: return 0;
                case PosClass::ADJ: return 1;
                case PosClass::VERB: return 2;
                case PosClass::NOUN: return 3;
                default: return -1;
            }
        };

        for (std::size_t p = 0; p < n; ++p) {
            if (in_aspect[p]) continue;
            std::size_t distance;
            if (!reachable.empty()) {
                if (!reachable[p]) continue;
                distance = p < aspect.start ? aspect.start - p : p - (aspect.end - 1);
            } else {
                if (p < aspect.start) {
                    distance = aspect.start - p;
                    if (distance > config.window) continue;
                } else if (p >= aspect.end) {
                    distance = p - aspect.end + 1;
                    if (distance > config.window) continue;
                } else {
                    continue;
                }
            }
            int s = slot(pos[p]);
            if (s < 0) continue;
            std::optional<double> polarity = lex.polarity(tokens[p].lower, pos[p]);
            if (!polarity || *polarity == 0.0) continue;
            Pick& pick = picks[s];
            // nearest wins; ties go to the leftmost position
            if (!pick.set || distance < pick.distance ||
                (distance == pick.distance && p < pick.position)) {
                pick = Pick{p, distance, *polarity, true};
            }
        }

        auto assign = [&](int s, std::optional<double>& field, std::string& word) {
            if (picks[s].set) {
                field = picks[s].polarity;
                word = tokens[picks[s].position].lower;
            }
        };
        assign(0, tuple.adv, tuple.adv_word);
        assign(1, tuple.adj, tuple.adj_word);
        assign(2, tuple.verb, tuple.verb_word);
        assign(3, tuple.noun, tuple.noun_word);

        if (config.negation) {
            for (const Pick& pick : picks) {
                if (!pick.set) continue;
                std::size_t from =
                    pick.position >= config.negation_window ? pick.position - config.negation_window : 0;
                for (std::size_t q = from; q < pick.position; ++q)
                    if (pos[q] == PosClass::NEG) tuple.negated = true;
            }
        }
        out.push_back(std::move(tuple));
    }
    return out;
}

// Pre-parsed dependency input, one block per sentence:
//   # sent_id = <review_id>:<sentence_index>
//   <id><TAB><form><TAB><head>     (1-based ids, head 0 = root)
// Blocks are separated by blank lines. Keyed by (review_id, sentence index).
class DependencyFile {
public:
    const DependencyArcs* find(const std::string& review_id, std::size_t sentence_index) const {
        auto it = arcs_.find(key(review_id, sentence_index));
        return it == arcs_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return arcs_.size(); }

    static DependencyFile parse(std::istream& in, const std::string& source_name = "<stream>") {
        DependencyFile deps;
        std::string line;
        std::string cur_key;
        DependencyArcs cur;
        std::size_t lineno = 0;
        auto flush = [&] {
            if (!cur_key.empty() && !cur.head.empty()) deps.arcs_[cur_key] = cur;
            cur = {};
        };
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) {
                flush();
                cur_key.clear();
                continue;
            }
            if (line.rfind("# sent_id", 0) == 0) {
                flush();
                auto eq = line.find('=');
                if (eq == std::string::npos)
                    throw MalformedRecord(source_name + ":" + std::to_string(lineno) +
                                          ": bad sent_id line");
                std::string id = line.substr(eq + 1);
                while (!id.empty() && id.front() == ' ') id.erase(id.begin());
                auto colon = id.rfind(':');
                if (colon == std::string::npos)
                    throw MalformedRecord(source_name + ":" + std::to_string(lineno) +
                                          ": sent_id must be <review_id>:<sentence_index>");
                cur_key = key(id.substr(0, colon),
                              static_cast<std::size_t>(std::atol(id.c_str() + colon + 1)));
                continue;
            }
            if (line[0] == '#') continue;
            auto tab1 = line.find('\t');
            auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
            if (tab1 == std::string::npos || tab2 == std::string::npos)
                throw MalformedRecord(source_name + ":" + std::to_string(lineno) +
                                      ": expected id<TAB>form<TAB>head");
            long head = std::atol(line.c_str() + tab2 + 1);
            cur.head.push_back(static_cast<int>(head) - 1);  // 0 (root) becomes -1
        }
        flush();
        return deps;
    }

    static DependencyFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open dependency file: " + path);
        return parse(in, path);
    }

private:
    static std::string key(const std::string& review_id, std::size_t index) {
        return review_id + "\x1f" + std::to_string(index);
    }

    std::map<std::string, DependencyArcs> arcs_;
};

}  // namespace aspectrank
