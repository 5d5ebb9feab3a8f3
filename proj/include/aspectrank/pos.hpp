#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aspectrank/corpus.hpp"
#include "aspectrank/errors.hpp"

namespace aspectrank {

enum class PosClass { ADJ, ADV, NOUN, VERB, NEG, OTHER };

inline const char* to_string(PosClass c) {
    switch (c) {
        case PosClass::ADJ: return "ADJ";
        case PosClass::ADV: return "ADV";
        case PosClass::NOUN: return "NOUN";
        case PosClass::VERB: return "VERB";
        case PosClass::NEG: return "NEG";
        case PosClass::OTHER: return "OTHER";
    }
    return "OTHER";
}

inline PosClass parse_pos_class(const std::string& name) {
    if (name == "ADJ") return PosClass::ADJ;
    if (name == "ADV") return PosClass::ADV;
    if (name == "NOUN") return PosClass::NOUN;
    if (name == "VERB") return PosClass::VERB;
    if (name == "NEG") return PosClass::NEG;
    if (name == "OTHER") return PosClass::OTHER;
    throw MalformedRow("unknown POS class: " + name);
}

// Word -> POS map with ordered suffix fallback rules. Lookups are on the
// case-folded form; suffix rules apply only on lexicon miss.
class PosLexicon {
public:
    PosLexicon() : suffix_rules_(default_suffix_rules()) {}

    static std::vector<std::pair<std::string, PosClass>> default_suffix_rules() {
        return {{"ly", PosClass::ADV},
                {"ous", PosClass::ADJ},
                {"ful", PosClass::ADJ},
                {"able", PosClass::ADJ},
                {"ive", PosClass::ADJ}};
    }

    // Negation markers always tag as NEG regardless of sentiment entries.
    static PosLexicon with_negation_words() {
        PosLexicon lex;
        for (const char* w : {"not", "never", "no", "n't", "dont", "don't", "cannot"})
            lex.add(w, PosClass::NEG);
        return lex;
    }

    // First insertion wins; later entries for the same word are ignored.
    void add(const std::string& word, PosClass pos) {
        entries_.emplace(to_lower_ascii(word), pos);
    }

    bool contains(const std::string& lower) const { return entries_.count(lower) > 0; }

    PosClass classify(const std::string& lower) const {
        auto it = entries_.find(lower);
        if (it != entries_.end()) return it->second;
        for (const auto& [suffix, pos] : suffix_rules_) {
            if (lower.size() > suffix.size() &&
                lower.compare(lower.size() - suffix.size(), suffix.size(), suffix) == 0)
                return pos;
        }
        return PosClass::OTHER;
    }

    void set_suffix_rules(std::vector<std::pair<std::string, PosClass>> rules) {
        suffix_rules_ = std::move(rules);
    }

    std::size_t size() const { return entries_.size(); }

private:
    std::unordered_map<std::string, PosClass> entries_;
    std::vector<std::pair<std::string, PosClass>> suffix_rules_;
};

inline std::vector<PosClass> pos_tag(std::span<const Token> tokens, const PosLexicon& lex) {
    std::vector<PosClass> out;
    out.reserve(tokens.size());
    for (const Token& t : tokens) out.push_back(lex.classify(t.lower));
    return out;
}

}  // namespace aspectrank
