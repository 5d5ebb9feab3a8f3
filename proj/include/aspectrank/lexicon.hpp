#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "aspectrank/corpus.hpp"
#include "aspectrank/errors.hpp"
#include "aspectrank/pos.hpp"

namespace aspectrank {

struct LexiconEntry {
    std::string word;  // lowercased
    PosClass pos = PosClass::OTHER;
    double polarity = 0.0;  // in [-1, 1]
};

// Polarity lexicon keyed by (word, POS). Immutable after load.
class Lexicon {
public:
    void add(LexiconEntry entry) {
        if (entry.polarity < -1.0 || entry.polarity > 1.0)
            throw PolarityOutOfRange("polarity out of [-1,1] for word: " + entry.word);
        entry.word = to_lower_ascii(entry.word);
        std::string key = keyed(entry.word, entry.pos);
        entries_.emplace(std::move(key), entry);
        order_.push_back(entry);
    }

    void add(std::string word, PosClass pos, double polarity) {
        add(LexiconEntry{std::move(word), pos, polarity});
    }

    std::optional<double> polarity(const std::string& lower, PosClass pos) const {
        auto it = entries_.find(keyed(lower, pos));
        if (it == entries_.end()) return std::nullopt;
        return it->second.polarity;
    }

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    // Entries in file order; used to seed the POS lexicon.
    const std::vector<LexiconEntry>& entries() const { return order_; }

private:
    static std::string keyed(const std::string& word, PosClass pos) {
        return word + "\x1f" + to_string(pos);
    }

    std::unordered_map<std::string, LexiconEntry> entries_;
    std::vector<LexiconEntry> order_;
};

// TSV rows: word<TAB>POS<TAB>polarity. '#' starts a comment line.
inline Lexicon load_lexicon(std::istream& in, const std::string& source_name = "<stream>") {
    Lexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab1 = line.find('\t');
        auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos || tab1 == 0)
            throw MalformedRow(source_name + ":" + std::to_string(lineno) +
                               ": expected word<TAB>pos<TAB>polarity");
        LexiconEntry e;
        e.word = line.substr(0, tab1);
        e.pos = parse_pos_class(line.substr(tab1 + 1, tab2 - tab1 - 1));
        std::string pol = line.substr(tab2 + 1);
        char* end = nullptr;
        e.polarity = std::strtod(pol.c_str(), &end);
        if (end == pol.c_str() || *end != '\0')
            throw MalformedRow(source_name + ":" + std::to_string(lineno) +
                               ": bad polarity value '" + pol + "'");
        if (e.polarity < -1.0 || e.polarity > 1.0)
            throw PolarityOutOfRange(source_name + ":" + std::to_string(lineno) +
                                     ": polarity out of [-1,1] for word: " + e.word);
        lex.add(std::move(e));
    }
    return lex;
}

inline Lexicon load_lexicon_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open lexicon file: " + path);
    return load_lexicon(in, path);
}

// POS knowledge for the pipeline: negation words, then the lexicon's
// (word, POS) pairs in file order (first entry per word wins).
inline PosLexicon pos_lexicon_from(const Lexicon& lex) {
    PosLexicon pos = PosLexicon::with_negation_words();
    for (const LexiconEntry& e : lex.entries()) pos.add(e.word, e.pos);
    return pos;
}

}  // namespace aspectrank
