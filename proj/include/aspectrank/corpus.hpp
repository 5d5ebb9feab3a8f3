#pragma once

#include <cctype>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aspectrank/errors.hpp"

namespace aspectrank {

struct Token {
    std::string surface;
    std::string lower;
    std::size_t position = 0;

    bool operator==(const Token&) const = default;
};

struct Sentence {
    std::size_t index = 0;
    std::vector<Token> tokens;

    bool operator==(const Sentence&) const = default;
};

struct Review {
    std::string entity_id;
    std::string review_id;
    std::string text;
    std::vector<Sentence> sentences;

    bool operator==(const Review&) const = default;
};

struct Corpus {
    std::vector<Review> reviews;

    std::size_t entity_count() const {
        std::unordered_set<std::string> ids;
        for (const auto& r : reviews) ids.insert(r.entity_id);
        return ids.size();
    }

    bool operator==(const Corpus&) const = default;
};

// Identifies a sentence across the corpus.
struct SentenceRef {
    std::string entity_id;
    std::string review_id;
    std::size_t sentence_index = 0;

    bool operator==(const SentenceRef&) const = default;
};

inline bool is_word_char(unsigned char c) {
    // bytes >= 0x80 are UTF-8 continuation/lead bytes; keep them inside tokens
    return std::isalnum(c) != 0 || c == '\'' || c >= 0x80;
}

inline std::string to_lower_ascii(const std::string& s) {
    std::string out(s);
    for (char& c : out) {
        unsigned char u = static_cast<unsigned char>(c);
        if (u < 0x80) c = static_cast<char>(std::tolower(u));
    }
    return out;
}

// Splits on '.', '!', '?' followed by whitespace or end of input. The
// delimiter stays with its sentence; inter-sentence whitespace is dropped.
inline std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        char c = text[i];
        bool is_delim = (c == '.' || c == '!' || c == '?');
        bool at_boundary =
            is_delim && (i + 1 == n || std::isspace(static_cast<unsigned char>(text[i + 1])) != 0);
        if (at_boundary) {
            out.push_back(text.substr(start, i - start + 1));
            ++i;
            while (i < n && std::isspace(static_cast<unsigned char>(text[i])) != 0) ++i;
            start = i;
        } else {
            ++i;
        }
    }
    if (start < n) {
        std::string tail = text.substr(start);
        // an all-whitespace tail is just trailing padding
        bool blank = true;
        for (char c : tail)
            if (std::isspace(static_cast<unsigned char>(c)) == 0) blank = false;
        if (!blank) out.push_back(std::move(tail));
    }
    return out;
}

// Tokens are maximal runs of letters/digits/apostrophes; edge apostrophes are
// trimmed so quoting does not leak into words. Case folding is ASCII-only.
inline std::vector<Token> tokenize(const std::string& sentence) {
    std::vector<Token> tokens;
    const std::size_t n = sentence.size();
    std::size_t i = 0;
    while (i < n) {
        if (!is_word_char(static_cast<unsigned char>(sentence[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && is_word_char(static_cast<unsigned char>(sentence[j]))) ++j;
        std::string run = sentence.substr(i, j - i);
        std::size_t b = 0, e = run.size();
        while (b < e && run[b] == '\'') ++b;
        while (e > b && run[e - 1] == '\'') --e;
        if (e > b) {
            Token t;
            t.surface = run.substr(b, e - b);
            t.lower = to_lower_ascii(t.surface);
            t.position = tokens.size();
            tokens.push_back(std::move(t));
        }
        i = j;
    }
    return tokens;
}

// Sentence segmentation + tokenization for one review. Sentences that
// tokenize to nothing are dropped; indices stay dense.
inline std::vector<Sentence> segment_review(const std::string& text) {
    std::vector<Sentence> sentences;
    for (const std::string& raw : split_sentences(text)) {
        Sentence s;
        s.tokens = tokenize(raw);
        if (s.tokens.empty()) continue;
        s.index = sentences.size();
        sentences.push_back(std::move(s));
    }
    return sentences;
}

enum class ReviewFormat { jsonl, csv };

inline ReviewFormat parse_review_format(const std::string& name) {
    if (name == "jsonl") return ReviewFormat::jsonl;
    if (name == "csv") return ReviewFormat::csv;
    throw MalformedRecord("unknown review file format: " + name);
}

namespace detail {

// RFC-4180 field splitting for one logical record. `line` must already
// contain any embedded newlines.
inline std::vector<std::string> split_csv_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

// Reads one RFC-4180 record, joining physical lines while a quote is open.
inline bool read_csv_record(std::istream& in, std::string& record) {
    record.clear();
    std::string line;
    bool got = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (got) record += '\n';
        record += line;
        got = true;
        std::size_t quotes = 0;
        for (char c : record)
            if (c == '"') ++quotes;
        if (quotes % 2 == 0) return true;
    }
    return got;
}

}  // namespace detail

inline void append_review(Corpus& corpus, std::unordered_set<std::string>& seen, Review r) {
    std::string key = r.entity_id + "\x1f" + r.review_id;
    if (!seen.insert(key).second)
        throw DuplicateReview("duplicate review (" + r.entity_id + ", " + r.review_id + ")");
    r.sentences = segment_review(r.text);
    corpus.reviews.push_back(std::move(r));
}

inline Corpus ingest_reviews_stream(std::istream& in, ReviewFormat format,
                                    const std::string& source_name = "<stream>") {
    Corpus corpus;
    std::unordered_set<std::string> seen;
    if (format == ReviewFormat::jsonl) {
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object() || !j.contains("entity_id") ||
                !j.contains("review_id") || !j.contains("text") ||
                !j["entity_id"].is_string() || !j["review_id"].is_string() ||
                !j["text"].is_string()) {
                throw MalformedRecord(source_name + ":" + std::to_string(lineno) +
                                      ": malformed review record");
            }
            Review r;
            r.entity_id = j["entity_id"].get<std::string>();
            r.review_id = j["review_id"].get<std::string>();
            r.text = j["text"].get<std::string>();
            if (r.entity_id.empty() || r.review_id.empty())
                throw MalformedRecord(source_name + ":" + std::to_string(lineno) +
                                      ": empty entity_id or review_id");
            append_review(corpus, seen, std::move(r));
        }
    } else {
        std::string record;
        if (!detail::read_csv_record(in, record)) return corpus;  // empty file
        auto header = detail::split_csv_record(record);
        if (header.size() < 3 || header[0] != "entity_id" || header[1] != "review_id" ||
            header[2] != "text")
            throw MalformedRecord(source_name + ": expected CSV header entity_id,review_id,text");
        std::size_t recno = 1;
        while (detail::read_csv_record(in, record)) {
            ++recno;
            if (record.empty()) continue;
            auto fields = detail::split_csv_record(record);
            if (fields.size() != 3)
                throw MalformedRecord(source_name + ": record " + std::to_string(recno) +
                                      ": expected 3 fields, got " + std::to_string(fields.size()));
            Review r;
            r.entity_id = fields[0];
            r.review_id = fields[1];
            r.text = fields[2];
            if (r.entity_id.empty() || r.review_id.empty())
                throw MalformedRecord(source_name + ": record " + std::to_string(recno) +
                                      ": empty entity_id or review_id");
            append_review(corpus, seen, std::move(r));
        }
    }
    return corpus;
}

inline Corpus ingest_reviews(const std::string& path, ReviewFormat format) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open review file: " + path);
    return ingest_reviews_stream(in, format, path);
}

inline Corpus make_corpus(std::vector<Review> reviews) {
    Corpus corpus;
    std::unordered_set<std::string> seen;
    for (auto& r : reviews) append_review(corpus, seen, std::move(r));
    return corpus;
}

constexpr const char* kCorpusFormatName = "aspectrank.corpus";
constexpr int kCorpusFormatVersion = 1;

// Self-describing persisted corpus: one JSON header line, then one review per
// line. Sentences are re-derived on load (segmentation is deterministic).
inline void save_corpus(const Corpus& corpus, std::ostream& out) {
    nlohmann::json header = {{"format", kCorpusFormatName},
                             {"version", kCorpusFormatVersion},
                             {"reviews", corpus.reviews.size()}};
    out << header.dump() << '\n';
    for (const auto& r : corpus.reviews) {
        nlohmann::json j = {{"entity_id", r.entity_id}, {"review_id", r.review_id}, {"text", r.text}};
        out << j.dump() << '\n';
    }
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write corpus file: " + path);
    save_corpus(corpus, out);
}

inline Corpus load_corpus(std::istream& in, const std::string& source_name = "<stream>") {
    std::string line;
    if (!std::getline(in, line)) throw MalformedRecord(source_name + ": missing corpus header");
    nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("format", "") != kCorpusFormatName)
        throw MalformedRecord(source_name + ": not an aspectrank corpus file");
    if (header.value("version", 0) != kCorpusFormatVersion)
        throw MalformedRecord(source_name + ": unsupported corpus version");
    return ingest_reviews_stream(in, ReviewFormat::jsonl, source_name);
}

inline Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    return load_corpus(in, path);
}

}  // namespace aspectrank
