#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "aspectrank/corpus.hpp"
#include "aspectrank/errors.hpp"

namespace aspectrank {

inline constexpr const char* kBm25FormatName = "aspectrank.bm25";
inline constexpr int kBm25FormatVersion = 1;

// One document per entity: all of its review text concatenated.
struct Bm25Index {
    double k1 = 1.2;
    double b = 0.75;
    std::vector<std::string> entity_ids;                    // document order
    std::vector<std::map<std::string, int>> term_freq;      // per document
    std::vector<std::size_t> doc_len;
    std::map<std::string, int> doc_freq;
    double avgdl = 0.0;

    std::size_t size() const { return entity_ids.size(); }

    std::size_t document_of(const std::string& entity_id) const {
        for (std::size_t i = 0; i < entity_ids.size(); ++i)
            if (entity_ids[i] == entity_id) return i;
        throw UnknownEntity("bm25: unknown entity: " + entity_id);
    }

    double idf(const std::string& term) const {
        auto it = doc_freq.find(term);
        double df = it == doc_freq.end() ? 0.0 : it->second;
        double n = static_cast<double>(size());
        return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    }
};

inline Bm25Index bm25_build(const std::vector<std::pair<std::string, std::string>>& documents,
                            double k1 = 1.2, double b = 0.75) {
    if (documents.empty()) throw EmptyCorpus("bm25_build: no documents");
    Bm25Index index;
    index.k1 = k1;
    index.b = b;
    std::size_t total_len = 0;
    for (const auto& [entity_id, text] : documents) {
        std::map<std::string, int> tf;
        std::size_t len = 0;
        for (const Token& tok : tokenize(text)) {
            ++tf[tok.lower];
            ++len;
        }
        for (const auto& [term, _] : tf) ++index.doc_freq[term];
        index.entity_ids.push_back(entity_id);
        index.term_freq.push_back(std::move(tf));
        index.doc_len.push_back(len);
        total_len += len;
    }
    index.avgdl = static_cast<double>(total_len) / static_cast<double>(documents.size());
    return index;
}

inline Bm25Index bm25_build(const Corpus& corpus, double k1 = 1.2, double b = 0.75) {
    // entity order = first appearance in review order, one doc per entity
    std::vector<std::pair<std::string, std::string>> documents;
    std::map<std::string, std::size_t> seen;
    for (const Review& review : corpus.reviews) {
        auto [it, inserted] = seen.emplace(review.entity_id, documents.size());
        if (inserted) {
            documents.emplace_back(review.entity_id, review.text);
        } else {
            documents[it->second].second += " ";
            documents[it->second].second += review.text;
        }
    }
    return bm25_build(documents, k1, b);
}

inline double bm25_score(const Bm25Index& index, const std::vector<std::string>& terms,
                         std::size_t doc) {
    double score = 0.0;
    double dl = static_cast<double>(index.doc_len[doc]);
    for (const std::string& term : terms) {
        auto it = index.term_freq[doc].find(term);
        if (it == index.term_freq[doc].end()) continue;
        double tf = it->second;
        double norm = index.k1 * (1.0 - index.b + index.b * dl / index.avgdl);
        score += index.idf(term) * tf * (index.k1 + 1.0) / (tf + norm);
    }
    return score;
}

inline double bm25_score(const Bm25Index& index, const std::vector<std::string>& terms,
                         const std::string& entity_id) {
    return bm25_score(index, terms, index.document_of(entity_id));
}

inline std::vector<std::string> bm25_query_terms(const std::string& query) {
    std::vector<std::string> terms;
    for (const Token& tok : tokenize(query)) terms.push_back(tok.lower);
    return terms;
}

inline void save_bm25(const Bm25Index& index, std::ostream& out) {
    nlohmann::json j;
    j["format"] = kBm25FormatName;
    j["version"] = kBm25FormatVersion;
    j["k1"] = index.k1;
    j["b"] = index.b;
    j["avgdl"] = index.avgdl;
    j["entities"] = nlohmann::json::array();
    for (std::size_t i = 0; i < index.size(); ++i) {
        nlohmann::json doc;
        doc["entity_id"] = index.entity_ids[i];
        doc["doc_len"] = index.doc_len[i];
        doc["term_freq"] = index.term_freq[i];
        j["entities"].push_back(std::move(doc));
    }
    j["doc_freq"] = index.doc_freq;
    out << j.dump(1) << "\n";
}

inline void save_bm25_file(const Bm25Index& index, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    save_bm25(index, out);
}

inline Bm25Index load_bm25(std::istream& in, const std::string& source_name = "<stream>") {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord(source_name + ": " + e.what());
    }
    if (!j.is_object() || j.value("format", "") != kBm25FormatName)
        throw MalformedRecord(source_name + ": not a bm25 index file");
    if (j.value("version", 0) != kBm25FormatVersion)
        throw MalformedRecord(source_name + ": unsupported bm25 index version");
    Bm25Index index;
    try {
        index.k1 = j.at("k1").get<double>();
        index.b = j.at("b").get<double>();
        index.avgdl = j.at("avgdl").get<double>();
        for (const auto& doc : j.at("entities")) {
            index.entity_ids.push_back(doc.at("entity_id").get<std::string>());
            index.doc_len.push_back(doc.at("doc_len").get<std::size_t>());
            index.term_freq.push_back(doc.at("term_freq").get<std::map<std::string, int>>());
        }
        index.doc_freq = j.at("doc_freq").get<std::map<std::string, int>>();
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord(source_name + ": " + e.what());
    }
    if (index.entity_ids.empty()) throw EmptyCorpus(source_name + ": bm25 index has no documents");
    return index;
}

inline Bm25Index load_bm25_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open bm25 index: " + path);
    return load_bm25(in, path);
}

}  // namespace aspectrank
