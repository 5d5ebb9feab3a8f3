#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "aspectrank/errors.hpp"
#include "aspectrank/rank.hpp"

namespace aspectrank {

struct RunConfig {
    // paths
    std::string corpus_path;
    std::string corpus_format = "auto";  // auto | jsonl | csv
    std::string lexicon_path;
    std::string model_path;
    std::string rules_path;        // optional; empty = built-in rule base
    std::string dependencies_path; // optional; empty = window association
    std::string train_path;
    std::string output_dir = ".";

    // association
    std::size_t window = 5;
    bool negation = true;
    std::size_t negation_window = 3;
    std::size_t dependency_hops = 2;

    // scoring / ranking
    std::string aggregation = "mean";  // mean | sum
    int resolution = 1000;
    double k1 = 1.2;
    double b = 0.75;

    // tagger training
    int epochs = 20;
    double learning_rate = 0.1;
    double lambda = 1e-3;
    double holdout = 0.1;

    std::uint64_t seed = 0;
    bool seed_set = false;  // train refuses to run without an explicit seed
    unsigned threads = 1;

    void validate() const {
        if (corpus_format != "auto" && corpus_format != "jsonl" && corpus_format != "csv")
            throw DomainError("corpus_format must be auto, jsonl or csv");
        parse_aggregation(aggregation);
        if (window < 1) throw DomainError("window must be >= 1");
        if (resolution < 1) throw DomainError("resolution must be >= 1");
        if (k1 < 0.0) throw DomainError("k1 must be >= 0");
        if (b < 0.0 || b > 1.0) throw DomainError("b must be in [0,1]");
        if (epochs < 1) throw DomainError("epochs must be >= 1");
        if (learning_rate <= 0.0) throw DomainError("learning_rate must be > 0");
        if (lambda < 0.0) throw DomainError("lambda must be >= 0");
        if (holdout < 0.0 || holdout >= 1.0) throw DomainError("holdout must be in [0,1)");
        if (threads < 1) throw DomainError("threads must be >= 1");
    }

    AssociationConfig association() const {
        AssociationConfig c;
        c.window = window;
        c.negation = negation;
        c.negation_window = negation_window;
        c.dependency_hops = dependency_hops;
        return c;
    }
};

// JSON config file: flat object, unknown keys rejected so typos surface
// immediately. CLI flags are applied on top by the caller.
inline RunConfig load_run_config(std::istream& in, const std::string& source_name = "<stream>") {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord(source_name + ": " + e.what());
    }
    if (!j.is_object()) throw MalformedRecord(source_name + ": config must be a JSON object");

    RunConfig config;
    static const std::set<std::string> known = {
        "corpus", "corpus_format", "lexicon", "model", "rules", "dependencies", "train",
        "output_dir", "window", "negation", "negation_window", "dependency_hops", "aggregation",
        "resolution", "k1", "b", "epochs", "learning_rate", "lambda", "holdout", "seed", "threads",
    };
    try {
        for (const auto& [key, value] : j.items()) {
            if (known.count(key) == 0)
                throw MalformedRecord(source_name + ": unknown config key: " + key);
            if (key == "corpus") config.corpus_path = value.get<std::string>();
            else if (key == "corpus_format") config.corpus_format = value.get<std::string>();
            else if (key == "lexicon") config.lexicon_path = value.get<std::string>();
            else if (key == "model") config.model_path = value.get<std::string>();
            else if (key == "rules") config.rules_path = value.get<std::string>();
            else if (key == "dependencies") config.dependencies_path = value.get<std::string>();
            else if (key == "train") config.train_path = value.get<std::string>();
            else if (key == "output_dir") config.output_dir = value.get<std::string>();
            else if (key == "window") config.window = value.get<std::size_t>();
            else if (key == "negation") config.negation = value.get<bool>();
            else if (key == "negation_window") config.negation_window = value.get<std::size_t>();
            else if (key == "dependency_hops") config.dependency_hops = value.get<std::size_t>();
            else if (key == "aggregation") config.aggregation = value.get<std::string>();
            else if (key == "resolution") config.resolution = value.get<int>();
            else if (key == "k1") config.k1 = value.get<double>();
            else if (key == "b") config.b = value.get<double>();
            else if (key == "epochs") config.epochs = value.get<int>();
            else if (key == "learning_rate") config.learning_rate = value.get<double>();
            else if (key == "lambda") config.lambda = value.get<double>();
            else if (key == "holdout") config.holdout = value.get<double>();
            else if (key == "seed") {
                config.seed = value.get<std::uint64_t>();
                config.seed_set = true;
            } else if (key == "threads") {
                config.threads = value.get<unsigned>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord(source_name + ": " + e.what());
    }
    config.validate();
    return config;
}

inline RunConfig load_run_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return load_run_config(in, path);
}

}  // namespace aspectrank
