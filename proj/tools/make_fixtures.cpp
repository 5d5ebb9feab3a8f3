// Regenerates the checked-in fixtures under data/. Deterministic: rerunning
// produces byte-identical files.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <aspectrank/aspectrank.hpp>

using namespace aspectrank;

namespace {

std::ofstream open(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        std::exit(1);
    }
    return out;
}

void write_lexicon_tsv(const std::filesystem::path& path) {
    auto out = open(path);
    out << "# word\tPOS\tpolarity in [-1,1]; 0.0 entries are POS evidence only\n";
    for (const SynthWord& w : synth_vocabulary()) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s\t%s\t%g", w.word, w.pos, w.polarity);
        out << buf << "\n";
    }
}

void write_rules_txt(const std::filesystem::path& path) {
    auto out = open(path);
    out << "# Default rule base, spelled out. Single-variable fallbacks yield to the\n"
           "# adverb x adjective grid via 'unless'.\n";
    for (const Rule& rule : FuzzySystem::defaults().rules) {
        bool first = true;
        for (const auto& [var, level] : rule.antecedent) {
            if (!first) out << " & ";
            out << var << "=" << to_string(level);
            first = false;
        }
        out << " -> " << to_string(rule.consequent);
        if (!rule.unless.empty()) {
            out << " unless ";
            for (std::size_t i = 0; i < rule.unless.size(); ++i)
                out << (i ? "," : "") << rule.unless[i];
        }
        out << "\n";
    }
}

Corpus demo_corpus() {
    std::vector<std::pair<std::string, double>> bias = {
        {"mazda_rx-8", 0.95},    {"porsche_boxster", 0.9}, {"bmw_m3", 0.8},
        {"audi_a4", 0.65},       {"ford_mustang", 0.5},    {"honda_civic", 0.35},
        {"toyota_corolla", 0.2}, {"subaru_impreza", 0.1},
    };
    std::vector<std::string> aspects = {"handling", "mileage", "comfort"};
    return synth_corpus(bias, 8, 7, 2, aspects);
}

void write_reviews_jsonl(const std::filesystem::path& path) {
    auto out = open(path);
    for (const Review& r : demo_corpus().reviews) {
        nlohmann::json j;
        j["entity_id"] = r.entity_id;
        j["review_id"] = r.review_id;
        j["text"] = r.text;
        out << j.dump() << "\n";
    }
}

void write_reviews_csv(const std::filesystem::path& path) {
    auto out = open(path);
    out << "entity_id,review_id,text\n";
    out << "honda_civic,c1,\"The handling is good, and the ride is smooth.\"\n";
    out << "honda_civic,c2,The mileage is very good.\n";
    out << "ford_mustang,m1,\"The engine shines. The brakes are \"\"quite\"\" weak.\"\n";
    out << "ford_mustang,m2,The handling is fairly decent.\n";
    out << "toyota_corolla,t1,The comfort is poor. The mileage is excellent.\n";
    out << "toyota_corolla,t2,\"I love the mileage,\nbut the handling disappoints.\"\n";
}

void write_train_conll(const std::filesystem::path& path) {
    auto out = open(path);
    write_conll(synth_training_sequences(200, 11), out);
}

void write_dependencies_tsv(const std::filesystem::path& path) {
    // Chain arcs for the first demo review, as a format sample: token i heads
    // i+1, the last token heads the root.
    auto out = open(path);
    Corpus corpus = demo_corpus();
    const Review& review = corpus.reviews.front();
    for (const Sentence& sentence : review.sentences) {
        out << "# sent_id = " << review.review_id << ":" << sentence.index << "\n";
        for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
            std::size_t head = t + 1 < sentence.tokens.size() ? t + 2 : 0;
            out << t + 1 << "\t" << sentence.tokens[t].surface << "\t" << head << "\n";
        }
        out << "\n";
    }
}

void write_config_json(const std::filesystem::path& path) {
    auto out = open(path);
    nlohmann::json j;
    j["corpus"] = "data/reviews.jsonl";
    j["lexicon"] = "data/lexicon.tsv";
    j["train"] = "data/train.conll";
    j["model"] = "out/model.json";
    j["output_dir"] = "out";
    j["epochs"] = 12;
    j["seed"] = 42;
    j["threads"] = 2;
    out << j.dump(1) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    std::filesystem::path dir = argc > 1 ? argv[1] : "data";
    std::filesystem::create_directories(dir);
    write_lexicon_tsv(dir / "lexicon.tsv");
    write_rules_txt(dir / "rules.txt");
    write_reviews_jsonl(dir / "reviews.jsonl");
    write_reviews_csv(dir / "reviews.csv");
    write_train_conll(dir / "train.conll");
    write_dependencies_tsv(dir / "dependencies.tsv");
    write_config_json(dir / "config.json");
    std::cout << "fixtures written to " << dir << "\n";
    return 0;
}
