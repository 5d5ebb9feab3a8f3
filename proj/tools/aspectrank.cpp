#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <aspectrank/aspectrank.hpp>

namespace {

struct Overrides {
    std::optional<std::string> corpus, corpus_format, lexicon, model, rules, dependencies, train,
        output_dir, aggregation;
    std::optional<std::size_t> window, negation_window, dependency_hops;
    std::optional<bool> negation;
    std::optional<int> resolution, epochs;
    std::optional<double> k1, b, learning_rate, lambda, holdout;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;

    void apply(aspectrank::RunConfig& config) const {
        if (corpus) config.corpus_path = *corpus;
        if (corpus_format) config.corpus_format = *corpus_format;
        if (lexicon) config.lexicon_path = *lexicon;
        if (model) config.model_path = *model;
        if (rules) config.rules_path = *rules;
        if (dependencies) config.dependencies_path = *dependencies;
        if (train) config.train_path = *train;
        if (output_dir) config.output_dir = *output_dir;
        if (aggregation) config.aggregation = *aggregation;
        if (window) config.window = *window;
        if (negation_window) config.negation_window = *negation_window;
        if (dependency_hops) config.dependency_hops = *dependency_hops;
        if (negation) config.negation = *negation;
        if (resolution) config.resolution = *resolution;
        if (epochs) config.epochs = *epochs;
        if (k1) config.k1 = *k1;
        if (b) config.b = *b;
        if (learning_rate) config.learning_rate = *learning_rate;
        if (lambda) config.lambda = *lambda;
        if (holdout) config.holdout = *holdout;
        if (seed) {
            config.seed = *seed;
            config.seed_set = true;
        }
        if (threads) config.threads = *threads;
    }
};

void add_path_options(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--lexicon", ov.lexicon, "sentiment lexicon TSV (word, POS, polarity)");
    cmd->add_option("--model", ov.model, "tagger model file");
    cmd->add_option("--rules", ov.rules, "fuzzy rule file (default: built-in rule base)");
    cmd->add_option("--output", ov.output_dir, "directory for produced artifacts");
}

void add_scoring_options(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--window", ov.window, "association window in tokens");
    cmd->add_flag("--negation,!--no-negation", ov.negation, "negation handling");
    cmd->add_option("--negation-window", ov.negation_window, "tokens checked before an opinion word");
    cmd->add_option("--resolution", ov.resolution, "centroid sample count");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aspect-based opinion scoring and entity ranking over reviews"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    app.add_option("--config", config_path, "JSON run configuration")
        ->check(CLI::ExistingFile);
    app.add_option("--threads", ov.threads, "worker threads for indexing");
    app.add_option("--seed", ov.seed, "seed for training and synthesized data");

    CLI::App* train = app.add_subcommand("train", "train the aspect tagger on labeled sentences");
    train->add_option("--train", ov.train, "training data (token TAB label, blank-line separated)");
    add_path_options(train, ov);
    train->add_option("--epochs", ov.epochs, "training epochs");
    train->add_option("--learning-rate", ov.learning_rate, "SGD learning rate");
    train->add_option("--lambda", ov.lambda, "L2 regularization strength");
    train->add_option("--holdout", ov.holdout, "held-out fraction for the training report");

    CLI::App* index = app.add_subcommand("index", "score a review corpus and build ranking artifacts");
    index->add_option("--corpus", ov.corpus, "reviews file (JSONL or CSV)");
    index->add_option("--format", ov.corpus_format, "corpus format: auto, jsonl, csv");
    index->add_option("--dependencies", ov.dependencies, "pre-parsed dependency arcs");
    index->add_option("--agg", ov.aggregation, "aspect aggregation: mean or sum");
    index->add_option("--k1", ov.k1, "BM25 k1");
    index->add_option("--b", ov.b, "BM25 b");
    add_path_options(index, ov);
    add_scoring_options(index, ov);

    std::string query_text;
    bool explain = false;
    CLI::App* query = app.add_subcommand("query", "rank entities for an aspect query");
    query->add_option("query", query_text, "query text, e.g. \"handling\"")->required();
    query->add_flag("--explain", explain, "show the sentences behind each entity's score");
    add_path_options(query, ov);
    add_scoring_options(query, ov);

    std::string compare_text;
    CLI::App* compare = app.add_subcommand("compare", "rank with both the fuzzy scores and BM25");
    compare->add_option("query", compare_text, "query text")->required();
    add_path_options(compare, ov);
    add_scoring_options(compare, ov);

    std::vector<std::size_t> sizes;
    int repeats = 3;
    CLI::App* bench = app.add_subcommand("bench", "time index runs over synthesized corpora");
    bench->add_option("--sizes", sizes, "review counts to synthesize")
        ->delimiter(',')
        ->required();
    bench->add_option("--repeats", repeats, "passes per size (best is reported)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return aspectrank::kExitInputError;
    }

    aspectrank::RunConfig config;
    try {
        if (!config_path.empty()) config = aspectrank::load_run_config_file(config_path);
        ov.apply(config);
    } catch (const aspectrank::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return aspectrank::kExitInputError;
    }

    if (train->parsed()) return aspectrank::cmd_train(config, std::cout, std::cerr);
    if (index->parsed()) return aspectrank::cmd_index(config, std::cout, std::cerr);
    if (query->parsed())
        return aspectrank::cmd_query(config, query_text, explain, std::cout, std::cerr);
    if (compare->parsed()) return aspectrank::cmd_compare(config, compare_text, std::cout, std::cerr);
    if (bench->parsed()) {
        if (repeats < 1) {
            std::cerr << "error: --repeats must be >= 1\n";
            return aspectrank::kExitInputError;
        }
        return aspectrank::cmd_bench(config, sizes, std::cout, std::cerr, repeats);
    }
    return aspectrank::kExitInputError;
}
