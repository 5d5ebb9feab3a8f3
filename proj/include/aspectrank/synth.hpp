#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "aspectrank/corpus.hpp"
#include "aspectrank/crf.hpp"
#include "aspectrank/lexicon.hpp"

namespace aspectrank {

// Template-based review generator with seeded sampling. Used by the
// benchmark (fresh text at every size avoids cache-friendly duplication)
// and by the fixture generator.

struct SynthWord {
    const char* word;
    const char* pos;
    double polarity;
};

inline const std::vector<SynthWord>& synth_vocabulary() {
    static const std::vector<SynthWord> words = {
        // adjectives
        {"excellent", "ADJ", 0.9}, {"great", "ADJ", 0.85}, {"good", "ADJ", 0.8},
        {"stable", "ADJ", 0.7}, {"smooth", "ADJ", 0.65}, {"solid", "ADJ", 0.6},
        {"decent", "ADJ", 0.5}, {"weak", "ADJ", -0.5}, {"rough", "ADJ", -0.6},
        {"bad", "ADJ", -0.7}, {"poor", "ADJ", -0.8}, {"terrible", "ADJ", -0.9},
        // adverbs
        {"extremely", "ADV", 0.95}, {"very", "ADV", 0.9}, {"really", "ADV", 0.8},
        {"quite", "ADV", 0.6}, {"fairly", "ADV", 0.5}, {"slightly", "ADV", 0.3},
        // verbs
        {"love", "VERB", 0.9}, {"impresses", "VERB", 0.7}, {"shines", "VERB", 0.8},
        {"disappoints", "VERB", -0.7}, {"struggles", "VERB", -0.6}, {"hate", "VERB", -0.9},
        // opinion nouns
        {"delight", "NOUN", 0.8}, {"pleasure", "NOUN", 0.7}, {"letdown", "NOUN", -0.7},
        {"disaster", "NOUN", -0.9},
        // aspect nouns: POS evidence only, no sentiment of their own
        {"handling", "NOUN", 0.0}, {"mileage", "NOUN", 0.0}, {"brakes", "NOUN", 0.0},
        {"comfort", "NOUN", 0.0}, {"engine", "NOUN", 0.0}, {"steering", "NOUN", 0.0},
        {"fuel", "NOUN", 0.0}, {"economy", "NOUN", 0.0}, {"car", "NOUN", 0.0},
        {"ride", "NOUN", 0.0},
    };
    return words;
}

inline const std::vector<std::string>& synth_aspects() {
    static const std::vector<std::string> aspects = {
        "handling", "mileage", "brakes", "comfort", "engine", "steering", "fuel economy",
    };
    return aspects;
}

inline Lexicon synth_lexicon() {
    Lexicon lex;
    for (const SynthWord& w : synth_vocabulary()) lex.add(w.word, parse_pos_class(w.pos), w.polarity);
    return lex;
}

namespace detail {

struct SynthWordSets {
    std::vector<SynthWord> pos_adj, neg_adj, adv, pos_verb, neg_verb, pos_noun, neg_noun;
};

inline const SynthWordSets& synth_word_sets() {
    static const SynthWordSets sets = [] {
        SynthWordSets s;
        for (const SynthWord& w : synth_vocabulary()) {
            std::string pos = w.pos;
            if (pos == "ADJ") (w.polarity > 0 ? s.pos_adj : s.neg_adj).push_back(w);
            if (pos == "ADV" && w.polarity > 0) s.adv.push_back(w);
            if (pos == "VERB") (w.polarity > 0 ? s.pos_verb : s.neg_verb).push_back(w);
            if (pos == "NOUN" && w.polarity > 0) s.pos_noun.push_back(w);
            if (pos == "NOUN" && w.polarity < 0) s.neg_noun.push_back(w);
        }
        return s;
    }();
    return sets;
}

template <typename T>
inline const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

}  // namespace detail

// One sentence about `aspect`; positive or negative phrasing. The aspect
// tokens are returned as [aspect_start, aspect_end) over the token split
// of the sentence text.
struct SynthSentence {
    std::string text;
    std::size_t aspect_start = 0;
    std::size_t aspect_end = 0;
};

inline SynthSentence synth_sentence(const std::string& aspect, bool positive,
                                    std::mt19937_64& rng) {
    const auto& sets = detail::synth_word_sets();
    const SynthWord& adj = detail::pick(positive ? sets.pos_adj : sets.neg_adj, rng);
    const SynthWord& adv = detail::pick(sets.adv, rng);
    const SynthWord& verb = detail::pick(positive ? sets.pos_verb : sets.neg_verb, rng);
    const SynthWord& noun = detail::pick(positive ? sets.pos_noun : sets.neg_noun, rng);
    std::size_t aspect_len = 1 + static_cast<std::size_t>(
        std::count(aspect.begin(), aspect.end(), ' '));

    SynthSentence out;
    switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
        case 0:  // The handling is good
            out.text = "The " + aspect + " is " + adj.word;
            out.aspect_start = 1;
            break;
        case 1:  // The handling is very good
            out.text = "The " + aspect + " is " + adv.word + " " + adj.word;
            out.aspect_start = 1;
            break;
        case 2:  // It has very good handling
            out.text = std::string("It has ") + adv.word + " " + adj.word + " " + aspect;
            out.aspect_start = 4;
            break;
        case 3:  // The car has good handling
            out.text = std::string("The car has ") + adj.word + " " + aspect;
            out.aspect_start = 4;
            break;
        case 4:  // I love the handling
            out.text = std::string("I ") + verb.word + " the " + aspect;
            out.aspect_start = 3;
            break;
        default:  // The handling is a delight
            out.text = "The " + aspect + " is a " + noun.word;
            out.aspect_start = 1;
            break;
    }
    out.aspect_end = out.aspect_start + aspect_len;
    return out;
}

// Reviews with `positive_fraction` positive sentences per entity (count-based,
// not sampled, so the planted ordering is exact). Review ids are globally
// unique; entities are interleaved in round-robin order.
inline Corpus synth_corpus(const std::vector<std::pair<std::string, double>>& entity_bias,
                           std::size_t reviews_per_entity, std::uint64_t seed,
                           std::size_t sentences_per_review = 2,
                           const std::vector<std::string>& aspects = synth_aspects()) {
    std::mt19937_64 rng(seed);
    std::vector<Review> reviews;
    std::vector<std::size_t> positive_left(entity_bias.size());
    std::size_t total_sentences = reviews_per_entity * sentences_per_review;
    for (std::size_t e = 0; e < entity_bias.size(); ++e)
        positive_left[e] =
            static_cast<std::size_t>(entity_bias[e].second * total_sentences + 0.5);

    std::size_t counter = 0;
    for (std::size_t r = 0; r < reviews_per_entity; ++r) {
        for (std::size_t e = 0; e < entity_bias.size(); ++e) {
            std::string text;
            for (std::size_t s = 0; s < sentences_per_review; ++s) {
                bool positive = positive_left[e] > 0;
                if (positive) --positive_left[e];
                const std::string& aspect = detail::pick(aspects, rng);
                if (!text.empty()) text += " ";
                text += synth_sentence(aspect, positive, rng).text + ".";
            }
            reviews.push_back(
                Review{entity_bias[e].first, "r" + std::to_string(counter++), text, {}});
        }
    }
    return make_corpus(std::move(reviews));
}

// Simple flavor: n reviews spread over k generic entities, half positive.
inline Corpus synth_corpus(std::size_t n_reviews, std::size_t n_entities, std::uint64_t seed) {
    std::vector<std::pair<std::string, double>> bias;
    for (std::size_t e = 0; e < n_entities; ++e)
        bias.emplace_back("entity_" + std::to_string(e), 0.5);
    std::size_t per_entity = n_entities == 0 ? 0 : n_reviews / n_entities;
    if (per_entity == 0 && n_reviews > 0) {
        bias.resize(n_reviews);
        per_entity = 1;
    }
    return synth_corpus(bias, per_entity, seed);
}

// Labeled sentences for tagger training: aspect tokens get B/I, everything
// else O.
inline std::vector<LabeledSequence> synth_training_sequences(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<LabeledSequence> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& aspect = detail::pick(synth_aspects(), rng);
        bool positive = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
        SynthSentence sent = synth_sentence(aspect, positive, rng);
        LabeledSequence seq;
        seq.tokens = tokenize(sent.text);
        seq.labels.assign(seq.tokens.size(), BioLabel::Outside);
        for (std::size_t t = sent.aspect_start; t < sent.aspect_end && t < seq.labels.size(); ++t)
            seq.labels[t] = t == sent.aspect_start ? BioLabel::BAsp : BioLabel::IAsp;
        out.push_back(std::move(seq));
    }
    return out;
}

inline void write_conll(const std::vector<LabeledSequence>& sequences, std::ostream& out) {
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        if (i > 0) out << "\n";
        for (std::size_t t = 0; t < sequences[i].tokens.size(); ++t)
            out << sequences[i].tokens[t].surface << "\t" << to_string(sequences[i].labels[t])
                << "\n";
    }
}

}  // namespace aspectrank
