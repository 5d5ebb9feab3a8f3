#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include <aspectrank/lexicon.hpp>
#include <aspectrank/pos.hpp>

#include "test_util.hpp"

using namespace aspectrank;

TEST_CASE("lexicon parses TSV rows and comments") {
    std::istringstream in(
        "# word\tpos\tpolarity\n"
        "stable\tADJ\t0.7\n"
        "very\tADV\t0.9\n"
        "handling\tNOUN\t0\n");
    Lexicon lex = load_lexicon(in);
    CHECK(lex.size() == 3);
    CHECK(lex.polarity("stable", PosClass::ADJ) == 0.7);
    CHECK(lex.polarity("very", PosClass::ADV) == 0.9);
    CHECK(lex.polarity("handling", PosClass::NOUN) == 0.0);
    CHECK_FALSE(lex.polarity("stable", PosClass::ADV).has_value());
    CHECK_FALSE(lex.polarity("absent", PosClass::ADJ).has_value());
}

TEST_CASE("lexicon rejects bad rows") {
    std::istringstream missing("stable\tADJ\n");
    CHECK_THROWS_AS(load_lexicon(missing), MalformedRow);

    std::istringstream badnum("stable\tADJ\tx.7\n");
    CHECK_THROWS_AS(load_lexicon(badnum), MalformedRow);

    std::istringstream badpos("stable\tADJX\t0.7\n");
    CHECK_THROWS_AS(load_lexicon(badpos), MalformedRow);

    std::istringstream range("good\tADJ\t1.5\n");
    CHECK_THROWS_AS(load_lexicon(range), PolarityOutOfRange);
}

TEST_CASE("lexicon keys are case-folded and first entry wins") {
    std::istringstream in(
        "Stable\tADJ\t0.7\n"
        "stable\tADJ\t0.1\n");
    Lexicon lex = load_lexicon(in);
    CHECK(lex.polarity("stable", PosClass::ADJ) == 0.7);
}

TEST_CASE("empty lexicon file loads as empty lexicon") {
    std::istringstream in("");
    Lexicon lex = load_lexicon(in);
    CHECK(lex.empty());
}

TEST_CASE("pos classes parse and print") {
    CHECK(parse_pos_class("ADJ") == PosClass::ADJ);
    CHECK(parse_pos_class("NEG") == PosClass::NEG);
    CHECK(std::string(to_string(PosClass::ADV)) == "ADV");
    CHECK_THROWS_AS(parse_pos_class("NOPE"), MalformedRow);
}

TEST_CASE("pos tagging: lexicon first, then suffix rules, else OTHER") {
    PosLexicon lex = PosLexicon::with_negation_words();
    lex.add("very", PosClass::ADV);
    lex.add("stable", PosClass::ADJ);
    lex.add("handling", PosClass::NOUN);

    auto tags = pos_tag(tokenize("very stable handling"), lex);
    CHECK(tags == std::vector<PosClass>{PosClass::ADV, PosClass::ADJ, PosClass::NOUN});

    // suffix rules fire only on lexicon miss
    CHECK(pos_tag(tokenize("quickly"), lex) == std::vector<PosClass>{PosClass::ADV});
    CHECK(pos_tag(tokenize("famous"), lex) == std::vector<PosClass>{PosClass::ADJ});
    CHECK(pos_tag(tokenize("useful"), lex) == std::vector<PosClass>{PosClass::ADJ});
    CHECK(pos_tag(tokenize("sizable"), lex) == std::vector<PosClass>{PosClass::ADJ});
    CHECK(pos_tag(tokenize("massive"), lex) == std::vector<PosClass>{PosClass::ADJ});
    CHECK(pos_tag(tokenize("car"), lex) == std::vector<PosClass>{PosClass::OTHER});
    CHECK(pos_tag(std::vector<Token>{}, lex).empty());

    // a word equal to its suffix does not match the rule
    CHECK(pos_tag(tokenize("ly"), lex) == std::vector<PosClass>{PosClass::OTHER});
}

TEST_CASE("negation words are tagged NEG") {
    PosLexicon lex = PosLexicon::with_negation_words();
    auto tags = pos_tag(tokenize("not never no don't"), lex);
    for (PosClass t : tags) CHECK(t == PosClass::NEG);
}

TEST_CASE("pos lexicon derived from sentiment lexicon") {
    std::istringstream in(
        "stable\tADJ\t0.7\n"
        "love\tVERB\t0.9\n"
        "not\tADJ\t-0.1\n");  // negation built-ins take precedence
    Lexicon sentiment = load_lexicon(in);
    PosLexicon lex = pos_lexicon_from(sentiment);
    CHECK(pos_tag(tokenize("stable"), lex) == std::vector<PosClass>{PosClass::ADJ});
    CHECK(pos_tag(tokenize("love"), lex) == std::vector<PosClass>{PosClass::VERB});
    CHECK(pos_tag(tokenize("not"), lex) == std::vector<PosClass>{PosClass::NEG});
}
