#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include <aspectrank/associate.hpp>
#include <aspectrank/synth.hpp>

using namespace aspectrank;

namespace {

struct TaggedText {
    std::vector<Token> tokens;
    std::vector<PosClass> pos;
};

TaggedText tagged(const std::string& text, const Lexicon& lex) {
    TaggedText s;
    s.tokens = tokenize(text);
    s.pos = pos_tag(s.tokens, pos_lexicon_from(lex));
    return s;
}

AspectMention span(std::size_t start, std::size_t end, std::string term = "a") {
    AspectMention m;
    m.term = std::move(term);
    m.start = start;
    m.end = end;
    return m;
}

}  // namespace

TEST_CASE("worked example selects exactly the nearest modifier pair") {
    Lexicon lex = synth_lexicon();
    TaggedText s = tagged("The car is good having very stable handling", lex);
    std::vector<AspectMention> aspects{span(7, 8, "handling")};

    auto tuples = associate_opinions(s.tokens, s.pos, aspects, lex);
    REQUIRE(tuples.size() == 1);
    const OpinionTuple& t = tuples[0];
    REQUIRE(t.adv.has_value());
    REQUIRE(t.adj.has_value());
    CHECK(t.adv_word == "very");
    CHECK_THAT(*t.adv, Catch::Matchers::WithinAbs(0.9, 1e-12));
    CHECK(t.adj_word == "stable");  // nearer than "good"
    CHECK_THAT(*t.adj, Catch::Matchers::WithinAbs(0.7, 1e-12));
    CHECK_FALSE(t.verb.has_value());
    CHECK_FALSE(t.noun.has_value());
    CHECK_FALSE(t.negated);
    CHECK(t.has_opinion());
}

TEST_CASE("window bounds candidate positions") {
    Lexicon lex = synth_lexicon();
    // "good" sits 6 tokens before the aspect: outside the default window of 5
    TaggedText s = tagged("good one two three four five handling", lex);
    std::vector<AspectMention> aspects{span(6, 7, "handling")};

    auto tuples = associate_opinions(s.tokens, s.pos, aspects, lex);
    REQUIRE(tuples.size() == 1);
    CHECK_FALSE(tuples[0].has_opinion());

    AssociationConfig wide;
    wide.window = 6;
    tuples = associate_opinions(s.tokens, s.pos, aspects, lex, nullptr, wide);
    CHECK(tuples[0].adj.has_value());
    CHECK(tuples[0].adj_word == "good");
}

TEST_CASE("distance is symmetric and ties go to the leftmost word") {
    Lexicon lex = synth_lexicon();
    // great (0.85) one token left, good (0.8) one token right: tie -> leftmost
    TaggedText s = tagged("great handling good", lex);
    std::vector<AspectMention> aspects{span(1, 2, "handling")};
    auto tuples = associate_opinions(s.tokens, s.pos, aspects, lex);
    REQUIRE(tuples[0].adj.has_value());
    CHECK(tuples[0].adj_word == "great");
    CHECK_THAT(*tuples[0].adj, Catch::Matchers::WithinAbs(0.85, 1e-12));
}

TEST_CASE("tokens inside the aspect span are never opinion candidates") {
    Lexicon lex = synth_lexicon();
    TaggedText s = tagged("very stable handling", lex);
    // the mention swallows "stable": only "very" remains eligible
    std::vector<AspectMention> aspects{span(1, 3, "stable handling")};
    auto tuples = associate_opinions(s.tokens, s.pos, aspects, lex);
    REQUIRE(tuples.size() == 1);
    CHECK(tuples[0].adv_word == "very");
    CHECK_FALSE(tuples[0].adj.has_value());
}

TEST_CASE("zero-polarity lexicon entries carry no opinion") {
    Lexicon lex = synth_lexicon();
    // "car" is a known NOUN with polarity 0: the noun slot must stay empty
    TaggedText s = tagged("the car handling", lex);
    std::vector<AspectMention> aspects{span(2, 3, "handling")};
    auto tuples = associate_opinions(s.tokens, s.pos, aspects, lex);
    CHECK_FALSE(tuples[0].noun.has_value());
    CHECK_FALSE(tuples[0].has_opinion());
}

TEST_CASE("opinion verbs and nouns fill their own slots") {
    Lexicon lex = synth_lexicon();
    TaggedText s = tagged("I love the handling", lex);
    std::vector<AspectMention> aspects{span(3, 4, "handling")};
    auto tuples = associate_opinions(s.tokens, s.pos, aspects, lex);
    REQUIRE(tuples[0].verb.has_value());
    CHECK(tuples[0].verb_word == "love");
    CHECK_THAT(*tuples[0].verb, Catch::Matchers::WithinAbs(0.9, 1e-12));

    s = tagged("the handling is a delight", lex);
    aspects = {span(1, 2, "handling")};
    tuples = associate_opinions(s.tokens, s.pos, aspects, lex);
    REQUIRE(tuples[0].noun.has_value());
    CHECK(tuples[0].noun_word == "delight");
}

TEST_CASE("negation marks the tuple when a NEG token precedes a pick") {
    Lexicon lex = synth_lexicon();

    SECTION("within the lookback window") {
        TaggedText s = tagged("not very stable handling", lex);
        std::vector<AspectMention> aspects{span(3, 4, "handling")};
        auto tuples = associate_opinions(s.tokens, s.pos, aspects, lex);
        CHECK(tuples[0].negated);
    }
    SECTION("a NEG token after the pick does not flip it") {
        TaggedText s = tagged("stable handling not", lex);
        std::vector<AspectMention> aspects{span(1, 2, "handling")};
        auto tuples = associate_opinions(s.tokens, s.pos, aspects, lex);
        CHECK_FALSE(tuples[0].negated);
    }
    SECTION("outside the lookback window") {
        AssociationConfig config;
        config.negation_window = 1;
        TaggedText s = tagged("not a very stable handling", lex);
        std::vector<AspectMention> aspects{span(4, 5, "handling")};
        auto tuples = associate_opinions(s.tokens, s.pos, aspects, lex, nullptr, config);
        CHECK_FALSE(tuples[0].negated);
    }
    SECTION("disabled by configuration") {
        AssociationConfig config;
        config.negation = false;
        TaggedText s = tagged("not stable handling", lex);
        std::vector<AspectMention> aspects{span(2, 3, "handling")};
        auto tuples = associate_opinions(s.tokens, s.pos, aspects, lex, nullptr, config);
        CHECK_FALSE(tuples[0].negated);
    }
}

TEST_CASE("dependency arcs replace the window with hop reachability") {
    Lexicon lex = synth_lexicon();
    TaggedText s = tagged("The car is good having very stable handling", lex);
    std::vector<AspectMention> aspects{span(7, 8, "handling")};

    SECTION("arcs reproducing the adjacency structure give the same picks") {
        // very -> stable -> handling; everything else hangs off "is"
        DependencyArcs arcs;
        arcs.head = {2, 2, -1, 2, 2, 6, 7, 2};
        auto tuples = associate_opinions(s.tokens, s.pos, aspects, lex, &arcs);
        REQUIRE(tuples.size() == 1);
        CHECK(tuples[0].adv_word == "very");
        CHECK(tuples[0].adj_word == "stable");
    }
    SECTION("an arc reaches words the window cannot") {
        TaggedText far = tagged("good one two three four five six handling", lex);
        std::vector<AspectMention> far_aspects{span(7, 8, "handling")};
        auto no_arcs = associate_opinions(far.tokens, far.pos, far_aspects, lex);
        CHECK_FALSE(no_arcs[0].has_opinion());

        DependencyArcs arcs;
        arcs.head = {7, 7, 7, 7, 7, 7, 7, -1};  // all words attach to the aspect head
        auto with_arcs = associate_opinions(far.tokens, far.pos, far_aspects, lex, &arcs);
        REQUIRE(with_arcs[0].adj.has_value());
        CHECK(with_arcs[0].adj_word == "good");
    }
    SECTION("hops limit reachability") {
        // chain good <- x <- y <- handling: "good" is 3 hops out
        TaggedText chain = tagged("good stable very handling", lex);
        std::vector<AspectMention> chain_aspects{span(3, 4, "handling")};
        DependencyArcs arcs;
        arcs.head = {1, 2, 3, -1};
        AssociationConfig config;
        auto tuples = associate_opinions(chain.tokens, chain.pos, chain_aspects, lex, &arcs, config);
        CHECK(tuples[0].adv_word == "very");      // 1 hop
        CHECK(tuples[0].adj_word == "stable");    // 2 hops; "good" at 3 hops is out

        config.dependency_hops = 3;
        tuples = associate_opinions(chain.tokens, chain.pos, chain_aspects, lex, &arcs, config);
        CHECK(tuples[0].adj_word == "stable");  // still nearer than "good"
    }
}

TEST_CASE("one tuple per aspect and input validation") {
    Lexicon lex = synth_lexicon();
    TaggedText s = tagged("good handling bad mileage", lex);
    std::vector<AspectMention> aspects{span(1, 2, "handling"), span(3, 4, "mileage")};
    auto tuples = associate_opinions(s.tokens, s.pos, aspects, lex);
    REQUIRE(tuples.size() == 2);
    CHECK(tuples[0].aspect.term == "handling");
    CHECK(tuples[0].adj_word == "good");
    CHECK(tuples[1].aspect.term == "mileage");
    CHECK(tuples[1].adj_word == "bad");

    std::vector<PosClass> short_pos(2, PosClass::OTHER);
    CHECK_THROWS_AS(associate_opinions(s.tokens, short_pos, aspects, lex), LengthMismatch);
}

TEST_CASE("dependency file parsing and lookup") {
    std::string text =
        "# sent_id = r1:0\n"
        "1\tThe\t3\n"
        "2\tstable\t3\n"
        "3\thandling\t0\n"
        "\n"
        "# a free comment\n"
        "# sent_id = r2:1\n"
        "1\tgood\t2\n"
        "2\tbrakes\t0\n";
    std::istringstream in(text);
    DependencyFile deps = DependencyFile::parse(in, "deps.tsv");
    CHECK(deps.size() == 2);

    const DependencyArcs* a = deps.find("r1", 0);
    REQUIRE(a != nullptr);
    CHECK(a->head == std::vector<int>{2, 2, -1});

    const DependencyArcs* b = deps.find("r2", 1);
    REQUIRE(b != nullptr);
    CHECK(b->head == std::vector<int>{1, -1});

    CHECK(deps.find("r1", 1) == nullptr);
    CHECK(deps.find("zzz", 0) == nullptr);

    std::istringstream bad_id("# sent_id missing equals\n");
    CHECK_THROWS_AS(DependencyFile::parse(bad_id), MalformedRecord);

    std::istringstream bad_sent("# sent_id = no-colon-here\n");
    CHECK_THROWS_AS(DependencyFile::parse(bad_sent), MalformedRecord);

    std::istringstream bad_row("# sent_id = r:0\n1 only-spaces 2\n");
    CHECK_THROWS_AS(DependencyFile::parse(bad_row), MalformedRecord);
}
