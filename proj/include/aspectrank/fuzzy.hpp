#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "aspectrank/associate.hpp"
#include "aspectrank/errors.hpp"

namespace aspectrank {

// Triangle (a, b, c) with shoulder conventions: a == b gives a left
// shoulder, b == c a right shoulder.
struct TriangularMf {
    double a = 0.0, b = 0.0, c = 0.0;

    double membership(double x) const {
        if (x < a || x > c) return 0.0;
        double left = a == b ? 1.0 : (x - a) / (b - a);
        double right = b == c ? 1.0 : (c - x) / (c - b);
        return std::max(0.0, std::min(left, right));
    }

    // closed-form centroid of the area under the full triangle
    double centroid() const { return (a + b + c) / 3.0; }
};

enum class Level : int { Low = 0, Moderate = 1, High = 2 };

inline const char* to_string(Level l) {
    switch (l) {
        case Level::Low: return "LOW";
        case Level::Moderate: return "MODERATE";
        case Level::High: return "HIGH";
    }
    return "LOW";
}

inline Level parse_level(const std::string& name) {
    if (name == "LOW") return Level::Low;
    if (name == "MODERATE") return Level::Moderate;
    if (name == "HIGH") return Level::High;
    throw MalformedRow("unknown fuzzy level: " + name);
}

using MembershipSets = std::array<TriangularMf, 3>;  // indexed by Level

inline MembershipSets default_membership_sets() {
    return {TriangularMf{0.0, 0.0, 0.5}, TriangularMf{0.0, 0.5, 1.0}, TriangularMf{0.5, 1.0, 1.0}};
}

// Conjunctive antecedent; `unless` lists variables whose presence in the
// input disables the rule (used by the single-variable fallback rules so
// they yield to the adverb x adjective grid).
struct Rule {
    std::map<std::string, Level> antecedent;
    Level consequent = Level::Moderate;
    std::vector<std::string> unless;
};

struct FuzzySystem {
    MembershipSets input = default_membership_sets();   // shared by all input variables
    MembershipSets output = default_membership_sets();
    std::vector<Rule> rules;
    int resolution = 1000;

    // Full 3x3 adverb x adjective grid plus guarded one-variable fallbacks.
    static FuzzySystem defaults() {
        FuzzySystem sys;
        auto grid = [](Level adv, Level adj) -> Level {
            if (adv == Level::High && adj == Level::High) return Level::High;
            if (adv == Level::Low && adj == Level::Low) return Level::Low;
            if ((adv == Level::High && adj == Level::Moderate) ||
                (adv == Level::Moderate && adj == Level::High))
                return Level::High;
            if ((adv == Level::Low && adj == Level::Moderate) ||
                (adv == Level::Moderate && adj == Level::Low))
                return Level::Low;
            return Level::Moderate;
        };
        for (Level adv : {Level::Low, Level::Moderate, Level::High})
            for (Level adj : {Level::Low, Level::Moderate, Level::High})
                sys.rules.push_back(Rule{{{"adv", adv}, {"adj", adj}}, grid(adv, adj), {}});
        for (const char* var : {"adv", "adj", "verb", "noun"}) {
            std::vector<std::string> unless;
            if (std::string(var) == "adv") unless = {"adj"};
            if (std::string(var) == "adj") unless = {"adv"};
            for (Level l : {Level::Low, Level::Moderate, Level::High})
                sys.rules.push_back(Rule{{{var, l}}, l, unless});
        }
        return sys;
    }
};

inline std::array<double, 3> fuzzify(double x, const MembershipSets& sets) {
    if (x < 0.0 || x > 1.0)
        throw DomainError("fuzzify: input " + std::to_string(x) + " outside [0,1]");
    return {sets[0].membership(x), sets[1].membership(x), sets[2].membership(x)};
}

// Max-min aggregate: each consequent set clipped at its rule's firing
// strength, combined pointwise by max.
struct AggregatedOutput {
    std::vector<std::pair<TriangularMf, double>> clipped;

    double evaluate(double x) const {
        double m = 0.0;
        for (const auto& [mf, clip] : clipped) m = std::max(m, std::min(clip, mf.membership(x)));
        return m;
    }
};

inline AggregatedOutput infer(const FuzzySystem& system, const std::map<std::string, double>& inputs) {
    AggregatedOutput agg;
    for (const Rule& rule : system.rules) {
        bool skip = false;
        for (const std::string& var : rule.unless)
            if (inputs.count(var) > 0) skip = true;
        double firing = 1.0;
        for (const auto& [var, level] : rule.antecedent) {
            auto it = inputs.find(var);
            if (it == inputs.end()) {
                skip = true;
                break;
            }
            firing = std::min(firing, fuzzify(it->second, system.input)[static_cast<int>(level)]);
        }
        if (skip || firing <= 0.0) continue;
        agg.clipped.emplace_back(system.output[static_cast<int>(rule.consequent)], firing);
    }
    if (agg.clipped.empty()) throw NoApplicableRule("infer: no rule fired with positive strength");
    return agg;
}

// Centroid over resolution+1 uniform samples of [0,1].
inline double defuzzify_centroid(const AggregatedOutput& aggregate, int resolution = 1000) {
    if (resolution < 1) throw DomainError("defuzzify_centroid: resolution must be >= 1");
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= resolution; ++i) {
        double x = static_cast<double>(i) / resolution;
        double mu = aggregate.evaluate(x);
        num += x * mu;
        den += mu;
    }
    if (den == 0.0) throw ZeroArea("defuzzify_centroid: aggregate has zero area");
    return num / den;
}

enum class Granularity : int { VeryWeak = 0, Weak = 1, Moderate = 2, Strong = 3, VeryStrong = 4 };

inline const char* to_string(Granularity g) {
    switch (g) {
        case Granularity::VeryWeak: return "very weak";
        case Granularity::Weak: return "weak";
        case Granularity::Moderate: return "moderate";
        case Granularity::Strong: return "strong";
        case Granularity::VeryStrong: return "very strong";
    }
    return "very weak";
}

inline Granularity classify_granularity(double strength) {
    if (strength < 0.0 || strength > 1.0)
        throw DomainError("classify_granularity: strength " + std::to_string(strength) +
                          " outside [0,1]");
    if (strength < 0.2) return Granularity::VeryWeak;
    if (strength < 0.4) return Granularity::Weak;
    if (strength < 0.6) return Granularity::Moderate;
    if (strength < 0.8) return Granularity::Strong;
    return Granularity::VeryStrong;
}

struct SentenceScore {
    double strength = 0.0;    // in [0,1]
    int orientation = 0;      // -1, 0, +1
    double signed_score = 0.0;
    Granularity granularity = Granularity::VeryWeak;

    // e.g. "strong positive", "weak negative"
    std::string label() const {
        std::string s = to_string(granularity);
        s += orientation > 0 ? " positive" : orientation < 0 ? " negative" : " neutral";
        return s;
    }
};

// Strength from the rule base over opinion-word magnitudes; orientation
// from the signed adj/verb/noun polarities (adv decides only when it is
// the lone opinion word), flipped under negation.
inline SentenceScore score_sentence(const FuzzySystem& system, const OpinionTuple& tuple) {
    if (!tuple.has_opinion()) throw NoOpinionWords("score_sentence: tuple has no opinion words");

    std::map<std::string, double> inputs;
    if (tuple.adv) inputs["adv"] = std::fabs(*tuple.adv);
    if (tuple.adj) inputs["adj"] = std::fabs(*tuple.adj);
    if (tuple.verb) inputs["verb"] = std::fabs(*tuple.verb);
    if (tuple.noun) inputs["noun"] = std::fabs(*tuple.noun);

    SentenceScore score;
    score.strength = defuzzify_centroid(infer(system, inputs), system.resolution);

    double oriented = 0.0;
    bool have_content = false;
    for (const auto& field : {tuple.adj, tuple.verb, tuple.noun}) {
        if (field) {
            oriented += *field;
            have_content = true;
        }
    }
    if (!have_content && tuple.adv) oriented = *tuple.adv;
    score.orientation = oriented > 0.0 ? 1 : oriented < 0.0 ? -1 : 0;
    if (tuple.negated) score.orientation = -score.orientation;
    score.signed_score = score.orientation * score.strength;
    score.granularity = classify_granularity(score.strength);
    return score;
}

// Rule-base config: one rule per line in the grammar
//   adv=HIGH & adj=HIGH -> HIGH [unless var[,var...]]
// plus membership overrides
//   set [input|output] LEVEL a b c
// '#' starts a comment. Rules given in the file replace the default base.
inline FuzzySystem load_fuzzy_system(std::istream& in, const std::string& source_name = "<stream>") {
    FuzzySystem sys;
    sys.rules.clear();
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) {
        return MalformedRow(source_name + ":" + std::to_string(lineno) + ": " + msg);
    };
    auto trim = [](std::string s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
        return s;
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;

        if (stripped.rfind("set ", 0) == 0) {
            std::istringstream ss(stripped.substr(4));
            std::string target, level_name;
            ss >> target;
            bool input_side = true, output_side = true;
            if (target == "input" || target == "output") {
                input_side = target == "input";
                output_side = target == "output";
                ss >> level_name;
            } else {
                level_name = target;
            }
            double a, b, c;
            if (!(ss >> a >> b >> c)) throw fail("expected: set [input|output] LEVEL a b c");
            if (!(a <= b && b <= c)) throw fail("membership parameters must satisfy a <= b <= c");
            Level level = parse_level(level_name);
            if (input_side) sys.input[static_cast<int>(level)] = TriangularMf{a, b, c};
            if (output_side) sys.output[static_cast<int>(level)] = TriangularMf{a, b, c};
            continue;
        }

        auto arrow = stripped.find("->");
        if (arrow == std::string::npos) throw fail("expected 'antecedent -> LEVEL'");
        std::string lhs = trim(stripped.substr(0, arrow));
        std::string rhs = trim(stripped.substr(arrow + 2));

        Rule rule;
        auto unless_pos = rhs.find("unless");
        if (unless_pos != std::string::npos) {
            std::string vars = trim(rhs.substr(unless_pos + 6));
            rhs = trim(rhs.substr(0, unless_pos));
            std::istringstream vs(vars);
            std::string v;
            while (std::getline(vs, v, ',')) {
                v = trim(v);
                if (!v.empty()) rule.unless.push_back(v);
            }
        }
        rule.consequent = parse_level(rhs);

        std::istringstream conj(lhs);
        std::string clause;
        while (std::getline(conj, clause, '&')) {
            clause = trim(clause);
            auto eq = clause.find('=');
            if (eq == std::string::npos || eq == 0) throw fail("expected 'var=LEVEL' clauses");
            std::string var = trim(clause.substr(0, eq));
            rule.antecedent[var] = parse_level(trim(clause.substr(eq + 1)));
        }
        if (rule.antecedent.empty()) throw fail("rule antecedent is empty");
        sys.rules.push_back(std::move(rule));
    }
    if (sys.rules.empty()) throw MalformedRow(source_name + ": rule file defines no rules");
    return sys;
}

inline FuzzySystem load_fuzzy_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open rule file: " + path);
    return load_fuzzy_system(in, path);
}

}  // namespace aspectrank
