#pragma once

#include <string>
#include <vector>

#include "kgstroll/graph.hpp"

namespace kgstroll {

// Predicate chain from a seed whose terminal literal values are collected.
struct LiteralPath {
    std::vector<std::string> predicates;

    std::string joined() const {
        std::string s;
        for (const auto& p : predicates) {
            if (!s.empty()) s += ".";
            s += p;
        }
        return s;
    }
};

// A literal value after numeric detection on the lexical form. The datatype
// IRI is deliberately ignored; real graphs mislabel datatypes too often.
struct LiteralValue {
    bool numeric = false;
    double number = 0.0;
    std::string text;

    bool operator==(const LiteralValue&) const = default;
};

struct LiteralResult {
    enum class Kind { Missing, Single, Many };
    Kind kind = Kind::Missing;
    std::vector<LiteralValue> values;  // empty / one / two or more, insertion order
};

// True iff `lexical` fully matches a decimal / scientific-notation grammar
// (no inf, nan, or hex). On success *out carries the parsed double.
bool parse_numeric(const std::string& lexical, double* out);

// Follows every branch of each path from each seed and collects the literal
// objects of the final predicate at all reached vertices. Branches are
// counted with multiplicity; unreachable paths yield Missing.
std::vector<std::vector<LiteralResult>> extract_literals(const HopSource& source,
                                                         const Entities& seeds,
                                                         const std::vector<LiteralPath>& paths);

}  // namespace kgstroll
