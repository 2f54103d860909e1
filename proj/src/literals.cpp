#include "kgstroll/literals.hpp"

#include <cctype>
#include <cstdlib>

#include "kgstroll/errors.hpp"

namespace kgstroll {

bool parse_numeric(const std::string& lexical, double* out) {
    const char* s = lexical.c_str();
    size_t i = 0;
    if (s[i] == '+' || s[i] == '-') ++i;
    size_t int_digits = 0;
    while (std::isdigit(static_cast<unsigned char>(s[i]))) {
        ++i;
        ++int_digits;
    }
    size_t frac_digits = 0;
    if (s[i] == '.') {
        ++i;
        while (std::isdigit(static_cast<unsigned char>(s[i]))) {
            ++i;
            ++frac_digits;
        }
    }
    if (int_digits + frac_digits == 0) return false;
    if (s[i] == 'e' || s[i] == 'E') {
        ++i;
        if (s[i] == '+' || s[i] == '-') ++i;
        size_t exp_digits = 0;
        while (std::isdigit(static_cast<unsigned char>(s[i]))) {
            ++i;
            ++exp_digits;
        }
        if (exp_digits == 0) return false;
    }
    if (i != lexical.size()) return false;

    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end != s + lexical.size()) return false;
    if (out) *out = v;
    return true;
}

namespace {

LiteralValue make_value(const Term& literal) {
    LiteralValue v;
    v.text = literal.lexical;
    v.numeric = parse_numeric(literal.lexical, &v.number);
    return v;
}

LiteralResult follow_path(const HopSource& source, const Term& seed, const LiteralPath& path) {
    // Branch frontier with multiplicity: each entry is one realized prefix.
    std::vector<Term> frontier{seed};
    for (size_t step = 0; step + 1 < path.predicates.size(); ++step) {
        const std::string& pred = path.predicates[step];
        std::vector<Term> next;
        for (const Term& v : frontier)
            for (const Hop& h : source.hops(v, Direction::Forward))
                if (h.predicate.lexical == pred) next.push_back(h.neighbor);
        frontier = std::move(next);
        if (frontier.empty()) break;
    }

    LiteralResult result;
    const std::string& last = path.predicates.back();
    for (const Term& v : frontier)
        for (const Term& lit : source.literals(v, last)) result.values.push_back(make_value(lit));

    if (result.values.empty())
        result.kind = LiteralResult::Kind::Missing;
    else if (result.values.size() == 1)
        result.kind = LiteralResult::Kind::Single;
    else
        result.kind = LiteralResult::Kind::Many;
    return result;
}

}  // namespace

std::vector<std::vector<LiteralResult>> extract_literals(const HopSource& source,
                                                         const Entities& seeds,
                                                         const std::vector<LiteralPath>& paths) {
    for (const LiteralPath& p : paths)
        if (p.predicates.empty()) throw ConfigError("literal path must name at least one predicate");

    std::vector<std::vector<LiteralResult>> matrix;
    matrix.reserve(seeds.seeds.size());
    for (const Term& seed : seeds.seeds) {
        std::vector<LiteralResult> row;
        row.reserve(paths.size());
        for (const LiteralPath& p : paths) row.push_back(follow_path(source, seed, p));
        matrix.push_back(std::move(row));
    }
    return matrix;
}

}  // namespace kgstroll
