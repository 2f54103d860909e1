#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace kgstroll {

enum class TermKind { IRI, BlankNode, Literal };

// One RDF term. IRIs and blank nodes carry only a lexical form; literals may
// additionally carry a datatype IRI or a language tag, never both.
struct Term {
    TermKind kind = TermKind::IRI;
    std::string lexical;
    std::optional<std::string> datatype_iri;
    std::optional<std::string> language_tag;

    static Term iri(std::string lex) { return {TermKind::IRI, std::move(lex), {}, {}}; }
    static Term blank(std::string label) { return {TermKind::BlankNode, std::move(label), {}, {}}; }
    static Term literal(std::string lex) { return {TermKind::Literal, std::move(lex), {}, {}}; }
    static Term typed_literal(std::string lex, std::string dtype) {
        return {TermKind::Literal, std::move(lex), std::move(dtype), {}};
    }
    static Term lang_literal(std::string lex, std::string lang) {
        return {TermKind::Literal, std::move(lex), {}, std::move(lang)};
    }

    bool is_iri() const { return kind == TermKind::IRI; }
    bool is_blank() const { return kind == TermKind::BlankNode; }
    bool is_literal() const { return kind == TermKind::Literal; }

    // Token used for walks and embedding vocabulary. IRIs map to their bare
    // lexical form, blank nodes keep the "_:" prefix so they cannot collide
    // with IRIs, literals quote their lexical form.
    std::string token() const {
        switch (kind) {
            case TermKind::IRI: return lexical;
            case TermKind::BlankNode: return "_:" + lexical;
            case TermKind::Literal: return "\"" + lexical + "\"";
        }
        return lexical;
    }

    bool operator==(const Term& o) const = default;
    auto operator<=>(const Term& o) const = default;
};

struct Triple {
    Term subject;    // IRI or blank node
    Term predicate;  // IRI
    Term object;     // any term

    bool operator==(const Triple& o) const = default;
    auto operator<=>(const Triple& o) const = default;
};

inline uint64_t fnv1a64(std::string_view bytes, uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

struct TermHash {
    size_t operator()(const Term& t) const {
        uint64_t h = fnv1a64(t.lexical);
        h = fnv1a64(std::string_view(reinterpret_cast<const char*>(&t.kind), 1), h);
        if (t.datatype_iri) h = fnv1a64(*t.datatype_iri, h ^ 0x9e);
        if (t.language_tag) h = fnv1a64(*t.language_tag, h ^ 0x5b);
        return static_cast<size_t>(h);
    }
};

}  // namespace kgstroll
