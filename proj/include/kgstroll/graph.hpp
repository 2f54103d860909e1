#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgstroll/term.hpp"

namespace kgstroll {

enum class Direction { Forward, Reverse };

// One traversable hop: the edge label and the vertex reached.
struct Hop {
    Term predicate;
    Term neighbor;

    bool operator==(const Hop&) const = default;
};

// Anything walks can be extracted from: the in-memory graph or a remote
// endpoint behind the connector. Hop queries never return literal objects or
// skipped predicates; literal lookup goes through literals().
class HopSource {
public:
    virtual ~HopSource() = default;

    virtual std::vector<Hop> hops(const Term& vertex, Direction dir) const = 0;
    virtual std::vector<Term> literals(const Term& subject, const std::string& predicate_iri) const = 0;
    virtual bool has_vertex(const Term& vertex) const = 0;
    virtual const std::unordered_set<std::string>& skip_predicates() const = 0;
};

struct InternedHop {
    uint32_t predicate;
    uint32_t neighbor;

    bool operator==(const InternedHop&) const = default;
};

// Indexed in-memory multigraph. Immutable after build; vertices are interned
// to dense ids internally while every public surface speaks Terms. Triples
// with literal objects live only in the literal index, never in the walkable
// adjacency, and triples whose predicate is skipped are dropped from both.
class KnowledgeGraph final : public HopSource {
public:
    static KnowledgeGraph build(std::span<const Triple> triples,
                                const std::unordered_set<std::string>& skip_predicates = {});

    // HopSource surface.
    std::vector<Hop> hops(const Term& vertex, Direction dir) const override;
    std::vector<Term> literals(const Term& subject, const std::string& predicate_iri) const override;
    bool has_vertex(const Term& vertex) const override;

    const std::unordered_set<std::string>& skip_predicates() const override {
        return skip_predicates_;
    }

    size_t vertex_count() const { return vertex_terms_.size(); }
    size_t walkable_edge_count() const { return walkable_edges_; }
    const std::vector<Term>& vertices() const { return vertex_terms_; }

    // Id-level access for fitting and traversal-heavy callers.
    static constexpr uint32_t kNoVertex = 0xffffffffu;
    uint32_t vertex_id(const Term& t) const;
    const Term& vertex_term(uint32_t id) const { return vertex_terms_[id]; }
    const std::string& predicate_iri(uint32_t id) const { return predicate_iris_[id]; }
    size_t predicate_count() const { return predicate_iris_.size(); }
    std::span<const InternedHop> forward_of(uint32_t vertex) const { return forward_[vertex]; }
    std::span<const InternedHop> inverse_of(uint32_t vertex) const { return inverse_[vertex]; }

private:
    std::vector<Term> vertex_terms_;
    std::unordered_map<Term, uint32_t, TermHash> vertex_ids_;
    std::vector<std::string> predicate_iris_;
    std::unordered_map<std::string, uint32_t> predicate_ids_;
    std::vector<std::vector<InternedHop>> forward_;
    std::vector<std::vector<InternedHop>> inverse_;
    std::unordered_map<uint64_t, std::vector<Term>> literal_index_;  // (vertex, predicate) key
    std::unordered_set<std::string> skip_predicates_;
    size_t walkable_edges_ = 0;

    uint32_t intern_vertex(const Term& t);
    uint32_t intern_predicate(const std::string& iri);
};

// User-supplied walk seeds.
struct Entities {
    std::vector<Term> seeds;
};

}  // namespace kgstroll
