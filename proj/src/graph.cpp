#include "kgstroll/graph.hpp"

namespace kgstroll {

namespace {

uint64_t literal_key(uint32_t vertex, uint32_t predicate) {
    return (uint64_t(vertex) << 32) | predicate;
}

}  // namespace

uint32_t KnowledgeGraph::intern_vertex(const Term& t) {
    auto it = vertex_ids_.find(t);
    if (it != vertex_ids_.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(vertex_terms_.size());
    vertex_terms_.push_back(t);
    vertex_ids_.emplace(t, id);
    forward_.emplace_back();
    inverse_.emplace_back();
    return id;
}

uint32_t KnowledgeGraph::intern_predicate(const std::string& iri) {
    auto it = predicate_ids_.find(iri);
    if (it != predicate_ids_.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(predicate_iris_.size());
    predicate_iris_.push_back(iri);
    predicate_ids_.emplace(iri, id);
    return id;
}

KnowledgeGraph KnowledgeGraph::build(std::span<const Triple> triples,
                                     const std::unordered_set<std::string>& skip_predicates) {
    KnowledgeGraph g;
    g.skip_predicates_ = skip_predicates;
    for (const Triple& t : triples) {
        uint32_t s = g.intern_vertex(t.subject);
        if (!t.object.is_literal()) g.intern_vertex(t.object);
        if (skip_predicates.contains(t.predicate.lexical)) continue;
        uint32_t p = g.intern_predicate(t.predicate.lexical);
        if (t.object.is_literal()) {
            g.literal_index_[literal_key(s, p)].push_back(t.object);
        } else {
            uint32_t o = g.vertex_ids_.at(t.object);
            g.forward_[s].push_back({p, o});
            g.inverse_[o].push_back({p, s});
            ++g.walkable_edges_;
        }
    }
    return g;
}

uint32_t KnowledgeGraph::vertex_id(const Term& t) const {
    auto it = vertex_ids_.find(t);
    return it == vertex_ids_.end() ? kNoVertex : it->second;
}

std::vector<Hop> KnowledgeGraph::hops(const Term& vertex, Direction dir) const {
    uint32_t id = vertex_id(vertex);
    if (id == kNoVertex) return {};
    const auto& adj = dir == Direction::Forward ? forward_[id] : inverse_[id];
    std::vector<Hop> out;
    out.reserve(adj.size());
    for (const InternedHop& h : adj)
        out.push_back({Term::iri(predicate_iris_[h.predicate]), vertex_terms_[h.neighbor]});
    return out;
}

std::vector<Term> KnowledgeGraph::literals(const Term& subject,
                                           const std::string& predicate_iri) const {
    uint32_t s = vertex_id(subject);
    if (s == kNoVertex) return {};
    auto pit = predicate_ids_.find(predicate_iri);
    if (pit == predicate_ids_.end()) return {};
    auto it = literal_index_.find(literal_key(s, pit->second));
    if (it == literal_index_.end()) return {};
    return it->second;
}

bool KnowledgeGraph::has_vertex(const Term& vertex) const {
    return vertex_ids_.contains(vertex);
}

}  // namespace kgstroll
