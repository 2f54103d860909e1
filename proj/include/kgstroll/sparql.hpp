#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgstroll/graph.hpp"
#include "kgstroll/lru_cache.hpp"

namespace kgstroll {

struct ConnectorOptions {
    size_t cache_capacity = 100000;
    size_t bundle_size = 64;  // subjects per VALUES request
    int timeout_seconds = 30;
};

// SPARQL 1.1 protocol client with per-(vertex, direction) caching and
// request bundling. Callable from many workers at once.
class SparqlConnector {
public:
    explicit SparqlConnector(std::string endpoint_url, ConnectorOptions opts = {});

    // All (predicate, neighbor) bindings of one vertex. Forward queries
    // outgoing triples, reverse incoming ones. Literal neighbors are
    // included; filtering is the graph layer's business.
    std::vector<Hop> fetch_hops(const Term& subject, Direction dir);

    // Fetches many vertices in ceil(uncached / bundle_size) VALUES requests.
    // The returned mapping covers every requested vertex, with an empty hop
    // list when the endpoint knows no triples for it.
    std::unordered_map<Term, std::vector<Hop>, TermHash> fetch_hops_bundled(
        std::span<const Term> subjects, Direction dir);

    CacheStats cache_stats() const { return cache_.stats(); }
    const std::string& endpoint() const { return endpoint_; }

private:
    std::string endpoint_;
    std::string host_;  // scheme://authority
    std::string path_;
    ConnectorOptions opts_;
    LruCache<std::vector<Hop>> cache_;

    std::string run_query(const std::string& query, bool use_post);
};

// Lazy hop source over a remote endpoint: hop queries are answered from the
// connector cache one vertex at a time, never materializing the whole graph.
class RemoteGraph final : public HopSource {
public:
    RemoteGraph(SparqlConnector& connector, std::unordered_set<std::string> skip_predicates);

    std::vector<Hop> hops(const Term& vertex, Direction dir) const override;
    std::vector<Term> literals(const Term& subject, const std::string& predicate_iri) const override;
    // A remote vertex is visible iff the endpoint knows any triple about it.
    bool has_vertex(const Term& vertex) const override;
    const std::unordered_set<std::string>& skip_predicates() const override {
        return skip_predicates_;
    }

    // Warms the cache for a known frontier with bundled requests.
    void prefetch(std::span<const Term> vertices, Direction dir) const;

private:
    SparqlConnector& connector_;
    std::unordered_set<std::string> skip_predicates_;
};

}  // namespace kgstroll
