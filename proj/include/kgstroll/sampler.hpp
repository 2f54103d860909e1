#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgstroll/graph.hpp"
#include "kgstroll/rng.hpp"

namespace kgstroll {

enum class SamplerStrategy { Uniform, PredFreq, ObjFreq, PredObjFreq, PageRank };

const char* sampler_strategy_name(SamplerStrategy s);

// Index drawn with probability weights[i] / sum(weights), by cumulative-sum
// inversion so that enumeration order never biases the draw beyond the
// probabilities themselves.
size_t weighted_pick(std::span<const double> weights, RandomSource& rng);

// Per-edge weight allocation. Fit once against a graph, then share freely
// across workers; the fitted model is immutable.
class SamplerModel {
public:
    explicit SamplerModel(SamplerStrategy strategy, bool inverse = false, double alpha = 0.85);

    void fit(const KnowledgeGraph& g);
    bool fitted() const { return fitted_; }

    SamplerStrategy strategy() const { return strategy_; }
    bool inverse() const { return inverse_; }
    double alpha() const { return alpha_; }

    // Weight of an edge as stored in the graph. Throws UnfittedDomainError
    // when unfitted, fitted on an empty graph, or handed an edge whose
    // statistics are absent from the fitted tables.
    double weigh(const Term& subject, const Term& predicate, const Term& object) const;

    // Draws one eligible hop of `vertex`, or nullopt when it has none.
    // Forward hops are weighed as (vertex, p, neighbor), reverse hops as the
    // underlying edge (neighbor, p, vertex).
    std::optional<Hop> sample_hop(const HopSource& source, const Term& vertex, Direction dir,
                                  RandomSource& rng) const;

    // PageRank scores per vertex term (PageRank strategy only, after fit).
    const std::unordered_map<Term, double, TermHash>& pagerank_scores() const {
        return vertex_stats_;
    }

private:
    SamplerStrategy strategy_;
    bool inverse_;
    double alpha_;
    bool fitted_ = false;
    bool empty_domain_ = false;

    std::unordered_map<std::string, double> predicate_stats_;
    std::unordered_map<Term, double, TermHash> vertex_stats_;
    std::unordered_map<std::string, double> pair_stats_;

    double raw_weight(const Term& subject, const Term& predicate, const Term& object) const;
    void fit_pagerank(const KnowledgeGraph& g);
};

}  // namespace kgstroll
