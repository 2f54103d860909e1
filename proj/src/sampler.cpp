#include "kgstroll/sampler.hpp"

#include <cmath>

#include "kgstroll/errors.hpp"

namespace kgstroll {

namespace {

std::string pair_key(const std::string& predicate_iri, const Term& object) {
    return predicate_iri + '\x1f' + object.token();
}

}  // namespace

const char* sampler_strategy_name(SamplerStrategy s) {
    switch (s) {
        case SamplerStrategy::Uniform: return "uniform";
        case SamplerStrategy::PredFreq: return "predfreq";
        case SamplerStrategy::ObjFreq: return "objfreq";
        case SamplerStrategy::PredObjFreq: return "predobjfreq";
        case SamplerStrategy::PageRank: return "pagerank";
    }
    return "?";
}

size_t weighted_pick(std::span<const double> weights, RandomSource& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    double r = rng.next_double() * total;
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (r < acc) return i;
    }
    return weights.size() - 1;  // r landed on the rounding edge of the last bin
}

SamplerModel::SamplerModel(SamplerStrategy strategy, bool inverse, double alpha)
    : strategy_(strategy), inverse_(inverse), alpha_(alpha) {}

void SamplerModel::fit(const KnowledgeGraph& g) {
    predicate_stats_.clear();
    vertex_stats_.clear();
    pair_stats_.clear();
    empty_domain_ = g.vertex_count() == 0;
    fitted_ = true;
    if (empty_domain_) return;

    switch (strategy_) {
        case SamplerStrategy::Uniform:
            break;
        case SamplerStrategy::PredFreq:
        case SamplerStrategy::ObjFreq:
        case SamplerStrategy::PredObjFreq:
            for (uint32_t v = 0; v < g.vertex_count(); ++v) {
                for (const InternedHop& h : g.forward_of(v)) {
                    const std::string& pred = g.predicate_iri(h.predicate);
                    const Term& obj = g.vertex_term(h.neighbor);
                    if (strategy_ == SamplerStrategy::PredFreq)
                        predicate_stats_[pred] += 1.0;
                    else if (strategy_ == SamplerStrategy::ObjFreq)
                        vertex_stats_[obj] += 1.0;
                    else
                        pair_stats_[pair_key(pred, obj)] += 1.0;
                }
            }
            break;
        case SamplerStrategy::PageRank:
            fit_pagerank(g);
            break;
    }
}

void SamplerModel::fit_pagerank(const KnowledgeGraph& g) {
    const size_t n = g.vertex_count();
    const double teleport = (1.0 - alpha_) / double(n);
    std::vector<double> score(n, 1.0 / double(n));
    std::vector<double> next(n);

    for (int iter = 0; iter < 200; ++iter) {
        double dangling = 0.0;
        for (uint32_t v = 0; v < n; ++v)
            if (g.forward_of(v).empty()) dangling += score[v];

        std::fill(next.begin(), next.end(), teleport + alpha_ * dangling / double(n));
        for (uint32_t v = 0; v < n; ++v) {
            auto out = g.forward_of(v);
            if (out.empty()) continue;
            double share = alpha_ * score[v] / double(out.size());
            for (const InternedHop& h : out) next[h.neighbor] += share;
        }

        double delta = 0.0;
        for (size_t i = 0; i < n; ++i) delta += std::fabs(next[i] - score[i]);
        score.swap(next);
        if (delta < 1e-10) break;
    }

    for (uint32_t v = 0; v < n; ++v) vertex_stats_[g.vertex_term(v)] = score[v];
}

double SamplerModel::raw_weight(const Term&, const Term& predicate, const Term& object) const {
    switch (strategy_) {
        case SamplerStrategy::Uniform:
            return 1.0;
        case SamplerStrategy::PredFreq: {
            auto it = predicate_stats_.find(predicate.lexical);
            if (it == predicate_stats_.end())
                throw UnfittedDomainError("predicate not in fitted statistics: " +
                                          predicate.lexical);
            return it->second;
        }
        case SamplerStrategy::ObjFreq: {
            auto it = vertex_stats_.find(object);
            if (it == vertex_stats_.end())
                throw UnfittedDomainError("object not in fitted statistics: " + object.token());
            return it->second;
        }
        case SamplerStrategy::PredObjFreq: {
            auto it = pair_stats_.find(pair_key(predicate.lexical, object));
            if (it == pair_stats_.end())
                throw UnfittedDomainError("(predicate, object) not in fitted statistics: " +
                                          predicate.lexical + " " + object.token());
            return it->second;
        }
        case SamplerStrategy::PageRank: {
            auto it = vertex_stats_.find(object);
            if (it == vertex_stats_.end())
                throw UnfittedDomainError("vertex not in fitted PageRank scores: " +
                                          object.token());
            return it->second;
        }
    }
    throw UnfittedDomainError("unknown strategy");
}

double SamplerModel::weigh(const Term& subject, const Term& predicate, const Term& object) const {
    if (!fitted_) throw UnfittedDomainError("sampler not fitted");
    if (empty_domain_) throw UnfittedDomainError("sampler fitted on an empty graph");
    double w = raw_weight(subject, predicate, object);
    return inverse_ ? 1.0 / (1.0 + w) : w;
}

std::optional<Hop> SamplerModel::sample_hop(const HopSource& source, const Term& vertex,
                                            Direction dir, RandomSource& rng) const {
    if (!fitted_) throw UnfittedDomainError("sampler not fitted");
    if (empty_domain_) throw UnfittedDomainError("sampler fitted on an empty graph");
    std::vector<Hop> candidates = source.hops(vertex, dir);
    if (candidates.empty()) return std::nullopt;

    std::vector<double> weights;
    weights.reserve(candidates.size());
    for (const Hop& h : candidates) {
        if (dir == Direction::Forward)
            weights.push_back(weigh(vertex, h.predicate, h.neighbor));
        else
            weights.push_back(weigh(h.neighbor, h.predicate, vertex));
    }
    return candidates[weighted_pick(weights, rng)];
}

}  // namespace kgstroll
