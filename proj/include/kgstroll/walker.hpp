#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgstroll/graph.hpp"
#include "kgstroll/sampler.hpp"

namespace kgstroll {

// Alternating entity/predicate token sequence rooted at a seed entity. With
// reverse walking the root may sit mid-sequence; it is identified by token.
struct Walk {
    std::string root;
    std::vector<std::string> tokens;

    bool operator==(const Walk&) const = default;
};

enum class WalkStrategy { Random, WL, HALK };

struct WalkerConfig {
    size_t max_depth = 2;                  // hops appended to the root
    std::optional<size_t> max_walks;       // absent = exhaustive
    bool with_reverse = false;
    WalkStrategy strategy = WalkStrategy::Random;
    size_t wl_iterations = 1;              // WL only, >= 1
    double halk_threshold = 0.001;         // HALK only, in (0,1)
    uint64_t seed = 42;
};

struct ExtractionReport {
    std::vector<Walk> walks;
    std::vector<Term> missing_seeds;  // seeds absent from the graph; run continues
};

// Extracts the walk corpus for `seeds` under `cfg`. Exhaustive mode (no
// max_walks) enumerates every distinct walk up to max_depth including all
// shorter prefixes; sampled mode draws max_walks guided descents per seed
// (uniform when `sampler` is null) and deduplicates per seed afterwards.
// Seeds are processed by a pool of `workers` threads and merged in seed
// order; per-seed RNG streams keep the output independent of pool width.
ExtractionReport extract(const HopSource& source, const Entities& seeds, const WalkerConfig& cfg,
                         const SamplerModel* sampler = nullptr, size_t workers = 1);

// Rare-hop filtering: drops non-root entity tokens whose walk frequency is
// below `threshold`, along with the predicate linking them in.
std::vector<Walk> extract_halk(const std::vector<Walk>& walks, double threshold);

// Weisfeiler-Lehman vertex labels for iterations 0..iterations. Iteration 0
// is the constant empty label; token → per-iteration label map covers every
// vertex. Exposed for the relabeling tests.
std::unordered_map<std::string, std::vector<std::string>> wl_labels(const KnowledgeGraph& g,
                                                                    size_t iterations);

}  // namespace kgstroll
