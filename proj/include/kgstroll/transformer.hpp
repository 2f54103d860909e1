#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgstroll/embedder.hpp"
#include "kgstroll/graph.hpp"
#include "kgstroll/literals.hpp"
#include "kgstroll/sampler.hpp"
#include "kgstroll/walker.hpp"

namespace kgstroll {

struct SamplerSpec {
    SamplerStrategy strategy = SamplerStrategy::Uniform;
    bool inverse = false;
    double alpha = 0.85;
};

struct WalkerSpec {
    WalkerConfig config;
    std::optional<SamplerSpec> sampler;
};

struct PipelineConfig {
    std::vector<WalkerSpec> walkers;  // at least one; run in declared order
    EmbedderHyperparams embedder;
    std::vector<LiteralPath> literal_paths;
    // Sorts the concatenated corpus before training so multi-strategy runs
    // are reproducible under strategy permutation. Off by default to match
    // streaming behavior.
    bool canonical_corpus_order = false;
    size_t workers = 1;
    // Stage-progress sink; receives "key=value ..." records.
    std::function<void(const std::string&)> log;
};

struct CorpusStats {
    size_t walks_total = 0;
    std::vector<size_t> walks_per_strategy;
    size_t distinct_tokens = 0;
};

struct FitResult {
    std::unordered_map<Term, std::vector<double>, TermHash> embeddings;
    std::vector<Term> missing;  // seeds without a vertex or without a vector
    std::vector<std::vector<LiteralResult>> literals;  // seeds x paths
    CorpusStats stats;
    EmbeddingModel model;
    std::vector<Walk> corpus;           // concatenated, in training order
    std::vector<size_t> corpus_strategy;  // per walk, index of its strategy
};

// Runs the whole pipeline: fit samplers, extract walks per strategy,
// concatenate the corpora, train the embedder, extract literals. Weight-based
// samplers and WL walking need a materialized KnowledgeGraph; a remote source
// supports uniform strategies only.
FitResult fit_transform(const HopSource& source, const Entities& seeds,
                        const PipelineConfig& cfg);

}  // namespace kgstroll
