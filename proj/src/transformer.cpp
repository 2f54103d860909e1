#include "kgstroll/transformer.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "kgstroll/errors.hpp"

namespace kgstroll {

FitResult fit_transform(const HopSource& source, const Entities& seeds,
                        const PipelineConfig& cfg) {
    if (cfg.walkers.empty()) throw ConfigError("pipeline needs at least one walker strategy");
    if (seeds.seeds.empty()) throw ConfigError("no seed entities given");
    for (const LiteralPath& p : cfg.literal_paths) {
        if (p.predicates.empty()) throw ConfigError("literal path must name at least one predicate");
        for (const auto& pred : p.predicates)
            if (source.skip_predicates().contains(pred))
                throw ConfigError("literal path predicate is skipped: " + pred);
    }

    const auto* local = dynamic_cast<const KnowledgeGraph*>(&source);
    auto log = [&](const std::string& line) {
        if (cfg.log) cfg.log(line);
    };

    // Fit samplers against the same graph walks will traverse. Uniform
    // sampling is the walker's default descent; normalizing it to "no
    // sampler" keeps local and remote runs on identical draw sequences.
    std::vector<std::optional<SamplerModel>> samplers(cfg.walkers.size());
    for (size_t i = 0; i < cfg.walkers.size(); ++i) {
        const auto& spec = cfg.walkers[i].sampler;
        if (!spec || spec->strategy == SamplerStrategy::Uniform) continue;
        if (!local)
            throw ConfigError("weight-based samplers need a materialized local graph");
        SamplerModel m(spec->strategy, spec->inverse, spec->alpha);
        m.fit(*local);
        samplers[i] = std::move(m);
        log("event=sampler_fitted strategy=" + std::to_string(i) + " kind=" +
            sampler_strategy_name(spec->strategy));
    }

    FitResult result;
    std::unordered_set<std::string> distinct_tokens;
    std::vector<Term> missing;

    for (size_t i = 0; i < cfg.walkers.size(); ++i) {
        const SamplerModel* sampler = samplers[i] ? &*samplers[i] : nullptr;
        ExtractionReport report =
            extract(source, seeds, cfg.walkers[i].config, sampler, cfg.workers);
        if (i == 0) missing = report.missing_seeds;
        log("event=walks strategy=" + std::to_string(i) + " entities_done=" +
            std::to_string(seeds.seeds.size() - report.missing_seeds.size()) + " walks=" +
            std::to_string(report.walks.size()) + " missing_seeds=" +
            std::to_string(report.missing_seeds.size()));
        result.stats.walks_per_strategy.push_back(report.walks.size());
        for (auto& w : report.walks) {
            for (const auto& tok : w.tokens) distinct_tokens.insert(tok);
            result.corpus.push_back(std::move(w));
            result.corpus_strategy.push_back(i);
        }
    }
    result.stats.walks_total = result.corpus.size();
    result.stats.distinct_tokens = distinct_tokens.size();

    if (missing.size() == seeds.seeds.size())
        throw ConfigError("none of the seed entities is present in the graph");

    if (cfg.canonical_corpus_order) {
        std::vector<size_t> order(result.corpus.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return result.corpus[a].tokens < result.corpus[b].tokens;
        });
        std::vector<Walk> sorted_corpus;
        std::vector<size_t> sorted_strategy;
        sorted_corpus.reserve(order.size());
        sorted_strategy.reserve(order.size());
        for (size_t idx : order) {
            sorted_corpus.push_back(std::move(result.corpus[idx]));
            sorted_strategy.push_back(result.corpus_strategy[idx]);
        }
        result.corpus = std::move(sorted_corpus);
        result.corpus_strategy = std::move(sorted_strategy);
    }

    log("event=corpus walks_total=" + std::to_string(result.stats.walks_total) +
        " distinct_tokens=" + std::to_string(result.stats.distinct_tokens));

    Corpus corpus = Corpus::build(result.corpus, cfg.embedder.min_count);
    try {
        result.model = train(corpus, cfg.embedder, [&](int epoch, double loss) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "event=epoch epoch=%d loss=%.6f", epoch, loss);
            log(buf);
        });
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("embedder configuration error: ") + e.what());
    }

    std::unordered_set<Term, TermHash> missing_set(missing.begin(), missing.end());
    for (const Term& seed : seeds.seeds) {
        if (missing_set.contains(seed)) continue;
        const std::string tok = seed.token();
        if (!result.model.contains(tok)) {
            missing_set.insert(seed);
            continue;
        }
        auto vec = result.model.get_vector(tok);
        result.embeddings.emplace(seed, std::vector<double>(vec.begin(), vec.end()));
    }
    for (const Term& seed : seeds.seeds)
        if (missing_set.contains(seed)) result.missing.push_back(seed);

    if (!cfg.literal_paths.empty())
        result.literals = extract_literals(source, seeds, cfg.literal_paths);

    return result;
}

}  // namespace kgstroll
