#include "kgstroll/walker.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <unordered_set>

#include "kgstroll/errors.hpp"

namespace kgstroll {

namespace {

std::string walk_key(const std::vector<std::string>& tokens) {
    std::string key;
    for (const auto& t : tokens) {
        key += t;
        key.push_back('\x1e');
    }
    return key;
}

void dedup_in_place(std::vector<Walk>& walks) {
    std::unordered_set<std::string> seen;
    std::vector<Walk> out;
    out.reserve(walks.size());
    for (auto& w : walks)
        if (seen.insert(walk_key(w.tokens)).second) out.push_back(std::move(w));
    walks = std::move(out);
}

// Every segment of depth 0..max_depth from `start`, as flat (predicate,
// vertex) token pair lists. DFS in hop insertion order, prefixes included.
std::vector<std::vector<std::string>> enumerate_segments(const HopSource& source,
                                                         const Term& start, Direction dir,
                                                         size_t max_depth) {
    std::vector<std::vector<std::string>> segments;
    std::vector<std::string> current;

    struct Frame {
        Term vertex;
        std::vector<Hop> hops;
        size_t next = 0;
    };
    std::vector<Frame> stack;
    segments.push_back(current);  // depth-0 segment
    if (max_depth == 0) return segments;
    stack.push_back({start, source.hops(start, dir), 0});

    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.next >= top.hops.size()) {
            stack.pop_back();
            if (!current.empty()) {
                current.pop_back();
                current.pop_back();
            }
            continue;
        }
        const Hop& h = top.hops[top.next++];
        current.push_back(h.predicate.token());
        current.push_back(h.neighbor.token());
        segments.push_back(current);
        if (stack.size() < max_depth) {
            stack.push_back({h.neighbor, source.hops(h.neighbor, dir), 0});
        } else {
            current.pop_back();
            current.pop_back();
        }
    }
    return segments;
}

std::vector<std::string> forward_tokens(const std::string& root,
                                        const std::vector<std::string>& segment) {
    std::vector<std::string> tokens;
    tokens.reserve(1 + segment.size());
    tokens.push_back(root);
    tokens.insert(tokens.end(), segment.begin(), segment.end());
    return tokens;
}

// Reverse segments are traversed root-outward; the walk needs them
// farthest-first, ending just before the root.
std::vector<std::string> reverse_prefix(const std::vector<std::string>& segment) {
    std::vector<std::string> tokens;
    tokens.reserve(segment.size());
    for (size_t pair = segment.size() / 2; pair-- > 0;) {
        tokens.push_back(segment[2 * pair + 1]);  // vertex
        tokens.push_back(segment[2 * pair]);      // predicate
    }
    return tokens;
}

std::vector<Walk> exhaustive_walks(const HopSource& source, const Term& seed,
                                   const WalkerConfig& cfg) {
    std::string root = seed.token();
    auto forward = enumerate_segments(source, seed, Direction::Forward, cfg.max_depth);
    std::vector<Walk> walks;
    if (!cfg.with_reverse) {
        walks.reserve(forward.size());
        for (const auto& seg : forward) walks.push_back({root, forward_tokens(root, seg)});
    } else {
        auto reverse = enumerate_segments(source, seed, Direction::Reverse, cfg.max_depth);
        walks.reserve(forward.size() * reverse.size());
        for (const auto& rseg : reverse) {
            auto prefix = reverse_prefix(rseg);
            for (const auto& fseg : forward) {
                std::vector<std::string> tokens = prefix;
                tokens.push_back(root);
                tokens.insert(tokens.end(), fseg.begin(), fseg.end());
                walks.push_back({root, std::move(tokens)});
            }
        }
    }
    dedup_in_place(walks);
    return walks;
}

// One guided descent of up to max_depth hops; truncates at dead ends.
std::vector<std::string> sampled_segment(const HopSource& source, const Term& start,
                                         Direction dir, size_t max_depth,
                                         const SamplerModel* sampler, RandomSource& rng) {
    std::vector<std::string> segment;
    Term vertex = start;
    for (size_t step = 0; step < max_depth; ++step) {
        std::optional<Hop> hop;
        if (sampler) {
            hop = sampler->sample_hop(source, vertex, dir, rng);
        } else {
            std::vector<Hop> hops = source.hops(vertex, dir);
            if (!hops.empty()) hop = hops[size_t(rng.next_below(hops.size()))];
        }
        if (!hop) break;
        segment.push_back(hop->predicate.token());
        segment.push_back(hop->neighbor.token());
        vertex = hop->neighbor;
    }
    return segment;
}

std::vector<Walk> sampled_walks(const HopSource& source, const Term& seed,
                                const WalkerConfig& cfg, const SamplerModel* sampler,
                                RandomSource& rng) {
    std::string root = seed.token();
    std::vector<Walk> walks;
    walks.reserve(*cfg.max_walks);
    for (size_t i = 0; i < *cfg.max_walks; ++i) {
        std::vector<std::string> tokens;
        if (cfg.with_reverse) {
            auto rseg = sampled_segment(source, seed, Direction::Reverse, cfg.max_depth, sampler, rng);
            tokens = reverse_prefix(rseg);
        }
        tokens.push_back(root);
        auto fseg = sampled_segment(source, seed, Direction::Forward, cfg.max_depth, sampler, rng);
        tokens.insert(tokens.end(), fseg.begin(), fseg.end());
        walks.push_back({root, std::move(tokens)});
    }
    dedup_in_place(walks);
    return walks;
}

std::vector<Walk> base_walks_for_seed(const HopSource& source, const Term& seed,
                                      const WalkerConfig& cfg, const SamplerModel* sampler,
                                      uint64_t stream_id) {
    if (!cfg.max_walks) return exhaustive_walks(source, seed, cfg);
    RandomSource rng(cfg.seed, stream_id);
    return sampled_walks(source, seed, cfg, sampler, rng);
}

void relabel_with_wl(std::vector<Walk>& walks,
                     const std::unordered_map<std::string, std::vector<std::string>>& labels,
                     size_t iterations) {
    std::vector<Walk> out;
    out.reserve(walks.size() * (iterations + 1));
    for (const Walk& w : walks) {
        out.push_back(w);  // iteration 0: plain tokens
        for (size_t iter = 1; iter <= iterations; ++iter) {
            Walk copy = w;
            for (size_t pos = 0; pos < copy.tokens.size(); pos += 2) {
                std::string& tok = copy.tokens[pos];
                if (tok == w.root) continue;
                auto it = labels.find(tok);
                if (it != labels.end()) tok = it->second[iter];
            }
            out.push_back(std::move(copy));
        }
    }
    walks = std::move(out);
}

}  // namespace

std::unordered_map<std::string, std::vector<std::string>> wl_labels(const KnowledgeGraph& g,
                                                                    size_t iterations) {
    const size_t n = g.vertex_count();
    std::vector<std::string> current(n, "");  // iteration 0: uniform label
    std::unordered_map<std::string, std::vector<std::string>> out;
    out.reserve(n);
    for (uint32_t v = 0; v < n; ++v) out[g.vertex_term(v).token()] = {current[v]};

    for (size_t iter = 1; iter <= iterations; ++iter) {
        std::vector<std::string> next(n);
        for (uint32_t v = 0; v < n; ++v) {
            std::vector<std::string> parts;
            auto hops = g.forward_of(v);
            parts.reserve(hops.size());
            for (const InternedHop& h : hops)
                parts.push_back("(" + g.predicate_iri(h.predicate) + "," + current[h.neighbor] + ")");
            std::sort(parts.begin(), parts.end());
            std::string canonical = current[v] + "|";
            for (const auto& p : parts) canonical += p;
            char buf[17];
            std::snprintf(buf, sizeof buf, "%016llx",
                          static_cast<unsigned long long>(fnv1a64(canonical)));
            next[v] = buf;
        }
        for (uint32_t v = 0; v < n; ++v) out[g.vertex_term(v).token()].push_back(next[v]);
        current = std::move(next);
    }
    return out;
}

ExtractionReport extract(const HopSource& source, const Entities& seeds, const WalkerConfig& cfg,
                         const SamplerModel* sampler, size_t workers) {
    if (cfg.strategy == WalkStrategy::WL && cfg.wl_iterations < 1)
        throw ConfigError("WL walker requires iterations >= 1");
    if (cfg.strategy == WalkStrategy::HALK &&
        !(cfg.halk_threshold > 0.0 && cfg.halk_threshold < 1.0))
        throw ConfigError("HALK threshold must lie in (0, 1)");

    std::unordered_map<std::string, std::vector<std::string>> labels;
    if (cfg.strategy == WalkStrategy::WL) {
        const auto* local = dynamic_cast<const KnowledgeGraph*>(&source);
        if (!local) throw ConfigError("WL walker requires a materialized local graph");
        labels = wl_labels(*local, cfg.wl_iterations);
    }

    const size_t n = seeds.seeds.size();
    std::vector<std::vector<Walk>> per_seed(n);
    std::vector<char> missing(n, 0);

    auto run_seed = [&](size_t i) {
        const Term& seed = seeds.seeds[i];
        if (!source.has_vertex(seed)) {
            missing[i] = 1;
            return;
        }
        per_seed[i] = base_walks_for_seed(source, seed, cfg, sampler, /*stream_id=*/i);
    };

    size_t pool = std::max<size_t>(1, std::min(workers, n == 0 ? 1 : n));
    if (pool == 1) {
        for (size_t i = 0; i < n; ++i) run_seed(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (size_t t = 0; t < pool; ++t)
            threads.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) run_seed(i);
            });
        for (auto& t : threads) t.join();
    }

    ExtractionReport report;
    for (size_t i = 0; i < n; ++i) {
        if (missing[i]) {
            report.missing_seeds.push_back(seeds.seeds[i]);
            continue;
        }
        for (auto& w : per_seed[i]) report.walks.push_back(std::move(w));
    }

    if (cfg.strategy == WalkStrategy::WL)
        relabel_with_wl(report.walks, labels, cfg.wl_iterations);
    else if (cfg.strategy == WalkStrategy::HALK)
        report.walks = extract_halk(report.walks, cfg.halk_threshold);
    return report;
}

std::vector<Walk> extract_halk(const std::vector<Walk>& walks, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ConfigError("HALK threshold must lie in (0, 1)");
    if (walks.empty()) return {};

    // Occurrences = number of walks containing the token at an entity slot.
    std::unordered_map<std::string, size_t> occurrences;
    for (const Walk& w : walks) {
        std::unordered_set<std::string> in_walk;
        for (size_t pos = 0; pos < w.tokens.size(); pos += 2) in_walk.insert(w.tokens[pos]);
        for (const auto& tok : in_walk) ++occurrences[tok];
    }
    const double total = double(walks.size());

    std::vector<Walk> out;
    out.reserve(walks.size());
    std::unordered_set<std::string> singleton_tokens;
    for (const Walk& w : walks) {
        // Kept entities, then stitch each one in with its preceding predicate.
        std::vector<size_t> kept;
        for (size_t pos = 0; pos < w.tokens.size(); pos += 2) {
            const std::string& tok = w.tokens[pos];
            if (tok == w.root || double(occurrences[tok]) / total >= threshold)
                kept.push_back(pos);
        }
        Walk reduced{w.root, {}};
        for (size_t k = 0; k < kept.size(); ++k) {
            if (k > 0) reduced.tokens.push_back(w.tokens[kept[k] - 1]);
            reduced.tokens.push_back(w.tokens[kept[k]]);
        }
        bool was_reduced = reduced.tokens.size() != w.tokens.size();
        if (reduced.tokens.size() == 1 && was_reduced &&
            singleton_tokens.contains(reduced.tokens[0]))
            continue;  // reduced to a single token duplicate of another walk
        if (reduced.tokens.size() == 1) singleton_tokens.insert(reduced.tokens[0]);
        out.push_back(std::move(reduced));
    }
    return out;
}

}  // namespace kgstroll
