#include "kgstroll/embedder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "kgstroll/errors.hpp"
#include "kgstroll/rng.hpp"

namespace kgstroll {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

double dot(const double* a, const double* b, size_t dim) {
    double s = 0.0;
    for (size_t i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
}

// Loss and gradients of one negative-sampling pair
//   L = -log s(u_pos . v) - sum_i log s(-u_neg_i . v)
// writing dL/dv, dL/du_pos and dL/du_neg_i into the caller's buffers. This is
// the single formula path: training applies these gradients directly and the
// finite-difference check exercises the same function.
double pair_core(const double* v, size_t dim, const double* u_pos,
                 const double* const* u_negs, size_t k, double* grad_v, double* grad_pos,
                 double* const* grad_negs) {
    double s_pos = dot(u_pos, v, dim);
    double g_pos = sigmoid(s_pos) - 1.0;  // dL/d(score)
    double loss = -log_sigmoid(s_pos);
    for (size_t i = 0; i < dim; ++i) {
        grad_v[i] = g_pos * u_pos[i];
        grad_pos[i] = g_pos * v[i];
    }
    for (size_t n = 0; n < k; ++n) {
        double s_neg = dot(u_negs[n], v, dim);
        double g_neg = sigmoid(s_neg);
        loss -= log_sigmoid(-s_neg);
        for (size_t i = 0; i < dim; ++i) {
            grad_v[i] += g_neg * u_negs[n][i];
            grad_negs[n][i] = g_neg * v[i];
        }
    }
    return loss;
}

}  // namespace

namespace sgns {

PairGradients skipgram_pair_gradients(std::span<const double> center,
                                      std::span<const double> positive,
                                      const std::vector<std::vector<double>>& negatives) {
    const size_t dim = center.size();
    PairGradients g;
    g.center.assign(dim, 0.0);
    g.positive.assign(dim, 0.0);
    g.negatives.assign(negatives.size(), std::vector<double>(dim, 0.0));
    std::vector<const double*> neg_ptrs;
    std::vector<double*> grad_ptrs;
    for (size_t n = 0; n < negatives.size(); ++n) {
        neg_ptrs.push_back(negatives[n].data());
        grad_ptrs.push_back(g.negatives[n].data());
    }
    g.loss = pair_core(center.data(), dim, positive.data(), neg_ptrs.data(), negatives.size(),
                       g.center.data(), g.positive.data(), grad_ptrs.data());
    return g;
}

double skipgram_pair_loss(std::span<const double> center, std::span<const double> positive,
                          const std::vector<std::vector<double>>& negatives) {
    double loss = -log_sigmoid(dot(positive.data(), center.data(), center.size()));
    for (const auto& n : negatives)
        loss -= log_sigmoid(-dot(n.data(), center.data(), center.size()));
    return loss;
}

CbowGradients cbow_pair_gradients(const std::vector<std::vector<double>>& contexts,
                                  std::span<const double> positive,
                                  const std::vector<std::vector<double>>& negatives) {
    const size_t dim = positive.size();
    const size_t m = contexts.size();
    std::vector<double> h(dim, 0.0);
    for (const auto& c : contexts)
        for (size_t i = 0; i < dim; ++i) h[i] += c[i];
    for (size_t i = 0; i < dim; ++i) h[i] /= double(m);

    auto inner = skipgram_pair_gradients(h, positive, negatives);
    CbowGradients g;
    g.loss = inner.loss;
    g.positive = std::move(inner.positive);
    g.negatives = std::move(inner.negatives);
    g.contexts.assign(m, std::vector<double>(dim));
    for (size_t c = 0; c < m; ++c)
        for (size_t i = 0; i < dim; ++i) g.contexts[c][i] = inner.center[i] / double(m);
    return g;
}

double cbow_pair_loss(const std::vector<std::vector<double>>& contexts,
                      std::span<const double> positive,
                      const std::vector<std::vector<double>>& negatives) {
    const size_t dim = positive.size();
    std::vector<double> h(dim, 0.0);
    for (const auto& c : contexts)
        for (size_t i = 0; i < dim; ++i) h[i] += c[i];
    for (size_t i = 0; i < dim; ++i) h[i] /= double(contexts.size());
    return skipgram_pair_loss(h, positive, negatives);
}

}  // namespace sgns

Corpus Corpus::build(const std::vector<Walk>& walks, int min_count) {
    Corpus c;
    std::unordered_map<std::string, uint64_t> counts;
    for (const Walk& w : walks)
        for (const auto& tok : w.tokens) ++counts[tok];

    std::vector<VocabEntry> entries;
    entries.reserve(counts.size());
    for (auto& [tok, cnt] : counts)
        if (cnt >= uint64_t(std::max(1, min_count))) entries.push_back({tok, cnt});
    if (entries.empty())
        throw ConfigError("vocabulary is empty after min_count filtering");

    std::sort(entries.begin(), entries.end(), [](const VocabEntry& a, const VocabEntry& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.token < b.token;
    });
    c.vocab_ = std::move(entries);
    for (uint32_t i = 0; i < c.vocab_.size(); ++i) c.index_[c.vocab_[i].token] = i;

    c.sentences_.reserve(walks.size());
    for (const Walk& w : walks) {
        std::vector<uint32_t> sentence;
        sentence.reserve(w.tokens.size());
        for (const auto& tok : w.tokens) {
            auto it = c.index_.find(tok);
            if (it != c.index_.end()) sentence.push_back(it->second);
        }
        c.total_tokens_ += sentence.size();
        c.sentences_.push_back(std::move(sentence));
    }
    return c;
}

int64_t Corpus::index_of(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? -1 : int64_t(it->second);
}

std::vector<double> unigram_power_cdf(const Corpus& corpus, double power) {
    std::vector<double> cdf(corpus.vocab().size());
    double acc = 0.0;
    for (size_t i = 0; i < cdf.size(); ++i) {
        acc += std::pow(double(corpus.vocab()[i].count), power);
        cdf[i] = acc;
    }
    return cdf;
}

uint32_t draw_from_cdf(std::span<const double> cdf, RandomSource& rng) {
    double r = rng.next_double() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    size_t idx = size_t(it - cdf.begin());
    if (idx >= cdf.size()) idx = cdf.size() - 1;
    return uint32_t(idx);
}

bool EmbeddingModel::contains(const std::string& token) const {
    return index_.contains(token);
}

std::span<const double> EmbeddingModel::get_vector(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) throw UnknownTokenError("token not in vocabulary: " + token);
    return std::span<const double>(input_.data() + size_t(it->second) * dimension_, dimension_);
}

double EmbeddingModel::cosine(const std::string& a, const std::string& b) const {
    auto va = get_vector(a);
    auto vb = get_vector(b);
    double num = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < dimension_; ++i) {
        num += va[i] * vb[i];
        na += va[i] * va[i];
        nb += vb[i] * vb[i];
    }
    double denom = std::sqrt(na) * std::sqrt(nb);
    return denom == 0.0 ? 0.0 : num / denom;
}

void EmbeddingModel::write_word2vec_text(std::ostream& out) const {
    out << vocab_.size() << " " << dimension_ << "\n";
    char buf[64];
    for (size_t v = 0; v < vocab_.size(); ++v) {
        out << vocab_[v].token;
        for (size_t i = 0; i < dimension_; ++i) {
            std::snprintf(buf, sizeof buf, " %.8g", input_[v * dimension_ + i]);
            out << buf;
        }
        out << "\n";
    }
}

namespace {

struct TrainContext {
    const Corpus& corpus;
    const EmbedderHyperparams& h;
    size_t dim;
    std::vector<double> keep_prob;       // subsampling keep probability per token
    std::vector<double> negative_cdf;    // cumulative unigram^{3/4}
    double* input;
    double* output;
    std::atomic<uint64_t> pairs_done{0};
    uint64_t pairs_total = 0;
    double lr0 = 0.0;
};

// Applies frequent-token subsampling; draw order is part of the schedule and
// must match between the counting pre-pass and training.
std::vector<uint32_t> subsample_sentence(const TrainContext& ctx,
                                         const std::vector<uint32_t>& sentence,
                                         RandomSource& schedule) {
    std::vector<uint32_t> reduced;
    reduced.reserve(sentence.size());
    for (uint32_t tok : sentence) {
        double p = ctx.keep_prob[tok];
        if (p >= 1.0 || schedule.next_double() < p)
            reduced.push_back(tok);
    }
    return reduced;
}

uint32_t draw_negative(const TrainContext& ctx, RandomSource& rng) {
    return draw_from_cdf(ctx.negative_cdf, rng);
}

// Pairs the schedule stream will produce for one sentence shard pass.
uint64_t count_pairs(const TrainContext& ctx, size_t begin, size_t end, RandomSource& schedule) {
    uint64_t pairs = 0;
    const int window = ctx.h.window;
    for (size_t s = begin; s < end; ++s) {
        auto reduced = subsample_sentence(ctx, ctx.corpus.sentences()[s], schedule);
        const size_t len = reduced.size();
        for (size_t t = 0; t < len; ++t) {
            size_t b = 1 + size_t(schedule.next_below(uint64_t(window)));
            size_t lo = t >= b ? t - b : 0;
            size_t hi = std::min(len, t + b + 1);
            size_t contexts = (hi - lo) - 1;
            if (ctx.h.mode == EmbeddingMode::SkipGram)
                pairs += contexts;
            else
                pairs += contexts > 0 ? 1 : 0;
        }
    }
    return pairs;
}

struct Scratch {
    std::vector<double> grad_v;
    std::vector<double> grad_pos;
    std::vector<std::vector<double>> grad_negs;
    std::vector<const double*> neg_ptrs;
    std::vector<double*> grad_neg_ptrs;
    std::vector<double> hidden;
    std::vector<uint32_t> negs;

    explicit Scratch(size_t dim, int k)
        : grad_v(dim), grad_pos(dim), grad_negs(size_t(k), std::vector<double>(dim)),
          hidden(dim) {
        for (auto& g : grad_negs) grad_neg_ptrs.push_back(g.data());
        neg_ptrs.resize(size_t(k));
        negs.reserve(size_t(k));
    }
};

double current_lr(TrainContext& ctx) {
    uint64_t done = ctx.pairs_done.fetch_add(1, std::memory_order_relaxed);
    double frac = ctx.pairs_total == 0 ? 0.0 : double(done) / double(ctx.pairs_total);
    if (frac > 1.0) frac = 1.0;
    double final_lr = ctx.lr0 / 10000.0;
    return ctx.lr0 - (ctx.lr0 - final_lr) * frac;
}

// One SkipGram parameter update: center input vector against the context
// token's output vector plus drawn negatives.
double update_pair(TrainContext& ctx, Scratch& scr, double* v_center, uint32_t target,
                   RandomSource& negatives) {
    const size_t dim = ctx.dim;
    scr.negs.clear();
    for (int n = 0; n < ctx.h.negatives; ++n) {
        uint32_t neg = draw_negative(ctx, negatives);
        if (neg == target) continue;  // resampling the positive adds no signal
        scr.negs.push_back(neg);
    }
    const size_t k = scr.negs.size();
    for (size_t n = 0; n < k; ++n) {
        scr.neg_ptrs[n] = ctx.output + size_t(scr.negs[n]) * dim;
    }
    double* u_pos = ctx.output + size_t(target) * dim;
    double loss = pair_core(v_center, dim, u_pos, scr.neg_ptrs.data(), k, scr.grad_v.data(),
                            scr.grad_pos.data(), scr.grad_neg_ptrs.data());

    double lr = current_lr(ctx);
    for (size_t i = 0; i < dim; ++i) u_pos[i] -= lr * scr.grad_pos[i];
    for (size_t n = 0; n < k; ++n) {
        double* u_neg = ctx.output + size_t(scr.negs[n]) * dim;
        for (size_t i = 0; i < dim; ++i) u_neg[i] -= lr * scr.grad_negs[n][i];
    }
    for (size_t i = 0; i < dim; ++i) v_center[i] -= lr * scr.grad_v[i];
    return loss;
}

double train_shard_epoch(TrainContext& ctx, size_t begin, size_t end, RandomSource& schedule,
                         RandomSource& negatives, Scratch& scr, uint64_t& pair_count) {
    const size_t dim = ctx.dim;
    double loss_sum = 0.0;
    for (size_t s = begin; s < end; ++s) {
        auto reduced = subsample_sentence(ctx, ctx.corpus.sentences()[s], schedule);
        const size_t len = reduced.size();
        for (size_t t = 0; t < len; ++t) {
            size_t b = 1 + size_t(schedule.next_below(uint64_t(ctx.h.window)));
            size_t lo = t >= b ? t - b : 0;
            size_t hi = std::min(len, t + b + 1);
            if (ctx.h.mode == EmbeddingMode::SkipGram) {
                uint32_t center = reduced[t];
                double* v = ctx.input + size_t(center) * dim;
                for (size_t c = lo; c < hi; ++c) {
                    if (c == t) continue;
                    loss_sum += update_pair(ctx, scr, v, reduced[c], negatives);
                    ++pair_count;
                }
            } else {
                size_t m = (hi - lo) - 1;
                if (m == 0) continue;
                std::fill(scr.hidden.begin(), scr.hidden.end(), 0.0);
                for (size_t c = lo; c < hi; ++c) {
                    if (c == t) continue;
                    const double* vc = ctx.input + size_t(reduced[c]) * dim;
                    for (size_t i = 0; i < dim; ++i) scr.hidden[i] += vc[i];
                }
                for (size_t i = 0; i < dim; ++i) scr.hidden[i] /= double(m);

                // Gradients flow to every context vector, split evenly.
                scr.negs.clear();
                for (int n = 0; n < ctx.h.negatives; ++n) {
                    uint32_t neg = draw_negative(ctx, negatives);
                    if (neg == reduced[t]) continue;
                    scr.negs.push_back(neg);
                }
                const size_t k = scr.negs.size();
                for (size_t n = 0; n < k; ++n)
                    scr.neg_ptrs[n] = ctx.output + size_t(scr.negs[n]) * dim;
                double* u_pos = ctx.output + size_t(reduced[t]) * dim;
                double loss = pair_core(scr.hidden.data(), dim, u_pos, scr.neg_ptrs.data(), k,
                                        scr.grad_v.data(), scr.grad_pos.data(),
                                        scr.grad_neg_ptrs.data());
                double lr = current_lr(ctx);
                for (size_t i = 0; i < dim; ++i) u_pos[i] -= lr * scr.grad_pos[i];
                for (size_t n = 0; n < k; ++n) {
                    double* u_neg = ctx.output + size_t(scr.negs[n]) * dim;
                    for (size_t i = 0; i < dim; ++i) u_neg[i] -= lr * scr.grad_negs[n][i];
                }
                for (size_t c = lo; c < hi; ++c) {
                    if (c == t) continue;
                    double* vc = ctx.input + size_t(reduced[c]) * dim;
                    for (size_t i = 0; i < dim; ++i)
                        vc[i] -= lr * scr.grad_v[i] / double(m);
                }
                loss_sum += loss;
                ++pair_count;
            }
        }
    }
    return loss_sum;
}

}  // namespace

EmbeddingModel train(const Corpus& corpus, const EmbedderHyperparams& h,
                     const std::function<void(int, double)>& on_epoch) {
    const size_t vocab_size = corpus.vocab().size();
    if (vocab_size < 2) throw ConfigError("training requires a vocabulary of at least 2 tokens");
    if (h.dimension < 1) throw ConfigError("dimension must be >= 1");
    if (h.window < 1) throw ConfigError("window must be >= 1");
    if (h.negatives < 1) throw ConfigError("negatives must be >= 1");
    if (h.epochs < 1) throw ConfigError("epochs must be >= 1");

    EmbeddingModel model;
    model.dimension_ = h.dimension;
    model.vocab_ = corpus.vocab();
    for (uint32_t i = 0; i < vocab_size; ++i) model.index_[model.vocab_[i].token] = i;
    model.input_.resize(vocab_size * h.dimension);
    model.output_.assign(vocab_size * h.dimension, 0.0);

    RandomSource init_rng(h.seed, 0);
    for (double& x : model.input_) x = (init_rng.next_double() - 0.5) / double(h.dimension);

    TrainContext ctx{corpus, h, h.dimension, {}, {}, model.input_.data(), model.output_.data()};
    ctx.lr0 = h.effective_lr();

    ctx.keep_prob.resize(vocab_size, 1.0);
    if (h.subsample_t > 0.0 && corpus.total_tokens() > 0) {
        for (size_t i = 0; i < vocab_size; ++i) {
            double f = double(corpus.vocab()[i].count) / double(corpus.total_tokens());
            double p = (std::sqrt(f / h.subsample_t) + 1.0) * h.subsample_t / f;
            ctx.keep_prob[i] = p;
        }
    }

    ctx.negative_cdf = unigram_power_cdf(corpus);

    const size_t n_sentences = corpus.sentences().size();
    const size_t workers = std::max<size_t>(1, std::min(h.workers, n_sentences ? n_sentences : 1));
    auto shard_begin = [&](size_t w) { return w * n_sentences / workers; };
    auto shard_end = [&](size_t w) { return (w + 1) * n_sentences / workers; };

    // Exact pair count for the LR schedule: replay the schedule stream for
    // every epoch before training touches it.
    uint64_t total_pairs = 0;
    for (size_t w = 0; w < workers; ++w) {
        RandomSource probe(h.seed, 1000 + w);
        for (int e = 0; e < h.epochs; ++e)
            total_pairs += count_pairs(ctx, shard_begin(w), shard_end(w), probe);
    }
    ctx.pairs_total = total_pairs;

    std::vector<RandomSource> schedule_streams;
    std::vector<RandomSource> negative_streams;
    for (size_t w = 0; w < workers; ++w) {
        schedule_streams.emplace_back(h.seed, 1000 + w);
        negative_streams.emplace_back(h.seed, 2000 + w);
    }

    std::vector<Scratch> scratch;
    scratch.reserve(workers);
    for (size_t w = 0; w < workers; ++w) scratch.emplace_back(h.dimension, h.negatives);

    for (int epoch = 0; epoch < h.epochs; ++epoch) {
        std::vector<double> loss_parts(workers, 0.0);
        std::vector<uint64_t> pair_parts(workers, 0);
        if (workers == 1) {
            loss_parts[0] = train_shard_epoch(ctx, 0, n_sentences, schedule_streams[0],
                                              negative_streams[0], scratch[0], pair_parts[0]);
        } else {
            std::vector<std::thread> threads;
            for (size_t w = 0; w < workers; ++w)
                threads.emplace_back([&, w] {
                    loss_parts[w] =
                        train_shard_epoch(ctx, shard_begin(w), shard_end(w), schedule_streams[w],
                                          negative_streams[w], scratch[w], pair_parts[w]);
                });
            for (auto& t : threads) t.join();
        }
        double loss_sum = 0.0;
        uint64_t pairs = 0;
        for (size_t w = 0; w < workers; ++w) {
            loss_sum += loss_parts[w];
            pairs += pair_parts[w];
        }
        double mean = pairs == 0 ? 0.0 : loss_sum / double(pairs);
        if (!std::isfinite(mean))
            throw TrainingDivergedError(
                "non-finite loss in epoch " + std::to_string(epoch + 1), epoch + 1);
        model.epoch_losses_.push_back(mean);
        if (on_epoch) on_epoch(epoch + 1, mean);
    }
    return model;
}

}  // namespace kgstroll
