#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgstroll/walker.hpp"

namespace kgstroll {

struct VocabEntry {
    std::string token;
    uint64_t count;
};

// Walk corpus prepared for training: sentences hold vocabulary indices with
// sub-min_count tokens already dropped; indices are dense and assigned by
// (count descending, token ascending) so runs are reproducible.
class Corpus {
public:
    static Corpus build(const std::vector<Walk>& walks, int min_count);

    const std::vector<VocabEntry>& vocab() const { return vocab_; }
    const std::vector<std::vector<uint32_t>>& sentences() const { return sentences_; }
    uint64_t total_tokens() const { return total_tokens_; }

    // Index of a token, or -1 when absent.
    int64_t index_of(const std::string& token) const;

private:
    std::vector<VocabEntry> vocab_;
    std::unordered_map<std::string, uint32_t> index_;
    std::vector<std::vector<uint32_t>> sentences_;
    uint64_t total_tokens_ = 0;
};

enum class EmbeddingMode { SkipGram, CBOW };

struct EmbedderHyperparams {
    EmbeddingMode mode = EmbeddingMode::SkipGram;
    size_t dimension = 100;
    int window = 5;
    int negatives = 5;
    int epochs = 10;
    double initial_lr = 0.0;  // 0 picks the per-mode default (0.025 SG, 0.05 CBOW)
    int min_count = 1;
    double subsample_t = 1e-3;
    uint64_t seed = 42;
    size_t workers = 1;

    double effective_lr() const {
        if (initial_lr > 0.0) return initial_lr;
        return mode == EmbeddingMode::SkipGram ? 0.025 : 0.05;
    }
};

class EmbeddingModel {
public:
    size_t dimension() const { return dimension_; }
    const std::vector<VocabEntry>& vocab() const { return vocab_; }
    const std::vector<double>& epoch_losses() const { return epoch_losses_; }

    bool contains(const std::string& token) const;
    // Input vector of `token`; throws UnknownTokenError when absent.
    std::span<const double> get_vector(const std::string& token) const;

    double cosine(const std::string& a, const std::string& b) const;

    // word2vec text format: "<vocab> <dim>" then one "token v1 .. vd" line
    // per token in vocabulary index order.
    void write_word2vec_text(std::ostream& out) const;

private:
    friend EmbeddingModel train(const Corpus&, const EmbedderHyperparams&,
                                const std::function<void(int, double)>&);

    size_t dimension_ = 0;
    std::vector<VocabEntry> vocab_;
    std::unordered_map<std::string, uint32_t> index_;
    std::vector<double> input_;   // |V| x dim
    std::vector<double> output_;  // |V| x dim
    std::vector<double> epoch_losses_;
};

// Negative-sampling Word2Vec over the corpus. Deterministic (bitwise) at one
// worker; more workers train lock-free on the shared matrices. `on_epoch`,
// when set, receives (1-based epoch, mean pair loss) after every epoch.
EmbeddingModel train(const Corpus& corpus, const EmbedderHyperparams& h,
                     const std::function<void(int, double)>& on_epoch = {});

// Cumulative unigram^power distribution over the vocabulary, and the inverse
// draw used for negative sampling.
std::vector<double> unigram_power_cdf(const Corpus& corpus, double power = 0.75);
uint32_t draw_from_cdf(std::span<const double> cdf, class RandomSource& rng);

// Pair-loss building blocks, shared with the training loop and exposed so the
// gradients can be checked against finite differences.
namespace sgns {

struct PairGradients {
    double loss = 0.0;
    std::vector<double> center;                  // d loss / d input vector
    std::vector<double> positive;                // d loss / d positive output vector
    std::vector<std::vector<double>> negatives;  // d loss / d each negative output vector
};

PairGradients skipgram_pair_gradients(std::span<const double> center,
                                      std::span<const double> positive,
                                      const std::vector<std::vector<double>>& negatives);

struct CbowGradients {
    double loss = 0.0;
    std::vector<std::vector<double>> contexts;   // d loss / d each context input vector
    std::vector<double> positive;                // d loss / d center output vector
    std::vector<std::vector<double>> negatives;
};

CbowGradients cbow_pair_gradients(const std::vector<std::vector<double>>& contexts,
                                  std::span<const double> positive,
                                  const std::vector<std::vector<double>>& negatives);

double skipgram_pair_loss(std::span<const double> center, std::span<const double> positive,
                          const std::vector<std::vector<double>>& negatives);
double cbow_pair_loss(const std::vector<std::vector<double>>& contexts,
                      std::span<const double> positive,
                      const std::vector<std::vector<double>>& negatives);

}  // namespace sgns

}  // namespace kgstroll
