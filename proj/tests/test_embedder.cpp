#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kgstroll/embedder.hpp"
#include "kgstroll/errors.hpp"
#include "kgstroll/rng.hpp"
#include "testkit.hpp"

using namespace kgstroll;

namespace {

std::vector<Walk> toy_walks() {
    return {
        {"a", {"a", "p", "b"}},
        {"a", {"a", "p", "c"}},
        {"b", {"b", "p", "c"}},
    };
}

std::vector<double> random_vector(RandomSource& rng, size_t dim) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.next_double() * 2.0 - 1.0;
    return v;
}

}  // namespace

TEST_CASE("vocabulary counts every token") {
    auto c = Corpus::build(toy_walks(), 1);
    REQUIRE(c.vocab().size() == 4);  // a, b, c, p
    CHECK(c.index_of("p") == 0);     // most frequent first
    CHECK(c.total_tokens() == 9);
}

TEST_CASE("min_count filtering can empty the vocabulary") {
    std::vector<Walk> walks{{"a", {"a", "p", "b"}}};
    CHECK_THROWS_AS(Corpus::build(walks, 2), ConfigError);
}

TEST_CASE("index assignment is count-descending then lexicographic") {
    std::vector<Walk> walks{
        {"z", {"z", "p", "m"}},
        {"z", {"z", "p", "m"}},
        {"b", {"b", "q", "a"}},
    };
    auto c = Corpus::build(walks, 1);
    // counts: p=2, m=2, z=2, a=1, b=1, q=1
    CHECK(c.index_of("m") == 0);
    CHECK(c.index_of("p") == 1);
    CHECK(c.index_of("z") == 2);
    CHECK(c.index_of("a") == 3);
    CHECK(c.index_of("b") == 4);
    CHECK(c.index_of("q") == 5);
}

TEST_CASE("training reports one loss per epoch") {
    auto c = Corpus::build(toy_walks(), 1);
    EmbedderHyperparams h{.dimension = 16, .epochs = 10, .subsample_t = 0.0, .seed = 1};
    auto model = train(c, h);
    CHECK(model.epoch_losses().size() == 10);
    for (double l : model.epoch_losses()) CHECK(std::isfinite(l));
}

TEST_CASE("training a vocabulary of one token is a configuration error") {
    std::vector<Walk> walks{{"a", {"a"}}, {"a", {"a"}}};
    auto c = Corpus::build(walks, 1);
    CHECK_THROWS_AS(train(c, {.dimension = 8}), ConfigError);
}

TEST_CASE("skip-gram analytic gradients match central finite differences") {
    RandomSource rng(42, 0);
    const size_t dim = 8;
    const double eps = 1e-4;
    for (int trial = 0; trial < 20; ++trial) {
        auto center = random_vector(rng, dim);
        auto positive = random_vector(rng, dim);
        std::vector<std::vector<double>> negatives;
        for (size_t n = 0; n < 1 + rng.next_below(5); ++n)
            negatives.push_back(random_vector(rng, dim));

        auto grads = sgns::skipgram_pair_gradients(center, positive, negatives);
        CHECK(grads.loss ==
              doctest::Approx(testkit::oracle_skipgram_loss(center, positive, negatives))
                  .epsilon(1e-12));

        for (size_t i = 0; i < dim; ++i) {
            auto bump = [&](std::vector<double> v, double d) {
                v[i] += d;
                return v;
            };
            double fd_center = (testkit::oracle_skipgram_loss(bump(center, eps), positive, negatives) -
                                testkit::oracle_skipgram_loss(bump(center, -eps), positive, negatives)) /
                               (2 * eps);
            CHECK(std::fabs(fd_center - grads.center[i]) < 1e-5);

            double fd_pos = (testkit::oracle_skipgram_loss(center, bump(positive, eps), negatives) -
                             testkit::oracle_skipgram_loss(center, bump(positive, -eps), negatives)) /
                            (2 * eps);
            CHECK(std::fabs(fd_pos - grads.positive[i]) < 1e-5);
        }
        for (size_t n = 0; n < negatives.size(); ++n) {
            for (size_t i = 0; i < dim; ++i) {
                auto negs = negatives;
                negs[n][i] += eps;
                double hi = testkit::oracle_skipgram_loss(center, positive, negs);
                negs[n][i] -= 2 * eps;
                double lo = testkit::oracle_skipgram_loss(center, positive, negs);
                CHECK(std::fabs((hi - lo) / (2 * eps) - grads.negatives[n][i]) < 1e-5);
            }
        }
    }
}

TEST_CASE("CBOW analytic gradients match central finite differences") {
    RandomSource rng(7, 0);
    const size_t dim = 8;
    const double eps = 1e-4;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::vector<double>> contexts;
        for (size_t c = 0; c < 1 + rng.next_below(4); ++c)
            contexts.push_back(random_vector(rng, dim));
        auto positive = random_vector(rng, dim);
        std::vector<std::vector<double>> negatives;
        for (size_t n = 0; n < 1 + rng.next_below(4); ++n)
            negatives.push_back(random_vector(rng, dim));

        auto grads = sgns::cbow_pair_gradients(contexts, positive, negatives);
        CHECK(grads.loss ==
              doctest::Approx(testkit::oracle_cbow_loss(contexts, positive, negatives))
                  .epsilon(1e-12));

        for (size_t c = 0; c < contexts.size(); ++c) {
            for (size_t i = 0; i < dim; ++i) {
                auto ctxs = contexts;
                ctxs[c][i] += eps;
                double hi = testkit::oracle_cbow_loss(ctxs, positive, negatives);
                ctxs[c][i] -= 2 * eps;
                double lo = testkit::oracle_cbow_loss(ctxs, positive, negatives);
                CHECK(std::fabs((hi - lo) / (2 * eps) - grads.contexts[c][i]) < 1e-5);
            }
        }
    }
}

TEST_CASE("planted co-occurrence pair trains to high similarity") {
    auto walks = testkit::planted_pair_corpus(800, 5);
    auto c = Corpus::build(walks, 1);
    EmbedderHyperparams h{.dimension = 32, .window = 3, .epochs = 8, .subsample_t = 0.0, .seed = 11};
    auto model = train(c, h);

    RandomSource rng(21, 0);
    std::vector<double> random_cosines;
    const auto& vocab = model.vocab();
    for (int i = 0; i < 300; ++i) {
        const auto& a = vocab[rng.next_below(vocab.size())].token;
        const auto& b = vocab[rng.next_below(vocab.size())].token;
        if (a == b) continue;
        random_cosines.push_back(model.cosine(a, b));
    }
    std::sort(random_cosines.begin(), random_cosines.end());
    double p95 = random_cosines[size_t(0.95 * double(random_cosines.size()))];
    CHECK(model.cosine("x", "y") > p95);

    const auto& losses = model.epoch_losses();
    double first = (losses[0] + losses[1] + losses[2]) / 3.0;
    double last = (losses[losses.size() - 1] + losses[losses.size() - 2] +
                   losses[losses.size() - 3]) /
                  3.0;
    CHECK(last < first);
}

TEST_CASE("CBOW mode learns the topic clusters") {
    auto walks = testkit::planted_pair_corpus(800, 6);
    auto c = Corpus::build(walks, 1);
    EmbedderHyperparams h{.mode = EmbeddingMode::CBOW, .dimension = 32, .window = 3,
                          .epochs = 8, .subsample_t = 0.0, .seed = 11};
    auto model = train(c, h);

    // Same-cluster fillers share contexts and must end up closer than
    // cross-cluster pairs, and training must make progress.
    double same = 0.0, cross = 0.0;
    int pairs = 0;
    for (int k = 0; k < 10; ++k) {
        same += model.cosine("filler" + std::to_string(2 * k),
                             "filler" + std::to_string(2 * k + 1));
        cross += model.cosine("filler" + std::to_string(2 * k),
                              "filler" + std::to_string(2 * k + 3));
        ++pairs;
    }
    CHECK(same / pairs > cross / pairs + 0.2);
    CHECK(model.epoch_losses().back() < model.epoch_losses().front());
}

TEST_CASE("an absurd learning rate diverges and names the epoch") {
    auto walks = testkit::planted_pair_corpus(50, 4);
    auto c = Corpus::build(walks, 1);
    EmbedderHyperparams h{.dimension = 8, .epochs = 3, .initial_lr = 1e8,
                          .subsample_t = 0.0, .seed = 1};
    try {
        train(c, h);
        FAIL("expected TrainingDivergedError");
    } catch (const TrainingDivergedError& e) {
        CHECK(e.epoch() == 1);
    }
}

TEST_CASE("vector lookup") {
    auto c = Corpus::build(toy_walks(), 1);
    auto model = train(c, {.dimension = 12, .epochs = 2, .subsample_t = 0.0, .seed = 3});
    CHECK(model.get_vector("a").size() == 12);
    CHECK_THROWS_AS(model.get_vector("nope"), UnknownTokenError);

    auto va = model.get_vector("a");
    auto vb = model.get_vector("b");
    bool differ = false;
    for (size_t i = 0; i < va.size(); ++i)
        if (va[i] != vb[i]) differ = true;
    CHECK(differ);
}

TEST_CASE("identical seed and one worker give bitwise-identical exports") {
    auto walks = testkit::planted_pair_corpus(100, 9);
    auto c = Corpus::build(walks, 1);
    EmbedderHyperparams h{.dimension = 16, .epochs = 3, .subsample_t = 0.0, .seed = 77, .workers = 1};

    std::ostringstream out1, out2;
    train(c, h).write_word2vec_text(out1);
    train(c, h).write_word2vec_text(out2);
    CHECK(out1.str() == out2.str());
}

TEST_CASE("multi-worker training still converges") {
    auto walks = testkit::planted_pair_corpus(400, 15);
    auto c = Corpus::build(walks, 1);
    EmbedderHyperparams h{.dimension = 16, .window = 3, .epochs = 6, .subsample_t = 0.0, .seed = 5, .workers = 4};
    auto model = train(c, h);
    CHECK(model.cosine("x", "y") > 0.5);
}

TEST_CASE("negative draws follow the unigram^{3/4} distribution") {
    auto walks = testkit::planted_pair_corpus(200, 33);
    auto c = Corpus::build(walks, 1);
    auto cdf = unigram_power_cdf(c);

    std::vector<double> expected(c.vocab().size());
    for (size_t i = 0; i < expected.size(); ++i)
        expected[i] = std::pow(double(c.vocab()[i].count), 0.75);
    double z = 0.0;
    for (double e : expected) z += e;

    std::vector<uint64_t> counts(c.vocab().size(), 0);
    RandomSource rng(4, 0);
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) ++counts[draw_from_cdf(cdf, rng)];

    double tv = 0.0;
    for (size_t i = 0; i < counts.size(); ++i)
        tv += std::fabs(double(counts[i]) / draws - expected[i] / z);
    CHECK(tv / 2.0 < 0.01);
}

TEST_CASE("word2vec text export has the documented shape") {
    auto c = Corpus::build(toy_walks(), 1);
    auto model = train(c, {.dimension = 4, .epochs = 1, .subsample_t = 0.0, .seed = 2});
    std::ostringstream out;
    model.write_word2vec_text(out);

    std::istringstream in(out.str());
    size_t vocab = 0, dim = 0;
    in >> vocab >> dim;
    CHECK(vocab == 4);
    CHECK(dim == 4);
    std::string token;
    in >> token;
    CHECK(token == model.vocab()[0].token);
    for (size_t i = 0; i < dim; ++i) {
        double x = 0.0;
        in >> x;
        CHECK(std::isfinite(x));
    }
}
