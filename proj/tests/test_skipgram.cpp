#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "fraggen/skipgram.hpp"

using namespace fraggen;

namespace {

Vocabulary toy_vocab(int tokens) {
  std::vector<std::vector<std::string>> corpus;
  for (int i = 0; i < tokens; ++i) {
    std::string frag = "*" + std::string(static_cast<size_t>(i + 1), 'C') + "*";
    for (int r = 0; r <= i; ++r) corpus.push_back({frag});
  }
  return Vocabulary::build(corpus, 0);
}

}  // namespace

TEST_CASE("context_pairs enumerates the window") {
  // ids 3,4,5 with SOS/EOS wrappers; specials never pair
  const std::vector<int> seq = {kSosId, 3, 4, 5, kEosId};
  const auto w1 = context_pairs(seq, 1);
  CHECK(w1 == std::vector<std::pair<int, int>>{{3, 4}, {4, 3}, {4, 5}, {5, 4}});
  const auto w5 = context_pairs(seq, 5);
  CHECK(w5.size() == 6);  // window clipped at bounds
  CHECK(context_pairs({kSosId, 3, kEosId}, 1).empty());
  CHECK_THROWS_AS(context_pairs(seq, 0), std::invalid_argument);
}

TEST_CASE("pair_loss closed forms") {
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
  const Eigen::MatrixXd one_neg = Eigen::MatrixXd::Zero(4, 1);
  CHECK(pair_loss(z, z, one_neg) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));

  // saturated positive pair, no negatives
  Eigen::VectorXd t(2), c(2);
  t << 50.0, 0.0;
  c << 50.0, 0.0;
  const Eigen::MatrixXd none(2, 0);
  CHECK(pair_loss(t, c, none) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("pair_loss matches an independent scalar recomputation") {
  Rng rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd t(5), c(5);
    Eigen::MatrixXd negs(5, 3);
    for (int i = 0; i < 5; ++i) {
      t[i] = rng.normal();
      c[i] = rng.normal();
      for (int k = 0; k < 3; ++k) negs(i, k) = rng.normal();
    }
    double tc = 0.0;
    for (int i = 0; i < 5; ++i) tc += t[i] * c[i];
    double expect = -std::log(1.0 / (1.0 + std::exp(-tc)));
    for (int k = 0; k < 3; ++k) {
      double tn = 0.0;
      for (int i = 0; i < 5; ++i) tn += t[i] * negs(i, k);
      expect -= std::log(1.0 / (1.0 + std::exp(tn)));
    }
    CHECK(pair_loss(t, c, negs) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("pair_loss gradients match central finite differences") {
  Rng rng(31);
  const int d = 6, negs_n = 4;
  Eigen::VectorXd t(d), c(d);
  Eigen::MatrixXd negs(d, negs_n);
  for (int i = 0; i < d; ++i) {
    t[i] = 0.5 * rng.normal();
    c[i] = 0.5 * rng.normal();
    for (int k = 0; k < negs_n; ++k) negs(i, k) = 0.5 * rng.normal();
  }
  Eigen::VectorXd dt, dc;
  Eigen::MatrixXd dn;
  pair_loss_grad(t, c, negs, dt, dc, dn);

  const double h = 1e-6;
  auto check_coord = [&](double& x, double analytic) {
    const double save = x;
    x = save + h;
    const double up = pair_loss(t, c, negs);
    x = save - h;
    const double dn_ = pair_loss(t, c, negs);
    x = save;
    const double fd = (up - dn_) / (2 * h);
    CHECK(std::abs(fd - analytic) <=
          1e-4 * std::max({1e-6, std::abs(fd), std::abs(analytic)}));
  };
  for (int rep = 0; rep < 100; ++rep) {
    const int which = static_cast<int>(rng.bounded(3));
    const int i = static_cast<int>(rng.bounded(d));
    if (which == 0) check_coord(t[i], dt[i]);
    if (which == 1) check_coord(c[i], dc[i]);
    if (which == 2) {
      const int k = static_cast<int>(rng.bounded(negs_n));
      check_coord(negs(i, k), dn(i, k));
    }
  }
}

TEST_CASE("train_skipgram is seed-deterministic and learns") {
  const Vocabulary v = toy_vocab(12);
  // structured co-occurrence: consecutive token pairs, 1k sequences
  std::vector<std::vector<int>> corpus;
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const int a = 3 + 2 * static_cast<int>(rng.bounded(6));
    corpus.push_back({kSosId, a, a + 1, kEosId});
  }
  SkipGramConfig cfg;
  cfg.dim = 16;
  cfg.window = 2;
  cfg.epochs = 4;
  cfg.seed = 99;

  std::vector<double> losses_a, losses_b;
  const EmbeddingMatrix ea = train_skipgram(corpus, cfg, v, &losses_a);
  const EmbeddingMatrix eb = train_skipgram(corpus, cfg, v, &losses_b);
  CHECK(ea.target == eb.target);  // bit-identical
  CHECK(ea.context == eb.context);
  CHECK(losses_a == losses_b);

  REQUIRE(losses_a.size() == 4);
  CHECK(losses_a[1] < losses_a[0]);
  CHECK(losses_a[2] < losses_a[1]);
  CHECK(losses_a[3] < losses_a[2]);

  // no vector norm explodes
  CHECK(ea.target.rowwise().norm().maxCoeff() < 100.0);

  // specials initialized small
  CHECK(ea.target.row(kPadId).norm() < 0.2);
}

TEST_CASE("train_skipgram rejects pairless corpora") {
  const Vocabulary v = toy_vocab(4);
  std::vector<std::vector<int>> corpus = {{kSosId, 3, kEosId}, {kSosId, 4, kEosId}};
  SkipGramConfig cfg;
  CHECK_THROWS_AS(train_skipgram(corpus, cfg, v), std::runtime_error);
  CHECK_THROWS_AS(train_skipgram({}, cfg, v), std::invalid_argument);
}

TEST_CASE("embedding file round trips exactly") {
  const Vocabulary v = toy_vocab(6);
  std::vector<std::vector<int>> corpus;
  for (int i = 0; i < 40; ++i) corpus.push_back({kSosId, 3, 4, 5, kEosId});
  SkipGramConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 1;
  const EmbeddingMatrix emb = train_skipgram(corpus, cfg, v);
  const std::string path = "/tmp/fraggen_emb_test.txt";
  save_embeddings(path, emb);
  const Eigen::MatrixXd loaded = load_embeddings(path);
  CHECK(loaded == emb.target);  // %.17g round-trips doubles exactly
  std::remove(path.c_str());
}
