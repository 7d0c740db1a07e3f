#include "fraggen/skipgram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fraggen {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// cumulative unigram^(3/4) table over non-special tokens
struct NegativeTable {
  std::vector<int> ids;
  std::vector<double> cum;

  NegativeTable(const Vocabulary& v) {
    double total = 0.0;
    for (int i = 3; i < v.size(); ++i) {
      const double w = std::pow(static_cast<double>(v.frequency(i)), 0.75);
      if (w <= 0.0) continue;
      ids.push_back(i);
      total += w;
      cum.push_back(total);
    }
  }

  int draw(Rng& rng) const {
    const double u = rng.uniform() * cum.back();
    const auto it = std::lower_bound(cum.begin(), cum.end(), u);
    return ids[static_cast<size_t>(it - cum.begin())];
  }
};

}  // namespace

std::vector<std::pair<int, int>> context_pairs(const std::vector<int>& ids, int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<int> toks;
  for (int id : ids)
    if (id != kPadId && id != kSosId && id != kEosId) toks.push_back(id);
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(toks.size());
  for (int i = 0; i < n; ++i) {
    for (int j = -window; j <= window; ++j) {
      if (j == 0) continue;
      const int k = i + j;
      if (k < 0 || k >= n) continue;
      out.emplace_back(toks[i], toks[k]);
    }
  }
  return out;
}

double pair_loss(const Eigen::VectorXd& target, const Eigen::VectorXd& context,
                 const Eigen::MatrixXd& negatives) {
  double loss = -std::log(sigmoid(target.dot(context)));
  for (Eigen::Index k = 0; k < negatives.cols(); ++k)
    loss -= std::log(sigmoid(-target.dot(negatives.col(k))));
  return loss;
}

void pair_loss_grad(const Eigen::VectorXd& target, const Eigen::VectorXd& context,
                    const Eigen::MatrixXd& negatives, Eigen::VectorXd& d_target,
                    Eigen::VectorXd& d_context, Eigen::MatrixXd& d_negatives) {
  const double s = sigmoid(target.dot(context));
  d_target = (s - 1.0) * context;
  d_context = (s - 1.0) * target;
  d_negatives.resize(target.size(), negatives.cols());
  for (Eigen::Index k = 0; k < negatives.cols(); ++k) {
    const double sn = sigmoid(target.dot(negatives.col(k)));
    d_target += sn * negatives.col(k);
    d_negatives.col(k) = sn * target;
  }
}

EmbeddingMatrix train_skipgram(const std::vector<std::vector<int>>& corpus,
                               const SkipGramConfig& cfg, const Vocabulary& vocab,
                               std::vector<double>* epoch_losses) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  std::vector<std::pair<int, int>> pairs;
  for (const auto& seq : corpus) {
    auto p = context_pairs(seq, cfg.window);
    pairs.insert(pairs.end(), p.begin(), p.end());
  }
  if (pairs.empty())
    throw std::runtime_error("no skip-gram pairs: every sequence has length 1");

  Rng rng(cfg.seed);
  EmbeddingMatrix emb;
  emb.target.resize(vocab.size(), cfg.dim);
  emb.context = Eigen::MatrixXd::Zero(vocab.size(), cfg.dim);
  for (int i = 0; i < vocab.size(); ++i) {
    if (vocab.is_special(i)) {
      for (int j = 0; j < cfg.dim; ++j) emb.target(i, j) = 0.01 * rng.normal();
    } else {
      for (int j = 0; j < cfg.dim; ++j)
        emb.target(i, j) = (rng.uniform() - 0.5) / cfg.dim;
    }
  }

  const NegativeTable table(vocab);
  const double total_steps = static_cast<double>(pairs.size()) * cfg.epochs;
  double done = 0.0;
  Eigen::VectorXd d_target(cfg.dim);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(pairs);
    double loss_sum = 0.0;
    for (const auto& [t, c] : pairs) {
      const double lr = cfg.lr * std::max(1e-4, 1.0 - done / total_steps);
      done += 1.0;

      auto tv = emb.target.row(t);
      const double s = sigmoid(tv.dot(emb.context.row(c)));
      loss_sum -= std::log(s);
      d_target = (s - 1.0) * emb.context.row(c).transpose();
      emb.context.row(c) -= lr * (s - 1.0) * tv;

      for (int k = 0; k < cfg.negatives; ++k) {
        const int n = table.draw(rng);
        if (n == c) continue;  // drawn the positive context; skip
        const double sn = sigmoid(tv.dot(emb.context.row(n)));
        loss_sum -= std::log(1.0 - sn);
        d_target += sn * emb.context.row(n).transpose();
        emb.context.row(n) -= lr * sn * tv;
      }
      emb.target.row(t) -= lr * d_target.transpose();
    }
    if (epoch_losses) epoch_losses->push_back(loss_sum / static_cast<double>(pairs.size()));
  }
  return emb;
}

void save_embeddings(const std::string& path, const EmbeddingMatrix& emb) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write embedding file: " + path);
  f << "fraggen-emb v1 " << emb.vocab() << " " << emb.dim() << "\n";
  char buf[32];
  for (int i = 0; i < emb.vocab(); ++i) {
    f << i;
    for (int j = 0; j < emb.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", emb.target(i, j));
      f << ' ' << buf;
    }
    f << '\n';
  }
}

Eigen::MatrixXd load_embeddings(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read embedding file: " + path);
  std::string tag, ver;
  int v = 0, d = 0;
  f >> tag >> ver >> v >> d;
  if (tag != "fraggen-emb" || ver != "v1" || v <= 0 || d <= 0)
    throw std::runtime_error("bad embedding file header");
  Eigen::MatrixXd m(v, d);
  for (int i = 0; i < v; ++i) {
    int id;
    f >> id;
    if (!f || id != i) throw std::runtime_error("bad embedding file row");
    for (int j = 0; j < d; ++j) f >> m(i, j);
  }
  return m;
}

}  // namespace fraggen
