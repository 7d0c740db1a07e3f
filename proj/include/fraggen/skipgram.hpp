#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fraggen/vocab.hpp"

namespace fraggen {

// Skip-gram embedding table; rows are tokens (specials included). Only the
// target vectors feed the language model, context vectors are training
// scaffolding.
struct EmbeddingMatrix {
  Eigen::MatrixXd target;   // |V| x d
  Eigen::MatrixXd context;  // |V| x d

  int vocab() const { return static_cast<int>(target.rows()); }
  int dim() const { return static_cast<int>(target.cols()); }
};

struct SkipGramConfig {
  int dim = 64;
  int window = 2;
  int negatives = 5;
  int epochs = 5;
  double lr = 0.025;
  uint64_t seed = 1;
};

// All in-window ordered (target, context) pairs; SOS/EOS/PAD are skipped.
std::vector<std::pair<int, int>> context_pairs(const std::vector<int>& ids, int window);

// -log s(t.c) - sum_neg log s(-t.n); negatives are columns of `negatives`.
double pair_loss(const Eigen::VectorXd& target, const Eigen::VectorXd& context,
                 const Eigen::MatrixXd& negatives);

// Analytic gradients of pair_loss, same layout as the inputs.
void pair_loss_grad(const Eigen::VectorXd& target, const Eigen::VectorXd& context,
                    const Eigen::MatrixXd& negatives, Eigen::VectorXd& d_target,
                    Eigen::VectorXd& d_context, Eigen::MatrixXd& d_negatives);

// SGD over shuffled pairs with unigram^(3/4) negative sampling; deterministic
// for a fixed seed. epoch_losses (when given) receives the epoch-mean
// pair_loss. Throws when no pairs exist.
EmbeddingMatrix train_skipgram(const std::vector<std::vector<int>>& corpus,
                               const SkipGramConfig& cfg, const Vocabulary& vocab,
                               std::vector<double>* epoch_losses = nullptr);

void save_embeddings(const std::string& path, const EmbeddingMatrix& emb);
Eigen::MatrixXd load_embeddings(const std::string& path);  // target vectors

}  // namespace fraggen
