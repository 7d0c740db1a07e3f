#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "fraggen/rng.hpp"
#include "fraggen/vocab.hpp"

namespace fraggen {

struct ModelDims {
  int vocab = 0;
  int embed = 64;
  int hidden = 128;
  int latent = 100;
  int layers = 2;
};

struct GruLayerParams {
  Eigen::MatrixXd Wr, Wu, Wh;  // hidden x input
  Eigen::MatrixXd Ur, Uu, Uh;  // hidden x hidden
  Eigen::VectorXd br, bu, bh;
};

// Everything the encoder-decoder VAE learns, embedding included.
struct ModelParameters {
  ModelDims dims;
  Eigen::MatrixXd embedding;  // vocab x embed
  std::vector<GruLayerParams> encoder;
  std::vector<GruLayerParams> decoder;
  Eigen::MatrixXd Wmu, Wsigma;  // latent x hidden
  Eigen::VectorXd bmu, bsigma;
  Eigen::MatrixXd Wz;  // hidden x latent, shared initial state for decoder layers
  Eigen::VectorXd bz;
  Eigen::MatrixXd Wout;  // vocab x hidden
  Eigen::VectorXd bout;

  static ModelParameters zeros(const ModelDims& dims);
  static ModelParameters init(const ModelDims& dims, const Eigen::MatrixXd& embedding,
                              Rng& rng);
};

// Visits every tensor as (name, data, rows, cols); biases are (n, 1).
void visit_tensors(ModelParameters& p,
                   const std::function<void(const std::string&, double*, int, int)>& fn);
void visit_tensors(const ModelParameters& p,
                   const std::function<void(const std::string&, const double*, int, int)>& fn);

// h = u . h_prev + (1-u) . v with sigmoid gates and tanh candidate
Eigen::VectorXd gru_cell(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                         const GruLayerParams& p);

// mu, logvar heads applied to the final top-layer state of the stacked
// encoder run over the embedded fragment tokens (specials excluded); h_0 = 0.
struct EncodeResult {
  Eigen::VectorXd mu, logvar;
};
EncodeResult encode_sequence(const ModelParameters& params, const std::vector<int>& ids);

double kl_loss(const Eigen::VectorXd& mu, const Eigen::VectorXd& logvar);

Eigen::VectorXd reparameterize(const Eigen::VectorXd& mu, const Eigen::VectorXd& logvar,
                               const Eigen::VectorXd& eps);

// One decoder step over all stacked layers; returns the next-token
// distribution and advances the per-layer states in place.
Eigen::VectorXd decode_step(const ModelParameters& params, const Eigen::VectorXd& x,
                            std::vector<Eigen::VectorXd>& states);

std::vector<Eigen::VectorXd> decoder_initial_states(const ModelParameters& params,
                                                    const Eigen::VectorXd& z);

// Teacher-forced negative log-likelihood of [SOS, f1..fn, EOS].
double sequence_nll(const ModelParameters& params, const std::vector<int>& ids,
                    const Eigen::VectorXd& z);

// Batch sum of kl + nll with one eps per sequence (reference path, no dropout).
double total_loss(const ModelParameters& params, const std::vector<std::vector<int>>& batch,
                  const std::vector<Eigen::VectorXd>& eps);

// Training path: same loss computed batched, with analytic gradients
// accumulated into *grads (pre-zeroed ModelParameters). dropout > 0 applies
// inverted dropout to each recurrent layer's output sequence (training only);
// masks are drawn from rng. Returns the batch-sum loss.
double loss_and_gradients(const ModelParameters& params,
                          const std::vector<std::vector<int>>& batch,
                          const std::vector<Eigen::VectorXd>& eps, double dropout,
                          Rng* rng, ModelParameters* grads);

struct TrainConfig {
  int batch = 128;
  double lr = 1e-5;
  double lr_decay = 0.9;  // per-epoch multiplicative
  double dropout = 0.3;
  int max_epochs = 4;
  int epoch_sample = 1000;
  uint64_t seed = 1;
  bool freeze_embeddings = false;
  // output bias starts at tau * log(unigram emission prior); 0 disables.
  // Training would learn these first; seeding them keeps short desk-scale
  // runs behaving like longer ones.
  double bout_prior_tau = 0.1;
  double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
};

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double lr = 0.0;
  double validity = 0.0, novelty = 0.0, uniqueness = 0.0;
  bool sampled = false;
};

struct TrainResult {
  ModelParameters params;
  std::vector<EpochStats> log;
};

class TrainingDiverged : public std::runtime_error {
 public:
  explicit TrainingDiverged(const std::string& msg) : std::runtime_error(msg) {}
};

// validity, novelty, uniqueness of a 1000-molecule sample from the passed
// parameters; wired to sampler + evalmetrics by the caller
using EpochSampler =
    std::function<std::array<double, 3>(const ModelParameters&, int epoch)>;
using CheckpointHook = std::function<void(const ModelParameters&, int epoch)>;

// Adam over shuffled minibatches (step = batch sum / batch size); stops early
// when the epoch-end uniqueness rate drops.
TrainResult train(const std::vector<std::vector<int>>& corpus, const TrainConfig& cfg,
                  const ModelDims& dims, const Eigen::MatrixXd& init_embedding,
                  const EpochSampler& sampler = nullptr,
                  const CheckpointHook& checkpoint = nullptr);

}  // namespace fraggen
