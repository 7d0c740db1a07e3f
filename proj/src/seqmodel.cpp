#include "fraggen/seqmodel.hpp"

#include <cmath>

namespace fraggen {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd sigmoid(const MatrixXd& x) {
  return 1.0 / (1.0 + (-x.array()).exp());
}

GruLayerParams gru_zeros(int in, int hidden) {
  GruLayerParams p;
  p.Wr = MatrixXd::Zero(hidden, in);
  p.Wu = MatrixXd::Zero(hidden, in);
  p.Wh = MatrixXd::Zero(hidden, in);
  p.Ur = MatrixXd::Zero(hidden, hidden);
  p.Uu = MatrixXd::Zero(hidden, hidden);
  p.Uh = MatrixXd::Zero(hidden, hidden);
  p.br = VectorXd::Zero(hidden);
  p.bu = VectorXd::Zero(hidden);
  p.bh = VectorXd::Zero(hidden);
  return p;
}

void uniform_init(MatrixXd& m, Rng& rng) {
  const double a = 1.0 / std::sqrt(static_cast<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = (2.0 * rng.uniform() - 1.0) * a;
}

}  // namespace

ModelParameters ModelParameters::zeros(const ModelDims& dims) {
  ModelParameters p;
  p.dims = dims;
  p.embedding = MatrixXd::Zero(dims.vocab, dims.embed);
  for (int l = 0; l < dims.layers; ++l) {
    p.encoder.push_back(gru_zeros(l == 0 ? dims.embed : dims.hidden, dims.hidden));
    p.decoder.push_back(gru_zeros(l == 0 ? dims.embed : dims.hidden, dims.hidden));
  }
  p.Wmu = MatrixXd::Zero(dims.latent, dims.hidden);
  p.Wsigma = MatrixXd::Zero(dims.latent, dims.hidden);
  p.bmu = VectorXd::Zero(dims.latent);
  p.bsigma = VectorXd::Zero(dims.latent);
  p.Wz = MatrixXd::Zero(dims.hidden, dims.latent);
  p.bz = VectorXd::Zero(dims.hidden);
  p.Wout = MatrixXd::Zero(dims.vocab, dims.hidden);
  p.bout = VectorXd::Zero(dims.vocab);
  return p;
}

ModelParameters ModelParameters::init(const ModelDims& dims, const MatrixXd& embedding,
                                      Rng& rng) {
  if (embedding.rows() != dims.vocab || embedding.cols() != dims.embed)
    throw std::invalid_argument("embedding shape does not match model dims");
  ModelParameters p = zeros(dims);
  p.embedding = embedding;
  for (auto* stack : {&p.encoder, &p.decoder}) {
    for (auto& l : *stack) {
      uniform_init(l.Wr, rng);
      uniform_init(l.Wu, rng);
      uniform_init(l.Wh, rng);
      uniform_init(l.Ur, rng);
      uniform_init(l.Uu, rng);
      uniform_init(l.Uh, rng);
    }
  }
  uniform_init(p.Wmu, rng);
  uniform_init(p.Wsigma, rng);
  uniform_init(p.Wz, rng);
  uniform_init(p.Wout, rng);
  return p;
}

namespace {

template <typename P, typename Fn>
void visit_impl(P& p, const Fn& fn) {
  auto mat = [&](const std::string& name, auto& m) {
    fn(name, m.data(), static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  };
  mat("embedding", p.embedding);
  for (size_t l = 0; l < p.encoder.size(); ++l) {
    const std::string base = "encoder." + std::to_string(l) + ".";
    auto& g = p.encoder[l];
    mat(base + "Wr", g.Wr);
    mat(base + "Wu", g.Wu);
    mat(base + "Wh", g.Wh);
    mat(base + "Ur", g.Ur);
    mat(base + "Uu", g.Uu);
    mat(base + "Uh", g.Uh);
    mat(base + "br", g.br);
    mat(base + "bu", g.bu);
    mat(base + "bh", g.bh);
  }
  for (size_t l = 0; l < p.decoder.size(); ++l) {
    const std::string base = "decoder." + std::to_string(l) + ".";
    auto& g = p.decoder[l];
    mat(base + "Wr", g.Wr);
    mat(base + "Wu", g.Wu);
    mat(base + "Wh", g.Wh);
    mat(base + "Ur", g.Ur);
    mat(base + "Uu", g.Uu);
    mat(base + "Uh", g.Uh);
    mat(base + "br", g.br);
    mat(base + "bu", g.bu);
    mat(base + "bh", g.bh);
  }
  mat("Wmu", p.Wmu);
  mat("bmu", p.bmu);
  mat("Wsigma", p.Wsigma);
  mat("bsigma", p.bsigma);
  mat("Wz", p.Wz);
  mat("bz", p.bz);
  mat("Wout", p.Wout);
  mat("bout", p.bout);
}

}  // namespace

void visit_tensors(ModelParameters& p,
                   const std::function<void(const std::string&, double*, int, int)>& fn) {
  visit_impl(p, fn);
}

void visit_tensors(
    const ModelParameters& p,
    const std::function<void(const std::string&, const double*, int, int)>& fn) {
  visit_impl(p, fn);
}

Eigen::VectorXd gru_cell(const VectorXd& x, const VectorXd& h_prev,
                         const GruLayerParams& p) {
  if (x.size() != p.Wr.cols() || h_prev.size() != p.Ur.cols())
    throw std::invalid_argument("gru_cell shape mismatch");
  const VectorXd r = (1.0 / (1.0 + (-(p.Wr * x + p.Ur * h_prev + p.br)).array().exp()));
  const VectorXd u = (1.0 / (1.0 + (-(p.Wu * x + p.Uu * h_prev + p.bu)).array().exp()));
  const VectorXd v =
      (p.Wh * x + p.Uh * (r.array() * h_prev.array()).matrix() + p.bh).array().tanh();
  return (u.array() * h_prev.array() + (1.0 - u.array()) * v.array()).matrix();
}

namespace {

std::vector<int> strip_specials(const std::vector<int>& ids) {
  std::vector<int> out;
  for (int id : ids)
    if (id != kPadId && id != kSosId && id != kEosId) out.push_back(id);
  return out;
}

}  // namespace

EncodeResult encode_sequence(const ModelParameters& params, const std::vector<int>& ids) {
  const std::vector<int> toks = strip_specials(ids);
  if (toks.empty()) throw std::invalid_argument("cannot encode an empty sequence");
  std::vector<VectorXd> h(params.encoder.size(),
                          VectorXd::Zero(params.dims.hidden));
  for (int tok : toks) {
    VectorXd x = params.embedding.row(tok).transpose();
    for (size_t l = 0; l < params.encoder.size(); ++l) {
      h[l] = gru_cell(x, h[l], params.encoder[l]);
      x = h[l];
    }
  }
  EncodeResult r;
  r.mu = params.Wmu * h.back() + params.bmu;
  r.logvar = params.Wsigma * h.back() + params.bsigma;
  return r;
}

double kl_loss(const VectorXd& mu, const VectorXd& logvar) {
  return 0.5 * (mu.array().square() + logvar.array().exp() - 1.0 - logvar.array()).sum();
}

Eigen::VectorXd reparameterize(const VectorXd& mu, const VectorXd& logvar,
                               const VectorXd& eps) {
  return mu.array() + (logvar.array() / 2.0).exp() * eps.array();
}

std::vector<Eigen::VectorXd> decoder_initial_states(const ModelParameters& params,
                                                    const VectorXd& z) {
  const VectorXd h0 = params.Wz * z + params.bz;
  return std::vector<VectorXd>(params.decoder.size(), h0);
}

Eigen::VectorXd decode_step(const ModelParameters& params, const VectorXd& x,
                            std::vector<VectorXd>& states) {
  VectorXd in = x;
  for (size_t l = 0; l < params.decoder.size(); ++l) {
    states[l] = gru_cell(in, states[l], params.decoder[l]);
    in = states[l];
  }
  VectorXd logits = params.Wout * in + params.bout;
  logits.array() -= logits.maxCoeff();
  VectorXd p = logits.array().exp();
  p /= p.sum();
  return p;
}

double sequence_nll(const ModelParameters& params, const std::vector<int>& ids,
                    const VectorXd& z) {
  if (ids.size() < 2 || ids.front() != kSosId || ids.back() != kEosId)
    throw std::invalid_argument("sequence must be [SOS, ..., EOS]");
  for (int id : ids)
    if (id < 0 || id >= params.dims.vocab)
      throw std::out_of_range("token id out of range");
  auto states = decoder_initial_states(params, z);
  double nll = 0.0;
  for (size_t t = 0; t + 1 < ids.size(); ++t) {
    if (ids[t] == kPadId) break;
    const VectorXd x = params.embedding.row(ids[t]).transpose();
    const VectorXd p = decode_step(params, x, states);
    nll -= std::log(p[ids[t + 1]]);
  }
  return nll;
}

double total_loss(const ModelParameters& params, const std::vector<std::vector<int>>& batch,
                  const std::vector<VectorXd>& eps) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  double loss = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const EncodeResult enc = encode_sequence(params, batch[i]);
    const VectorXd z = reparameterize(enc.mu, enc.logvar, eps[i]);
    loss += kl_loss(enc.mu, enc.logvar) + sequence_nll(params, batch[i], z);
  }
  return loss;
}

// ---- batched training path -------------------------------------------------

namespace {

struct LayerCache {
  std::vector<MatrixXd> X, R, U, V, H;  // per timestep
  std::vector<MatrixXd> mask;           // dropout masks on outputs (already scaled)
  MatrixXd H0;
};

// forward one stacked layer over T steps; returns the (possibly dropped-out)
// output sequence for the next consumer
std::vector<MatrixXd> forward_layer(const GruLayerParams& p,
                                    const std::vector<MatrixXd>& inputs,
                                    const MatrixXd& h0, double dropout, Rng* rng,
                                    LayerCache& cache) {
  const int T = static_cast<int>(inputs.size());
  const int B = T > 0 ? static_cast<int>(inputs[0].cols()) : 0;
  const int hidden = static_cast<int>(p.Ur.rows());
  cache.H0 = h0;
  cache.X = inputs;
  cache.R.resize(T);
  cache.U.resize(T);
  cache.V.resize(T);
  cache.H.resize(T);
  cache.mask.clear();
  std::vector<MatrixXd> out(T);
  MatrixXd h = h0;
  for (int t = 0; t < T; ++t) {
    const MatrixXd& x = inputs[t];
    MatrixXd r = sigmoid(((p.Wr * x + p.Ur * h).colwise() + p.br));
    MatrixXd u = sigmoid(((p.Wu * x + p.Uu * h).colwise() + p.bu));
    MatrixXd v =
        ((p.Wh * x + p.Uh * (r.array() * h.array()).matrix()).colwise() + p.bh)
            .array()
            .tanh();
    MatrixXd hn = (u.array() * h.array() + (1.0 - u.array()) * v.array()).matrix();
    cache.R[t] = std::move(r);
    cache.U[t] = std::move(u);
    cache.V[t] = std::move(v);
    cache.H[t] = hn;
    if (dropout > 0.0) {
      MatrixXd m(hidden, B);
      const double keep = 1.0 - dropout;
      for (int j = 0; j < B; ++j)
        for (int i = 0; i < hidden; ++i)
          m(i, j) = rng->uniform() < keep ? 1.0 / keep : 0.0;
      out[t] = hn.array() * m.array();
      cache.mask.push_back(std::move(m));
    } else {
      out[t] = hn;
    }
    h = std::move(hn);
  }
  return out;
}

// d_out: gradient w.r.t. the (dropped-out) outputs per step. Returns dX per
// step; accumulates parameter grads; dH0 gets the initial-state gradient.
std::vector<MatrixXd> backward_layer(const GruLayerParams& p, const LayerCache& cache,
                                     const std::vector<MatrixXd>& d_out,
                                     GruLayerParams& g, MatrixXd& dH0) {
  const int T = static_cast<int>(cache.X.size());
  std::vector<MatrixXd> dX(T);
  MatrixXd carry = MatrixXd::Zero(cache.H0.rows(), cache.H0.cols());
  for (int t = T - 1; t >= 0; --t) {
    MatrixXd dh = carry;
    if (!cache.mask.empty())
      dh += (d_out[t].array() * cache.mask[t].array()).matrix();
    else
      dh += d_out[t];
    const MatrixXd& h_prev = t == 0 ? cache.H0 : cache.H[t - 1];
    const MatrixXd& r = cache.R[t];
    const MatrixXd& u = cache.U[t];
    const MatrixXd& v = cache.V[t];
    const MatrixXd& x = cache.X[t];

    const MatrixXd du = (h_prev.array() - v.array()) * dh.array();
    const MatrixXd dv = (1.0 - u.array()) * dh.array();
    MatrixXd dh_prev = (u.array() * dh.array()).matrix();

    const MatrixXd dv_pre = ((1.0 - v.array().square()) * dv.array()).matrix();
    const MatrixXd drh = p.Uh.transpose() * dv_pre;
    const MatrixXd dr = (h_prev.array() * drh.array()).matrix();
    dh_prev += (r.array() * drh.array()).matrix();

    const MatrixXd du_pre = (u.array() * (1.0 - u.array()) * du.array()).matrix();
    const MatrixXd dr_pre = (r.array() * (1.0 - r.array()) * dr.array()).matrix();

    g.Wh += dv_pre * x.transpose();
    g.Uh += dv_pre * (r.array() * h_prev.array()).matrix().transpose();
    g.bh += dv_pre.rowwise().sum();
    g.Wu += du_pre * x.transpose();
    g.Uu += du_pre * h_prev.transpose();
    g.bu += du_pre.rowwise().sum();
    g.Wr += dr_pre * x.transpose();
    g.Ur += dr_pre * h_prev.transpose();
    g.br += dr_pre.rowwise().sum();

    dX[t] = p.Wh.transpose() * dv_pre + p.Wu.transpose() * du_pre +
            p.Wr.transpose() * dr_pre;
    dh_prev += p.Uu.transpose() * du_pre + p.Ur.transpose() * dr_pre;
    carry = std::move(dh_prev);
  }
  dH0 = carry;
  return dX;
}

}  // namespace

double loss_and_gradients(const ModelParameters& params,
                          const std::vector<std::vector<int>>& batch,
                          const std::vector<VectorXd>& eps, double dropout, Rng* rng,
                          ModelParameters* grads) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  if (dropout > 0.0 && rng == nullptr)
    throw std::invalid_argument("dropout requires an rng");
  const int B = static_cast<int>(batch.size());
  const int hidden = params.dims.hidden;
  const int latent = params.dims.latent;

  // --- plan -----------------------------------------------------------------
  std::vector<std::vector<int>> enc_tok(B), dec_in(B), dec_tgt(B);
  int Tenc = 0, Tdec = 0;
  for (int i = 0; i < B; ++i) {
    const auto& ids = batch[i];
    if (ids.size() < 2 || ids.front() != kSosId || ids.back() != kEosId)
      throw std::invalid_argument("sequence must be [SOS, ..., EOS]");
    enc_tok[i] = strip_specials(ids);
    if (enc_tok[i].empty()) throw std::invalid_argument("cannot encode an empty sequence");
    dec_in[i] = std::vector<int>(ids.begin(), ids.end() - 1);
    dec_tgt[i] = std::vector<int>(ids.begin() + 1, ids.end());
    Tenc = std::max(Tenc, static_cast<int>(enc_tok[i].size()));
    Tdec = std::max(Tdec, static_cast<int>(dec_in[i].size()));
  }

  auto embed_steps = [&](const std::vector<std::vector<int>>& toks, int T) {
    std::vector<MatrixXd> xs(T, MatrixXd::Zero(params.dims.embed, B));
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < B; ++i) {
        const int id =
            t < static_cast<int>(toks[i].size()) ? toks[i][t] : kPadId;
        xs[t].col(i) = params.embedding.row(id).transpose();
      }
    return xs;
  };

  // --- encoder forward --------------------------------------------------------
  const int L = params.dims.layers;
  std::vector<LayerCache> enc_cache(L), dec_cache(L);
  std::vector<MatrixXd> cur = embed_steps(enc_tok, Tenc);
  const MatrixXd zerosH = MatrixXd::Zero(hidden, B);
  for (int l = 0; l < L; ++l)
    cur = forward_layer(params.encoder[l], cur, zerosH, dropout, rng, enc_cache[l]);

  MatrixXd Hfin(hidden, B);
  for (int i = 0; i < B; ++i)
    Hfin.col(i) = cur[static_cast<int>(enc_tok[i].size()) - 1].col(i);

  const MatrixXd MU = (params.Wmu * Hfin).colwise() + params.bmu;
  const MatrixXd LV = (params.Wsigma * Hfin).colwise() + params.bsigma;

  MatrixXd EPS(latent, B);
  for (int i = 0; i < B; ++i) EPS.col(i) = eps[i];
  const MatrixXd SIG = (LV.array() / 2.0).exp();
  const MatrixXd Z = MU.array() + SIG.array() * EPS.array();

  double loss = 0.5 * (MU.array().square() + LV.array().exp() - 1.0 - LV.array()).sum();

  // --- decoder forward --------------------------------------------------------
  const MatrixXd H0dec = (params.Wz * Z).colwise() + params.bz;
  std::vector<MatrixXd> curd = embed_steps(dec_in, Tdec);
  for (int l = 0; l < L; ++l)
    curd = forward_layer(params.decoder[l], curd, H0dec, dropout, rng, dec_cache[l]);

  std::vector<MatrixXd> probs(Tdec);
  for (int t = 0; t < Tdec; ++t) {
    MatrixXd logits = (params.Wout * curd[t]).colwise() + params.bout;
    for (int i = 0; i < B; ++i) {
      auto col = logits.col(i);
      col.array() -= col.maxCoeff();
    }
    MatrixXd e = logits.array().exp();
    for (int i = 0; i < B; ++i) e.col(i) /= e.col(i).sum();
    for (int i = 0; i < B; ++i)
      if (t < static_cast<int>(dec_tgt[i].size())) loss -= std::log(e(dec_tgt[i][t], i));
    probs[t] = std::move(e);
  }

  if (grads == nullptr) return loss;

  // --- backward ---------------------------------------------------------------
  std::vector<MatrixXd> dOut(Tdec, MatrixXd::Zero(hidden, B));
  for (int t = 0; t < Tdec; ++t) {
    MatrixXd dlogits = probs[t];
    for (int i = 0; i < B; ++i) {
      if (t < static_cast<int>(dec_tgt[i].size()))
        dlogits(dec_tgt[i][t], i) -= 1.0;
      else
        dlogits.col(i).setZero();
    }
    grads->Wout += dlogits * curd[t].transpose();
    grads->bout += dlogits.rowwise().sum();
    dOut[t] = params.Wout.transpose() * dlogits;
  }

  MatrixXd dH0sum = MatrixXd::Zero(hidden, B);
  std::vector<MatrixXd> d_seq = dOut;
  for (int l = L - 1; l >= 0; --l) {
    MatrixXd dH0;
    d_seq = backward_layer(params.decoder[l], dec_cache[l], d_seq, grads->decoder[l], dH0);
    dH0sum += dH0;
  }
  // decoder input embeddings
  for (int t = 0; t < Tdec; ++t)
    for (int i = 0; i < B; ++i)
      if (t < static_cast<int>(dec_in[i].size()))
        grads->embedding.row(dec_in[i][t]) += d_seq[t].col(i).transpose();

  // latent chain
  const MatrixXd dZ = params.Wz.transpose() * dH0sum;
  grads->Wz += dH0sum * Z.transpose();
  grads->bz += dH0sum.rowwise().sum();

  MatrixXd dMU = MU + dZ;  // KL + reparameterization
  MatrixXd dLV =
      (0.5 * (LV.array().exp() - 1.0) + 0.5 * dZ.array() * EPS.array() * SIG.array())
          .matrix();

  grads->Wmu += dMU * Hfin.transpose();
  grads->bmu += dMU.rowwise().sum();
  grads->Wsigma += dLV * Hfin.transpose();
  grads->bsigma += dLV.rowwise().sum();

  MatrixXd dHfin = params.Wmu.transpose() * dMU + params.Wsigma.transpose() * dLV;
  std::vector<MatrixXd> dEnc(Tenc, MatrixXd::Zero(hidden, B));
  for (int i = 0; i < B; ++i)
    dEnc[static_cast<int>(enc_tok[i].size()) - 1].col(i) = dHfin.col(i);

  std::vector<MatrixXd> d_seq_e = dEnc;
  for (int l = L - 1; l >= 0; --l) {
    MatrixXd dH0;
    d_seq_e =
        backward_layer(params.encoder[l], enc_cache[l], d_seq_e, grads->encoder[l], dH0);
  }
  for (int t = 0; t < Tenc; ++t)
    for (int i = 0; i < B; ++i)
      if (t < static_cast<int>(enc_tok[i].size()))
        grads->embedding.row(enc_tok[i][t]) += d_seq_e[t].col(i).transpose();

  return loss;
}

// ---- Adam + training loop ----------------------------------------------------

namespace {

struct TensorRefs {
  std::vector<double*> data;
  std::vector<int> size;
  std::vector<std::string> name;
};

TensorRefs collect(ModelParameters& p) {
  TensorRefs r;
  visit_tensors(p, [&](const std::string& n, double* d, int rows, int cols) {
    r.data.push_back(d);
    r.size.push_back(rows * cols);
    r.name.push_back(n);
  });
  return r;
}

}  // namespace

TrainResult train(const std::vector<std::vector<int>>& corpus, const TrainConfig& cfg,
                  const ModelDims& dims, const MatrixXd& init_embedding,
                  const EpochSampler& sampler, const CheckpointHook& checkpoint) {
  if (corpus.empty()) throw std::invalid_argument("empty training corpus");
  Rng rng(cfg.seed);
  TrainResult result;
  result.params = ModelParameters::init(dims, init_embedding, rng);

  if (cfg.bout_prior_tau > 0.0) {
    // tempered log unigram prior over decoder emissions (fragments + EOS)
    std::vector<double> counts(static_cast<size_t>(dims.vocab), 0.0);
    double total = 0.0;
    for (const auto& seq : corpus) {
      for (int id : seq) {
        if (id == kSosId || id == kPadId) continue;
        counts[static_cast<size_t>(id)] += 1.0;
        total += 1.0;
      }
    }
    for (int i = 0; i < dims.vocab; ++i) {
      const double c = counts[static_cast<size_t>(i)] > 0.0
                           ? counts[static_cast<size_t>(i)]
                           : 0.5;
      result.params.bout[i] = cfg.bout_prior_tau * std::log(c / total);
    }
  }

  ModelParameters m_state = ModelParameters::zeros(dims);
  ModelParameters v_state = ModelParameters::zeros(dims);
  auto refs_p = collect(result.params);
  auto refs_m = collect(m_state);
  auto refs_v = collect(v_state);

  std::vector<size_t> order(corpus.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  double lr = cfg.lr;
  long step = 0;
  double prev_uniqueness = -1.0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < order.size(); start += cfg.batch) {
      const size_t end = std::min(order.size(), start + cfg.batch);
      std::vector<std::vector<int>> batch;
      batch.reserve(end - start);
      for (size_t k = start; k < end; ++k) batch.push_back(corpus[order[k]]);
      std::vector<VectorXd> eps;
      eps.reserve(batch.size());
      for (size_t k = 0; k < batch.size(); ++k) {
        VectorXd e(dims.latent);
        for (int j = 0; j < dims.latent; ++j) e[j] = rng.normal();
        eps.push_back(std::move(e));
      }
      ModelParameters grads = ModelParameters::zeros(dims);
      const double loss =
          loss_and_gradients(result.params, batch, eps, cfg.dropout, &rng, &grads);
      if (!std::isfinite(loss))
        throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch) +
                               ", step " + std::to_string(step));
      epoch_loss += loss;

      const double scale = 1.0 / static_cast<double>(batch.size());
      auto refs_g = collect(grads);
      ++step;
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      for (size_t t = 0; t < refs_p.data.size(); ++t) {
        if (cfg.freeze_embeddings && refs_p.name[t] == "embedding") continue;
        double* w = refs_p.data[t];
        double* gm = refs_m.data[t];
        double* gv = refs_v.data[t];
        const double* g = refs_g.data[t];
        for (int j = 0; j < refs_p.size[t]; ++j) {
          const double gj = g[j] * scale;
          gm[j] = cfg.beta1 * gm[j] + (1.0 - cfg.beta1) * gj;
          gv[j] = cfg.beta2 * gv[j] + (1.0 - cfg.beta2) * gj * gj;
          w[j] -= lr * (gm[j] / bc1) / (std::sqrt(gv[j] / bc2) + cfg.adam_eps);
        }
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = epoch_loss / static_cast<double>(corpus.size());
    stats.lr = lr;
    if (checkpoint) checkpoint(result.params, epoch);
    if (sampler) {
      const auto [validity, novelty, uniqueness] = sampler(result.params, epoch);
      stats.validity = validity;
      stats.novelty = novelty;
      stats.uniqueness = uniqueness;
      stats.sampled = true;
    }
    result.log.push_back(stats);

    if (sampler && prev_uniqueness >= 0.0 && stats.uniqueness < prev_uniqueness) break;
    if (sampler) prev_uniqueness = stats.uniqueness;
    lr *= cfg.lr_decay;
  }
  return result;
}

}  // namespace fraggen
