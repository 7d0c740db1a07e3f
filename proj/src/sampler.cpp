#include "fraggen/sampler.hpp"

#include <cmath>
#include <fstream>

#include "fraggen/brics.hpp"
#include "fraggen/molgraph.hpp"

namespace fraggen {

namespace {

int pick_token(const Eigen::VectorXd& probs, bool multinomial, double temperature,
               Rng& rng) {
  const int n = static_cast<int>(probs.size());
  if (!multinomial) {
    // argmax, ties to the lowest id; SOS/PAD can never be emitted
    int best = -1;
    double best_p = -1.0;
    for (int i = 0; i < n; ++i) {
      if (i == kPadId || i == kSosId) continue;
      if (probs[i] > best_p) {
        best_p = probs[i];
        best = i;
      }
    }
    return best;
  }
  Eigen::VectorXd w = probs;
  w[kPadId] = 0.0;
  w[kSosId] = 0.0;
  if (temperature != 1.0) w = w.array().pow(1.0 / temperature);
  const double total = w.sum();
  double u = rng.uniform() * total;
  for (int i = 0; i < n; ++i) {
    u -= w[i];
    if (u <= 0.0) return i;
  }
  return n - 1;
}

bool chain_ok(const std::vector<int>& attach) {
  if (attach.empty()) return false;
  if (attach.size() == 1) return attach[0] == 0;
  for (size_t i = 0; i < attach.size(); ++i) {
    const int want = (i == 0 || i + 1 == attach.size()) ? 1 : 2;
    if (attach[i] != want) return false;
  }
  return true;
}

}  // namespace

GenerationOutcome generate_one(const ModelParameters& params, const Vocabulary& vocab,
                               Rng& rng, int max_len, bool lfm_enabled, bool multinomial,
                               double temperature) {
  Eigen::VectorXd z(params.dims.latent);
  for (int i = 0; i < params.dims.latent; ++i) z[i] = rng.normal();

  auto states = decoder_initial_states(params, z);
  Eigen::VectorXd x = params.embedding.row(kSosId).transpose();

  GenerationOutcome out;
  std::vector<int> attach;
  for (int step = 0; step < max_len; ++step) {
    const Eigen::VectorXd probs = decode_step(params, x, states);
    const int tok = pick_token(probs, multinomial, temperature, rng);
    if (tok == kEosId) {
      out.kind = chain_ok(attach) ? GenerationOutcome::Kind::Accepted
                                  : GenerationOutcome::Kind::StructureReject;
      return out;
    }
    std::string fragment = vocab.token(tok);
    if (vocab.is_mask_token(tok)) {
      if (!lfm_enabled) {
        // without LFM the vocabulary has no mask tokens; guard anyway
        out.kind = GenerationOutcome::Kind::StructureReject;
        return out;
      }
      fragment = vocab.unmask(fragment, rng);
    }
    out.fragments.push_back(fragment);
    attach.push_back(vocab.attachments(tok));
    // the decoder consumes the token's own embedding, unmasked or not
    x = params.embedding.row(tok).transpose();
  }
  out.kind = GenerationOutcome::Kind::LengthReject;
  out.fragments.clear();
  return out;
}

SampleReport sample_batch(const ModelParameters& params, const Vocabulary& vocab,
                          const SampleConfig& cfg) {
  if (cfg.count < 1) throw std::invalid_argument("sample count must be >= 1");
  if (cfg.max_len < 2) throw std::invalid_argument("max_len must be >= 2");
  Rng rng(cfg.seed);
  SampleReport report;
  const long budget = static_cast<long>(cfg.attempt_factor) * cfg.count;
  while (static_cast<int>(report.molecules.size()) < cfg.count &&
         report.attempts < budget) {
    ++report.attempts;
    GenerationOutcome g = generate_one(params, vocab, rng, cfg.max_len, cfg.lfm_enabled,
                                       cfg.multinomial, cfg.temperature);
    switch (g.kind) {
      case GenerationOutcome::Kind::StructureReject:
        ++report.rejected_structure;
        break;
      case GenerationOutcome::Kind::LengthReject:
        ++report.rejected_length;
        break;
      case GenerationOutcome::Kind::Accepted: {
        const Molecule mol = reassemble_smiles(g.fragments);
        report.molecules.push_back(canonical_smiles(mol));
        report.raw_sequences.push_back(std::move(g.fragments));
        break;
      }
    }
  }
  report.complete = static_cast<int>(report.molecules.size()) == cfg.count;
  return report;
}

void save_sample_report(const std::string& smiles_path, const std::string& meta_path,
                        const SampleReport& report, const SampleConfig& cfg,
                        uint64_t checkpoint_hash) {
  {
    std::ofstream f(smiles_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write samples: " + smiles_path);
    for (const auto& s : report.molecules) f << s << "\n";
  }
  std::ofstream f(meta_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write sample metadata: " + meta_path);
  f << "seed=" << cfg.seed << "\n"
    << "count=" << cfg.count << "\n"
    << "max_len=" << cfg.max_len << "\n"
    << "lfm_enabled=" << (cfg.lfm_enabled ? 1 : 0) << "\n"
    << "multinomial=" << (cfg.multinomial ? 1 : 0) << "\n"
    << "temperature=" << cfg.temperature << "\n"
    << "attempts=" << report.attempts << "\n"
    << "accepted=" << report.molecules.size() << "\n"
    << "rejected_structure=" << report.rejected_structure << "\n"
    << "rejected_length=" << report.rejected_length << "\n"
    << "complete=" << (report.complete ? 1 : 0) << "\n"
    << "checkpoint_hash=" << checkpoint_hash << "\n";
}

}  // namespace fraggen
