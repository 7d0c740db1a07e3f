#pragma once

#include <string>
#include <vector>

#include "fraggen/seqmodel.hpp"
#include "fraggen/vocab.hpp"

namespace fraggen {

struct SampleConfig {
  int count = 1;
  int max_len = 12;
  uint64_t seed = 1;
  bool lfm_enabled = true;
  // off-spec exploration mode; the paper's decoder is argmax
  bool multinomial = false;
  double temperature = 1.0;
  int attempt_factor = 10;  // attempt budget = attempt_factor * count
};

struct GenerationOutcome {
  enum class Kind { Accepted, StructureReject, LengthReject };
  Kind kind = Kind::StructureReject;
  std::vector<std::string> fragments;  // unmasked fragment SMILES, chain order
};

// z ~ N(0,I); greedy argmax decoding from SOS until EOS or max_len; mask
// tokens are resolved through vocab.unmask but the mask embedding itself is
// fed back. Sequences violating the attachment-chain constraint are rejected.
GenerationOutcome generate_one(const ModelParameters& params, const Vocabulary& vocab,
                               Rng& rng, int max_len, bool lfm_enabled,
                               bool multinomial = false, double temperature = 1.0);

struct SampleReport {
  std::vector<std::string> molecules;  // canonical SMILES of accepted molecules
  std::vector<std::vector<std::string>> raw_sequences;
  int attempts = 0;
  int rejected_structure = 0;
  int rejected_length = 0;
  bool complete = true;
};

// Repeats generate_one until cfg.count molecules are accepted or the attempt
// budget runs out; accepted chains are reassembled and canonicalized.
SampleReport sample_batch(const ModelParameters& params, const Vocabulary& vocab,
                          const SampleConfig& cfg);

void save_sample_report(const std::string& smiles_path, const std::string& meta_path,
                        const SampleReport& report, const SampleConfig& cfg,
                        uint64_t checkpoint_hash);

}  // namespace fraggen
