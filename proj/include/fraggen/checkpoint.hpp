#pragma once

#include <cstdint>
#include <string>

#include "fraggen/seqmodel.hpp"

namespace fraggen {

// Versioned binary container: named tensors with explicit shapes, row-major
// little-endian doubles, plus the effective config text and the vocabulary
// hash used to train.
void save_checkpoint(const std::string& path, const ModelParameters& params,
                     const std::string& config_text, uint64_t vocab_hash);

struct Checkpoint {
  ModelParameters params;
  std::string config_text;
  uint64_t vocab_hash = 0;
};

Checkpoint load_checkpoint(const std::string& path);

uint64_t file_hash(const std::string& path);  // FNV-1a over raw bytes

}  // namespace fraggen
