#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fraggen/rng.hpp"

namespace fraggen {

// Fixed special ids; fragment/mask tokens start at 3.
inline constexpr int kPadId = 0;
inline constexpr int kSosId = 1;
inline constexpr int kEosId = 2;

class OovError : public std::runtime_error {
 public:
  explicit OovError(const std::string& fragment)
      : std::runtime_error("out-of-vocabulary fragment: " + fragment) {}
};

// Token <-> id map over fragment SMILES with low-frequency masking: fragments
// seen fewer than k times collapse into "<freq>_<attachments>" tokens, with
// the reverse mapping kept for sampling-time unmasking.
class Vocabulary {
 public:
  // corpus: canonical fragment SMILES per sequence
  static Vocabulary build(const std::vector<std::vector<std::string>>& corpus, int k);

  int size() const { return static_cast<int>(id_to_token_.size()); }
  int threshold_k() const { return threshold_k_; }

  const std::string& token(int id) const { return id_to_token_.at(id); }
  int id(const std::string& token) const;
  bool contains(const std::string& token) const;
  int64_t frequency(int id) const { return frequencies_.at(id); }

  // identity or mask token for a fragment; throws OovError
  const std::string& token_for_fragment(const std::string& fragment) const;
  std::vector<int> encode(const std::vector<std::string>& fragments) const;
  std::vector<std::string> decode(const std::vector<int>& ids) const;

  bool is_special(int id) const { return id < 3; }
  bool is_mask_token(int id) const { return mask_attachments_.at(id) >= 0 && !is_special(id); }
  // attachment-point count a token stands for (parsed for fragments, encoded
  // in the name for mask tokens); -1 for specials
  int attachments(int id) const;

  const std::map<std::string, std::vector<std::string>>& mask_groups() const {
    return mask_groups_;
  }
  std::string unmask(const std::string& mask_token, Rng& rng) const;

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);
  std::string serialize() const;
  uint64_t content_hash() const;  // FNV-1a over the serialized form

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
  std::vector<int64_t> frequencies_;
  std::vector<int> attachments_;       // per id; -1 specials
  std::vector<int> mask_attachments_;  // per id; -1 when not a mask token
  std::map<std::string, std::vector<std::string>> mask_groups_;
  std::unordered_map<std::string, std::string> fragment_to_mask_;
  int threshold_k_ = 0;
};

}  // namespace fraggen
