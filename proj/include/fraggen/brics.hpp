#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fraggen/molgraph.hpp"

namespace fraggen {

// BRICS link environments (Degen et al. rule set, minus the L7/L7 double-bond
// rule: only acyclic single bonds are ever cleaved here). Encoded as a bitmask
// per atom.
enum BricsEnv : uint32_t {
  kEnvL1 = 1u << 1,
  kEnvL3 = 1u << 3,
  kEnvL4 = 1u << 4,
  kEnvL5 = 1u << 5,
  kEnvL6 = 1u << 6,
  kEnvL8 = 1u << 8,
  kEnvL9 = 1u << 9,
  kEnvL10 = 1u << 10,
  kEnvL11 = 1u << 11,
  kEnvL12 = 1u << 12,
  kEnvL13 = 1u << 13,
  kEnvL14 = 1u << 14,
  kEnvL15 = 1u << 15,
  kEnvL16 = 1u << 16,
};

uint32_t brics_environments(const Molecule& mol, int atom);
bool brics_pair_licensed(int env_a, int env_b);  // env ids 1..16

// True when the bond is an acyclic single bond whose endpoint environments
// form a licensed pair.
bool brics_breakable(const Molecule& mol, int bond_index);

// First breakable bond in atom-major SMILES order (per-atom bonds examined
// toward higher-index neighbors, in neighbor order).
std::optional<int> find_first_brics_bond(const Molecule& mol);

// Every breakable bond, as (a, b) index pairs with a < b, in scan order.
std::vector<std::pair<int, int>> find_all_brics_bonds(const Molecule& mol);

struct Fragment {
  Molecule mol;

  int attachment_count() const { return mol.dummy_count(); }
  std::vector<int> attachment_atoms() const;  // dummy indices, ascending
  // For two-attachment fragments the larger-index dummy faces the following
  // fragment in the chain.
  int right_attachment() const;
  int left_attachment() const;
};

struct FragmentSequence {
  std::vector<Fragment> frags;

  size_t size() const { return frags.size(); }
  // terminal fragments carry one attachment, intermediates two
  bool linear_chain() const;
};

// Cleaves the bond, caps both ends with dummy atoms (appended after all
// existing atoms), and splits. "left" is the component holding the smaller
// SMILES index endpoint.
struct BreakResult {
  Fragment left;
  Molecule right;
};
BreakResult break_bond(const Molecule& mol, int bond_index);

struct FragmentationOutcome {
  bool linear = true;
  FragmentSequence seq;  // meaningful only when linear
};

// Algorithm: find first BRICS bond; none -> emit remainder; else break, emit
// leftmost piece, recurse on the rightmost. Molecules whose fragment chain
// violates the attachment constraint come back with linear == false.
FragmentationOutcome fragment_molecule(const Molecule& mol);

// Right-to-left fold joining open attachments with single bonds; inverse of
// fragment_molecule on linear chains. Throws ReassembleError when the
// sequence violates the attachment-chain constraint.
Molecule reassemble(const FragmentSequence& seq);
Molecule reassemble_smiles(const std::vector<std::string>& fragment_smiles);

class ReassembleError : public std::runtime_error {
 public:
  explicit ReassembleError(const std::string& msg) : std::runtime_error(msg) {}
};

int attachment_points(const Fragment& frag);

// Fragment-sequence file line: fragments space-joined in reconstruction
// order; middle/last fragments are written rooted at their left attachment so
// reading order preserves chain roles. A leading '!' marks excluded lines.
std::string fragment_sequence_line(const FragmentSequence& seq);
std::vector<std::string> split_fragment_line(const std::string& line);

}  // namespace fraggen
