#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fraggen {

enum class Element : uint8_t { C, N, O, S, P, F, Cl, Br, I, H, Dummy };

const char* element_symbol(Element e);
std::optional<Element> element_from_symbol(std::string_view s);
bool element_aromatic_capable(Element e);

enum class BondOrder : uint8_t { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

// aromatic counts as 1.5
double bond_order_value(BondOrder o);

struct Atom {
  Element element = Element::C;
  int8_t charge = 0;
  bool aromatic = false;
  int16_t isotope = 0;    // 0 = unspecified
  int8_t explicit_h = -1; // -1 = implicit; bracket atoms always set this
  int8_t implicit_h = 0;  // resolved at parse time

  int hydrogens() const { return explicit_h >= 0 ? explicit_h : implicit_h; }
  bool is_dummy() const { return element == Element::Dummy; }
};

struct Bond {
  int a = 0, b = 0;
  BondOrder order = BondOrder::Single;
  int other(int atom) const { return atom == a ? b : a; }
};

// Connected molecular graph. Atom order is the SMILES traversal order of the
// string it came from; all downstream scans (BRICS, fragment roles) rely on it.
class Molecule {
 public:
  Molecule() = default;

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }
  const Atom& atom(int i) const { return atoms_[i]; }
  Atom& atom(int i) { return atoms_[i]; }
  const Bond& bond(int i) const { return bonds_[i]; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }

  // neighbors in bond-insertion order
  const std::vector<int>& neighbors(int i) const { return adj_[i]; }
  const std::vector<int>& incident_bonds(int i) const { return adj_bonds_[i]; }
  std::optional<int> bond_between(int a, int b) const;

  int add_atom(const Atom& a);
  int add_bond(int a, int b, BondOrder order);  // throws on self-loop / parallel bond

  void remove_bond(int bond_index);
  // Removes the given atoms (and their bonds), compacting indices while
  // preserving relative order. Returns old->new map, -1 for removed atoms.
  std::vector<int> remove_atoms(const std::vector<int>& indices);

  int degree(int i) const { return static_cast<int>(adj_[i].size()); }
  double bond_order_sum(int i) const;
  int dummy_count() const;

  bool connected() const;
  bool is_ring_bond(int bond_index) const;  // bond lies on a cycle
  bool is_ring_atom(int i) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::vector<int>> adj_bonds_;
  mutable std::vector<uint8_t> ring_bond_;
  mutable bool ring_cache_valid_ = false;
  void compute_ring_bonds() const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, size_t offset);
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

// Accepts the organic subset (C N O S P F Cl Br I H, aromatic c n o s),
// bracket atoms with isotope/charge/explicit H, ring closures incl. %nn,
// branches, bond symbols - = # :, and dummy atoms (*). Stereo markers are
// parsed and dropped (a note lands in *warnings when given). Multi-component
// inputs ('.') are rejected.
Molecule parse_smiles(std::string_view text, std::vector<std::string>* warnings = nullptr);

std::string write_smiles(const Molecule& mol, bool canonical);
// Non-canonical write starting the traversal at a chosen atom; the root is
// the first atom in reading order of the result.
std::string write_smiles_rooted(const Molecule& mol, int root);
std::string canonical_smiles(const Molecule& mol);
std::string canonical_smiles(const std::string& smiles);  // parse + canonical write

// Permutation-invariant atom ranks driving the canonical writer.
std::vector<int> canonical_ranks(const Molecule& mol);

bool check_valence(const Molecule& mol);
bool atom_valence_ok(const Molecule& mol, int i);

// SSSR ring counts bucketed by size; only sizes 3..6 are reported.
std::map<int, int> ring_counts(const Molecule& mol);
// Full minimum cycle basis sizes (unbucketed), used by ring_counts and stats.
std::vector<int> sssr_sizes(const Molecule& mol);

struct StructuralFeatures {
  std::map<std::string, int> atom_counts;  // element -> count, dummies/implicit H excluded
  std::map<std::string, int> bond_counts;  // single/double/triple/aromatic
  std::map<int, int> ring_counts;          // sizes 3..6
  int heavy_atoms = 0;
  int bonds = 0;
  int rings = 0;  // SSSR count, all sizes
};

StructuralFeatures structural_features(const Molecule& mol);

// Wildman-Crippen logP; throws UnclassifiableAtom for elements outside the
// published typing table. Hydrogens contribute through their heavy atom.
double crippen_logp(const Molecule& mol);
// Per-heavy-atom contributions (each including its hydrogens); sums to
// crippen_logp exactly.
std::vector<double> crippen_contributions(const Molecule& mol);

class UnclassifiableAtom : public std::runtime_error {
 public:
  UnclassifiableAtom(const std::string& msg, int atom_index);
  int atom_index() const { return atom_index_; }

 private:
  int atom_index_;
};

}  // namespace fraggen
