#include "fraggen/molgraph.hpp"

#include <algorithm>
#include <array>
#include <functional>

namespace fraggen {

const char* element_symbol(Element e) {
  switch (e) {
    case Element::C: return "C";
    case Element::N: return "N";
    case Element::O: return "O";
    case Element::S: return "S";
    case Element::P: return "P";
    case Element::F: return "F";
    case Element::Cl: return "Cl";
    case Element::Br: return "Br";
    case Element::I: return "I";
    case Element::H: return "H";
    case Element::Dummy: return "*";
  }
  return "?";
}

std::optional<Element> element_from_symbol(std::string_view s) {
  if (s == "C") return Element::C;
  if (s == "N") return Element::N;
  if (s == "O") return Element::O;
  if (s == "S") return Element::S;
  if (s == "P") return Element::P;
  if (s == "F") return Element::F;
  if (s == "Cl") return Element::Cl;
  if (s == "Br") return Element::Br;
  if (s == "I") return Element::I;
  if (s == "H") return Element::H;
  if (s == "*") return Element::Dummy;
  return std::nullopt;
}

bool element_aromatic_capable(Element e) {
  return e == Element::C || e == Element::N || e == Element::O || e == Element::S ||
         e == Element::P;
}

double bond_order_value(BondOrder o) {
  switch (o) {
    case BondOrder::Single: return 1.0;
    case BondOrder::Double: return 2.0;
    case BondOrder::Triple: return 3.0;
    case BondOrder::Aromatic: return 1.5;
  }
  return 0.0;
}

ParseError::ParseError(const std::string& msg, size_t offset)
    : std::runtime_error(msg + " (at offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

UnclassifiableAtom::UnclassifiableAtom(const std::string& msg, int atom_index)
    : std::runtime_error(msg), atom_index_(atom_index) {}

std::optional<int> Molecule::bond_between(int a, int b) const {
  for (int bi : adj_bonds_[a]) {
    if (bonds_[bi].other(a) == b) return bi;
  }
  return std::nullopt;
}

int Molecule::add_atom(const Atom& a) {
  atoms_.push_back(a);
  adj_.emplace_back();
  adj_bonds_.emplace_back();
  ring_cache_valid_ = false;
  return static_cast<int>(atoms_.size()) - 1;
}

int Molecule::add_bond(int a, int b, BondOrder order) {
  if (a == b) throw std::invalid_argument("self-loop bond");
  if (a < 0 || b < 0 || a >= atom_count() || b >= atom_count())
    throw std::invalid_argument("bond endpoint out of range");
  if (bond_between(a, b)) throw std::invalid_argument("parallel bond");
  bonds_.push_back({a, b, order});
  const int bi = static_cast<int>(bonds_.size()) - 1;
  adj_[a].push_back(b);
  adj_[b].push_back(a);
  adj_bonds_[a].push_back(bi);
  adj_bonds_[b].push_back(bi);
  ring_cache_valid_ = false;
  return bi;
}

void Molecule::remove_bond(int bond_index) {
  const Bond removed = bonds_[bond_index];
  bonds_.erase(bonds_.begin() + bond_index);
  for (int v : {removed.a, removed.b}) {
    auto& nb = adj_[v];
    auto& nbb = adj_bonds_[v];
    for (size_t k = 0; k < nbb.size(); ++k) {
      if (nbb[k] == bond_index) {
        nb.erase(nb.begin() + static_cast<long>(k));
        nbb.erase(nbb.begin() + static_cast<long>(k));
        break;
      }
    }
  }
  for (auto& lst : adj_bonds_)
    for (int& bi : lst)
      if (bi > bond_index) --bi;
  ring_cache_valid_ = false;
}

std::vector<int> Molecule::remove_atoms(const std::vector<int>& indices) {
  std::vector<uint8_t> gone(atoms_.size(), 0);
  for (int i : indices) gone[i] = 1;
  std::vector<int> remap(atoms_.size(), -1);
  int next = 0;
  for (size_t i = 0; i < atoms_.size(); ++i)
    if (!gone[i]) remap[i] = next++;

  std::vector<Atom> new_atoms;
  new_atoms.reserve(static_cast<size_t>(next));
  for (size_t i = 0; i < atoms_.size(); ++i)
    if (!gone[i]) new_atoms.push_back(atoms_[i]);

  std::vector<Bond> new_bonds;
  for (const Bond& b : bonds_) {
    if (gone[b.a] || gone[b.b]) continue;
    new_bonds.push_back({remap[b.a], remap[b.b], b.order});
  }

  atoms_ = std::move(new_atoms);
  bonds_.clear();
  adj_.assign(atoms_.size(), {});
  adj_bonds_.assign(atoms_.size(), {});
  for (const Bond& b : new_bonds) add_bond(b.a, b.b, b.order);
  ring_cache_valid_ = false;
  return remap;
}

double Molecule::bond_order_sum(int i) const {
  double s = 0.0;
  for (int bi : adj_bonds_[i]) s += bond_order_value(bonds_[bi].order);
  return s;
}

int Molecule::dummy_count() const {
  int n = 0;
  for (const Atom& a : atoms_)
    if (a.is_dummy()) ++n;
  return n;
}

bool Molecule::connected() const {
  if (atoms_.empty()) return true;
  std::vector<uint8_t> seen(atoms_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == atom_count();
}

// Ring bonds = non-bridges (Tarjan low-link over an iterative DFS).
void Molecule::compute_ring_bonds() const {
  const int n = atom_count();
  ring_bond_.assign(bonds_.size(), 1);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;

  struct Frame {
    int v;
    int parent_bond;
    size_t edge;
  };

  for (int root = 0; root < n; ++root) {
    if (disc[root] != -1) continue;
    std::vector<Frame> stack{{root, -1, 0}};
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.edge < adj_bonds_[f.v].size()) {
        const int bi = adj_bonds_[f.v][f.edge++];
        if (bi == f.parent_bond) continue;
        const int w = bonds_[bi].other(f.v);
        if (disc[w] == -1) {
          disc[w] = low[w] = timer++;
          stack.push_back({w, bi, 0});
        } else {
          low[f.v] = std::min(low[f.v], disc[w]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          Frame& par = stack.back();
          low[par.v] = std::min(low[par.v], low[done.v]);
          if (low[done.v] > disc[par.v]) ring_bond_[done.parent_bond] = 0;  // bridge
        }
      }
    }
  }
  // degree-1 pendant bonds are bridges too; handled by low-link above
  ring_cache_valid_ = true;
}

bool Molecule::is_ring_bond(int bond_index) const {
  if (!ring_cache_valid_) compute_ring_bonds();
  return ring_bond_[bond_index] != 0;
}

bool Molecule::is_ring_atom(int i) const {
  for (int bi : adj_bonds_[i])
    if (is_ring_bond(bi)) return true;
  return false;
}

// ---- valence ---------------------------------------------------------------

namespace {

// Allowed valence sets for the neutral element (standard organic subset).
std::vector<int> base_valences(Element e) {
  switch (e) {
    case Element::C: return {4};
    case Element::N: return {3, 5};
    case Element::O: return {2};
    case Element::S: return {2, 4, 6};
    case Element::P: return {3, 5};
    case Element::F:
    case Element::Cl:
    case Element::Br:
    case Element::I: return {1};
    case Element::H: return {1};
    case Element::Dummy: return {};
  }
  return {};
}

std::vector<int> allowed_valences(Element e, int charge) {
  std::vector<int> out;
  if (e == Element::C) {
    // carbanion and carbocation are both trivalent
    out.push_back(4 - std::abs(charge));
    return out;
  }
  for (int v : base_valences(e)) {
    const int w = v + charge;  // onium gains a bond, anion loses one
    if (w >= 0) out.push_back(w);
  }
  return out;
}

}  // namespace

bool atom_valence_ok(const Molecule& mol, int i) {
  const Atom& a = mol.atom(i);
  if (a.is_dummy()) {
    return mol.degree(i) == 1 && a.hydrogens() == 0 &&
           mol.bond(mol.incident_bonds(i)[0]).order == BondOrder::Single;
  }
  int aromatic_bonds = 0;
  int fixed = 0;
  for (int bi : mol.incident_bonds(i)) {
    const BondOrder o = mol.bond(bi).order;
    if (o == BondOrder::Aromatic) {
      ++aromatic_bonds;
    } else {
      fixed += static_cast<int>(bond_order_value(o));
    }
  }
  if (aromatic_bonds > 0 && !a.aromatic) return false;
  const int h = a.hydrogens();
  const auto allowed = allowed_valences(a.element, a.charge);
  if (aromatic_bonds == 0) {
    const int total = fixed + h;
    return std::find(allowed.begin(), allowed.end(), total) != allowed.end();
  }
  // k aromatic bonds contribute k (sigma only) or k+1 (sigma + one pi)
  for (int pi : {0, 1}) {
    const int total = fixed + h + aromatic_bonds + pi;
    if (std::find(allowed.begin(), allowed.end(), total) != allowed.end()) return true;
  }
  return false;
}

bool check_valence(const Molecule& mol) {
  for (int i = 0; i < mol.atom_count(); ++i) {
    const Atom& a = mol.atom(i);
    // aromatic flags must sit on aromatic-capable elements in a ring context
    if (a.aromatic && !element_aromatic_capable(a.element)) return false;
    if (!atom_valence_ok(mol, i)) return false;
  }
  for (const Bond& b : mol.bonds()) {
    if (b.order == BondOrder::Aromatic &&
        (!mol.atom(b.a).aromatic || !mol.atom(b.b).aromatic))
      return false;
  }
  return true;
}

StructuralFeatures structural_features(const Molecule& mol) {
  StructuralFeatures f;
  for (const Atom& a : mol.atoms()) {
    if (a.is_dummy() || a.element == Element::H) continue;
    ++f.atom_counts[element_symbol(a.element)];
    ++f.heavy_atoms;
  }
  for (const Bond& b : mol.bonds()) {
    if (mol.atom(b.a).is_dummy() || mol.atom(b.b).is_dummy()) continue;
    const char* name = b.order == BondOrder::Single    ? "single"
                       : b.order == BondOrder::Double  ? "double"
                       : b.order == BondOrder::Triple  ? "triple"
                                                       : "aromatic";
    ++f.bond_counts[name];
    ++f.bonds;
  }
  for (int size : sssr_sizes(mol)) {
    ++f.rings;
    if (size >= 3 && size <= 6) ++f.ring_counts[size];
  }
  return f;
}

}  // namespace fraggen
