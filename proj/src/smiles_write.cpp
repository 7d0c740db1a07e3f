#include <algorithm>
#include <map>
#include <set>

#include "fraggen/molgraph.hpp"

namespace fraggen {

namespace {

// mirrors the parser's implicit-hydrogen rule, so the writer can decide
// whether a bare atom token round-trips
int reader_implicit_h(Element e, bool aromatic, int fixed, int aromatic_bonds) {
  int defval;
  switch (e) {
    case Element::C: defval = 4; break;
    case Element::N: defval = 3; break;
    case Element::O: defval = 2; break;
    case Element::S: defval = 2; break;
    case Element::P: defval = 3; break;
    case Element::F:
    case Element::Cl:
    case Element::Br:
    case Element::I: defval = 1; break;
    default: return 0;
  }
  if (aromatic) {
    int h = defval - fixed - (aromatic_bonds + 1);
    if (h < 0) h = defval - fixed - aromatic_bonds;
    return h < 0 ? 0 : h;
  }
  if (e == Element::S) {
    for (int v : {2, 4, 6})
      if (v - fixed >= 0) return v - fixed;
    return 0;
  }
  if (e == Element::N || e == Element::P) {
    for (int v : {3, 5})
      if (v - fixed >= 0) return v - fixed;
    return 0;
  }
  return std::max(0, defval - fixed);
}

class Writer {
 public:
  Writer(const Molecule& mol, std::vector<int> order_key)
      : mol_(mol), key_(std::move(order_key)) {}

  std::string run(int root) {
    const int n = mol_.atom_count();
    visited_.assign(n, 0);
    bond_used_.assign(mol_.bond_count(), 0);
    out_.clear();
    if (n == 0) return out_;
    if (root < 0) {
      root = 0;
      for (int i = 1; i < n; ++i)
        if (key_[i] < key_[root]) root = i;
    }
    plan_closures(root);
    emit(root, -1);
    return out_;
  }

 private:
  std::vector<int> ordered_neighbors(int v) const {
    std::vector<int> bis = mol_.incident_bonds(v);
    std::sort(bis.begin(), bis.end(), [&](int x, int y) {
      return key_[mol_.bond(x).other(v)] < key_[mol_.bond(y).other(v)];
    });
    return bis;
  }

  // one DFS pass marking tree bonds; the rest become ring closures
  void plan_closures(int root) {
    std::vector<uint8_t> seen(mol_.atom_count(), 0);
    tree_bond_.assign(mol_.bond_count(), 0);
    std::vector<std::pair<int, int>> stack{{root, -1}};
    while (!stack.empty()) {
      auto [v, via] = stack.back();
      stack.pop_back();
      if (seen[v]) continue;
      seen[v] = 1;
      if (via >= 0) tree_bond_[via] = 1;
      auto bis = ordered_neighbors(v);
      // push in reverse so lowest-key neighbor is explored first
      for (auto it = bis.rbegin(); it != bis.rend(); ++it) {
        const int w = mol_.bond(*it).other(v);
        if (!seen[w]) stack.push_back({w, *it});
      }
    }
  }

  void append_bond_symbol(const Bond& b) {
    switch (b.order) {
      case BondOrder::Double: out_ += '='; return;
      case BondOrder::Triple: out_ += '#'; return;
      case BondOrder::Aromatic: return;  // implied by lowercase atoms
      case BondOrder::Single:
        if (mol_.atom(b.a).aromatic && mol_.atom(b.b).aromatic) out_ += '-';
        return;
    }
  }

  int allocate_digit() {
    int d = 1;
    while (digits_in_use_.count(d)) ++d;
    digits_in_use_.insert(d);
    return d;
  }

  void append_digit(int d) {
    if (d < 10) {
      out_ += static_cast<char>('0' + d);
    } else {
      out_ += '%';
      out_ += static_cast<char>('0' + d / 10);
      out_ += static_cast<char>('0' + d % 10);
    }
  }

  void append_atom_token(int v) {
    const Atom& a = mol_.atom(v);
    if (a.is_dummy()) {
      out_ += '*';  // link-type isotope labels dropped
      return;
    }
    int fixed = 0, arom = 0;
    for (int bi : mol_.incident_bonds(v)) {
      const BondOrder o = mol_.bond(bi).order;
      if (o == BondOrder::Aromatic)
        ++arom;
      else
        fixed += static_cast<int>(bond_order_value(o));
    }
    const bool plain_h =
        a.hydrogens() == reader_implicit_h(a.element, a.aromatic, fixed, arom);
    const bool bracket = a.charge != 0 || a.isotope != 0 || a.element == Element::H ||
                         !plain_h;
    std::string sym = element_symbol(a.element);
    if (a.aromatic)
      for (char& c : sym) c = static_cast<char>(std::tolower(c));
    if (!bracket) {
      out_ += sym;
      return;
    }
    out_ += '[';
    if (a.isotope != 0) out_ += std::to_string(a.isotope);
    out_ += sym;
    if (a.hydrogens() > 0) {
      out_ += 'H';
      if (a.hydrogens() > 1) out_ += static_cast<char>('0' + a.hydrogens());
    }
    if (a.charge != 0) {
      out_ += a.charge > 0 ? '+' : '-';
      if (std::abs(a.charge) > 1) out_ += static_cast<char>('0' + std::abs(a.charge));
    }
    out_ += ']';
  }

  void emit(int start, int parent_bond) {
    // iterative DFS with explicit output frames to place parentheses
    struct Frame {
      int v;
      int parent_bond;
      std::vector<int> children;  // tree bonds, ordered
      size_t next = 0;
    };
    std::vector<Frame> stack;
    auto open_atom = [&](int v, int via) {
      visited_[v] = 1;
      if (via >= 0) append_bond_symbol(mol_.bond(via));
      append_atom_token(v);
      // ring closures at this atom, in neighbor key order
      for (int bi : ordered_neighbors(v)) {
        if (tree_bond_[bi] || bond_used_[bi]) continue;
        const int w = mol_.bond(bi).other(v);
        auto it = open_digit_.find(bi);
        if (it == open_digit_.end()) {
          const int d = allocate_digit();
          open_digit_[bi] = d;
          append_bond_symbol(mol_.bond(bi));
          append_digit(d);
        } else {
          append_bond_symbol(mol_.bond(bi));
          append_digit(it->second);
          digits_in_use_.erase(it->second);
          open_digit_.erase(it);
          bond_used_[bi] = 1;
        }
        (void)w;
      }
      Frame f;
      f.v = v;
      f.parent_bond = via;
      for (int bi : ordered_neighbors(v)) {
        if (!tree_bond_[bi] || bi == via) continue;
        const int w = mol_.bond(bi).other(v);
        if (!visited_[w]) f.children.push_back(bi);
      }
      stack.push_back(std::move(f));
    };
    open_atom(start, parent_bond);
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < f.children.size()) {
        const int bi = f.children[f.next++];
        const bool last = f.next == f.children.size();
        if (!last) out_ += '(';
        pending_close_.push_back(!last);
        open_atom(mol_.bond(bi).other(f.v), bi);
      } else {
        stack.pop_back();
        if (!pending_close_.empty()) {
          if (pending_close_.back()) out_ += ')';
          pending_close_.pop_back();
        }
      }
    }
  }

  const Molecule& mol_;
  std::vector<int> key_;
  std::vector<uint8_t> visited_;
  std::vector<uint8_t> tree_bond_;
  std::vector<uint8_t> bond_used_;
  std::map<int, int> open_digit_;  // bond -> digit
  std::set<int> digits_in_use_;
  std::vector<bool> pending_close_;
  std::string out_;
};

}  // namespace

std::string write_smiles(const Molecule& mol, bool canonical) {
  std::vector<int> key;
  if (canonical) {
    key = canonical_ranks(mol);
  } else {
    key.resize(mol.atom_count());
    for (int i = 0; i < mol.atom_count(); ++i) key[i] = i;
  }
  return Writer(mol, std::move(key)).run(-1);
}

std::string write_smiles_rooted(const Molecule& mol, int root) {
  std::vector<int> key(mol.atom_count());
  for (int i = 0; i < mol.atom_count(); ++i) key[i] = i;
  return Writer(mol, std::move(key)).run(root);
}

std::string canonical_smiles(const Molecule& mol) { return write_smiles(mol, true); }

std::string canonical_smiles(const std::string& smiles) {
  return write_smiles(parse_smiles(smiles), true);
}

}  // namespace fraggen
