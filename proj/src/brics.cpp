#include "fraggen/brics.hpp"

#include <algorithm>
#include <sstream>

namespace fraggen {

namespace {


bool has_double_bond(const Molecule& m, int i) {
  for (int bi : m.incident_bonds(i))
    if (m.bond(bi).order == BondOrder::Double) return true;
  return false;
}

bool all_single_bonds(const Molecule& m, int i) {
  for (int bi : m.incident_bonds(i))
    if (m.bond(bi).order != BondOrder::Single) return false;
  return true;
}

bool double_bond_to_o(const Molecule& m, int i) {
  for (int bi : m.incident_bonds(i)) {
    const Bond& b = m.bond(bi);
    if (b.order == BondOrder::Double && m.atom(b.other(i)).element == Element::O)
      return true;
  }
  return false;
}

bool acyclic_single_to(const Molecule& m, int i, auto pred) {
  for (int bi : m.incident_bonds(i)) {
    const Bond& b = m.bond(bi);
    if (b.order != BondOrder::Single || m.is_ring_bond(bi)) continue;
    if (pred(m.atom(b.other(i)))) return true;
  }
  return false;
}

bool neighbor_set_ok_l5(const Molecule& m, int i) {
  for (int n : m.neighbors(i)) {
    const Atom& a = m.atom(n);
    if (a.element == Element::C || a.element == Element::S || a.is_dummy() ||
        a.element == Element::H)
      continue;
    return false;
  }
  return true;
}

bool is_cyclic_amide_n(const Molecule& m, int i) {
  for (int bi : m.incident_bonds(i)) {
    const Bond& b = m.bond(bi);
    if (!m.is_ring_bond(bi)) continue;
    const int c = b.other(i);
    if (m.atom(c).element == Element::C && !m.atom(c).aromatic && double_bond_to_o(m, c))
      return true;
  }
  return false;
}

}  // namespace

uint32_t brics_environments(const Molecule& m, int i) {
  const Atom& a = m.atom(i);
  uint32_t env = 0;
  const int deg = m.degree(i);

  if (a.element == Element::C && !a.aromatic) {
    // L1: acyl carbon, three connections, C=O, some neighbor in {*, C, N, O}
    if (deg == 3 && double_bond_to_o(m, i)) {
      bool partner = false;
      for (int n : m.neighbors(i)) {
        const Element e = m.atom(n).element;
        if (e == Element::C || e == Element::N || e == Element::O ||
            e == Element::Dummy)
          partner = true;
      }
      if (partner) {
        env |= kEnvL1;
        // L6: same, outside rings, with an acyclic single bond to {*, C, N, O}
        if (!m.is_ring_atom(i) &&
            acyclic_single_to(m, i, [](const Atom& x) {
              return x.element == Element::C || x.element == Element::N ||
                     x.element == Element::O || x.is_dummy();
            }))
          env |= kEnvL6;
      }
    }
    // L4: no double bonds, degree > 1, an acyclic single bond to carbon
    if (deg > 1 && !has_double_bond(m, i) &&
        acyclic_single_to(m, i, [](const Atom& x) { return x.element == Element::C; }))
      env |= kEnvL4;
    // L8: acyclic, degree > 1, every bond single
    if (!m.is_ring_atom(i) && deg > 1 && all_single_bonds(m, i)) env |= kEnvL8;
    // L13: ring C single-ring-bonded to {N,O,S} and to another ring {C,N,O,S}
    {
      int ring_hetero = 0, ring_any = 0;
      for (int bi : m.incident_bonds(i)) {
        const Bond& b = m.bond(bi);
        if (!m.is_ring_bond(bi) || b.order != BondOrder::Single) continue;
        const Element e = m.atom(b.other(i)).element;
        if (e == Element::N || e == Element::O || e == Element::S) {
          ++ring_hetero;
          ++ring_any;
        } else if (e == Element::C) {
          ++ring_any;
        }
      }
      if (ring_hetero >= 1 && ring_any >= 2) env |= kEnvL13;
    }
    // L15: ring C single-ring-bonded to two ring carbons
    {
      int ring_c = 0;
      for (int bi : m.incident_bonds(i)) {
        const Bond& b = m.bond(bi);
        if (!m.is_ring_bond(bi) || b.order != BondOrder::Single) continue;
        if (m.atom(b.other(i)).element == Element::C) ++ring_c;
      }
      if (ring_c >= 2) env |= kEnvL15;
    }
  }

  if (a.element == Element::C && a.aromatic) {
    int arom_c = 0, arom_hetero = 0, arom_all = 0;
    for (int bi : m.incident_bonds(i)) {
      const Bond& b = m.bond(bi);
      if (b.order != BondOrder::Aromatic) continue;
      const Atom& x = m.atom(b.other(i));
      if (!x.aromatic) continue;
      ++arom_all;
      if (x.element == Element::C) ++arom_c;
      if (x.element == Element::N || x.element == Element::O || x.element == Element::S)
        ++arom_hetero;
    }
    if (arom_c >= 2) env |= kEnvL16;
    if (arom_hetero >= 1 && arom_all >= 2) env |= kEnvL14;
  }

  if (a.element == Element::N && !a.aromatic) {
    // L5: amine nitrogen -- no N=X, neighbors limited to C/S/H/dummy,
    // cyclic amide nitrogens excluded (those are L10)
    if (deg > 1 && !has_double_bond(m, i) && neighbor_set_ok_l5(m, i) &&
        !is_cyclic_amide_n(m, i))
      env |= kEnvL5;
    // L10: lactam nitrogen with another in-ring neighbor
    if (m.is_ring_atom(i) && is_cyclic_amide_n(m, i)) {
      int ring_others = 0;
      for (int bi : m.incident_bonds(i))
        if (m.is_ring_bond(bi)) ++ring_others;
      if (ring_others >= 2) env |= kEnvL10;
    }
  }

  if (a.element == Element::N && a.aromatic && a.charge == 0) {
    int arom_ok = 0;
    for (int bi : m.incident_bonds(i)) {
      const Bond& b = m.bond(bi);
      if (b.order != BondOrder::Aromatic) continue;
      const Element e = m.atom(b.other(i)).element;
      if (e == Element::C || e == Element::N || e == Element::O || e == Element::S)
        ++arom_ok;
    }
    if (arom_ok >= 2) env |= kEnvL9;
  }

  if (a.element == Element::O && !a.aromatic && deg == 2 && all_single_bonds(m, i)) {
    // L3: ether/ester oxygen with an acyclic single bond to {*, C}
    if (acyclic_single_to(m, i, [](const Atom& x) {
          return x.element == Element::C || x.is_dummy();
        }))
      env |= kEnvL3;
  }

  if (a.element == Element::S && !a.aromatic) {
    if (deg == 2 && all_single_bonds(m, i) &&
        acyclic_single_to(m, i, [](const Atom& x) {
          return x.element == Element::C || x.is_dummy();
        }))
      env |= kEnvL11;
    if (deg == 4) {
      int dbl_o = 0;
      bool partner = false;
      for (int bi : m.incident_bonds(i)) {
        const Bond& b = m.bond(bi);
        const Atom& x = m.atom(b.other(i));
        if (b.order == BondOrder::Double && x.element == Element::O) ++dbl_o;
        if (b.order == BondOrder::Single && (x.element == Element::C || x.is_dummy()))
          partner = true;
      }
      if (dbl_o >= 2 && partner) env |= kEnvL12;
    }
  }

  return env;
}

bool brics_pair_licensed(int x, int y) {
  if (x > y) std::swap(x, y);
  static const std::pair<int, int> kPairs[] = {
      {1, 3},   {1, 5},   {1, 10},  {3, 4},   {3, 13},  {3, 14},  {3, 15},
      {3, 16},  {4, 5},   {4, 11},  {5, 12},  {5, 13},  {5, 14},  {5, 15},
      {5, 16},  {6, 13},  {6, 14},  {6, 15},  {6, 16},  {8, 9},   {8, 10},
      {8, 13},  {8, 14},  {8, 15},  {8, 16},  {9, 13},  {9, 14},  {9, 15},
      {9, 16},  {10, 13}, {10, 14}, {10, 15}, {10, 16}, {11, 13}, {11, 14},
      {11, 15}, {11, 16}, {12, 13}, {12, 14}, {12, 15}, {12, 16}, {13, 14},
      {13, 15}, {13, 16}, {14, 14}, {14, 15}, {14, 16}, {15, 16}, {16, 16},
  };
  for (const auto& p : kPairs)
    if (p.first == x && p.second == y) return true;
  return false;
}

bool brics_breakable(const Molecule& m, int bond_index) {
  const Bond& b = m.bond(bond_index);
  if (b.order != BondOrder::Single || m.is_ring_bond(bond_index)) return false;
  if (m.atom(b.a).is_dummy() || m.atom(b.b).is_dummy()) return false;
  const uint32_t ea = brics_environments(m, b.a);
  const uint32_t eb = brics_environments(m, b.b);
  if (!ea || !eb) return false;
  for (int x = 1; x <= 16; ++x) {
    if (!(ea & (1u << x))) continue;
    for (int y = 1; y <= 16; ++y) {
      if (!(eb & (1u << y))) continue;
      if (brics_pair_licensed(x, y)) return true;
    }
  }
  return false;
}

std::optional<int> find_first_brics_bond(const Molecule& m) {
  for (int i = 0; i < m.atom_count(); ++i) {
    for (int bi : m.incident_bonds(i)) {
      if (m.bond(bi).other(i) < i) continue;  // toward higher-index atoms only
      if (brics_breakable(m, bi)) return bi;
    }
  }
  return std::nullopt;
}

std::vector<std::pair<int, int>> find_all_brics_bonds(const Molecule& m) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < m.atom_count(); ++i) {
    for (int bi : m.incident_bonds(i)) {
      const int j = m.bond(bi).other(i);
      if (j < i) continue;
      if (brics_breakable(m, bi)) out.emplace_back(i, j);
    }
  }
  return out;
}

std::vector<int> Fragment::attachment_atoms() const {
  std::vector<int> out;
  for (int i = 0; i < mol.atom_count(); ++i)
    if (mol.atom(i).is_dummy()) out.push_back(i);
  return out;
}

int Fragment::right_attachment() const {
  const auto at = attachment_atoms();
  return at.empty() ? -1 : at.back();
}

int Fragment::left_attachment() const {
  const auto at = attachment_atoms();
  return at.empty() ? -1 : at.front();
}

bool FragmentSequence::linear_chain() const {
  if (frags.empty()) return false;
  if (frags.size() == 1) return frags[0].attachment_count() == 0;
  for (size_t i = 0; i < frags.size(); ++i) {
    const int want = (i == 0 || i + 1 == frags.size()) ? 1 : 2;
    if (frags[i].attachment_count() != want) return false;
  }
  return true;
}

BreakResult break_bond(const Molecule& mol, int bond_index) {
  if (bond_index < 0 || bond_index >= mol.bond_count())
    throw std::invalid_argument("bond index out of range");
  if (mol.is_ring_bond(bond_index))
    throw std::invalid_argument("cannot break a ring bond");
  const int a = std::min(mol.bond(bond_index).a, mol.bond(bond_index).b);
  const int b = std::max(mol.bond(bond_index).a, mol.bond(bond_index).b);

  Molecule work = mol;
  work.remove_bond(bond_index);
  Atom dummy;
  dummy.element = Element::Dummy;
  dummy.explicit_h = 0;
  const int da = work.add_atom(dummy);
  work.add_bond(a, da, BondOrder::Single);
  const int db = work.add_atom(dummy);
  work.add_bond(b, db, BondOrder::Single);

  // split into the two components, preserving relative atom order
  std::vector<uint8_t> in_left(work.atom_count(), 0);
  std::vector<int> stack{a};
  in_left[a] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : work.neighbors(v)) {
      if (!in_left[w]) {
        in_left[w] = 1;
        stack.push_back(w);
      }
    }
  }

  Molecule left = work;
  {
    std::vector<int> drop;
    for (int i = 0; i < work.atom_count(); ++i)
      if (!in_left[i]) drop.push_back(i);
    left.remove_atoms(drop);
  }
  Molecule right = std::move(work);
  {
    std::vector<int> drop;
    for (int i = 0; i < right.atom_count(); ++i)
      if (in_left[i]) drop.push_back(i);
    right.remove_atoms(drop);
  }
  return {Fragment{std::move(left)}, std::move(right)};
}

FragmentationOutcome fragment_molecule(const Molecule& mol) {
  if (mol.dummy_count() > 0)
    throw std::invalid_argument("fragment_molecule input must not contain dummies");
  FragmentationOutcome out;
  Molecule rest = mol;
  while (true) {
    const auto bond = find_first_brics_bond(rest);
    if (!bond) {
      out.seq.frags.push_back(Fragment{std::move(rest)});
      break;
    }
    BreakResult r = break_bond(rest, *bond);
    out.seq.frags.push_back(std::move(r.left));
    rest = std::move(r.right);
  }
  out.linear = out.seq.linear_chain();
  return out;
}

namespace {

// join: drop both dummies, bond their former neighbors with a single bond;
// left fragment's atoms come first in the result
Molecule join(const Molecule& left, int left_dummy, const Molecule& right,
              int right_dummy) {
  const int un_left = left.neighbors(left_dummy)[0];
  const int un_right = right.neighbors(right_dummy)[0];
  Molecule out;
  std::vector<int> lmap(left.atom_count(), -1), rmap(right.atom_count(), -1);
  for (int i = 0; i < left.atom_count(); ++i)
    if (i != left_dummy) lmap[i] = out.add_atom(left.atom(i));
  for (int i = 0; i < right.atom_count(); ++i)
    if (i != right_dummy) rmap[i] = out.add_atom(right.atom(i));
  for (const Bond& b : left.bonds())
    if (b.a != left_dummy && b.b != left_dummy)
      out.add_bond(lmap[b.a], lmap[b.b], b.order);
  for (const Bond& b : right.bonds())
    if (b.a != right_dummy && b.b != right_dummy)
      out.add_bond(rmap[b.a], rmap[b.b], b.order);
  out.add_bond(lmap[un_left], rmap[un_right], BondOrder::Single);
  return out;
}

}  // namespace

Molecule reassemble(const FragmentSequence& seq) {
  const size_t n = seq.frags.size();
  if (n == 0) throw ReassembleError("empty fragment sequence");
  if (n == 1) {
    if (seq.frags[0].attachment_count() != 0)
      throw ReassembleError("single fragment must have zero attachment points");
    return seq.frags[0].mol;
  }
  if (!seq.linear_chain())
    throw ReassembleError("fragment sequence violates the attachment-chain constraint");

  // fold right to left; the partial molecule always exposes one open dummy
  Molecule partial = seq.frags[n - 1].mol;
  int open = seq.frags[n - 1].left_attachment();
  for (size_t k = n - 1; k-- > 0;) {
    const Fragment& f = seq.frags[k];
    const int right_dummy = f.right_attachment();
    const int left_dummy = f.attachment_count() == 2 ? f.left_attachment() : -1;
    Molecule joined = join(f.mol, right_dummy, partial, open);
    // left fragment atoms precede partial's, minus the consumed dummy
    if (left_dummy >= 0)
      open = left_dummy < right_dummy ? left_dummy : left_dummy - 1;
    partial = std::move(joined);
  }
  return partial;
}

Molecule reassemble_smiles(const std::vector<std::string>& fragment_smiles) {
  FragmentSequence seq;
  for (const auto& s : fragment_smiles) seq.frags.push_back(Fragment{parse_smiles(s)});
  return reassemble(seq);
}

int attachment_points(const Fragment& frag) { return frag.attachment_count(); }

std::string fragment_sequence_line(const FragmentSequence& seq) {
  std::string out;
  for (size_t i = 0; i < seq.frags.size(); ++i) {
    if (i) out += ' ';
    const Fragment& f = seq.frags[i];
    if (i == 0 || f.attachment_count() == 0) {
      out += write_smiles(f.mol, false);
    } else {
      out += write_smiles_rooted(f.mol, f.left_attachment());
    }
  }
  return out;
}

std::vector<std::string> split_fragment_line(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace fraggen
