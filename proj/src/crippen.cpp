#include <string>

#include "fraggen/molgraph.hpp"

namespace fraggen {

// Wildman & Crippen atom-contribution table, organic subset. Types are
// resolved by a decision tree equivalent to first-match-wins over the
// published SMARTS patterns; hydrogens contribute through their heavy atom.
namespace {

constexpr double kC1 = 0.1441, kC2 = 0.0, kC3 = -0.2035, kC4 = -0.2051;
constexpr double kC5 = -0.2783, kC6 = 0.1551, kC7 = 0.0017;
constexpr double kC8 = 0.08452, kC9 = -0.1444, kC10 = -0.0516, kC11 = 0.1193;
constexpr double kC12 = -0.0967, kC13 = -0.5443, kC14 = 0.0, kC15 = 0.245;
constexpr double kC16 = 0.198, kC17 = 0.0, kC18 = 0.1581, kC19 = 0.2955;
constexpr double kC20 = 0.2713, kC21 = 0.136, kC22 = 0.4619, kC23 = 0.5437;
constexpr double kC24 = 0.1893, kC25 = -0.8186, kC26 = 0.264, kCS = 0.08129;
constexpr double kH1 = 0.123, kH2 = -0.2677, kH3 = 0.2142, kH4 = 0.298;
constexpr double kN1 = -1.019, kN2 = -0.7096, kN3 = -1.027, kN4 = -0.5188;
constexpr double kN5 = 0.08387, kN6 = 0.1836, kN7 = -0.3187, kN8 = -0.4458;
constexpr double kN9 = 0.01508, kN10 = -1.95, kN11 = -0.3239, kN12 = -1.119;
constexpr double kN13 = -0.3396, kN14 = 0.2887, kNS = -0.4806;
constexpr double kO1 = 0.1552, kO2 = -0.2893, kO3 = -0.0684, kO4 = -0.4195;
constexpr double kO5 = 0.0335, kO6 = -0.3339, kO7 = -1.189, kO8 = 0.1788;
constexpr double kO9 = -0.1526, kO10 = 0.1129, kO11 = 0.4833, kO12 = -1.326;
constexpr double kOS = -0.1188;
constexpr double kF = 0.4202, kCl = 0.6895, kBr = 0.8456, kI = 0.8857;
constexpr double kHal = -2.996, kP = 0.8612;
constexpr double kS1 = 0.6482, kS2 = -0.0024, kS3 = 0.6237;

struct Ctx {
  const Molecule& mol;
  int i;
  const Atom& a;
  int aromatic_bonds = 0;
  int double_bonds = 0;
  int triple_bonds = 0;
  bool double_to_aliphatic_c = false;
  bool double_to_aromatic_c = false;
  bool double_to_hetero = false;
  bool has_hetero_neighbor = false;      // N O P S halogens
  bool has_aromatic_neighbor = false;
  bool has_aromatic_c_neighbor = false;

  Ctx(const Molecule& m, int idx) : mol(m), i(idx), a(m.atom(idx)) {
    for (int bi : m.incident_bonds(idx)) {
      const Bond& b = m.bond(bi);
      const Atom& nb = m.atom(b.other(idx));
      switch (b.order) {
        case BondOrder::Aromatic: ++aromatic_bonds; break;
        case BondOrder::Double:
          ++double_bonds;
          if (nb.element == Element::C) {
            if (nb.aromatic)
              double_to_aromatic_c = true;
            else
              double_to_aliphatic_c = true;
          } else {
            double_to_hetero = true;
          }
          break;
        case BondOrder::Triple: ++triple_bonds; break;
        case BondOrder::Single: break;
      }
      if (nb.aromatic) {
        has_aromatic_neighbor = true;
        if (nb.element == Element::C) has_aromatic_c_neighbor = true;
      }
      if (nb.element != Element::C && nb.element != Element::H &&
          nb.element != Element::Dummy)
        has_hetero_neighbor = true;
    }
  }
};

double carbon_value(const Ctx& c) {
  const int h = c.a.hydrogens();
  if (c.a.aromatic) {
    if (h > 0) return kC18;
    if (c.aromatic_bonds >= 3) return kC19;
    // one exocyclic partner
    for (int bi : c.mol.incident_bonds(c.i)) {
      const Bond& b = c.mol.bond(bi);
      if (b.order == BondOrder::Aromatic) continue;
      const Atom& x = c.mol.atom(b.other(c.i));
      if (b.order == BondOrder::Double) {
        if (x.element == Element::C || x.element == Element::N || x.element == Element::O)
          return kC25;
        return kCS;
      }
      switch (x.element) {
        case Element::F: return kC14;
        case Element::Cl: return kC15;
        case Element::Br: return kC16;
        case Element::I: return kC17;
        default: break;
      }
      if (x.aromatic) return kC20;
      switch (x.element) {
        case Element::C: return kC21;
        case Element::N: return kC22;
        case Element::O: return kC23;
        case Element::S: return kC24;
        default: return kC13;  // P and friends
      }
    }
    return kC19;  // no exocyclic bond recorded (charged edge cases)
  }
  if (c.double_bonds == 0 && c.triple_bonds == 0) {
    // sp3
    if (c.has_hetero_neighbor) return h >= 2 ? kC3 : kC4;
    if (c.has_aromatic_neighbor) {
      if (h >= 3) return c.has_aromatic_c_neighbor ? kC8 : kC9;
      if (h == 2) return kC10;
      if (h == 1) return kC11;
      return kC12;
    }
    return h >= 2 ? kC1 : kC2;
  }
  if (c.double_to_hetero && !c.double_to_aliphatic_c && !c.double_to_aromatic_c)
    return kC5;
  if (c.double_to_aromatic_c) return kC26;
  if (c.double_to_aliphatic_c) {
    if (c.has_aromatic_neighbor) return kC26;
    if (c.has_hetero_neighbor && c.double_to_hetero) return kC5;
    return kC6;
  }
  if (c.triple_bonds > 0 && c.mol.degree(c.i) <= 2) return kC7;
  return kCS;
}

double nitrogen_value(const Ctx& c) {
  const int h = c.a.hydrogens();
  if (c.a.charge > 0) {
    if (c.a.aromatic) return kN12;
    if (h > 0) return kN10;
    if (c.triple_bonds > 0) return kN14;
    return kN13;
  }
  if (c.a.charge < 0) return kNS;
  if (c.a.aromatic) return kN11;
  if (c.triple_bonds > 0) return kN9;
  if (c.double_bonds > 0) return h > 0 ? kN5 : kN6;
  if (h >= 2) return c.has_aromatic_neighbor ? kN3 : kN1;
  if (h == 1) return c.has_aromatic_neighbor ? kN4 : kN2;
  return c.has_aromatic_neighbor ? kN8 : kN7;
}

double oxygen_value(const Ctx& c) {
  if (c.a.aromatic) return kO1;
  if (c.a.charge < 0) {
    for (int n : c.mol.neighbors(c.i)) {
      const Atom& x = c.mol.atom(n);
      if (x.element == Element::N) return kO5;
      if (x.element == Element::S) return kO6;
      if (x.element == Element::C) {
        const Ctx cc(c.mol, n);
        if (cc.double_to_hetero) return kO12;  // carboxylate
      }
    }
    return kO7;
  }
  if (c.double_bonds > 0) {
    const int partner = [&] {
      for (int bi : c.mol.incident_bonds(c.i))
        if (c.mol.bond(bi).order == BondOrder::Double) return c.mol.bond(bi).other(c.i);
      return -1;
    }();
    const Atom& x = c.mol.atom(partner);
    if (x.element == Element::N || x.element == Element::O) return kO5;
    if (x.element == Element::S) return kO6;
    if (x.element == Element::C) {
      if (x.aromatic) return kO8;
      int hetero = 0;
      bool aromatic_c = false;
      for (int n : c.mol.neighbors(partner)) {
        if (n == c.i) continue;
        const Atom& y = c.mol.atom(n);
        if (y.element != Element::C && y.element != Element::H) ++hetero;
        if (y.element == Element::C && y.aromatic) aromatic_c = true;
      }
      const int others = c.mol.degree(partner) - 1;
      if (others >= 2 && hetero >= 2) return kO11;  // urea/carbamate-like
      if (aromatic_c) return kO10;
      return kO9;
    }
    return kOS;
  }
  if (c.a.hydrogens() >= 1) return kO2;
  if (c.mol.degree(c.i) == 2) return c.has_aromatic_neighbor ? kO4 : kO3;
  return kOS;
}

double hydrogen_value(const Molecule& mol, int parent) {
  const Atom& p = mol.atom(parent);
  switch (p.element) {
    case Element::C: return kH1;
    case Element::N: return kH3;
    case Element::O: {
      for (int n : mol.neighbors(parent)) {
        const Atom& x = mol.atom(n);
        if (x.element == Element::N) return kH3;
        if (x.element == Element::O || x.element == Element::S) return kH4;
        if (x.element == Element::C && !x.aromatic) {
          const Ctx cc(mol, n);
          if (cc.double_bonds > 0 || cc.triple_bonds > 0) return kH4;  // acid / enol
        }
      }
      return kH2;
    }
    default: return kH2;  // S-H, P-H
  }
}

double heavy_value(const Molecule& mol, int i) {
  const Atom& a = mol.atom(i);
  const Ctx c(mol, i);
  switch (a.element) {
    case Element::C: return carbon_value(c);
    case Element::N: return nitrogen_value(c);
    case Element::O: return oxygen_value(c);
    case Element::S:
      if (a.aromatic) return kS3;
      return a.charge != 0 ? kS2 : kS1;
    case Element::P: return kP;
    case Element::F: return a.charge == 0 ? kF : kHal;
    case Element::Cl: return a.charge == 0 ? kCl : kHal;
    case Element::Br: return a.charge == 0 ? kBr : kHal;
    case Element::I: return a.charge == 0 ? kI : kHal;
    default:
      throw UnclassifiableAtom(
          "no Crippen type for atom " + std::to_string(i) + " (" +
              element_symbol(a.element) + ")",
          i);
  }
}

}  // namespace

std::vector<double> crippen_contributions(const Molecule& mol) {
  std::vector<double> out(mol.atom_count(), 0.0);
  for (int i = 0; i < mol.atom_count(); ++i) {
    const Atom& a = mol.atom(i);
    if (a.is_dummy())
      throw UnclassifiableAtom("dummy atom " + std::to_string(i) + " has no Crippen type",
                               i);
    if (a.element == Element::H) {
      // explicit hydrogen node: typed through its heavy neighbor
      const auto& nb = mol.neighbors(i);
      out[i] = nb.empty() ? kH2 : hydrogen_value(mol, nb[0]);
      continue;
    }
    out[i] = heavy_value(mol, i) + a.hydrogens() * hydrogen_value(mol, i);
  }
  return out;
}

double crippen_logp(const Molecule& mol) {
  double sum = 0.0;
  for (double v : crippen_contributions(mol)) sum += v;
  return sum;
}

}  // namespace fraggen
