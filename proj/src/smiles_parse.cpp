#include <cctype>
#include <map>

#include "fraggen/molgraph.hpp"

namespace fraggen {

namespace {

struct RingOpen {
  int atom;
  int order;  // 0 = unspecified
  size_t offset;
};

int default_valence_for_implicit_h(Element e) {
  switch (e) {
    case Element::C: return 4;
    case Element::N: return 3;
    case Element::O: return 2;
    case Element::S: return 2;
    case Element::P: return 3;
    case Element::F:
    case Element::Cl:
    case Element::Br:
    case Element::I: return 1;
    default: return 0;
  }
}

class Parser {
 public:
  Parser(std::string_view text, std::vector<std::string>* warnings)
      : text_(text), warnings_(warnings) {}

  Molecule run() {
    if (text_.empty()) throw ParseError("empty SMILES", 0);
    while (pos_ < text_.size()) step();
    if (!branch_stack_.empty())
      throw ParseError("unmatched '('", branch_offsets_.back());
    if (!ring_open_.empty()) {
      const auto& [digit, open] = *ring_open_.begin();
      throw ParseError("unclosed ring closure " + std::to_string(digit), open.offset);
    }
    if (mol_.atom_count() == 0) throw ParseError("no atoms in SMILES", 0);
    resolve_implicit_h();
    if (!mol_.connected()) throw ParseError("disconnected molecule", 0);
    return std::move(mol_);
  }

 private:
  void step() {
    const char c = text_[pos_];
    switch (c) {
      case '(': {
        if (prev_atom_ < 0) throw ParseError("branch before any atom", pos_);
        branch_stack_.push_back(prev_atom_);
        branch_offsets_.push_back(pos_);
        ++pos_;
        return;
      }
      case ')': {
        if (branch_stack_.empty()) throw ParseError("unmatched ')'", pos_);
        prev_atom_ = branch_stack_.back();
        branch_stack_.pop_back();
        branch_offsets_.pop_back();
        ++pos_;
        return;
      }
      case '-': pending_order_ = 1; ++pos_; return;
      case '=': pending_order_ = 2; ++pos_; return;
      case '#': pending_order_ = 3; ++pos_; return;
      case ':': pending_order_ = 4; ++pos_; return;
      case '/':
      case '\\':
        warn("stereo bond marker discarded");
        pending_order_ = 1;
        ++pos_;
        return;
      case '.': throw ParseError("multi-component SMILES rejected", pos_);
      case '%': {
        if (pos_ + 2 >= text_.size() || !std::isdigit(text_[pos_ + 1]) ||
            !std::isdigit(text_[pos_ + 2]))
          throw ParseError("malformed %nn ring closure", pos_);
        const int digit = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
        ring_closure(digit, pos_);
        pos_ += 3;
        return;
      }
      case '[': parse_bracket_atom(); return;
      case '*': {
        Atom a;
        a.element = Element::Dummy;
        a.explicit_h = 0;
        add_parsed_atom(a, pos_);
        ++pos_;
        return;
      }
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ring_closure(c - '0', pos_);
      ++pos_;
      return;
    }
    parse_organic_atom();
  }

  void parse_organic_atom() {
    const size_t start = pos_;
    const char c = text_[pos_];
    Atom a;
    if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
      a.element = Element::Cl;
      pos_ += 2;
    } else if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
      a.element = Element::Br;
      pos_ += 2;
    } else {
      switch (c) {
        case 'C': a.element = Element::C; break;
        case 'N': a.element = Element::N; break;
        case 'O': a.element = Element::O; break;
        case 'S': a.element = Element::S; break;
        case 'P': a.element = Element::P; break;
        case 'F': a.element = Element::F; break;
        case 'I': a.element = Element::I; break;
        case 'c': a.element = Element::C; a.aromatic = true; break;
        case 'n': a.element = Element::N; a.aromatic = true; break;
        case 'o': a.element = Element::O; a.aromatic = true; break;
        case 's': a.element = Element::S; a.aromatic = true; break;
        default:
          throw ParseError(std::string("unknown atom symbol '") + c + "'", pos_);
      }
      ++pos_;
    }
    add_parsed_atom(a, start);
  }

  void parse_bracket_atom() {
    const size_t start = pos_;
    ++pos_;  // '['
    Atom a;
    a.explicit_h = 0;

    int isotope = 0;
    bool have_isotope = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      isotope = isotope * 10 + (text_[pos_] - '0');
      have_isotope = true;
      ++pos_;
    }
    if (have_isotope) {
      if (isotope <= 0 || isotope > 999)
        throw ParseError("isotope out of range", start);
      a.isotope = static_cast<int16_t>(isotope);
    }

    if (pos_ >= text_.size()) throw ParseError("unterminated bracket atom", start);
    // element symbol (one or two chars, aromatic lowercase allowed)
    if (text_[pos_] == '*') {
      a.element = Element::Dummy;
      ++pos_;
    } else {
      size_t len = 1;
      if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1])) &&
          std::isupper(static_cast<unsigned char>(text_[pos_]))) {
        const std::string two(text_.substr(pos_, 2));
        if (element_from_symbol(two)) len = 2;
      }
      std::string sym(text_.substr(pos_, len));
      bool aromatic = false;
      if (len == 1 && std::islower(static_cast<unsigned char>(sym[0]))) {
        aromatic = true;
        sym[0] = static_cast<char>(std::toupper(sym[0]));
      }
      const auto el = element_from_symbol(sym);
      if (!el) throw ParseError("unknown atom symbol '" + sym + "'", pos_);
      if (aromatic && !element_aromatic_capable(*el))
        throw ParseError("element cannot be aromatic", pos_);
      a.element = *el;
      a.aromatic = aromatic;
      pos_ += len;
    }

    // chirality: parsed, discarded
    while (pos_ < text_.size() && text_[pos_] == '@') {
      warn("chirality marker discarded");
      ++pos_;
      if (pos_ < text_.size() && (text_.compare(pos_, 2, "TH") == 0)) pos_ += 2;
    }

    if (pos_ < text_.size() && text_[pos_] == 'H') {
      ++pos_;
      int h = 1;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        h = text_[pos_] - '0';
        ++pos_;
      }
      a.explicit_h = static_cast<int8_t>(h);
    }

    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const int sign = text_[pos_] == '+' ? 1 : -1;
      ++pos_;
      int mag = 1;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        mag = text_[pos_] - '0';
        ++pos_;
      } else {
        while (pos_ < text_.size() && text_[pos_] == (sign > 0 ? '+' : '-')) {
          ++mag;
          ++pos_;
        }
      }
      a.charge = static_cast<int8_t>(sign * mag);
    }

    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      warn("atom map class discarded");
    }

    if (pos_ >= text_.size() || text_[pos_] != ']')
      throw ParseError("unterminated bracket atom", start);
    ++pos_;

    if (a.element == Element::Dummy && a.explicit_h > 0)
      throw ParseError("dummy atom cannot carry hydrogens", start);
    if (!a.is_dummy()) {
      int ceiling;
      switch (a.element) {
        case Element::C: ceiling = 4; break;
        case Element::N: ceiling = 5; break;
        case Element::O: ceiling = 3; break;
        case Element::S: ceiling = 6; break;
        case Element::P: ceiling = 5; break;
        default: ceiling = 1; break;
      }
      if (a.explicit_h > static_cast<int8_t>(ceiling + std::abs(a.charge)))
        throw ParseError("valence-impossible bracket spec", start);
    }
    add_parsed_atom(a, start);
  }

  void add_parsed_atom(const Atom& a, size_t offset) {
    const int idx = mol_.add_atom(a);
    if (prev_atom_ >= 0) {
      const BondOrder order = take_pending_order(prev_atom_, idx, offset);
      try {
        mol_.add_bond(prev_atom_, idx, order);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), offset);
      }
    } else if (pending_order_ != 0) {
      throw ParseError("bond symbol before any atom", offset);
    }
    prev_atom_ = idx;
  }

  BondOrder take_pending_order(int from, int to, size_t offset) {
    const int p = pending_order_;
    pending_order_ = 0;
    if (p == 0) {
      if (mol_.atom(from).aromatic && mol_.atom(to).aromatic) return BondOrder::Aromatic;
      return BondOrder::Single;
    }
    if (p == 4) {
      if (!mol_.atom(from).aromatic || !mol_.atom(to).aromatic)
        throw ParseError("aromatic bond between non-aromatic atoms", offset);
      return BondOrder::Aromatic;
    }
    return static_cast<BondOrder>(p);
  }

  void ring_closure(int digit, size_t offset) {
    if (prev_atom_ < 0) throw ParseError("ring closure before any atom", offset);
    auto it = ring_open_.find(digit);
    if (it == ring_open_.end()) {
      ring_open_[digit] = {prev_atom_, pending_order_, offset};
      pending_order_ = 0;
      return;
    }
    const RingOpen open = it->second;
    ring_open_.erase(it);
    int order = pending_order_;
    pending_order_ = 0;
    if (open.order != 0 && order != 0 && open.order != order)
      throw ParseError("conflicting ring closure bond orders", offset);
    if (order == 0) order = open.order;
    BondOrder bo;
    if (order == 0) {
      bo = (mol_.atom(open.atom).aromatic && mol_.atom(prev_atom_).aromatic)
               ? BondOrder::Aromatic
               : BondOrder::Single;
    } else if (order == 4) {
      bo = BondOrder::Aromatic;
    } else {
      bo = static_cast<BondOrder>(order);
    }
    try {
      mol_.add_bond(open.atom, prev_atom_, bo);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), offset);
    }
  }

  void resolve_implicit_h() {
    for (int i = 0; i < mol_.atom_count(); ++i) {
      Atom& a = mol_.atom(i);
      if (a.explicit_h >= 0) continue;  // bracket atoms fixed their count
      int aromatic_bonds = 0;
      int fixed = 0;
      for (int bi : mol_.incident_bonds(i)) {
        const BondOrder o = mol_.bond(bi).order;
        if (o == BondOrder::Aromatic)
          ++aromatic_bonds;
        else
          fixed += static_cast<int>(bond_order_value(o));
      }
      const int defval = default_valence_for_implicit_h(a.element);
      int h;
      if (a.aromatic) {
        // prefer sigma + one pi; fall back to sigma only (pyrrole-type)
        h = defval - fixed - (aromatic_bonds + 1);
        if (h < 0) h = defval - fixed - aromatic_bonds;
        if (h < 0) h = 0;
      } else {
        h = 0;
        if (a.element == Element::S || a.element == Element::P || a.element == Element::N) {
          for (int v : a.element == Element::S ? std::vector<int>{2, 4, 6}
                                               : std::vector<int>{3, 5}) {
            if (v - fixed >= 0) {
              h = v - fixed;
              break;
            }
          }
        } else {
          h = std::max(0, defval - fixed);
        }
      }
      a.implicit_h = static_cast<int8_t>(h);
    }
  }

  void warn(const std::string& msg) {
    if (warnings_) warnings_->push_back(msg + " (offset " + std::to_string(pos_) + ")");
  }

  std::string_view text_;
  std::vector<std::string>* warnings_;
  size_t pos_ = 0;
  Molecule mol_;
  int prev_atom_ = -1;
  int pending_order_ = 0;  // 0 none, 1..3 orders, 4 aromatic
  std::vector<int> branch_stack_;
  std::vector<size_t> branch_offsets_;
  std::map<int, RingOpen> ring_open_;
};

}  // namespace

Molecule parse_smiles(std::string_view text, std::vector<std::string>* warnings) {
  return Parser(text, warnings).run();
}

}  // namespace fraggen
