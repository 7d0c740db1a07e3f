#include <doctest.h>

#include <fstream>
#include <numeric>
#include <sstream>

#include "fraggen/brics.hpp"
#include "support/zinclike.hpp"

using namespace fraggen;

TEST_CASE("aspirin agrees with the frozen oracle outputs") {
  std::ifstream f(std::string(FRAGGEN_TEST_DATA_DIR) + "/aspirin_oracle.txt");
  REQUIRE(f);
  std::map<std::string, std::string> fields;
  std::string line;
  while (std::getline(f, line)) {
    const auto tab = line.find('\t');
    fields[line.substr(0, tab)] = line.substr(tab + 1);
  }
  const Molecule m = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  std::string bonds;
  for (const auto& [a, b] : find_all_brics_bonds(m)) {
    if (!bonds.empty()) bonds += ',';
    bonds += std::to_string(a) + "-" + std::to_string(b);
  }
  CHECK(bonds == fields.at("all_bonds"));
  const auto first = find_first_brics_bond(m);
  REQUIRE(first.has_value());
  const Bond& b = m.bond(*first);
  CHECK(std::to_string(std::min(b.a, b.b)) + "-" + std::to_string(std::max(b.a, b.b)) ==
        fields.at("first_bond"));
  CHECK(crippen_logp(m) == doctest::Approx(std::stod(fields.at("logp"))).epsilon(1e-9));
}

TEST_CASE("find_first_brics_bond trivial cases") {
  CHECK_FALSE(find_first_brics_bond(parse_smiles("C")).has_value());
  CHECK_FALSE(find_first_brics_bond(parse_smiles("c1ccccc1")).has_value());
  CHECK_FALSE(find_first_brics_bond(parse_smiles("CCO")).has_value());
}

TEST_CASE("aspirin first bond is the acetyl ester bond") {
  const Molecule m = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  const auto bond = find_first_brics_bond(m);
  REQUIRE(bond.has_value());
  const Bond& b = m.bond(*bond);
  CHECK(std::min(b.a, b.b) == 1);  // acyl carbon
  CHECK(std::max(b.a, b.b) == 3);  // ester oxygen
}

TEST_CASE("aspirin full BRICS bond set") {
  const Molecule m = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  const auto bonds = find_all_brics_bonds(m);
  CHECK(bonds == std::vector<std::pair<int, int>>{{1, 3}, {3, 4}, {9, 10}});
}

TEST_CASE("break_bond conserves atoms and rejects ring bonds") {
  const Molecule m = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  const auto bond = find_first_brics_bond(m);
  const BreakResult r = break_bond(m, *bond);
  CHECK(r.left.mol.atom_count() + r.right.atom_count() == m.atom_count() + 2);
  CHECK(r.left.attachment_count() == 1);
  CHECK(r.right.dummy_count() == 1);

  const Molecule benzene = parse_smiles("c1ccccc1");
  CHECK_THROWS_AS(break_bond(benzene, 0), std::invalid_argument);
}

TEST_CASE("aspirin fragments exactly as the left-to-right recursion dictates") {
  const Molecule m = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  const FragmentationOutcome out = fragment_molecule(m);
  REQUIRE(out.linear);
  REQUIRE(out.seq.size() == 4);
  const std::vector<std::string> expected = {"CC(=O)*", "*O*", "*c1ccccc1*", "*C(=O)O"};
  for (size_t i = 0; i < expected.size(); ++i) {
    CAPTURE(i);
    CHECK(canonical_smiles(out.seq.frags[i].mol) ==
          canonical_smiles(parse_smiles(expected[i])));
  }
  CHECK(out.seq.frags[0].attachment_count() == 1);
  CHECK(out.seq.frags[1].attachment_count() == 2);
  CHECK(out.seq.frags[2].attachment_count() == 2);
  CHECK(out.seq.frags[3].attachment_count() == 1);
  // reversibility
  CHECK(canonical_smiles(reassemble(out.seq)) == canonical_smiles(m));
}

TEST_CASE("unbreakable molecule fragments to itself") {
  const FragmentationOutcome out = fragment_molecule(parse_smiles("c1ccccc1"));
  REQUIRE(out.linear);
  CHECK(out.seq.size() == 1);
  CHECK(out.seq.frags[0].attachment_count() == 0);
}

TEST_CASE("attachment_points") {
  CHECK(attachment_points(Fragment{parse_smiles("*Nc1ccc(O*)cc1")}) == 2);
  CHECK(attachment_points(Fragment{parse_smiles("*C(=O)N1CCN(Cc2ccccc2)CC1")}) == 1);
  CHECK(attachment_points(Fragment{parse_smiles("CCO")}) == 0);
}

TEST_CASE("reassemble rejects broken chains") {
  FragmentSequence seq;
  for (const char* s : {"*C", "*CC", "*O"}) seq.frags.push_back(Fragment{parse_smiles(s)});
  CHECK_THROWS_AS(reassemble(seq), ReassembleError);

  FragmentSequence single;
  single.frags.push_back(Fragment{parse_smiles("*C")});
  CHECK_THROWS_AS(reassemble(single), ReassembleError);

  FragmentSequence ok;
  ok.frags.push_back(Fragment{parse_smiles("CCO")});
  CHECK(canonical_smiles(reassemble(ok)) == canonical_smiles(parse_smiles("CCO")));
}

TEST_CASE("reversibility, conservation and dummy budget over the corpus") {
  const auto corpus = fraggen::testsupport::generate_corpus(400, 99);
  int linear = 0;
  for (const auto& s : corpus) {
    const Molecule m = parse_smiles(s);
    const FragmentationOutcome out = fragment_molecule(m);
    if (!out.linear) continue;
    ++linear;
    const size_t n = out.seq.size();
    int dummies = 0, heavy = 0;
    for (const auto& f : out.seq.frags) {
      dummies += f.attachment_count();
      heavy += f.mol.atom_count() - f.mol.dummy_count();
    }
    CAPTURE(s);
    REQUIRE(dummies == static_cast<int>(n >= 2 ? 2 * (n - 1) : 0));
    REQUIRE(heavy == m.atom_count());
    REQUIRE(canonical_smiles(reassemble(out.seq)) == canonical_smiles(m));
  }
  CHECK(linear == static_cast<int>(corpus.size()));  // chain-assembled corpus
}

TEST_CASE("fragment file lines reassemble identically") {
  const auto corpus = fraggen::testsupport::generate_corpus(120, 3);
  for (const auto& s : corpus) {
    const Molecule m = parse_smiles(s);
    const FragmentationOutcome out = fragment_molecule(m);
    REQUIRE(out.linear);
    if (out.seq.size() < 2) continue;
    const std::string line = fragment_sequence_line(out.seq);
    const auto parts = split_fragment_line(line);
    REQUIRE(parts.size() == out.seq.size());
    CAPTURE(s);
    CAPTURE(line);
    REQUIRE(canonical_smiles(reassemble_smiles(parts)) == canonical_smiles(m));
  }
}

TEST_CASE("fragmentation is deterministic") {
  const auto corpus = fraggen::testsupport::generate_corpus(50, 17);
  for (const auto& s : corpus) {
    const auto a = fragment_molecule(parse_smiles(s));
    const auto b = fragment_molecule(parse_smiles(s));
    REQUIRE(a.linear == b.linear);
    REQUIRE(fragment_sequence_line(a.seq) == fragment_sequence_line(b.seq));
  }
}

TEST_CASE("corpus fragment statistics sit in the tuned band") {
  const auto corpus = fraggen::testsupport::generate_corpus(2000, 1234);
  long linear = 0, nonlinear = 0, single = 0, multi = 0, frag_sum = 0;
  for (const auto& s : corpus) {
    const FragmentationOutcome out = fragment_molecule(parse_smiles(s));
    if (!out.linear) {
      ++nonlinear;
      continue;
    }
    ++linear;
    if (out.seq.size() < 2) {
      ++single;
    } else {
      ++multi;
      frag_sum += static_cast<long>(out.seq.size());
    }
  }
  const double mean = static_cast<double>(frag_sum) / static_cast<double>(multi);
  MESSAGE("linear=", linear, " nonlinear=", nonlinear, " single=", single,
          " multi=", multi, " mean_fragments=", mean);
  CHECK(nonlinear == 0);
  CHECK(static_cast<double>(single) / static_cast<double>(corpus.size()) < 0.15);
  CHECK(mean > 1.94);
  CHECK(mean < 2.54);
}
