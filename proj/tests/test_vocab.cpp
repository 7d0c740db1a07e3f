#include <doctest.h>

#include <cstdio>
#include <map>

#include "fraggen/vocab.hpp"

using namespace fraggen;

namespace {

// corpus with controlled frequencies for the masking cases
std::vector<std::vector<std::string>> masking_corpus() {
  std::vector<std::vector<std::string>> corpus;
  // frequency 200, unmasked at k=10
  for (int i = 0; i < 200; ++i) corpus.push_back({"*c1ccccc1OC"});
  // frequency 5 with 2 attachment points -> "5_2"
  for (int i = 0; i < 5; ++i) corpus.push_back({"*Nc1ccc(O*)cc1"});
  // frequency 3 with 1 attachment point -> "3_1"
  for (int i = 0; i < 3; ++i) corpus.push_back({"*C(=O)N1CCN(Cc2ccccc2)CC1"});
  // a second member of the 5_2 group
  for (int i = 0; i < 5; ++i) corpus.push_back({"*CC*"});
  // boundary: frequency exactly k stays unmasked
  for (int i = 0; i < 10; ++i) corpus.push_back({"*OC"});
  return corpus;
}

}  // namespace

TEST_CASE("low-frequency fragments mask to freq_attachments tokens") {
  const Vocabulary v = Vocabulary::build(masking_corpus(), 10);
  CHECK(v.token_for_fragment("*Nc1ccc(O*)cc1") == "5_2");
  CHECK(v.token_for_fragment("*CC*") == "5_2");
  CHECK(v.token_for_fragment("*C(=O)N1CCN(Cc2ccccc2)CC1") == "3_1");
  CHECK(v.token_for_fragment("*c1ccccc1OC") == "*c1ccccc1OC");
  CHECK(v.token_for_fragment("*OC") == "*OC");  // f == k is not below threshold

  CHECK(v.mask_groups().at("5_2") ==
        std::vector<std::string>{"*CC*", "*Nc1ccc(O*)cc1"});
  const int mask_id = v.id("5_2");
  CHECK(v.is_mask_token(mask_id));
  CHECK(v.attachments(mask_id) == 2);
  CHECK(v.frequency(mask_id) == 10);  // sum over the group
}

TEST_CASE("k=0 disables masking") {
  const Vocabulary v = Vocabulary::build(masking_corpus(), 0);
  CHECK(v.mask_groups().empty());
  CHECK(v.size() == 5 + 3);  // distinct fragments + specials
  CHECK_THROWS_AS(Vocabulary::build(masking_corpus(), -1), std::invalid_argument);
}

TEST_CASE("masking never grows the vocabulary") {
  const Vocabulary plain = Vocabulary::build(masking_corpus(), 0);
  const Vocabulary masked = Vocabulary::build(masking_corpus(), 10);
  CHECK(masked.size() <= plain.size());
}

TEST_CASE("encode brackets with SOS/EOS and maps masked fragments") {
  const Vocabulary v = Vocabulary::build(masking_corpus(), 10);
  CHECK(v.encode({}) == std::vector<int>{kSosId, kEosId});
  const auto ids = v.encode({"*c1ccccc1OC", "*Nc1ccc(O*)cc1", "*OC"});
  REQUIRE(ids.size() == 5);
  CHECK(ids.front() == kSosId);
  CHECK(ids.back() == kEosId);
  CHECK(ids[2] == v.id("5_2"));
  CHECK_THROWS_AS(v.encode({"*NeverSeen*"}), OovError);
  try {
    v.encode({"*c1ccncc1"});
  } catch (const OovError& e) {
    CHECK(std::string(e.what()).find("*c1ccncc1") != std::string::npos);
  }
}

TEST_CASE("decode round trips unmasked sequences") {
  const Vocabulary v = Vocabulary::build(masking_corpus(), 10);
  const std::vector<std::string> seq = {"*c1ccccc1OC", "*OC"};
  CHECK(v.decode(v.encode(seq)) == seq);
}

TEST_CASE("unmask draws uniformly and rejects non-mask tokens") {
  const Vocabulary v = Vocabulary::build(masking_corpus(), 10);
  Rng rng(5);
  CHECK(v.unmask("3_1", rng) == "*C(=O)N1CCN(Cc2ccccc2)CC1");  // singleton group
  CHECK_THROWS_AS(v.unmask("*OC", rng), std::invalid_argument);
  CHECK_THROWS_AS(v.unmask("17_3", rng), std::invalid_argument);

  // deterministic for a fixed seed
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(v.unmask("5_2", a) == v.unmask("5_2", b));
}

TEST_CASE("unmask uniformity passes a chi-square test on a 7-member group") {
  std::vector<std::vector<std::string>> corpus;
  const std::vector<std::string> members = {"*CC*",  "*CCC*", "*CCCC*", "*CCOC*",
                                            "*COC*", "*CSC*", "*CCSC*"};
  for (const auto& m : members)
    for (int i = 0; i < 4; ++i) corpus.push_back({m});
  for (int i = 0; i < 30; ++i) corpus.push_back({"*c1ccccc1*"});

  const Vocabulary v = Vocabulary::build(corpus, 10);
  REQUIRE(v.mask_groups().at("4_2").size() == 7);

  Rng rng(2024);
  std::map<std::string, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[v.unmask("4_2", rng)];
  const double expected = draws / 7.0;
  double chi2 = 0.0;
  for (const auto& m : members) {
    const double d = counts[m] - expected;
    chi2 += d * d / expected;
  }
  // chi-square critical value, df = 6, significance 0.01
  CHECK(chi2 < 16.8119);
}

TEST_CASE("vocabulary file round trip is byte-identical") {
  const Vocabulary v = Vocabulary::build(masking_corpus(), 10);
  const std::string path = "/tmp/fraggen_vocab_test.txt";
  v.save(path);
  const Vocabulary loaded = Vocabulary::load(path);
  CHECK(loaded.serialize() == v.serialize());
  CHECK(loaded.content_hash() == v.content_hash());
  CHECK(loaded.token_for_fragment("*CC*") == "5_2");
  CHECK(loaded.threshold_k() == 10);
  std::remove(path.c_str());
}

TEST_CASE("mask group members carry the attachment count the token declares") {
  const Vocabulary v = Vocabulary::build(masking_corpus(), 10);
  for (const auto& [mask, members] : v.mask_groups()) {
    const int declared = v.attachments(v.id(mask));
    for (const auto& m : members) {
      int stars = 0;
      for (char c : m)
        if (c == '*') ++stars;
      CHECK(stars == declared);
    }
  }
}
