// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line. Corpus-dependent criteria run on the deterministic synthetic
// drug-like corpus (seed 77) whose oracle fixtures live in tests/data.

#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fraggen/brics.hpp"
#include "fraggen/checkpoint.hpp"
#include "fraggen/pipeline.hpp"
#include "support/zinclike.hpp"

using namespace fraggen;
namespace fs = std::filesystem;

namespace {

constexpr uint64_t kCorpusSeed = 77;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int number, const char* name, bool pass, const std::string& detail) {
  std::printf("ACCEPTANCE %02d %-28s %s (%s)\n", number, name, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

const std::vector<std::string>& corpus5k() {
  static const std::vector<std::string> corpus =
      testsupport::generate_corpus(5000, kCorpusSeed);
  return corpus;
}

std::string data_path(const char* name) {
  return std::string(FRAGGEN_TEST_DATA_DIR) + "/" + name;
}

std::string scratch_dir(const char* tag) {
  const std::string path = std::string("/tmp/fraggen_accept_") + tag;
  fs::remove_all(path);
  fs::create_directories(path);
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

}  // namespace

TEST_CASE("criterion 1: fragmentation reversibility") {
  const auto t0 = std::chrono::steady_clock::now();
  long linear = 0, reversible = 0;
  for (const auto& s : corpus5k()) {
    const Molecule m = parse_smiles(s);
    const FragmentationOutcome out = fragment_molecule(m);
    if (!out.linear) continue;
    ++linear;
    if (canonical_smiles(reassemble(out.seq)) == canonical_smiles(m)) ++reversible;
  }
  const double elapsed = seconds_since(t0);
  const double rate = static_cast<double>(reversible) / static_cast<double>(linear);
  const bool pass = rate >= 0.995 && elapsed < 120.0;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%ld/%ld reversible = %.4f, %.1fs", reversible,
                linear, rate, elapsed);
  report(1, "reversibility", pass, detail);
  CHECK(rate >= 0.995);
  CHECK(elapsed < 120.0);
}

TEST_CASE("criterion 2: fragment statistics and oracle bond agreement") {
  long multi = 0, frag_sum = 0;
  for (const auto& s : corpus5k()) {
    const FragmentationOutcome out = fragment_molecule(parse_smiles(s));
    if (!out.linear || out.seq.size() < 2) continue;
    ++multi;
    frag_sum += static_cast<long>(out.seq.size());
  }
  const double mean = static_cast<double>(frag_sum) / static_cast<double>(multi);

  // frozen output of the independent Python oracle over the same corpus
  std::ifstream f(data_path("brics_bonds_1k.tsv"));
  REQUIRE(f);
  std::string line;
  std::getline(f, line);  // header
  int agree = 0, total = 0;
  while (std::getline(f, line)) {
    std::istringstream ss(line);
    int idx;
    std::string expected;
    ss >> idx;
    ss >> expected;
    const auto mine = find_all_brics_bonds(parse_smiles(corpus5k()[idx]));
    std::string got;
    for (const auto& [a, b] : mine) {
      if (!got.empty()) got += ',';
      got += std::to_string(a) + "-" + std::to_string(b);
    }
    ++total;
    if (got == expected) ++agree;
  }
  const double agreement = static_cast<double>(agree) / static_cast<double>(total);

  // the oracle's own left-to-right peel must count the same fragments
  std::ifstream fc(data_path("fragment_counts_1k.tsv"));
  REQUIRE(fc);
  std::getline(fc, line);
  int count_agree = 0, count_total = 0;
  while (std::getline(fc, line)) {
    std::istringstream ss(line);
    int idx, expected;
    ss >> idx >> expected;
    const FragmentationOutcome out = fragment_molecule(parse_smiles(corpus5k()[idx]));
    ++count_total;
    if (out.linear && static_cast<int>(out.seq.size()) == expected) ++count_agree;
  }

  const bool pass = mean >= 2.24 - 0.30 && mean <= 2.24 + 0.30 && agreement >= 0.95 &&
                    count_agree == count_total;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "mean=%.3f (band 1.94..2.54), oracle bonds %d/%d, counts %d/%d", mean,
                agree, total, count_agree, count_total);
  report(2, "fragment statistics", pass, detail);
  CHECK(mean >= 1.94);
  CHECK(mean <= 2.54);
  CHECK(agreement >= 0.95);
  CHECK(count_agree == count_total);
}

TEST_CASE("criterion 3: LFM vocabulary compression") {
  const auto corpus = testsupport::generate_corpus(55000, 20);
  std::vector<std::vector<std::string>> sequences;
  for (const auto& s : corpus) {
    if (sequences.size() >= 50000) break;
    const FragmentationOutcome out = fragment_molecule(parse_smiles(s));
    if (!out.linear || out.seq.size() < 2) continue;
    std::vector<std::string> canon;
    for (const auto& fr : out.seq.frags) canon.push_back(canonical_smiles(fr.mol));
    sequences.push_back(std::move(canon));
  }
  REQUIRE(sequences.size() == 50000);
  const Vocabulary plain = Vocabulary::build(sequences, 0);
  const Vocabulary masked = Vocabulary::build(sequences, 10);
  const double ratio =
      static_cast<double>(masked.size()) / static_cast<double>(plain.size());
  const bool pass = ratio <= 0.20;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "plain=%d lfm=%d ratio=%.3f", plain.size(),
                masked.size(), ratio);
  report(3, "LFM compression", pass, detail);
  CHECK(ratio <= 0.20);
}

TEST_CASE("criterion 4: gradient correctness at 200 coordinates") {
  const auto t0 = std::chrono::steady_clock::now();
  ModelDims dims;
  dims.vocab = 20;
  dims.embed = 8;
  dims.hidden = 16;
  dims.latent = 10;
  Rng init(2027);
  Eigen::MatrixXd emb(20, 8);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 8; ++j) emb(i, j) = 0.3 * init.normal();
  ModelParameters params = ModelParameters::init(dims, emb, init);

  const std::vector<std::vector<int>> batch = {{kSosId, 5, 9, 12, kEosId},
                                               {kSosId, 7, kEosId},
                                               {kSosId, 3, 4, 5, 6, kEosId},
                                               {kSosId, 11, 11, kEosId}};
  std::vector<Eigen::VectorXd> eps;
  for (size_t i = 0; i < batch.size(); ++i) {
    Eigen::VectorXd e(10);
    for (int j = 0; j < 10; ++j) e[j] = init.normal();
    eps.push_back(std::move(e));
  }

  ModelParameters grads = ModelParameters::zeros(dims);
  loss_and_gradients(params, batch, eps, 0.0, nullptr, &grads);

  std::vector<std::pair<double*, int>> ptensors, gtensors;
  visit_tensors(params, [&](const std::string&, double* d, int r, int c) {
    ptensors.push_back({d, r * c});
  });
  visit_tensors(grads, [&](const std::string&, double* d, int r, int c) {
    gtensors.push_back({d, r * c});
  });

  int checked = 0, ok = 0;
  double worst = 0.0;
  const double h = 1e-5;
  Rng pick(404);
  for (int k = 0; k < 200; ++k) {
    const size_t t = pick.bounded(ptensors.size());
    const int i = static_cast<int>(pick.bounded(static_cast<uint64_t>(ptensors[t].second)));
    double* coord = ptensors[t].first + i;
    const double analytic = gtensors[t].first[i];
    const double save = *coord;
    *coord = save + h;
    const double up = loss_and_gradients(params, batch, eps, 0.0, nullptr, nullptr);
    *coord = save - h;
    const double down = loss_and_gradients(params, batch, eps, 0.0, nullptr, nullptr);
    *coord = save;
    const double fd = (up - down) / (2 * h);
    const double rel =
        std::abs(fd - analytic) / std::max({1.0, std::abs(fd), std::abs(analytic)});
    worst = std::max(worst, rel);
    ++checked;
    if (rel < 1e-4) ++ok;
  }
  const double elapsed = seconds_since(t0);
  const bool pass = ok == checked && elapsed < 60.0;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%d/%d coords, worst rel err %.2e, %.1fs", ok,
                checked, worst, elapsed);
  report(4, "gradient correctness", pass, detail);
  CHECK(ok == checked);
  CHECK(elapsed < 60.0);
}

TEST_CASE("criterion 5: closed-form checks") {
  bool pass = true;

  // kl_loss(0,0) == 0 exactly
  pass &= kl_loss(Eigen::VectorXd::Zero(100), Eigen::VectorXd::Zero(100)) == 0.0;

  // 1000 random inputs against the brute-force formula
  Rng rng(55);
  double worst_kl = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    Eigen::VectorXd mu(100), lv(100);
    for (int i = 0; i < 100; ++i) {
      mu[i] = rng.normal();
      lv[i] = rng.normal();
    }
    double expect = 0.0;
    for (int i = 0; i < 100; ++i)
      expect += 0.5 * (mu[i] * mu[i] + std::exp(lv[i]) - 1.0 - lv[i]);
    worst_kl = std::max(worst_kl, std::abs(kl_loss(mu, lv) - expect) /
                                      std::max(1.0, std::abs(expect)));
  }
  pass &= worst_kl <= 1e-12;

  // decode_step distributions sum to 1 within 1e-12
  ModelDims dims;
  dims.vocab = 50;
  dims.embed = 8;
  dims.hidden = 16;
  dims.latent = 10;
  Eigen::MatrixXd emb(50, 8);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 8; ++j) emb(i, j) = rng.normal();
  Rng init(3);
  ModelParameters m = ModelParameters::init(dims, emb, init);
  double worst_sum = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd z(10), x(8);
    for (int i = 0; i < 10; ++i) z[i] = rng.normal();
    for (int i = 0; i < 8; ++i) x[i] = rng.normal();
    auto states = decoder_initial_states(m, z);
    const Eigen::VectorXd p = decode_step(m, x, states);
    worst_sum = std::max(worst_sum, std::abs(p.sum() - 1.0));
  }
  pass &= worst_sum <= 1e-12;

  // gru zero-parameter closed forms, exact
  GruLayerParams zp;
  zp.Wr = zp.Wu = zp.Wh = Eigen::MatrixXd::Zero(16, 8);
  zp.Ur = zp.Uu = zp.Uh = Eigen::MatrixXd::Zero(16, 16);
  zp.br = zp.bu = zp.bh = Eigen::VectorXd::Zero(16);
  const Eigen::VectorXd x1 = Eigen::VectorXd::Ones(8);
  pass &= gru_cell(x1, Eigen::VectorXd::Zero(16), zp) == Eigen::VectorXd::Zero(16);
  const Eigen::VectorXd hc = Eigen::VectorXd::Constant(16, 2.0);
  pass &= gru_cell(x1, hc, zp) == Eigen::VectorXd::Constant(16, 1.0);

  char detail[128];
  std::snprintf(detail, sizeof(detail), "kl worst %.2e, softmax worst %.2e", worst_kl,
                worst_sum);
  report(5, "closed forms", pass, detail);
  CHECK(pass);
}

TEST_CASE("criterion 6: desk-scale end-to-end with LFM ablation") {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string dir = scratch_dir("e2e");
  testsupport::write_corpus(dir + "/corpus.smi", 5000, kCorpusSeed);

  auto run_arm = [&](bool lfm) {
    PipelineConfig cfg;  // published hyper-parameters
    cfg.corpus_path = dir + "/corpus.smi";
    cfg.workdir = dir + (lfm ? "/lfm" : "/nolfm");
    cfg.apply_line("seed=90");
    cfg.lfm = lfm;
    cfg.sample.count = 1000;
    stage_preprocess(cfg);
    stage_vocab(cfg);
    stage_embed(cfg);
    stage_train(cfg);
    stage_sample(cfg);
    return stage_eval(cfg);
  };

  const MetricReport lfm = run_arm(true);
  const MetricReport nolfm = run_arm(false);
  const double elapsed = seconds_since(t0);

  const bool pass = lfm.valid >= 0.95 && lfm.novel >= 0.90 &&
                    lfm.unique >= nolfm.unique && elapsed < 1800.0;
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "valid=%.3f novel=%.3f uniq(lfm)=%.3f uniq(nolfm)=%.3f n=%d, %.0fs",
                lfm.valid, lfm.novel, lfm.unique, nolfm.unique, lfm.n_generated,
                elapsed);
  report(6, "desk-scale end-to-end", pass, detail);
  CHECK(lfm.valid >= 0.95);
  CHECK(lfm.novel >= 0.90);
  CHECK(lfm.unique >= nolfm.unique);
  CHECK(elapsed < 1800.0);

  // generated-vs-training mean logP gap stays small on the LFM arm
  {
    std::vector<std::string> training, samples;
    std::ifstream tf(dir + "/lfm/training.smi"), sf(dir + "/lfm/samples.smi");
    std::string line;
    while (std::getline(tf, line))
      if (!line.empty()) training.push_back(line);
    while (std::getline(sf, line))
      if (!line.empty()) samples.push_back(line);
    const DistributionReport rep = distribution_report(training, samples);
    const double gap = std::abs(rep.training_summary.at("logp").mean -
                                rep.generated_summary.at("logp").mean);
    MESSAGE("mean logP gap = ", gap);
    CHECK(gap <= 0.5);
  }
  fs::remove_all(dir);
}

TEST_CASE("criterion 7: unmasking uniformity chi-square") {
  std::vector<std::vector<std::string>> corpus;
  const std::vector<std::string> members = {"*CC*",  "*CCC*", "*CCCC*", "*CCOC*",
                                            "*COC*", "*CSC*", "*CCSC*"};
  for (const auto& m : members)
    for (int i = 0; i < 4; ++i) corpus.push_back({m});
  for (int i = 0; i < 30; ++i) corpus.push_back({"*c1ccccc1*"});
  const Vocabulary v = Vocabulary::build(corpus, 10);
  REQUIRE(v.mask_groups().at("4_2").size() == 7);

  Rng rng(4097);
  std::map<std::string, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[v.unmask("4_2", rng)];
  const double expected = draws / 7.0;
  double chi2 = 0.0;
  for (const auto& m : members) {
    const double d = counts[m] - expected;
    chi2 += d * d / expected;
  }
  const bool pass = chi2 < 16.8119;  // df=6, significance 0.01
  char detail[128];
  std::snprintf(detail, sizeof(detail), "chi2=%.3f < 16.812 over %d draws", chi2, draws);
  report(7, "unmasking uniformity", pass, detail);
  CHECK(chi2 < 16.8119);
}

TEST_CASE("criterion 8: metric oracles on hand-built lists") {
  std::unordered_set<std::string> training;
  for (const char* s : {"CCO", "c1ccccc1", "CC(=O)O"})
    training.insert(canonical_smiles(parse_smiles(s)));
  const std::vector<std::string> generated = {
      "CCO", "OCC", "c1ccccc1", "CCC", "CCC", "CCCC", "CCN", "C1CC", "C)(",
      "CC(C)(C)(C)C"};
  const MetricReport m = evaluate_sample(generated, training);
  const bool pass = m.n_generated == 10 && m.n_valid == 7 &&
                    std::abs(m.valid - 0.7) < 1e-12 &&
                    std::abs(m.novel - 4.0 / 7.0) < 1e-12 &&
                    std::abs(m.unique - 5.0 / 7.0) < 1e-12;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "valid=%.3f novel=%.3f unique=%.3f", m.valid,
                m.novel, m.unique);
  report(8, "metric oracles", pass, detail);
  CHECK(pass);
}

TEST_CASE("criterion 9: Crippen logP against the oracle") {
  std::ifstream f(data_path("logp_100.tsv"));
  REQUIRE(f);
  std::string line;
  std::getline(f, line);  // header
  int agree = 0, total = 0;
  double worst = 0.0;
  while (std::getline(f, line)) {
    std::istringstream ss(line);
    int idx;
    std::string smi;
    double ref;
    ss >> idx >> smi >> ref;
    const double mine = crippen_logp(parse_smiles(smi));
    ++total;
    worst = std::max(worst, std::abs(mine - ref));
    if (std::abs(mine - ref) <= 0.1) ++agree;
  }
  const bool pass = total == 100 && agree >= 95;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%d/%d within 0.1, worst |delta|=%.4f", agree,
                total, worst);
  report(9, "logP agreement", pass, detail);
  CHECK(total == 100);
  CHECK(agree >= 95);
}

TEST_CASE("criterion 10: pipeline determinism") {
  const std::string dir = scratch_dir("det");
  testsupport::write_corpus(dir + "/corpus.smi", 1200, 31);

  auto run_into = [&](const std::string& workdir) {
    PipelineConfig cfg;
    cfg.corpus_path = dir + "/corpus.smi";
    cfg.workdir = workdir;
    cfg.apply_line("seed=17");
    cfg.train.max_epochs = 1;
    cfg.train.epoch_sample = 50;
    cfg.sample.count = 200;
    run_pipeline(cfg);
    return cfg;
  };
  const PipelineConfig a = run_into(dir + "/a");
  const PipelineConfig b = run_into(dir + "/b");

  const bool vocab_same = slurp(path_vocab(a)) == slurp(path_vocab(b));
  const bool emb_same = slurp(path_embeddings(a)) == slurp(path_embeddings(b));
  const bool samples_same = slurp(path_samples(a)) == slurp(path_samples(b));
  const bool pass = vocab_same && emb_same && samples_same;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "vocab=%s embeddings=%s samples=%s",
                vocab_same ? "identical" : "DIFFER", emb_same ? "identical" : "DIFFER",
                samples_same ? "identical" : "DIFFER");
  report(10, "pipeline determinism", pass, detail);
  CHECK(pass);
  fs::remove_all(dir);
}
