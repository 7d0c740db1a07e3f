#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fraggen/checkpoint.hpp"
#include "fraggen/pipeline.hpp"
#include "support/zinclike.hpp"

using namespace fraggen;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const char* tag) {
  static int counter = 0;
  const std::string path =
      "/tmp/fraggen_test_" + std::string(tag) + "_" + std::to_string(counter++);
  fs::remove_all(path);
  fs::create_directories(path);
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

void write(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

}  // namespace

TEST_CASE("preprocess accounting is exact") {
  const std::string dir = fresh_dir("prep");
  const std::string corpus = dir + "/in.smi";
  write(corpus,
        "# comment line\n"
        "CC(=O)Oc1ccccc1C(=O)O\taspirin\n"
        "C1CC\tbroken\n"             // invalid: unclosed ring
        "CC(C)(C)(C)C\tpenta\n"      // invalid: valence
        "CCO\tid1\n"                 // single fragment
        "OCC\tid2\n"                 // duplicate of CCO (canonical collapse)
        "c1ccccc1\tbenzene\n"        // single fragment
        "CC(=O)N1CCN(c2ccccc2)CC1\tapip\n");
  PipelineConfig cfg;
  cfg.corpus_path = corpus;
  cfg.workdir = dir + "/work";

  const PreprocessStats stats = stage_preprocess(cfg);
  CHECK(stats.input == 7);
  CHECK(stats.invalid == 2);
  CHECK(stats.duplicates == 1);
  CHECK(stats.single_fragment == 2);
  CHECK(stats.nonlinear == 0);
  CHECK(stats.surviving == 2);
  CHECK(stats.input == stats.invalid + stats.duplicates + stats.single_fragment +
                           stats.nonlinear + stats.surviving);

  const std::string fragments = slurp(path_fragments(cfg));
  CHECK(fragments.find("! ") != std::string::npos);
  const std::string training = slurp(path_training_smiles(cfg));
  CHECK(training.find(canonical_smiles(std::string("CC(=O)Oc1ccccc1C(=O)O"))) !=
        std::string::npos);

  // excluded lines count once each in the fragment-count view
  const auto counts = load_fragment_counts(path_fragments(cfg));
  CHECK(counts.size() == 4);  // 2 surviving + 2 excluded
  fs::remove_all(dir);
}

TEST_CASE("preprocess stages rewrite byte-identical artifacts") {
  const std::string dir = fresh_dir("idem");
  testsupport::write_corpus(dir + "/in.smi", 200, 5);
  PipelineConfig cfg;
  cfg.corpus_path = dir + "/in.smi";
  cfg.workdir = dir + "/work";

  stage_preprocess(cfg);
  const std::string frag1 = slurp(path_fragments(cfg));
  const std::string train1 = slurp(path_training_smiles(cfg));
  stage_preprocess(cfg);
  CHECK(slurp(path_fragments(cfg)) == frag1);
  CHECK(slurp(path_training_smiles(cfg)) == train1);

  stage_vocab(cfg);
  const std::string vocab1 = slurp(path_vocab(cfg));
  stage_vocab(cfg);
  CHECK(slurp(path_vocab(cfg)) == vocab1);

  stage_embed(cfg);
  const std::string emb1 = slurp(path_embeddings(cfg));
  stage_embed(cfg);
  CHECK(slurp(path_embeddings(cfg)) == emb1);
  fs::remove_all(dir);
}

TEST_CASE("config files parse with overrides and persist") {
  const std::string dir = fresh_dir("cfg");
  write(dir + "/cfg.txt",
        "corpus=/data/x.smi\n"
        "k=7\n"
        "# a comment\n"
        "epochs=2\n"
        "sample_count=50\n"
        "seed=99\n");
  PipelineConfig cfg = PipelineConfig::from_file(dir + "/cfg.txt");
  CHECK(cfg.corpus_path == "/data/x.smi");
  CHECK(cfg.k == 7);
  CHECK(cfg.train.max_epochs == 2);
  CHECK(cfg.sample.count == 50);
  CHECK(cfg.seed == 99);
  CHECK(cfg.train.seed == 99);
  CHECK(cfg.sample.seed == 99);
  CHECK_THROWS_AS(cfg.apply_line("nonsense"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.apply_line("unknown_key=3"), std::invalid_argument);

  // defaults carry the published hyper-parameters
  const PipelineConfig defaults = PipelineConfig::defaults();
  CHECK(defaults.k == 10);
  CHECK(defaults.train.batch == 128);
  CHECK(defaults.train.lr == doctest::Approx(1e-5));
  CHECK(defaults.train.lr_decay == doctest::Approx(0.9));
  CHECK(defaults.train.dropout == doctest::Approx(0.3));
  CHECK(defaults.train.max_epochs == 4);
  CHECK(defaults.train.epoch_sample == 1000);
  CHECK(defaults.skipgram.dim == 64);
  CHECK(defaults.sample.count == 20000);

  // round trip through serialize/apply
  PipelineConfig copy = PipelineConfig::defaults();
  std::istringstream ss(cfg.serialize());
  std::string line;
  while (std::getline(ss, line)) copy.apply_line(line);
  CHECK(copy.serialize() == cfg.serialize());
  fs::remove_all(dir);
}

TEST_CASE("tiny end-to-end pipeline run and rerun determinism") {
  const std::string dir = fresh_dir("e2e");
  testsupport::write_corpus(dir + "/in.smi", 400, 13);

  PipelineConfig cfg;
  cfg.corpus_path = dir + "/in.smi";
  cfg.workdir = dir + "/work";
  cfg.apply_line("seed=5");
  cfg.k = 5;
  cfg.skipgram.dim = 16;
  cfg.skipgram.epochs = 2;
  cfg.train.batch = 64;
  cfg.train.max_epochs = 1;
  cfg.train.epoch_sample = 20;
  cfg.sample.count = 30;
  cfg.sample.attempt_factor = 50;

  run_pipeline(cfg);
  for (const auto& p :
       {path_fragments(cfg), path_vocab(cfg), path_embeddings(cfg), path_checkpoint(cfg),
        path_samples(cfg), cfg.workdir + "/metrics.txt", cfg.workdir + "/stats.txt",
        cfg.workdir + "/histograms.csv", cfg.workdir + "/train_log.txt",
        cfg.workdir + "/config.effective", cfg.workdir + "/samples.meta"}) {
    CAPTURE(p);
    CHECK(fs::exists(p));
  }

  const std::string vocab1 = slurp(path_vocab(cfg));
  const std::string emb1 = slurp(path_embeddings(cfg));
  const std::string samples1 = slurp(path_samples(cfg));

  // fresh workdir, same seed and inputs: byte-identical artifacts
  PipelineConfig cfg2 = cfg;
  cfg2.workdir = dir + "/work2";
  run_pipeline(cfg2);
  CHECK(slurp(path_vocab(cfg2)) == vocab1);
  CHECK(slurp(path_embeddings(cfg2)) == emb1);
  CHECK(slurp(path_samples(cfg2)) == samples1);

  // checkpoint vocabulary hash guards mismatched vocabularies
  const Checkpoint ck = load_checkpoint(path_checkpoint(cfg));
  CHECK(ck.vocab_hash == Vocabulary::load(path_vocab(cfg)).content_hash());
  fs::remove_all(dir);
}

TEST_CASE("cli binary exit codes") {
  const std::string dir = fresh_dir("cli");
  testsupport::write_corpus(dir + "/in.smi", 50, 3);
  const std::string cli = FRAGGEN_CLI_PATH;

  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  CHECK(run("preprocess --corpus " + dir + "/in.smi --workdir " + dir + "/w") == 0);
  CHECK(run("stats --workdir " + dir + "/w") == 0);
  CHECK(run("definitely-not-a-command") == 2);
  CHECK(run("preprocess --corpus " + dir + "/missing.smi --workdir " + dir + "/w2") == 3);
  fs::remove_all(dir);
}
