#include <CLI11.hpp>
#include <iostream>

#include "fraggen/brics.hpp"
#include "fraggen/molgraph.hpp"
#include "fraggen/pipeline.hpp"

namespace {

// exit codes: 0 ok, 2 usage/config, 3 io, 4 data, 5 internal
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;
constexpr int kExitInternal = 5;

struct CommonOpts {
  std::string config_path;
  std::string corpus;
  std::string workdir;
  int64_t seed = -1;
  int k = -1;
  int epochs = -1;
  int sample_count = -1;
  bool no_lfm = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "config file (KEY=VALUE lines)");
  cmd->add_option("--corpus", o.corpus, "input SMILES corpus");
  cmd->add_option("--workdir", o.workdir, "artifact directory");
  cmd->add_option("--seed", o.seed, "global seed");
  cmd->add_option("--k", o.k, "LFM frequency threshold");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--sample-count", o.sample_count, "molecules to sample");
  cmd->add_flag("--no-lfm", o.no_lfm, "disable low-frequency masking");
}

fraggen::PipelineConfig build_config(const CommonOpts& o) {
  fraggen::PipelineConfig cfg = o.config_path.empty()
                                    ? fraggen::PipelineConfig::defaults()
                                    : fraggen::PipelineConfig::from_file(o.config_path);
  if (!o.corpus.empty()) cfg.corpus_path = o.corpus;
  if (!o.workdir.empty()) cfg.workdir = o.workdir;
  if (o.seed >= 0) cfg.apply_line("seed=" + std::to_string(o.seed));
  if (o.k >= 0) cfg.k = o.k;
  if (o.epochs >= 0) cfg.train.max_epochs = o.epochs;
  if (o.sample_count >= 0) cfg.sample.count = o.sample_count;
  if (o.no_lfm) cfg.lfm = false;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fraggen: fragment-based molecular language model pipeline"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string stage;
  bool force = false;

  auto* preprocess = app.add_subcommand("preprocess", "clean, dedupe and fragment a corpus");
  add_common(preprocess, opts);
  auto* fragment = app.add_subcommand("fragment", "fragment molecules without dedup/validity drops");
  add_common(fragment, opts);
  std::string fragment_out;
  fragment->add_option("--out", fragment_out, "output fragment file (default stdout)");
  auto* vocab = app.add_subcommand("vocab", "build the fragment vocabulary");
  add_common(vocab, opts);
  auto* embed = app.add_subcommand("embed", "train skip-gram fragment embeddings");
  add_common(embed, opts);
  auto* train = app.add_subcommand("train", "train the GRU VAE language model");
  add_common(train, opts);
  auto* sample = app.add_subcommand("sample", "sample molecules from a trained model");
  add_common(sample, opts);
  auto* eval = app.add_subcommand("eval", "validity/novelty/uniqueness + distribution report");
  add_common(eval, opts);
  auto* stats = app.add_subcommand("stats", "dataset statistics over fragment artifacts");
  add_common(stats, opts);
  auto* pipeline = app.add_subcommand("pipeline", "run every stage in order");
  add_common(pipeline, opts);
  pipeline->add_flag("--force", force, "rerun stages even when artifacts exist");
  bool ablation = false;
  pipeline->add_flag("--ablation", ablation, "run LFM and no-LFM arms off shared preprocessing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    fraggen::PipelineConfig cfg = build_config(opts);
    if (preprocess->parsed()) {
      const auto stats_out = fraggen::stage_preprocess(cfg);
      std::cerr << stats_out.serialize();
    } else if (fragment->parsed()) {
      const auto corpus = fraggen::read_corpus(cfg.corpus_path);
      std::ostream* out = &std::cout;
      std::ofstream file;
      if (!fragment_out.empty()) {
        file.open(fragment_out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + fragment_out);
        out = &file;
      }
      for (const auto& [smiles, id] : corpus) {
        (void)id;
        try {
          const auto mol = fraggen::parse_smiles(smiles);
          const auto frag = fraggen::fragment_molecule(mol);
          if (!frag.linear || frag.seq.size() < 2)
            *out << "! " << fraggen::canonical_smiles(mol) << "\n";
          else
            *out << fraggen::fragment_sequence_line(frag.seq) << "\n";
        } catch (const fraggen::ParseError& e) {
          std::cerr << "skip " << smiles << ": " << e.what() << "\n";
        }
      }
    } else if (vocab->parsed()) {
      const auto v = fraggen::stage_vocab(cfg);
      std::cerr << "vocabulary size " << v.size() << " (k=" << cfg.effective_k() << ")\n";
    } else if (embed->parsed()) {
      fraggen::stage_embed(cfg);
    } else if (train->parsed()) {
      const auto result = fraggen::stage_train(cfg);
      for (const auto& e : result.log)
        std::cerr << "epoch " << e.epoch << " loss " << e.mean_loss << " unique "
                  << e.uniqueness << "\n";
    } else if (sample->parsed()) {
      const auto rep = fraggen::stage_sample(cfg);
      std::cerr << "accepted " << rep.molecules.size() << " of " << rep.attempts
                << " attempts\n";
    } else if (eval->parsed()) {
      const auto m = fraggen::stage_eval(cfg);
      std::cerr << fraggen::format_metrics(m);
    } else if (stats->parsed()) {
      const auto s = fraggen::stage_stats(cfg);
      std::cerr << fraggen::format_stats(s);
    } else if (pipeline->parsed()) {
      if (ablation) {
        fraggen::PipelineConfig shared = cfg;
        fraggen::run_pipeline(shared, force);
        fraggen::PipelineConfig off = cfg;
        off.lfm = false;
        off.workdir = cfg.workdir + "/nolfm";
        // reuse the shared fragmentation
        std::filesystem::create_directories(off.workdir);
        std::filesystem::copy_file(
            fraggen::path_fragments(cfg), fraggen::path_fragments(off),
            std::filesystem::copy_options::overwrite_existing);
        std::filesystem::copy_file(
            fraggen::path_training_smiles(cfg), fraggen::path_training_smiles(off),
            std::filesystem::copy_options::overwrite_existing);
        fraggen::run_pipeline(off, force);
      } else {
        fraggen::run_pipeline(cfg, force);
      }
    }
    return 0;
  } catch (const fraggen::ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    std::cerr << "error: " << msg << "\n";
    if (msg.find("cannot read") != std::string::npos ||
        msg.find("cannot write") != std::string::npos)
      return kExitIo;
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
