#pragma once

#include <string>
#include <vector>

#include "fraggen/evalmetrics.hpp"
#include "fraggen/sampler.hpp"
#include "fraggen/seqmodel.hpp"
#include "fraggen/skipgram.hpp"
#include "fraggen/vocab.hpp"

namespace fraggen {

// Declarative config: KEY=VALUE lines, '#' comments. Defaults follow the
// published training setup (k=10, batch 128, lr 1e-5 with 0.9 epoch decay,
// dropout 0.3, 4 epochs, 1000-molecule epoch samples, 20k final sample).
struct PipelineConfig {
  std::string corpus_path;
  std::string workdir = "work";
  int k = 10;
  bool lfm = true;  // lfm=0 forces k=0 behaviour (ablation arm)
  uint64_t seed = 1;
  SkipGramConfig skipgram;
  TrainConfig train;
  SampleConfig sample;

  static PipelineConfig defaults();
  static PipelineConfig from_file(const std::string& path);
  void apply_line(const std::string& line);  // KEY=VALUE override
  std::string serialize() const;
  int effective_k() const { return lfm ? k : 0; }
};

struct PreprocessStats {
  long input = 0;
  long invalid = 0;
  long duplicates = 0;
  long single_fragment = 0;
  long nonlinear = 0;
  long surviving = 0;
  std::string serialize() const;
};

// Corpus file: one SMILES per line, optional tab-separated id, '#' comments.
std::vector<std::pair<std::string, std::string>> read_corpus(const std::string& path);

// Fragment-sequence lines of the preprocessed corpus; excluded molecules are
// kept with a leading "! " for accounting.
PreprocessStats stage_preprocess(const PipelineConfig& cfg);

// Canonical fragment sequences of the surviving lines of fragments.txt.
std::vector<std::vector<std::string>> load_fragment_corpus(const std::string& path);
// Fragment counts of every fragmented molecule (excluded single-fragment
// lines count 1); used for Table-1 style stats.
std::vector<int> load_fragment_counts(const std::string& path);

Vocabulary stage_vocab(const PipelineConfig& cfg);
EmbeddingMatrix stage_embed(const PipelineConfig& cfg);
TrainResult stage_train(const PipelineConfig& cfg);
SampleReport stage_sample(const PipelineConfig& cfg);
MetricReport stage_eval(const PipelineConfig& cfg);
DatasetStats stage_stats(const PipelineConfig& cfg);

// preprocess -> vocab -> embed -> train -> sample -> eval (+ stats); existing
// artifacts are reused unless force is set.
void run_pipeline(const PipelineConfig& cfg, bool force = false);

// workdir paths
std::string path_fragments(const PipelineConfig& cfg);
std::string path_training_smiles(const PipelineConfig& cfg);
std::string path_vocab(const PipelineConfig& cfg);
std::string path_embeddings(const PipelineConfig& cfg);
std::string path_checkpoint(const PipelineConfig& cfg);
std::string path_samples(const PipelineConfig& cfg);

}  // namespace fraggen
