#include "fraggen/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "fraggen/brics.hpp"
#include "fraggen/checkpoint.hpp"
#include "fraggen/molgraph.hpp"

namespace fs = std::filesystem;

namespace fraggen {

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig cfg;
  cfg.sample.count = 20000;
  cfg.sample.max_len = 12;
  return cfg;
}

void PipelineConfig::apply_line(const std::string& raw) {
  std::string line = raw;
  if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
  while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
    line.pop_back();
  if (line.empty()) return;
  const auto eq = line.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("bad config line (expected KEY=VALUE): " + raw);
  const std::string key = line.substr(0, eq);
  const std::string val = line.substr(eq + 1);
  auto as_int = [&] { return std::stoi(val); };
  auto as_u64 = [&] { return static_cast<uint64_t>(std::stoull(val)); };
  auto as_double = [&] { return std::stod(val); };

  if (key == "corpus") corpus_path = val;
  else if (key == "workdir") workdir = val;
  else if (key == "k") k = as_int();
  else if (key == "lfm") lfm = as_int() != 0;
  else if (key == "seed") { seed = as_u64(); skipgram.seed = seed; train.seed = seed; sample.seed = seed; }
  else if (key == "embed_dim") skipgram.dim = as_int();
  else if (key == "embed_window") skipgram.window = as_int();
  else if (key == "embed_negatives") skipgram.negatives = as_int();
  else if (key == "embed_epochs") skipgram.epochs = as_int();
  else if (key == "embed_lr") skipgram.lr = as_double();
  else if (key == "batch") train.batch = as_int();
  else if (key == "lr") train.lr = as_double();
  else if (key == "lr_decay") train.lr_decay = as_double();
  else if (key == "dropout") train.dropout = as_double();
  else if (key == "epochs") train.max_epochs = as_int();
  else if (key == "epoch_sample") train.epoch_sample = as_int();
  else if (key == "freeze_embeddings") train.freeze_embeddings = as_int() != 0;
  else if (key == "bout_prior_tau") train.bout_prior_tau = as_double();
  else if (key == "sample_count") sample.count = as_int();
  else if (key == "max_len") sample.max_len = as_int();
  else if (key == "multinomial") sample.multinomial = as_int() != 0;
  else if (key == "temperature") sample.temperature = as_double();
  else throw std::invalid_argument("unknown config key: " + key);
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config file: " + path);
  PipelineConfig cfg = defaults();
  std::string line;
  while (std::getline(f, line)) cfg.apply_line(line);
  return cfg;
}

std::string PipelineConfig::serialize() const {
  std::ostringstream out;
  out << "corpus=" << corpus_path << "\n"
      << "workdir=" << workdir << "\n"
      << "k=" << k << "\n"
      << "lfm=" << (lfm ? 1 : 0) << "\n"
      << "seed=" << seed << "\n"
      << "embed_dim=" << skipgram.dim << "\n"
      << "embed_window=" << skipgram.window << "\n"
      << "embed_negatives=" << skipgram.negatives << "\n"
      << "embed_epochs=" << skipgram.epochs << "\n"
      << "embed_lr=" << skipgram.lr << "\n"
      << "batch=" << train.batch << "\n"
      << "lr=" << train.lr << "\n"
      << "lr_decay=" << train.lr_decay << "\n"
      << "dropout=" << train.dropout << "\n"
      << "epochs=" << train.max_epochs << "\n"
      << "epoch_sample=" << train.epoch_sample << "\n"
      << "freeze_embeddings=" << (train.freeze_embeddings ? 1 : 0) << "\n"
      << "bout_prior_tau=" << train.bout_prior_tau << "\n"
      << "sample_count=" << sample.count << "\n"
      << "max_len=" << sample.max_len << "\n"
      << "multinomial=" << (sample.multinomial ? 1 : 0) << "\n"
      << "temperature=" << sample.temperature << "\n";
  return out.str();
}

std::string PreprocessStats::serialize() const {
  std::ostringstream out;
  out << "input=" << input << "\n"
      << "invalid=" << invalid << "\n"
      << "duplicates=" << duplicates << "\n"
      << "single_fragment=" << single_fragment << "\n"
      << "nonlinear=" << nonlinear << "\n"
      << "surviving=" << surviving << "\n";
  return out.str();
}

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_file(const std::string& path, const std::string& content) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

void persist_config(const PipelineConfig& cfg) {
  write_file(join(cfg.workdir, "config.effective"), cfg.serialize());
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string path_fragments(const PipelineConfig& cfg) { return join(cfg.workdir, "fragments.txt"); }
std::string path_training_smiles(const PipelineConfig& cfg) { return join(cfg.workdir, "training.smi"); }
std::string path_vocab(const PipelineConfig& cfg) { return join(cfg.workdir, "vocab.txt"); }
std::string path_embeddings(const PipelineConfig& cfg) { return join(cfg.workdir, "embeddings.txt"); }
std::string path_checkpoint(const PipelineConfig& cfg) { return join(cfg.workdir, "model.ckpt"); }
std::string path_samples(const PipelineConfig& cfg) { return join(cfg.workdir, "samples.smi"); }

std::vector<std::pair<std::string, std::string>> read_corpus(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      out.emplace_back(line, "");
    } else {
      out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
  }
  return out;
}

PreprocessStats stage_preprocess(const PipelineConfig& cfg) {
  const auto corpus = read_corpus(cfg.corpus_path);
  PreprocessStats stats;
  stats.input = static_cast<long>(corpus.size());

  std::unordered_set<std::string> seen;
  std::ostringstream fragments_out, training_out;

  for (const auto& [smiles, id] : corpus) {
    (void)id;
    Molecule mol;
    try {
      mol = parse_smiles(smiles);
      if (!check_valence(mol)) {
        ++stats.invalid;
        continue;
      }
    } catch (const std::exception&) {
      ++stats.invalid;
      continue;
    }
    const std::string canon = canonical_smiles(mol);
    if (!seen.insert(canon).second) {
      ++stats.duplicates;
      continue;
    }
    const FragmentationOutcome frag = fragment_molecule(mol);
    if (!frag.linear) {
      ++stats.nonlinear;
      fragments_out << "! " << canon << "\n";
      continue;
    }
    if (frag.seq.size() < 2) {
      ++stats.single_fragment;
      fragments_out << "! " << canon << "\n";
      continue;
    }
    ++stats.surviving;
    fragments_out << fragment_sequence_line(frag.seq) << "\n";
    training_out << canon << "\n";
  }

  persist_config(cfg);
  write_file(path_fragments(cfg), fragments_out.str());
  write_file(path_training_smiles(cfg), training_out.str());
  write_file(join(cfg.workdir, "preprocess_stats.txt"), stats.serialize());
  if (stats.surviving == 0) throw std::runtime_error("preprocessing left no molecules");
  return stats;
}

std::vector<std::vector<std::string>> load_fragment_corpus(const std::string& path) {
  std::vector<std::vector<std::string>> out;
  for (const auto& line : read_lines(path)) {
    if (line.empty() || line[0] == '!') continue;
    std::vector<std::string> canu;
    for (const auto& frag : split_fragment_line(line))
      canu.push_back(canonical_smiles(frag));
    out.push_back(std::move(canu));
  }
  return out;
}

std::vector<int> load_fragment_counts(const std::string& path) {
  std::vector<int> out;
  for (const auto& line : read_lines(path)) {
    if (line.empty()) continue;
    if (line[0] == '!') {
      out.push_back(1);  // excluded: single fragment or non-linear, counted once
      continue;
    }
    out.push_back(static_cast<int>(split_fragment_line(line).size()));
  }
  return out;
}

Vocabulary stage_vocab(const PipelineConfig& cfg) {
  const auto corpus = load_fragment_corpus(path_fragments(cfg));
  Vocabulary v = Vocabulary::build(corpus, cfg.effective_k());
  v.save(path_vocab(cfg));
  return v;
}

EmbeddingMatrix stage_embed(const PipelineConfig& cfg) {
  const auto corpus = load_fragment_corpus(path_fragments(cfg));
  const Vocabulary vocab = Vocabulary::load(path_vocab(cfg));
  std::vector<std::vector<int>> ids;
  ids.reserve(corpus.size());
  for (const auto& seq : corpus) ids.push_back(vocab.encode(seq));
  EmbeddingMatrix emb = train_skipgram(ids, cfg.skipgram, vocab);
  save_embeddings(path_embeddings(cfg), emb);
  return emb;
}

TrainResult stage_train(const PipelineConfig& cfg) {
  const auto corpus = load_fragment_corpus(path_fragments(cfg));
  const Vocabulary vocab = Vocabulary::load(path_vocab(cfg));
  const Eigen::MatrixXd embedding = load_embeddings(path_embeddings(cfg));

  std::vector<std::vector<int>> ids;
  ids.reserve(corpus.size());
  for (const auto& seq : corpus) ids.push_back(vocab.encode(seq));

  std::unordered_set<std::string> training_set;
  for (const auto& line : read_lines(path_training_smiles(cfg)))
    if (!line.empty()) training_set.insert(line);

  ModelDims dims;
  dims.vocab = vocab.size();
  dims.embed = static_cast<int>(embedding.cols());

  const std::string ckpt_dir = join(cfg.workdir, "checkpoints");
  fs::create_directories(ckpt_dir);
  const uint64_t vhash = vocab.content_hash();
  const std::string cfg_text = cfg.serialize();

  EpochSampler sampler = nullptr;
  if (cfg.train.epoch_sample > 0) {
    sampler = [&](const ModelParameters& params, int epoch) -> std::array<double, 3> {
      SampleConfig sc = cfg.sample;
      sc.count = cfg.train.epoch_sample;
      sc.seed = cfg.seed * 1000003ull + static_cast<uint64_t>(epoch);
      sc.lfm_enabled = cfg.lfm;
      const SampleReport rep = sample_batch(params, vocab, sc);
      if (rep.molecules.empty()) return {0.0, 0.0, 0.0};
      const MetricReport m = evaluate_sample(rep.molecules, training_set);
      return {m.valid, m.novel, m.unique};
    };
  }
  CheckpointHook hook = [&](const ModelParameters& params, int epoch) {
    save_checkpoint(join(ckpt_dir, "epoch_" + std::to_string(epoch) + ".ckpt"), params,
                    cfg_text, vhash);
  };

  TrainResult result = train(ids, cfg.train, dims, embedding, sampler, hook);
  save_checkpoint(path_checkpoint(cfg), result.params, cfg_text, vhash);

  std::ostringstream log;
  log << "epoch\tmean_loss\tlr\tvalid\tnovel\tunique\n";
  for (const auto& e : result.log) {
    log << e.epoch << '\t' << e.mean_loss << '\t' << e.lr << '\t';
    if (e.sampled)
      log << e.validity << '\t' << e.novelty << '\t' << e.uniqueness << "\n";
    else
      log << "-\t-\t-\n";
  }
  write_file(join(cfg.workdir, "train_log.txt"), log.str());
  return result;
}

SampleReport stage_sample(const PipelineConfig& cfg) {
  const Vocabulary vocab = Vocabulary::load(path_vocab(cfg));
  const Checkpoint ck = load_checkpoint(path_checkpoint(cfg));
  if (ck.vocab_hash != vocab.content_hash())
    throw std::runtime_error("checkpoint was trained with a different vocabulary");
  SampleConfig sc = cfg.sample;
  sc.lfm_enabled = cfg.lfm;
  const SampleReport rep = sample_batch(ck.params, vocab, sc);
  save_sample_report(path_samples(cfg), join(cfg.workdir, "samples.meta"), rep, sc,
                     file_hash(path_checkpoint(cfg)));
  return rep;
}

MetricReport stage_eval(const PipelineConfig& cfg) {
  std::vector<std::string> samples;
  for (const auto& line : read_lines(path_samples(cfg)))
    if (!line.empty()) samples.push_back(line);
  std::vector<std::string> training;
  std::unordered_set<std::string> training_set;
  for (const auto& line : read_lines(path_training_smiles(cfg))) {
    if (line.empty()) continue;
    training.push_back(line);
    training_set.insert(line);
  }
  const MetricReport m = evaluate_sample(samples, training_set);
  write_file(join(cfg.workdir, "metrics.txt"), format_metrics(m));
  const DistributionReport dist = distribution_report(training, samples);
  save_distribution_csv(join(cfg.workdir, "histograms.csv"), dist);
  return m;
}

DatasetStats stage_stats(const PipelineConfig& cfg) {
  const auto counts = load_fragment_counts(path_fragments(cfg));
  const auto corpus = load_fragment_corpus(path_fragments(cfg));
  const Vocabulary plain = Vocabulary::build(corpus, 0);
  const Vocabulary masked = Vocabulary::build(corpus, cfg.k);

  std::vector<StructuralFeatures> features;
  for (const auto& line : read_lines(path_training_smiles(cfg))) {
    if (line.empty()) continue;
    features.push_back(structural_features(parse_smiles(line)));
  }
  const DatasetStats s =
      dataset_stats(counts, features, plain.size(), masked.size());
  write_file(join(cfg.workdir, "stats.txt"), format_stats(s));
  return s;
}

void run_pipeline(const PipelineConfig& cfg, bool force) {
  auto need = [&](const std::string& p) { return force || !fs::exists(p); };
  if (need(path_fragments(cfg))) {
    std::cerr << "[pipeline] preprocess\n";
    stage_preprocess(cfg);
  } else {
    std::cerr << "[pipeline] preprocess: reusing " << path_fragments(cfg) << "\n";
    persist_config(cfg);
  }
  if (need(path_vocab(cfg))) {
    std::cerr << "[pipeline] vocab\n";
    stage_vocab(cfg);
  }
  if (need(path_embeddings(cfg))) {
    std::cerr << "[pipeline] embed\n";
    stage_embed(cfg);
  }
  if (need(path_checkpoint(cfg))) {
    std::cerr << "[pipeline] train\n";
    stage_train(cfg);
  }
  if (need(path_samples(cfg))) {
    std::cerr << "[pipeline] sample\n";
    stage_sample(cfg);
  }
  std::cerr << "[pipeline] eval\n";
  stage_eval(cfg);
  std::cerr << "[pipeline] stats\n";
  stage_stats(cfg);
}

}  // namespace fraggen
