#include "fraggen/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fraggen {

namespace {

bool parses_valid(const std::string& smiles, std::string* canonical) {
  try {
    const Molecule m = parse_smiles(smiles);
    if (!check_valence(m)) return false;
    if (canonical) *canonical = canonical_smiles(m);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

FeatureSummary summarize(const std::vector<double>& xs) {
  FeatureSummary s;
  s.n = static_cast<long>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(xs.size()));
  return s;
}

Histogram make_histogram(const std::vector<double>& xs, double lo, double hi, int bins,
                         bool integer_bins) {
  Histogram h;
  if (integer_bins) {
    h.lo = std::floor(lo);
    h.hi = std::floor(hi);
    h.width = 1.0;
    h.counts.assign(static_cast<size_t>(h.hi - h.lo) + 1, 0);
    for (double x : xs) {
      const long idx = static_cast<long>(std::floor(x) - h.lo);
      ++h.counts[static_cast<size_t>(std::clamp<long>(idx, 0, static_cast<long>(h.counts.size()) - 1))];
    }
  } else {
    h.lo = lo;
    h.hi = hi;
    h.width = (hi - lo) / bins;
    if (h.width <= 0.0) h.width = 1.0;
    h.counts.assign(static_cast<size_t>(bins), 0);
    for (double x : xs) {
      long idx = static_cast<long>((x - lo) / h.width);
      idx = std::clamp<long>(idx, 0, bins - 1);
      ++h.counts[static_cast<size_t>(idx)];
    }
  }
  h.total = static_cast<long>(xs.size());
  return h;
}

}  // namespace

std::vector<std::string> valid_canonical(const std::vector<std::string>& generated) {
  std::vector<std::string> out;
  for (const auto& s : generated) {
    std::string canon;
    if (parses_valid(s, &canon)) out.push_back(std::move(canon));
  }
  return out;
}

double validity_rate(const std::vector<std::string>& generated) {
  if (generated.empty()) throw std::invalid_argument("validity_rate over an empty list");
  int valid = 0;
  for (const auto& s : generated)
    if (parses_valid(s, nullptr)) ++valid;
  return static_cast<double>(valid) / static_cast<double>(generated.size());
}

double novelty_rate(const std::vector<std::string>& valid_canonical_list,
                    const std::unordered_set<std::string>& training_canonical) {
  if (valid_canonical_list.empty())
    throw std::invalid_argument("novelty_rate over an empty valid list");
  int novel = 0;
  for (const auto& s : valid_canonical_list)
    if (!training_canonical.count(s)) ++novel;
  return static_cast<double>(novel) / static_cast<double>(valid_canonical_list.size());
}

double uniqueness_rate(const std::vector<std::string>& valid_canonical_list) {
  if (valid_canonical_list.empty())
    throw std::invalid_argument("uniqueness_rate over an empty valid list");
  std::unordered_set<std::string> distinct(valid_canonical_list.begin(),
                                           valid_canonical_list.end());
  return static_cast<double>(distinct.size()) /
         static_cast<double>(valid_canonical_list.size());
}

MetricReport evaluate_sample(const std::vector<std::string>& generated,
                             const std::unordered_set<std::string>& training_canonical) {
  MetricReport r;
  r.n_generated = static_cast<int>(generated.size());
  r.valid = validity_rate(generated);
  const auto valid = valid_canonical(generated);
  r.n_valid = static_cast<int>(valid.size());
  if (!valid.empty()) {
    r.novel = novelty_rate(valid, training_canonical);
    r.unique = uniqueness_rate(valid);
  }
  return r;
}

DistributionReport distribution_report(const std::vector<std::string>& training,
                                       const std::vector<std::string>& generated) {
  if (training.empty() || generated.empty())
    throw std::invalid_argument("distribution_report needs two non-empty populations");

  // duplicates removed from the generated sample before profiling
  std::vector<std::string> gen_unique;
  {
    std::unordered_set<std::string> seen;
    for (const auto& s : generated) {
      std::string canon;
      if (!parses_valid(s, &canon)) continue;
      if (seen.insert(canon).second) gen_unique.push_back(std::move(canon));
    }
  }

  const std::vector<std::string> kAtomFeatures = {"atoms.C", "atoms.N", "atoms.O",
                                                  "atoms.S", "atoms.halogen"};
  const std::vector<std::string> kBondFeatures = {"bonds.single", "bonds.double",
                                                  "bonds.triple", "bonds.aromatic"};
  const std::vector<std::string> kRingFeatures = {"rings.3", "rings.4", "rings.5",
                                                  "rings.6"};

  DistributionReport rep;
  rep.features = kAtomFeatures;
  rep.features.insert(rep.features.end(), kBondFeatures.begin(), kBondFeatures.end());
  rep.features.insert(rep.features.end(), kRingFeatures.begin(), kRingFeatures.end());
  rep.features.push_back("logp");
  // reserved: qed, sas (out of scope)

  auto collect = [&](const std::vector<std::string>& pop, int* failures) {
    std::map<std::string, std::vector<double>> vals;
    for (const auto& s : pop) {
      try {
        const Molecule m = parse_smiles(s);
        const StructuralFeatures f = structural_features(m);
        auto get = [&](const std::map<std::string, int>& mm, const char* k) {
          auto it = mm.find(k);
          return it == mm.end() ? 0.0 : static_cast<double>(it->second);
        };
        vals["atoms.C"].push_back(get(f.atom_counts, "C"));
        vals["atoms.N"].push_back(get(f.atom_counts, "N"));
        vals["atoms.O"].push_back(get(f.atom_counts, "O"));
        vals["atoms.S"].push_back(get(f.atom_counts, "S"));
        vals["atoms.halogen"].push_back(get(f.atom_counts, "F") + get(f.atom_counts, "Cl") +
                                        get(f.atom_counts, "Br") + get(f.atom_counts, "I"));
        vals["bonds.single"].push_back(get(f.bond_counts, "single"));
        vals["bonds.double"].push_back(get(f.bond_counts, "double"));
        vals["bonds.triple"].push_back(get(f.bond_counts, "triple"));
        vals["bonds.aromatic"].push_back(get(f.bond_counts, "aromatic"));
        for (int size = 3; size <= 6; ++size) {
          auto it = f.ring_counts.find(size);
          vals["rings." + std::to_string(size)].push_back(
              it == f.ring_counts.end() ? 0.0 : static_cast<double>(it->second));
        }
        vals["logp"].push_back(crippen_logp(m));
      } catch (const std::exception&) {
        ++*failures;
      }
    }
    return vals;
  };

  auto train_vals = collect(training, &rep.training_failures);
  auto gen_vals = collect(gen_unique, &rep.generated_failures);

  for (const auto& feat : rep.features) {
    const auto& tv = train_vals[feat];
    const auto& gv = gen_vals[feat];
    double lo = 0.0, hi = 1.0;
    bool first = true;
    for (const auto* v : {&tv, &gv}) {
      for (double x : *v) {
        if (first) {
          lo = hi = x;
          first = false;
        } else {
          lo = std::min(lo, x);
          hi = std::max(hi, x);
        }
      }
    }
    const bool integer_bins = feat != "logp";
    rep.training[feat] = make_histogram(tv, lo, hi, 40, integer_bins);
    rep.generated[feat] = make_histogram(gv, lo, hi, 40, integer_bins);
    rep.training_summary[feat] = summarize(tv);
    rep.generated_summary[feat] = summarize(gv);
  }
  return rep;
}

void save_distribution_csv(const std::string& path, const DistributionReport& report) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write histogram file: " + path);
  f << "feature,population,bin_lo,bin_hi,count\n";
  for (const auto& feat : report.features) {
    for (const auto* pop : {"training", "generated"}) {
      const auto& h = (pop == std::string("training") ? report.training : report.generated)
                          .at(feat);
      for (size_t i = 0; i < h.counts.size(); ++i) {
        const double lo = h.lo + static_cast<double>(i) * h.width;
        f << feat << ',' << pop << ',' << lo << ',' << lo + h.width << ','
          << h.counts[i] << "\n";
      }
    }
  }
}

DatasetStats dataset_stats(const std::vector<int>& fragment_counts,
                           const std::vector<StructuralFeatures>& features,
                           long vocab_size, long vocab_size_lfm) {
  DatasetStats s;
  s.total_molecules = static_cast<long>(fragment_counts.size());
  std::vector<double> nfrag;
  for (int c : fragment_counts) {
    if (c >= 2) {
      ++s.with_two_or_more_fragments;
      nfrag.push_back(c);
    }
  }
  const auto fs = summarize(nfrag);
  s.mean_fragments = fs.mean;
  s.std_fragments = fs.stddev;
  s.vocab_size = vocab_size;
  s.vocab_size_lfm = vocab_size_lfm;

  std::vector<double> atoms, bonds, rings;
  for (const auto& f : features) {
    atoms.push_back(f.heavy_atoms);
    bonds.push_back(f.bonds);
    rings.push_back(f.rings);
  }
  const auto as = summarize(atoms), bs = summarize(bonds), rs = summarize(rings);
  s.mean_atoms = as.mean;
  s.std_atoms = as.stddev;
  s.mean_bonds = bs.mean;
  s.std_bonds = bs.stddev;
  s.mean_rings = rs.mean;
  s.std_rings = rs.stddev;
  return s;
}

std::string format_metrics(const MetricReport& m) {
  std::ostringstream out;
  out << "n_generated=" << m.n_generated << "\n"
      << "n_valid=" << m.n_valid << "\n"
      << "valid=" << m.valid << "\n"
      << "novel=" << m.novel << "\n"
      << "unique=" << m.unique << "\n";
  return out.str();
}

std::string format_stats(const DatasetStats& s) {
  std::ostringstream out;
  out << "total_molecules=" << s.total_molecules << "\n"
      << "molecules_with_2plus_fragments=" << s.with_two_or_more_fragments << "\n"
      << "mean_fragments=" << s.mean_fragments << "\n"
      << "std_fragments=" << s.std_fragments << "\n"
      << "vocab_size=" << s.vocab_size << "\n"
      << "vocab_size_lfm=" << s.vocab_size_lfm << "\n"
      << "mean_atoms=" << s.mean_atoms << "\n"
      << "std_atoms=" << s.std_atoms << "\n"
      << "mean_bonds=" << s.mean_bonds << "\n"
      << "std_bonds=" << s.std_bonds << "\n"
      << "mean_rings=" << s.mean_rings << "\n"
      << "std_rings=" << s.std_rings << "\n";
  return out.str();
}

}  // namespace fraggen
