#pragma once

#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "fraggen/molgraph.hpp"

namespace fraggen {

struct MetricReport {
  double valid = 0.0;
  double novel = 0.0;
  double unique = 0.0;
  int n_generated = 0;
  int n_valid = 0;
};

// fraction of strings that parse and pass the valence check
double validity_rate(const std::vector<std::string>& generated);
// valid molecules (as canonical SMILES) out of a raw generated list
std::vector<std::string> valid_canonical(const std::vector<std::string>& generated);

double novelty_rate(const std::vector<std::string>& valid_canonical_list,
                    const std::unordered_set<std::string>& training_canonical);
double uniqueness_rate(const std::vector<std::string>& valid_canonical_list);

MetricReport evaluate_sample(const std::vector<std::string>& generated,
                             const std::unordered_set<std::string>& training_canonical);

struct Histogram {
  double lo = 0.0, hi = 0.0;
  double width = 1.0;
  std::vector<long> counts;
  long total = 0;
};

struct FeatureSummary {
  double mean = 0.0, stddev = 0.0;
  long n = 0;
};

// Shared-bin feature histograms over two populations plus per-feature
// means/stddevs; logP uses 40 uniform bins over the pooled range, count
// features use integer bins. QED/SAS slots are reserved but not computed.
struct DistributionReport {
  std::vector<std::string> features;  // row order for the CSV
  std::map<std::string, Histogram> training, generated;
  std::map<std::string, FeatureSummary> training_summary, generated_summary;
  int training_failures = 0, generated_failures = 0;
};

DistributionReport distribution_report(const std::vector<std::string>& training,
                                       const std::vector<std::string>& generated);

void save_distribution_csv(const std::string& path, const DistributionReport& report);

struct DatasetStats {
  long total_molecules = 0;
  long with_two_or_more_fragments = 0;
  double mean_fragments = 0.0, std_fragments = 0.0;  // over the >= 2 set
  long vocab_size = 0, vocab_size_lfm = 0;
  double mean_atoms = 0.0, std_atoms = 0.0;
  double mean_bonds = 0.0, std_bonds = 0.0;
  double mean_rings = 0.0, std_rings = 0.0;
};

// fragment_counts: fragments per molecule (1 = unbreakable), computed over
// every successfully fragmented molecule; feature stats over the same set.
DatasetStats dataset_stats(const std::vector<int>& fragment_counts,
                           const std::vector<StructuralFeatures>& features,
                           long vocab_size, long vocab_size_lfm);

std::string format_metrics(const MetricReport& m);
std::string format_stats(const DatasetStats& s);

}  // namespace fraggen
