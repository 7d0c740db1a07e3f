#include <algorithm>
#include <array>
#include <queue>
#include <tuple>

#include "fraggen/molgraph.hpp"

namespace fraggen {

namespace {

// dense ranks of sortable keys
template <typename Key>
std::vector<int> dense_ranks(const std::vector<Key>& keys) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> rank(n, 0);
  int r = 0;
  for (int k = 0; k < n; ++k) {
    if (k > 0 && keys[idx[k - 1]] < keys[idx[k]]) ++r;
    rank[idx[k]] = r;
  }
  return rank;
}

int class_count(const std::vector<int>& rank) {
  return rank.empty() ? 0 : *std::max_element(rank.begin(), rank.end()) + 1;
}

// Morgan-style refinement: rank + sorted (bond order, neighbor rank) multiset.
std::vector<int> refine(const Molecule& mol, std::vector<int> rank) {
  const int n = mol.atom_count();
  while (true) {
    const int before = class_count(rank);
    std::vector<std::pair<int, std::vector<std::pair<int, int>>>> keys(n);
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, int>> nbr;
      for (int bi : mol.incident_bonds(i)) {
        const Bond& b = mol.bond(bi);
        nbr.emplace_back(static_cast<int>(b.order), rank[b.other(i)]);
      }
      std::sort(nbr.begin(), nbr.end());
      keys[i] = {rank[i], std::move(nbr)};
    }
    rank = dense_ranks(keys);
    if (class_count(rank) == before) return rank;
  }
}

// Distance-spectrum invariant separates most refinement-stable ties.
std::vector<int> distance_refine(const Molecule& mol, std::vector<int> rank) {
  const int n = mol.atom_count();
  std::vector<std::pair<int, std::vector<std::pair<int, int>>>> keys(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> dist(n, -1);
    std::queue<int> q;
    q.push(i);
    dist[i] = 0;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int w : mol.neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
      }
    }
    std::vector<std::pair<int, int>> spec;
    for (int j = 0; j < n; ++j)
      if (j != i) spec.emplace_back(dist[j], rank[j]);
    std::sort(spec.begin(), spec.end());
    keys[i] = {rank[i], std::move(spec)};
  }
  return dense_ranks(keys);
}

}  // namespace

std::vector<int> canonical_ranks(const Molecule& mol) {
  const int n = mol.atom_count();
  std::vector<std::tuple<int, int, int, int, int, int>> init(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = mol.atom(i);
    init[i] = {static_cast<int>(a.element),
               a.aromatic ? 1 : 0,
               a.charge,
               mol.degree(i),
               a.hydrogens(),
               a.is_dummy() ? 0 : a.isotope};
  }
  std::vector<int> rank = refine(mol, dense_ranks(init));

  while (class_count(rank) < n) {
    const int before = class_count(rank);
    rank = refine(mol, distance_refine(mol, rank));
    if (class_count(rank) == n) break;
    if (class_count(rank) == before) {
      // split the lowest tied class; remaining ties are automorphic in
      // practice for the organic subset, so any member works
      std::vector<int> count(before, 0);
      for (int r : rank) ++count[r];
      int target = 0;
      while (count[target] < 2) ++target;
      int chosen = -1;
      for (int i = 0; i < n && chosen < 0; ++i)
        if (rank[i] == target) chosen = i;
      std::vector<std::pair<int, int>> keys(n);
      for (int i = 0; i < n; ++i) keys[i] = {rank[i], i == chosen ? 0 : 1};
      rank = refine(mol, dense_ranks(keys));
    }
  }
  return rank;
}

}  // namespace fraggen
