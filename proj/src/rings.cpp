#include <algorithm>
#include <queue>

#include "fraggen/molgraph.hpp"

namespace fraggen {

namespace {

// GF(2) edge-incidence vector of a cycle
using EdgeVec = std::vector<uint64_t>;

EdgeVec make_vec(size_t bond_count) { return EdgeVec((bond_count + 63) / 64, 0); }

void set_bit(EdgeVec& v, int bit) { v[bit / 64] |= (1ULL << (bit % 64)); }

void xor_into(EdgeVec& a, const EdgeVec& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
}

bool is_zero(const EdgeVec& v) {
  for (uint64_t w : v)
    if (w) return false;
  return true;
}

int lowest_bit(const EdgeVec& v) {
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i]) return static_cast<int>(i * 64 + __builtin_ctzll(v[i]));
  return -1;
}

struct Candidate {
  int length;
  EdgeVec edges;
};

}  // namespace

// Minimum cycle basis via Horton: shortest cycles through (v, e) candidates,
// greedily selected under GF(2) independence. Exact for the sizes we report.
std::vector<int> sssr_sizes(const Molecule& mol) {
  const int n = mol.atom_count();
  const int m = mol.bond_count();
  const int nu = m - n + 1;  // connected by invariant
  std::vector<int> sizes;
  if (nu <= 0) return sizes;

  // all-pairs BFS (distances + one shortest-path tree per source)
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  std::vector<std::vector<int>> via(n, std::vector<int>(n, -1));  // bond to parent
  for (int s = 0; s < n; ++s) {
    std::queue<int> q;
    q.push(s);
    dist[s][s] = 0;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int bi : mol.incident_bonds(v)) {
        const int w = mol.bond(bi).other(v);
        if (dist[s][w] < 0) {
          dist[s][w] = dist[s][v] + 1;
          via[s][w] = bi;
          q.push(w);
        }
      }
    }
  }

  auto path_edges = [&](int s, int t, EdgeVec& vec, std::vector<uint8_t>& atoms) {
    int v = t;
    while (v != s) {
      const int bi = via[s][v];
      set_bit(vec, bi);
      atoms[v] = 1;
      v = mol.bond(bi).other(v);
    }
    atoms[s] = 1;
  };

  std::vector<Candidate> cands;
  for (int v = 0; v < n; ++v) {
    for (int bi = 0; bi < m; ++bi) {
      const Bond& b = mol.bond(bi);
      if (b.a == v || b.b == v) continue;
      if (dist[v][b.a] < 0 || dist[v][b.b] < 0) continue;
      // cycle = sp(v,a) + (a,b) + sp(b,v); require vertex-disjoint paths
      EdgeVec vec = make_vec(m);
      std::vector<uint8_t> atoms_a(n, 0), atoms_b(n, 0);
      EdgeVec va = make_vec(m), vb = make_vec(m);
      path_edges(v, b.a, va, atoms_a);
      path_edges(v, b.b, vb, atoms_b);
      int shared = 0;
      for (int i = 0; i < n; ++i)
        if (atoms_a[i] && atoms_b[i]) ++shared;
      if (shared != 1) continue;  // only v in common
      vec = va;
      xor_into(vec, vb);
      set_bit(vec, bi);
      cands.push_back({dist[v][b.a] + dist[v][b.b] + 1, std::move(vec)});
    }
  }

  // fundamental cycles of the BFS tree rooted at 0 guarantee a spanning set
  {
    std::vector<uint8_t> tree_bond(m, 0);
    for (int v = 0; v < n; ++v)
      if (via[0][v] >= 0) tree_bond[via[0][v]] = 1;
    for (int bi = 0; bi < m; ++bi) {
      if (tree_bond[bi]) continue;
      const Bond& b = mol.bond(bi);
      EdgeVec vec = make_vec(m);
      std::vector<uint8_t> atoms_a(n, 0), atoms_b(n, 0);
      EdgeVec va = make_vec(m), vb = make_vec(m);
      path_edges(0, b.a, va, atoms_a);
      path_edges(0, b.b, vb, atoms_b);
      vec = va;
      xor_into(vec, vb);
      set_bit(vec, bi);
      int len = 0;
      for (uint64_t w : vec) len += __builtin_popcountll(w);
      cands.push_back({len, std::move(vec)});
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& x, const Candidate& y) { return x.length < y.length; });

  // greedy GF(2) selection
  std::vector<EdgeVec> basis;  // row-echelon
  std::vector<int> pivot;
  for (const Candidate& c : cands) {
    EdgeVec v = c.edges;
    for (size_t k = 0; k < basis.size(); ++k) {
      const int p = pivot[k];
      if (v[p / 64] & (1ULL << (p % 64))) xor_into(v, basis[k]);
    }
    if (is_zero(v)) continue;
    pivot.push_back(lowest_bit(v));
    basis.push_back(std::move(v));
    sizes.push_back(c.length);
    if (static_cast<int>(sizes.size()) == nu) break;
  }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

std::map<int, int> ring_counts(const Molecule& mol) {
  std::map<int, int> out;
  for (int s : sssr_sizes(mol))
    if (s >= 3 && s <= 6) ++out[s];
  return out;
}

}  // namespace fraggen
