#include "gibbs/small_graphs.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>

namespace gibbs {

namespace {

// Upper-triangle adjacency bits; canonical form = minimum over all vertex
// permutations.
uint64_t adjacency_bits(int n, const std::vector<Bond>& bonds,
                        const std::vector<int>& perm) {
  uint64_t bits = 0;
  auto pos = [n](int a, int b) {
    if (a > b) std::swap(a, b);
    return a * n - a * (a + 1) / 2 + (b - a - 1);
  };
  for (const Bond& e : bonds) bits |= uint64_t(1) << pos(perm[e.u], perm[e.v]);
  return bits;
}

uint64_t canonical_signature(int n, const std::vector<Bond>& bonds) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  uint64_t best = ~uint64_t(0);
  do {
    best = std::min(best, adjacency_bits(n, bonds, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

std::vector<Graph> connected_graphs_up_to(int max_edges) {
  if (max_edges < 1 || max_edges > 7)
    throw std::invalid_argument("connected_graphs_up_to: 1..7 edges");
  struct Entry {
    int n;
    std::vector<Bond> bonds;
  };
  std::vector<Graph> out;
  std::vector<Entry> level = {{2, {{0, 1}}}};
  out.push_back(Graph::custom(2, {{0, 1}}));
  for (int e = 2; e <= max_edges; ++e) {
    std::vector<Entry> next;
    std::set<std::pair<int, uint64_t>> seen;
    for (const Entry& ent : level) {
      // (a) close a new edge between existing vertices
      for (int a = 0; a < ent.n; ++a)
        for (int b = a + 1; b < ent.n; ++b) {
          bool present = false;
          for (const Bond& x : ent.bonds)
            present |= (x.u == a && x.v == b);
          if (present) continue;
          Entry grown{ent.n, ent.bonds};
          grown.bonds.push_back({a, b});
          auto key = std::make_pair(grown.n,
                                    canonical_signature(grown.n, grown.bonds));
          if (seen.insert(key).second) next.push_back(grown);
        }
      // (b) hang a new leaf off an existing vertex
      for (int a = 0; a < ent.n; ++a) {
        Entry grown{ent.n + 1, ent.bonds};
        grown.bonds.push_back({a, ent.n});
        auto key = std::make_pair(grown.n,
                                  canonical_signature(grown.n, grown.bonds));
        if (seen.insert(key).second) next.push_back(grown);
      }
    }
    for (const Entry& ent : next) out.push_back(Graph::custom(ent.n, ent.bonds));
    level = std::move(next);
  }
  return out;
}

}  // namespace gibbs
