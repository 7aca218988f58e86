#ifndef GIBBS_SMALL_GRAPHS_HPP
#define GIBBS_SMALL_GRAPHS_HPP

#include <vector>

#include "gibbs/lattice.hpp"

namespace gibbs {

// All connected simple graphs with 1..max_edges edges, one representative
// per isomorphism class, vertices relabeled 0..n-1. Grown edge by edge and
// deduplicated via the minimum adjacency signature over all vertex
// permutations, so the order is deterministic. max_edges <= 7.
std::vector<Graph> connected_graphs_up_to(int max_edges);

}  // namespace gibbs

#endif
