#ifndef GIBBS_PERCOLATION_HPP
#define GIBBS_PERCOLATION_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gibbs/lattice.hpp"
#include "gibbs/model.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

// Open/closed marks over bonds resp. sites of a host graph.
using BondConfig = std::vector<uint8_t>;
using SiteConfig = std::vector<uint8_t>;

// Path halving + union by size; roots canonicalized to the minimum member
// index on demand, so labelings are deterministic.
class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n), size_(n, 1), count_(n) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return;
    if (size_[x] < size_[y]) std::swap(x, y);
    parent_[y] = x;
    size_[x] += size_[y];
    --count_;
  }
  bool connected(int x, int y) { return find(x) == find(y); }
  int count() const { return count_; }
  int component_size(int x) { return size_[find(x)]; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  int count_;
};

enum class Structure { site, bond };

// i.i.d. Bernoulli(p) marks over sites or bonds.
BondConfig sample_bernoulli_bonds(const Graph& g, double p, Rng& rng);
SiteConfig sample_bernoulli_sites(const Graph& g, double p, Rng& rng);

// One uniform per site/bond; thresholding it at different p values gives
// the nested simultaneous coupling of all Bernoulli levels.
std::vector<double> uniform_field(const Graph& g, Structure structure,
                                  Rng& rng);
std::vector<uint8_t> threshold_field(const std::vector<double>& field,
                                     double p);

// Cluster labeling with the three counting conventions relative to a
// designated boundary set. For bond configurations every vertex takes part
// (closed-bond singletons are clusters); for site configurations only open
// sites are clustered and closed sites get label -1.
struct ClusterLabeling {
  std::vector<int> label;          // per vertex; dense ids, min-vertex order
  std::vector<int> sizes;          // per cluster
  std::vector<char> touches_boundary;  // per cluster
  std::vector<char> meets_interior;    // per cluster: has a vertex off the boundary set
  int num_clusters = 0;       // k: all clusters
  int num_wired = 0;          // k(.,L): clusters meeting L, boundary wired together
  int num_interior = 0;       // k-hat: clusters meeting L avoiding the boundary
  int largest = 0;            // size of the largest cluster
};

ClusterLabeling label_clusters(const Graph& g, const BondConfig& open,
                               const Region& boundary_set);
ClusterLabeling label_clusters_sites(const Graph& g, const SiteConfig& open,
                                     const Region& boundary_set);

bool connected(const Graph& g, const BondConfig& open, VertexId x, VertexId y);
bool connected(const Graph& g, const BondConfig& open, VertexId x,
               const Region& target);
bool connected_sites(const Graph& g, const SiteConfig& open, VertexId x,
                     VertexId y);
bool connected_sites(const Graph& g, const SiteConfig& open, VertexId x,
                     const Region& target);

// Clusters of sites holding `value` under 8-neighbor adjacency; 2-d boxes
// only (both topologies).
ClusterLabeling star_label_clusters(const Graph& g, const SiteConfig& config,
                                    uint8_t value);

enum class CrossingMode { left_right, top_bottom };

// Open crossing between opposite faces of a free 2-d box.
bool crossing(const Graph& g, const BondConfig& open, CrossingMode mode);
bool crossing_sites(const Graph& g, const SiteConfig& open, CrossingMode mode);

// 1 where the two configurations agree.
SiteConfig agreement_map(const SpinConfig& sigma, const SpinConfig& eta);

// Bond open iff its endpoint spins attain the minimum of the pair energy.
BondConfig ground_energy_bonds(const Graph& g, const Interaction& in,
                               const SpinConfig& sigma);

// Optional classification of ground bonds by a partition of the set of
// minimizing (unordered) spin-value pairs. Entry -1 = bond not open.
using SpinPair = std::pair<Spin, Spin>;  // canonical: first <= second
std::vector<int> classify_ground_bonds(
    const Graph& g, const Interaction& in, const SpinConfig& sigma,
    const std::vector<std::vector<SpinPair>>& partition);

// Packed-bit serialization: header line (descriptor + structure + rows),
// then one packed row of bits per configuration.
void write_packed(std::ostream& os, const Graph& g, Structure structure,
                  const std::vector<std::vector<uint8_t>>& rows);
struct PackedConfigs {
  std::string graph_descriptor;
  Structure structure;
  std::vector<std::vector<uint8_t>> rows;
};
PackedConfigs read_packed(std::istream& is);

}  // namespace gibbs

#endif
