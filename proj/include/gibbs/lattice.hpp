#ifndef GIBBS_LATTICE_HPP
#define GIBBS_LATTICE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gibbs {

using VertexId = int;
using BondId = int;

struct Bond {
  VertexId u;
  VertexId v;
  VertexId other(VertexId x) const { return x == u ? v : u; }
};

enum class Topology { free, periodic };

enum class GraphKind { box, tree, triangular, custom };

// A subset of the vertices of a fixed host graph, with O(1) membership.
class Region {
 public:
  Region() = default;
  Region(std::vector<VertexId> members, int num_vertices);
  static Region all(int num_vertices);
  static Region of(std::initializer_list<VertexId> members, int num_vertices);

  const std::vector<VertexId>& members() const { return members_; }
  bool contains(VertexId v) const {
    return v >= 0 && v < static_cast<int>(mask_.size()) && mask_[v] != 0;
  }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  int host_size() const { return static_cast<int>(mask_.size()); }

 private:
  std::vector<VertexId> members_;  // sorted, unique
  std::vector<char> mask_;
};

// Finite simple graph with dense integer vertex ids. Immutable after
// construction; safe to share across concurrent workers.
class Graph {
 public:
  static Graph box(int dim, int side, Topology topology);
  static Graph tree(int branching, int depth);
  static Graph triangular(int side);
  static Graph custom(int num_vertices, std::vector<Bond> bonds);

  int num_vertices() const { return num_vertices_; }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const Bond& bond(BondId b) const { return bonds_[b]; }
  const std::vector<VertexId>& neighbors(VertexId v) const {
    return adjacency_[v];
  }
  const std::vector<BondId>& incident_bonds(VertexId v) const {
    return incident_[v];
  }
  int degree(VertexId v) const { return static_cast<int>(adjacency_[v].size()); }

  GraphKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int side() const { return side_; }
  Topology topology() const { return topology_; }

  // Coordinate maps for boxes (row-major: coordinate 0 most significant).
  VertexId index_of(const std::vector<int>& coords) const;
  std::vector<int> coords_of(VertexId v) const;

  // Vertices of degree 1 (meaningful for trees: the truncation leaves).
  Region leaves() const;

  // Structured one-line descriptor, parseable by parse_descriptor.
  std::string descriptor() const;
  static Graph parse_descriptor(const std::string& text);

 private:
  Graph() = default;
  void finish();  // builds adjacency, validates simplicity
  static VertexId index_of_raw(const std::vector<int>& coords, int dim,
                               int side);

  int num_vertices_ = 0;
  std::vector<Bond> bonds_;
  std::vector<std::vector<VertexId>> adjacency_;
  std::vector<std::vector<BondId>> incident_;
  GraphKind kind_ = GraphKind::custom;
  int dim_ = 0;
  int side_ = 0;
  int depth_ = 0;
  Topology topology_ = Topology::free;
};

// All sites outside the region that are adjacent to it.
Region boundary(const Graph& g, const Region& lambda);

struct BondSets {
  std::vector<BondId> inner;     // both endpoints inside
  std::vector<BondId> touching;  // at least one endpoint inside
};
BondSets bond_sets(const Graph& g, const Region& lambda);

}  // namespace gibbs

#endif
