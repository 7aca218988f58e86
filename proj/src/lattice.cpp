#include "gibbs/lattice.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gibbs {

Region::Region(std::vector<VertexId> members, int num_vertices)
    : members_(std::move(members)), mask_(num_vertices, 0) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()),
                 members_.end());
  for (VertexId v : members_) {
    if (v < 0 || v >= num_vertices)
      throw std::invalid_argument("Region: vertex out of range");
    mask_[v] = 1;
  }
}

Region Region::all(int num_vertices) {
  std::vector<VertexId> m(num_vertices);
  for (int i = 0; i < num_vertices; ++i) m[i] = i;
  return Region(std::move(m), num_vertices);
}

Region Region::of(std::initializer_list<VertexId> members, int num_vertices) {
  return Region(std::vector<VertexId>(members), num_vertices);
}

void Graph::finish() {
  std::set<std::pair<int, int>> seen;
  adjacency_.assign(num_vertices_, {});
  incident_.assign(num_vertices_, {});
  for (int b = 0; b < static_cast<int>(bonds_.size()); ++b) {
    auto [u, v] = bonds_[b];
    if (u == v) throw std::invalid_argument("Graph: self-loop");
    if (u < 0 || v < 0 || u >= num_vertices_ || v >= num_vertices_)
      throw std::invalid_argument("Graph: bond endpoint out of range");
    if (u > v) std::swap(bonds_[b].u, bonds_[b].v);
    if (!seen.insert({bonds_[b].u, bonds_[b].v}).second)
      throw std::invalid_argument("Graph: duplicate bond");
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
    incident_[u].push_back(b);
    incident_[v].push_back(b);
  }
}

Graph Graph::box(int dim, int side, Topology topology) {
  if (dim < 1 || side < 1) throw std::invalid_argument("box: d,n must be >= 1");
  if (topology == Topology::periodic && side < 3)
    throw std::invalid_argument("box: periodic requires side >= 3");
  // Guard the index arithmetic: side^dim must fit comfortably in int.
  int64_t count = 1;
  for (int i = 0; i < dim; ++i) {
    count *= side;
    if (count > (1LL << 30)) throw std::invalid_argument("box: too large");
  }
  Graph g;
  g.kind_ = GraphKind::box;
  g.dim_ = dim;
  g.side_ = side;
  g.topology_ = topology;
  g.num_vertices_ = static_cast<int>(count);
  std::vector<int> coords(dim, 0);
  for (int v = 0; v < g.num_vertices_; ++v) {
    for (int axis = 0; axis < dim; ++axis) {
      if (coords[axis] + 1 < side) {
        std::vector<int> n = coords;
        n[axis] += 1;
        g.bonds_.push_back({v, g.index_of_raw(n, dim, side)});
      } else if (topology == Topology::periodic) {
        std::vector<int> n = coords;
        n[axis] = 0;
        g.bonds_.push_back({v, g.index_of_raw(n, dim, side)});
      }
    }
    for (int axis = dim - 1; axis >= 0; --axis) {
      if (++coords[axis] < side) break;
      coords[axis] = 0;
    }
  }
  g.finish();
  return g;
}

VertexId Graph::index_of_raw(const std::vector<int>& coords, int dim,
                             int side) {
  VertexId v = 0;
  for (int i = 0; i < dim; ++i) v = v * side + coords[i];
  return v;
}

VertexId Graph::index_of(const std::vector<int>& coords) const {
  if (kind_ != GraphKind::box || static_cast<int>(coords.size()) != dim_)
    throw std::invalid_argument("index_of: not a box of that dimension");
  for (int c : coords)
    if (c < 0 || c >= side_)
      throw std::invalid_argument("index_of: coordinate out of range");
  return index_of_raw(coords, dim_, side_);
}

std::vector<int> Graph::coords_of(VertexId v) const {
  if (kind_ != GraphKind::box)
    throw std::invalid_argument("coords_of: not a box");
  std::vector<int> coords(dim_);
  for (int i = dim_ - 1; i >= 0; --i) {
    coords[i] = v % side_;
    v /= side_;
  }
  return coords;
}

Graph Graph::tree(int branching, int depth) {
  if (branching < 1 || depth < 1)
    throw std::invalid_argument("tree: branching,depth must be >= 1");
  // Ball of radius `depth` around the midpoint of a doubly-rooted edge:
  // both roots get full degree branching+1, leaves sit at level `depth`.
  Graph g;
  g.kind_ = GraphKind::tree;
  g.dim_ = branching;
  g.depth_ = depth;
  g.num_vertices_ = 2;
  g.bonds_.push_back({0, 1});
  std::vector<VertexId> frontier = {0, 1};
  for (int level = 2; level <= depth; ++level) {
    std::vector<VertexId> next;
    for (VertexId parent : frontier) {
      for (int c = 0; c < branching; ++c) {
        VertexId child = g.num_vertices_++;
        g.bonds_.push_back({parent, child});
        next.push_back(child);
      }
    }
    frontier = std::move(next);
  }
  g.finish();
  return g;
}

Graph Graph::triangular(int side) {
  if (side < 2) throw std::invalid_argument("triangular: side must be >= 2");
  // Square grid plus an edge from each vertex to its (+1,+1) neighbor.
  Graph g;
  g.kind_ = GraphKind::triangular;
  g.dim_ = 2;
  g.side_ = side;
  g.num_vertices_ = side * side;
  auto id = [side](int i, int j) { return i * side + j; };
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      if (j + 1 < side) g.bonds_.push_back({id(i, j), id(i, j + 1)});
      if (i + 1 < side) g.bonds_.push_back({id(i, j), id(i + 1, j)});
      if (i + 1 < side && j + 1 < side)
        g.bonds_.push_back({id(i, j), id(i + 1, j + 1)});
    }
  g.finish();
  return g;
}

Graph Graph::custom(int num_vertices, std::vector<Bond> bonds) {
  if (num_vertices < 1) throw std::invalid_argument("custom: empty graph");
  Graph g;
  g.kind_ = GraphKind::custom;
  g.num_vertices_ = num_vertices;
  g.bonds_ = std::move(bonds);
  g.finish();
  return g;
}

Region Graph::leaves() const {
  std::vector<VertexId> out;
  for (int v = 0; v < num_vertices_; ++v)
    if (degree(v) == 1) out.push_back(v);
  return Region(std::move(out), num_vertices_);
}

std::string Graph::descriptor() const {
  std::ostringstream os;
  switch (kind_) {
    case GraphKind::box:
      os << "box " << dim_ << ' ' << side_ << ' '
         << (topology_ == Topology::periodic ? "periodic" : "free");
      break;
    case GraphKind::tree:
      os << "tree " << dim_ << ' ' << depth_;
      break;
    case GraphKind::triangular:
      os << "triangular " << side_;
      break;
    case GraphKind::custom:
      os << "custom " << num_vertices_;
      for (const Bond& b : bonds_) os << ' ' << b.u << '-' << b.v;
      break;
  }
  return os.str();
}

Graph Graph::parse_descriptor(const std::string& text) {
  std::istringstream is(text);
  std::string kind;
  is >> kind;
  if (kind == "box") {
    int d, n;
    std::string topo;
    is >> d >> n >> topo;
    if (!is) throw std::invalid_argument("descriptor: bad box");
    if (topo != "free" && topo != "periodic")
      throw std::invalid_argument("descriptor: bad topology");
    return box(d, n, topo == "periodic" ? Topology::periodic : Topology::free);
  }
  if (kind == "tree") {
    int b, depth;
    is >> b >> depth;
    if (!is) throw std::invalid_argument("descriptor: bad tree");
    return tree(b, depth);
  }
  if (kind == "triangular") {
    int n;
    is >> n;
    if (!is) throw std::invalid_argument("descriptor: bad triangular");
    return triangular(n);
  }
  if (kind == "custom") {
    int n;
    is >> n;
    if (!is) throw std::invalid_argument("descriptor: bad custom");
    std::vector<Bond> bonds;
    std::string tok;
    while (is >> tok) {
      auto dash = tok.find('-');
      if (dash == std::string::npos)
        throw std::invalid_argument("descriptor: bad bond token");
      bonds.push_back(
          {std::stoi(tok.substr(0, dash)), std::stoi(tok.substr(dash + 1))});
    }
    return custom(n, std::move(bonds));
  }
  throw std::invalid_argument("descriptor: unknown kind '" + kind + "'");
}

Region boundary(const Graph& g, const Region& lambda) {
  std::vector<VertexId> out;
  std::vector<char> added(g.num_vertices(), 0);
  for (VertexId x : lambda.members())
    for (VertexId y : g.neighbors(x))
      if (!lambda.contains(y) && !added[y]) {
        added[y] = 1;
        out.push_back(y);
      }
  return Region(std::move(out), g.num_vertices());
}

BondSets bond_sets(const Graph& g, const Region& lambda) {
  BondSets sets;
  for (int b = 0; b < g.num_bonds(); ++b) {
    bool in_u = lambda.contains(g.bond(b).u);
    bool in_v = lambda.contains(g.bond(b).v);
    if (in_u && in_v) sets.inner.push_back(b);
    if (in_u || in_v) sets.touching.push_back(b);
  }
  return sets;
}

}  // namespace gibbs
