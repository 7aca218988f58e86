#include "gibbs/percolation.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gibbs {

BondConfig sample_bernoulli_bonds(const Graph& g, double p, Rng& rng) {
  if (p < 0 || p > 1) throw std::invalid_argument("bernoulli: p in [0,1]");
  BondConfig c(g.num_bonds());
  for (auto& bit : c) bit = rng.next_bernoulli(p) ? 1 : 0;
  return c;
}

SiteConfig sample_bernoulli_sites(const Graph& g, double p, Rng& rng) {
  if (p < 0 || p > 1) throw std::invalid_argument("bernoulli: p in [0,1]");
  SiteConfig c(g.num_vertices());
  for (auto& bit : c) bit = rng.next_bernoulli(p) ? 1 : 0;
  return c;
}

std::vector<double> uniform_field(const Graph& g, Structure structure,
                                  Rng& rng) {
  int n = structure == Structure::site ? g.num_vertices() : g.num_bonds();
  std::vector<double> field(n);
  for (double& u : field) u = rng.next_double();
  return field;
}

std::vector<uint8_t> threshold_field(const std::vector<double>& field,
                                     double p) {
  std::vector<uint8_t> c(field.size());
  for (size_t i = 0; i < field.size(); ++i) c[i] = field[i] < p ? 1 : 0;
  return c;
}

namespace {

// Shared finishing pass: canonicalize roots to dense ids in min-vertex
// order and derive the three counts.
ClusterLabeling finish_labeling(const Graph& g, UnionFind& uf,
                                const std::vector<char>& participates,
                                const Region& boundary_set) {
  ClusterLabeling out;
  out.label.assign(g.num_vertices(), -1);
  std::vector<int> root_to_id(g.num_vertices(), -1);
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (!participates[v]) continue;
    int r = uf.find(v);
    if (root_to_id[r] < 0) {
      root_to_id[r] = out.num_clusters++;
      out.sizes.push_back(0);
      out.touches_boundary.push_back(0);
      out.meets_interior.push_back(0);
    }
    int id = root_to_id[r];
    out.label[v] = id;
    out.sizes[id] += 1;
    if (boundary_set.contains(v))
      out.touches_boundary[id] = 1;
    else
      out.meets_interior[id] = 1;
  }
  for (int c = 0; c < out.num_clusters; ++c) {
    out.largest = std::max(out.largest, out.sizes[c]);
    if (out.meets_interior[c] && !out.touches_boundary[c])
      ++out.num_interior;
  }
  // Wired convention: everything touching the boundary set is one cluster,
  // present whenever the boundary set is (it stands for the open exterior).
  out.num_wired = out.num_interior + (boundary_set.empty() ? 0 : 1);
  return out;
}

}  // namespace

ClusterLabeling label_clusters(const Graph& g, const BondConfig& open,
                               const Region& boundary_set) {
  if (static_cast<int>(open.size()) != g.num_bonds())
    throw std::invalid_argument("label_clusters: bond config size mismatch");
  UnionFind uf(g.num_vertices());
  for (int b = 0; b < g.num_bonds(); ++b)
    if (open[b]) uf.unite(g.bond(b).u, g.bond(b).v);
  std::vector<char> participates(g.num_vertices(), 1);
  return finish_labeling(g, uf, participates, boundary_set);
}

ClusterLabeling label_clusters_sites(const Graph& g, const SiteConfig& open,
                                     const Region& boundary_set) {
  if (static_cast<int>(open.size()) != g.num_vertices())
    throw std::invalid_argument("label_clusters: site config size mismatch");
  UnionFind uf(g.num_vertices());
  for (const Bond& b : g.bonds())
    if (open[b.u] && open[b.v]) uf.unite(b.u, b.v);
  std::vector<char> participates(open.begin(), open.end());
  return finish_labeling(g, uf, participates, boundary_set);
}

namespace {

template <class Expand>
bool bfs_reach(int start, Expand expand, const std::vector<char>& is_target,
               int n) {
  if (is_target[start]) return true;
  std::vector<char> seen(n, 0);
  seen[start] = 1;
  std::deque<int> queue = {start};
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    bool hit = false;
    expand(x, [&](int y) {
      if (!seen[y]) {
        seen[y] = 1;
        if (is_target[y]) hit = true;
        queue.push_back(y);
      }
    });
    if (hit) return true;
  }
  return false;
}

}  // namespace

bool connected(const Graph& g, const BondConfig& open, VertexId x, VertexId y) {
  if (x == y) return true;
  std::vector<char> target(g.num_vertices(), 0);
  target[y] = 1;
  return bfs_reach(
      x,
      [&](int v, auto visit) {
        for (BondId b : g.incident_bonds(v))
          if (open[b]) visit(g.bond(b).other(v));
      },
      target, g.num_vertices());
}

bool connected(const Graph& g, const BondConfig& open, VertexId x,
               const Region& target) {
  std::vector<char> t(g.num_vertices(), 0);
  for (VertexId v : target.members()) t[v] = 1;
  return bfs_reach(
      x,
      [&](int v, auto visit) {
        for (BondId b : g.incident_bonds(v))
          if (open[b]) visit(g.bond(b).other(v));
      },
      t, g.num_vertices());
}

bool connected_sites(const Graph& g, const SiteConfig& open, VertexId x,
                     VertexId y) {
  if (x == y) return true;
  if (!open[x] || !open[y]) return false;
  std::vector<char> target(g.num_vertices(), 0);
  target[y] = 1;
  return bfs_reach(
      x,
      [&](int v, auto visit) {
        for (VertexId w : g.neighbors(v))
          if (open[w]) visit(w);
      },
      target, g.num_vertices());
}

bool connected_sites(const Graph& g, const SiteConfig& open, VertexId x,
                     const Region& target) {
  if (!open[x]) return false;
  std::vector<char> t(g.num_vertices(), 0);
  for (VertexId v : target.members())
    if (open[v]) t[v] = 1;
  return bfs_reach(
      x,
      [&](int v, auto visit) {
        for (VertexId w : g.neighbors(v))
          if (open[w]) visit(w);
      },
      t, g.num_vertices());
}

ClusterLabeling star_label_clusters(const Graph& g, const SiteConfig& config,
                                    uint8_t value) {
  if (g.kind() != GraphKind::box || g.dim() != 2)
    throw std::invalid_argument("star_label_clusters: 2-d box required");
  int n = g.side();
  bool wrap = g.topology() == Topology::periodic;
  UnionFind uf(g.num_vertices());
  auto id = [n](int i, int j) { return i * n + j; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (config[id(i, j)] != value) continue;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          int ii = i + di, jj = j + dj;
          if (wrap) {
            ii = (ii + n) % n;
            jj = (jj + n) % n;
          } else if (ii < 0 || jj < 0 || ii >= n || jj >= n) {
            continue;
          }
          if (config[id(ii, jj)] == value) uf.unite(id(i, j), id(ii, jj));
        }
    }
  std::vector<char> participates(g.num_vertices(), 0);
  for (int v = 0; v < g.num_vertices(); ++v)
    participates[v] = config[v] == value;
  Region empty({}, g.num_vertices());
  return finish_labeling(g, uf, participates, empty);
}

bool crossing(const Graph& g, const BondConfig& open, CrossingMode mode) {
  if (g.kind() != GraphKind::box || g.dim() != 2 ||
      g.topology() != Topology::free)
    throw std::invalid_argument("crossing: free 2-d box required");
  int n = g.side();
  UnionFind uf(g.num_vertices());
  for (int b = 0; b < g.num_bonds(); ++b)
    if (open[b]) uf.unite(g.bond(b).u, g.bond(b).v);
  auto id = [n](int i, int j) { return i * n + j; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int x = mode == CrossingMode::left_right ? id(a, 0) : id(0, a);
      int y = mode == CrossingMode::left_right ? id(b, n - 1) : id(n - 1, b);
      if (uf.connected(x, y)) return true;
    }
  return false;
}

bool crossing_sites(const Graph& g, const SiteConfig& open, CrossingMode mode) {
  if (g.kind() != GraphKind::box || g.dim() != 2 ||
      g.topology() != Topology::free)
    throw std::invalid_argument("crossing: free 2-d box required");
  int n = g.side();
  UnionFind uf(g.num_vertices());
  for (const Bond& b : g.bonds())
    if (open[b.u] && open[b.v]) uf.unite(b.u, b.v);
  auto id = [n](int i, int j) { return i * n + j; };
  for (int a = 0; a < n; ++a) {
    int x = mode == CrossingMode::left_right ? id(a, 0) : id(0, a);
    if (!open[x]) continue;
    for (int b = 0; b < n; ++b) {
      int y = mode == CrossingMode::left_right ? id(b, n - 1) : id(n - 1, b);
      if (open[y] && uf.connected(x, y)) return true;
    }
  }
  return false;
}

SiteConfig agreement_map(const SpinConfig& sigma, const SpinConfig& eta) {
  if (sigma.size() != eta.size())
    throw std::invalid_argument("agreement_map: size mismatch");
  SiteConfig out(sigma.size());
  for (size_t i = 0; i < sigma.size(); ++i) out[i] = sigma[i] == eta[i];
  return out;
}

BondConfig ground_energy_bonds(const Graph& g, const Interaction& in,
                               const SpinConfig& sigma) {
  double m = in.min_pair_energy();
  BondConfig out(g.num_bonds());
  for (int b = 0; b < g.num_bonds(); ++b)
    out[b] = in.pair_energy(sigma[g.bond(b).u], sigma[g.bond(b).v]) == m;
  return out;
}

std::vector<int> classify_ground_bonds(
    const Graph& g, const Interaction& in, const SpinConfig& sigma,
    const std::vector<std::vector<SpinPair>>& partition) {
  double m = in.min_pair_energy();
  std::set<SpinPair> ground_pairs;
  for (Spin a : in.alphabet().values())
    for (Spin b : in.alphabet().values())
      if (a <= b && in.pair_energy(a, b) == m) ground_pairs.insert({a, b});
  std::map<SpinPair, int> cls;
  for (int i = 0; i < static_cast<int>(partition.size()); ++i)
    for (SpinPair p : partition[i]) {
      if (p.first > p.second) std::swap(p.first, p.second);
      if (!ground_pairs.count(p))
        throw std::invalid_argument(
            "classify_ground_bonds: pair is not a minimizer");
      if (!cls.emplace(p, i).second)
        throw std::invalid_argument(
            "classify_ground_bonds: pair listed twice");
    }
  if (cls.size() != ground_pairs.size())
    throw std::invalid_argument(
        "classify_ground_bonds: partition does not cover all minimizers");
  std::vector<int> out(g.num_bonds(), -1);
  for (int b = 0; b < g.num_bonds(); ++b) {
    Spin a = sigma[g.bond(b).u], c = sigma[g.bond(b).v];
    if (a > c) std::swap(a, c);
    auto it = cls.find({a, c});
    if (it != cls.end()) out[b] = it->second;
  }
  return out;
}

void write_packed(std::ostream& os, const Graph& g, Structure structure,
                  const std::vector<std::vector<uint8_t>>& rows) {
  int width =
      structure == Structure::site ? g.num_vertices() : g.num_bonds();
  os << "gibbslab-packed v1 | " << g.descriptor() << " | "
     << (structure == Structure::site ? "site" : "bond") << " | rows="
     << rows.size() << " width=" << width << '\n';
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != width)
      throw std::invalid_argument("write_packed: row width mismatch");
    std::string packed((width + 7) / 8, '\0');
    for (int i = 0; i < width; ++i)
      if (row[i]) packed[i / 8] |= static_cast<char>(1 << (i % 8));
    os.write(packed.data(), static_cast<std::streamsize>(packed.size()));
  }
}

PackedConfigs read_packed(std::istream& is) {
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  std::string magic, version, sep;
  hs >> magic >> version >> sep;
  if (magic != "gibbslab-packed" || version != "v1" || sep != "|")
    throw std::invalid_argument("read_packed: bad header");
  std::string descriptor, tok;
  while (hs >> tok && tok != "|") {
    if (!descriptor.empty()) descriptor += ' ';
    descriptor += tok;
  }
  std::string structure_word;
  hs >> structure_word >> sep;
  size_t rows = 0;
  int width = 0;
  while (hs >> tok) {
    if (tok.rfind("rows=", 0) == 0) rows = std::stoull(tok.substr(5));
    if (tok.rfind("width=", 0) == 0) width = std::stoi(tok.substr(6));
  }
  PackedConfigs out;
  out.graph_descriptor = descriptor;
  out.structure =
      structure_word == "site" ? Structure::site : Structure::bond;
  int nbytes = (width + 7) / 8;
  std::string buf(nbytes, '\0');
  for (size_t r = 0; r < rows; ++r) {
    is.read(buf.data(), nbytes);
    if (!is) throw std::invalid_argument("read_packed: truncated rows");
    std::vector<uint8_t> row(width);
    for (int i = 0; i < width; ++i)
      row[i] = (buf[i / 8] >> (i % 8)) & 1;
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace gibbs
