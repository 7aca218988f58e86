#include "gibbs/random_cluster.hpp"

#include <cmath>
#include <stdexcept>

#include "gibbs/parallel.hpp"

namespace gibbs {

RcParams RcParams::uniform(const Graph& g, double p, double q,
                           RcCounting counting) {
  RcParams params;
  params.counting = std::move(counting);
  params.q = q;
  int n = static_cast<int>(rc_slots(g, params.counting).size());
  params.p_bond.assign(n, p);
  return params;
}

std::vector<BondId> rc_slots(const Graph& g, const RcCounting& counting) {
  if (counting.kind == RcCounting::Kind::free_counting) {
    std::vector<BondId> slots(g.num_bonds());
    for (int b = 0; b < g.num_bonds(); ++b) slots[b] = b;
    return slots;
  }
  return bond_sets(g, counting.lambda).touching;
}

namespace {

bool endpoints_connected_without(const Graph& g, const RcCounting& counting,
                                 const std::vector<BondId>& slots,
                                 const std::vector<uint8_t>& open, int slot) {
  UnionFind uf(g.num_vertices());
  if (counting.kind != RcCounting::Kind::free_counting) {
    int super = -1;
    for (int v = 0; v < g.num_vertices(); ++v)
      if (!counting.lambda.contains(v)) {
        if (super < 0)
          super = v;
        else
          uf.unite(super, v);
      }
  }
  for (size_t i = 0; i < slots.size(); ++i)
    if (open[i] && static_cast<int>(i) != slot)
      uf.unite(g.bond(slots[i]).u, g.bond(slots[i]).v);
  const Bond& e = g.bond(slots[slot]);
  return uf.connected(e.u, e.v);
}

}  // namespace

double rc_conditional_edge(const Graph& g, const RcParams& params,
                           const std::vector<BondId>& slots,
                           const std::vector<uint8_t>& open, int slot) {
  if (slot < 0 || slot >= static_cast<int>(slots.size()))
    throw std::invalid_argument("rc_conditional_edge: bad slot");
  double p = params.p_bond[slot];
  if (endpoints_connected_without(g, params.counting, slots, open, slot))
    return p;
  return p / (p + (1 - p) * params.q);
}

void rc_heatbath_step(const Graph& g, const RcParams& params,
                      const std::vector<BondId>& slots,
                      std::vector<uint8_t>& open, int slot, Rng& rng) {
  double prob = rc_conditional_edge(g, params, slots, open, slot);
  open[slot] = rng.next_bernoulli(prob) ? 1 : 0;
}

int src_kappa(const Graph& g, const SiteConfig& open, VertexId x) {
  // clusters of eta (x forced closed) meeting the neighborhood of x
  UnionFind uf(g.num_vertices());
  for (const Bond& b : g.bonds()) {
    if (b.u == x || b.v == x) continue;
    if (open[b.u] && open[b.v]) uf.unite(b.u, b.v);
  }
  int kappa = 0;
  std::vector<int> roots;
  for (VertexId y : g.neighbors(x)) {
    if (!open[y]) continue;
    int r = uf.find(y);
    bool fresh = true;
    for (int s : roots) fresh &= (s != r);
    if (fresh) {
      roots.push_back(r);
      ++kappa;
    }
  }
  return kappa;
}

double src_conditional_site(const Graph& g, double p, double q,
                            const SiteConfig& open, VertexId x) {
  int kappa = src_kappa(g, open, x);
  double a = p * std::pow(q, 1.0 - kappa);
  return a / (a + 1.0 - p);
}

// --- grey representation ----------------------------------------------------

GroupSpec GroupSpec::cyclic(int n) {
  GroupSpec spec;
  spec.identity = 0;
  spec.mult.assign(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) spec.mult[a][b] = (a + b) % n;
  return spec;
}

void GroupSpec::validate() const {
  int n = size();
  if (n < 1 || identity < 0 || identity >= n)
    throw std::invalid_argument("group: bad identity");
  for (const auto& row : mult) {
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("group: table not square");
    for (int v : row)
      if (v < 0 || v >= n) throw std::invalid_argument("group: not closed");
  }
  for (int a = 0; a < n; ++a)
    if (mult[identity][a] != a || mult[a][identity] != a)
      throw std::invalid_argument("group: identity fails");
  for (int a = 0; a < n; ++a) {
    bool has_inverse = false;
    for (int b = 0; b < n; ++b)
      has_inverse |= (mult[a][b] == identity && mult[b][a] == identity);
    if (!has_inverse) throw std::invalid_argument("group: missing inverse");
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (mult[mult[a][b]][c] != mult[a][mult[b][c]])
          throw std::invalid_argument("group: not associative");
}

int GroupSpec::inverse(int a) const {
  for (int b = 0; b < size(); ++b)
    if (mult[a][b] == identity) return b;
  throw std::invalid_argument("group: missing inverse");
}

GreyParams grey_params(const Interaction& in, const GroupSpec& group) {
  group.validate();
  int n = group.size();
  if (in.alphabet().size() != n)
    throw std::invalid_argument("grey_params: group/alphabet size mismatch");
  for (int a = 0; a < n; ++a)
    if (in.self_energy_by_index(a) != 0.0)
      throw std::invalid_argument("grey_params: V must vanish");
  std::vector<double> u(n);
  for (int a = 0; a < n; ++a) {
    u[a] = in.pair_energy_by_index(group.identity, a);
    if (u[a] > 0)
      throw std::invalid_argument(
          "grey_params: u > 0 somewhere; shift U to be nonpositive first");
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (in.pair_energy_by_index(a, b) != u[group.mult[group.inverse(a)][b]])
        throw std::invalid_argument(
            "grey_params: U is not left-invariant for this group");
  GreyParams out;
  out.r.resize(n);
  double sum = 0;
  out.r_star = 0;
  for (int a = 0; a < n; ++a) {
    out.r[a] = std::expm1(-in.beta() * u[a]);
    out.r_star = std::max(out.r_star, out.r[a]);
    sum += out.r[a];
  }
  out.r_bar = sum / n;
  out.p = out.r_star / (1.0 + out.r_star);
  out.q = out.r_bar > 0 ? out.r_star / out.r_bar : 1.0;
  return out;
}

std::vector<BondId> grey_slots(const Graph& g,
                               const std::optional<SpinConfig>& eta,
                               const Region& lambda) {
  BondSets sets = bond_sets(g, lambda);
  return eta ? sets.touching : sets.inner;
}

namespace {

struct GreyTables {
  std::vector<double> r;  // by group element
  GroupSpec group;
};

// W-bar of one cluster: sum over free spins on the lambda part of the
// cluster, boundary spins fixed, of the product of R over its open bonds.
double cluster_weight(const Graph& g, const GreyTables& t,
                      const std::optional<SpinConfig>& eta,
                      const Region& lambda,
                      const std::vector<VertexId>& cluster_sites,
                      const std::vector<std::pair<VertexId, VertexId>>& bonds,
                      const SpinAlphabet& alpha) {
  int n = t.group.size();
  std::vector<VertexId> free_sites;
  std::vector<int> fixed_index(g.num_vertices(), -1);
  for (VertexId v : cluster_sites) {
    if (lambda.contains(v))
      free_sites.push_back(v);
    else
      fixed_index[v] = alpha.index_of((*eta)[v]);
  }
  std::vector<int> spin(g.num_vertices(), -1);
  for (VertexId v : cluster_sites)
    if (fixed_index[v] >= 0) spin[v] = fixed_index[v];
  double total = 0;
  std::vector<int> choice(free_sites.size(), 0);
  while (true) {
    for (size_t i = 0; i < free_sites.size(); ++i)
      spin[free_sites[i]] = choice[i];
    double w = 1;
    for (auto [x, y] : bonds) {
      w *= t.r[t.group.mult[t.group.inverse(spin[x])][spin[y]]];
      if (w == 0) break;
    }
    total += w;
    size_t i = 0;
    for (; i < choice.size(); ++i) {
      if (++choice[i] < n) break;
      choice[i] = 0;
    }
    if (i == choice.size()) break;
  }
  return total;
}

}  // namespace

double grey_log_weight(const Graph& g, const Interaction& in,
                       const GroupSpec& group,
                       const std::optional<SpinConfig>& eta,
                       const Region& lambda, const std::vector<BondId>& slots,
                       const std::vector<uint8_t>& open) {
  if (eta && static_cast<int>(eta->size()) != g.num_vertices())
    throw std::invalid_argument("grey_log_weight: eta size mismatch");
  GreyParams params = grey_params(in, group);
  GreyTables tables{params.r, group};
  const SpinAlphabet& alpha = in.alphabet();

  // components over lambda plus boundary endpoints of open bonds
  UnionFind uf(g.num_vertices());
  std::vector<char> involved(g.num_vertices(), 0);
  for (VertexId v : lambda.members()) involved[v] = 1;
  for (size_t i = 0; i < slots.size(); ++i)
    if (open[i]) {
      const Bond& b = g.bond(slots[i]);
      involved[b.u] = involved[b.v] = 1;
      uf.unite(b.u, b.v);
    }
  std::vector<int> root_order;  // deterministic cluster order
  std::vector<std::vector<VertexId>> cluster_sites(g.num_vertices());
  std::vector<std::vector<std::pair<VertexId, VertexId>>> cluster_bonds(
      g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v)
    if (involved[v]) {
      int r = uf.find(v);
      if (cluster_sites[r].empty()) root_order.push_back(r);
      cluster_sites[r].push_back(v);
    }
  for (size_t i = 0; i < slots.size(); ++i)
    if (open[i]) {
      const Bond& b = g.bond(slots[i]);
      cluster_bonds[uf.find(b.u)].emplace_back(b.u, b.v);
    }

  double log_w = 0;
  for (int r : root_order) {
    double w = cluster_weight(g, tables, eta, lambda, cluster_sites[r],
                              cluster_bonds[r], alpha);
    if (w <= 0) return -kInfiniteEnergy;
    log_w += std::log(w);
  }
  return log_w;
}

double grey_log_weight_brute(const Graph& g, const Interaction& in,
                             const GroupSpec& group,
                             const std::optional<SpinConfig>& eta,
                             const Region& lambda,
                             const std::vector<BondId>& slots,
                             const std::vector<uint8_t>& open) {
  GreyParams params = grey_params(in, group);
  const SpinAlphabet& alpha = in.alphabet();
  int n = group.size();
  const std::vector<VertexId>& sites = lambda.members();
  std::vector<int> spin(g.num_vertices(), -1);
  if (eta)
    for (int v = 0; v < g.num_vertices(); ++v)
      spin[v] = alpha.index_of((*eta)[v]);
  double total = 0;
  std::vector<int> choice(sites.size(), 0);
  while (true) {
    for (size_t i = 0; i < sites.size(); ++i) spin[sites[i]] = choice[i];
    double w = 1;
    for (size_t i = 0; i < slots.size(); ++i) {
      if (!open[i]) continue;
      const Bond& b = g.bond(slots[i]);
      w *= params.r[group.mult[group.inverse(spin[b.u])][spin[b.v]]];
      if (w == 0) break;
    }
    total += w;
    size_t i = 0;
    for (; i < choice.size(); ++i) {
      if (++choice[i] < n) break;
      choice[i] = 0;
    }
    if (i == choice.size()) break;
  }
  return total > 0 ? std::log(total) : -kInfiniteEnergy;
}

RcExact exact_grey(const Graph& g, const Interaction& in,
                   const GroupSpec& group,
                   const std::optional<SpinConfig>& eta, const Region& lambda,
                   const ExactOptions& opts) {
  std::vector<BondId> slots = grey_slots(g, eta, lambda);
  OutcomeSpace space(static_cast<int>(slots.size()), 2);
  if (space.size() > opts.cap)
    throw std::runtime_error("exact_grey: state space exceeds cap");
  std::vector<double> logw(space.size());
  for (int64_t o = 0; o < space.size(); ++o) {
    std::vector<uint8_t> open(slots.size());
    for (size_t i = 0; i < slots.size(); ++i)
      open[i] = static_cast<uint8_t>(space.digit(o, static_cast<int>(i)));
    logw[o] = grey_log_weight(g, in, group, eta, lambda, slots, open);
  }
  return {FiniteDistribution(space, std::move(logw), false), std::move(slots)};
}

}  // namespace gibbs
