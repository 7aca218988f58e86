#include "gibbs/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "gibbs/parallel.hpp"

namespace gibbs {

OutcomeSpace::OutcomeSpace(int num_slots, int radix)
    : num_slots_(num_slots), radix_(radix) {
  if (num_slots < 0 || radix < 1)
    throw std::invalid_argument("OutcomeSpace: bad shape");
  size_ = 1;
  place_.assign(num_slots_, 1);
  for (int s = num_slots_ - 1; s >= 0; --s) {
    place_[s] = size_;
    if (size_ > (int64_t(1) << 62) / radix_)
      throw std::invalid_argument("OutcomeSpace: size overflow");
    size_ *= radix_;
  }
}

std::vector<int> OutcomeSpace::digits(int64_t outcome) const {
  std::vector<int> d(num_slots_);
  for (int s = 0; s < num_slots_; ++s) d[s] = digit(outcome, s);
  return d;
}

int64_t OutcomeSpace::pack(const std::vector<int>& digits) const {
  if (static_cast<int>(digits.size()) != num_slots_)
    throw std::invalid_argument("pack: slot count mismatch");
  int64_t o = 0;
  for (int s = 0; s < num_slots_; ++s) {
    if (digits[s] < 0 || digits[s] >= radix_)
      throw std::invalid_argument("pack: digit out of range");
    o = o * radix_ + digits[s];
  }
  return o;
}

FiniteDistribution::FiniteDistribution(OutcomeSpace space,
                                       std::vector<double> log_weights,
                                       bool parallel)
    : space_(space), logw_(std::move(log_weights)) {
  if (static_cast<int64_t>(logw_.size()) != space_.size())
    throw std::invalid_argument("FiniteDistribution: weight vector mismatch");
  log_z_ = block_logsumexp(
      space_.size(), [&](int64_t i) { return logw_[i]; }, parallel);
  if (log_z_ == -kInfiniteEnergy)
    throw std::runtime_error("FiniteDistribution: empty support");
}

double FiniteDistribution::prob(int64_t o) const {
  return std::exp(logw_[o] - log_z_);
}

std::vector<double> FiniteDistribution::probabilities() const {
  std::vector<double> p(logw_.size());
  for (size_t i = 0; i < logw_.size(); ++i)
    p[i] = std::exp(logw_[i] - log_z_);
  return p;
}

FiniteDistribution FiniteDistribution::marginal(
    const std::vector<int>& slots) const {
  for (size_t i = 0; i < slots.size(); ++i) {
    if (slots[i] < 0 || slots[i] >= space_.num_slots())
      throw std::invalid_argument("marginal: slot out of range");
    if (i > 0 && slots[i] <= slots[i - 1])
      throw std::invalid_argument("marginal: slots must strictly increase");
  }
  OutcomeSpace sub(static_cast<int>(slots.size()), space_.radix());
  std::vector<KahanSum> acc(sub.size());
  std::vector<int> d(slots.size());
  for (int64_t o = 0; o < space_.size(); ++o) {
    for (size_t i = 0; i < slots.size(); ++i) d[i] = space_.digit(o, slots[i]);
    acc[sub.pack(d)].add(prob(o));
  }
  std::vector<double> logw(sub.size());
  for (int64_t i = 0; i < sub.size(); ++i) {
    double v = acc[i].value();
    logw[i] = v > 0 ? std::log(v) : -kInfiniteEnergy;
  }
  return FiniteDistribution(sub, std::move(logw), false);
}

FiniteDistribution FiniteDistribution::condition(
    const std::vector<std::pair<int, int>>& fixed) const {
  std::vector<int> fixed_digit(space_.num_slots(), -1);
  for (auto [slot, digit] : fixed) {
    if (slot < 0 || slot >= space_.num_slots() || digit < 0 ||
        digit >= space_.radix())
      throw std::invalid_argument("condition: bad (slot,digit)");
    fixed_digit[slot] = digit;
  }
  std::vector<int> kept;
  for (int s = 0; s < space_.num_slots(); ++s)
    if (fixed_digit[s] < 0) kept.push_back(s);
  OutcomeSpace sub(static_cast<int>(kept.size()), space_.radix());
  std::vector<double> logw(sub.size(), -kInfiniteEnergy);
  std::vector<int> full(space_.num_slots());
  for (int64_t o = 0; o < sub.size(); ++o) {
    for (int s = 0; s < space_.num_slots(); ++s) full[s] = fixed_digit[s];
    for (size_t i = 0; i < kept.size(); ++i)
      full[kept[i]] = sub.digit(o, static_cast<int>(i));
    logw[o] = logw_[space_.pack(full)];
  }
  return FiniteDistribution(sub, std::move(logw), false);
}

int64_t FiniteDistribution::sample(Rng& rng) const {
  double u = rng.next_double();
  KahanSum cum;
  for (int64_t o = 0; o < space_.size(); ++o) {
    cum.add(prob(o));
    if (u < cum.value()) return o;
  }
  return space_.size() - 1;
}

void FiniteDistribution::write_csv(std::ostream& os) const {
  os << "outcome,probability\n";
  char buf[64];
  for (int64_t o = 0; o < space_.size(); ++o) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g\n",
                  static_cast<long long>(o), prob(o));
    os << buf;
  }
}

double tv_distance(const FiniteDistribution& a, const FiniteDistribution& b,
                   const std::optional<std::vector<int>>& slots) {
  if (!(a.space() == b.space()))
    throw std::invalid_argument("tv_distance: mismatched outcome spaces");
  if (slots) {
    return tv_distance(a.marginal(*slots), b.marginal(*slots), std::nullopt);
  }
  KahanSum acc;
  for (int64_t o = 0; o < a.space().size(); ++o)
    acc.add(std::abs(a.prob(o) - b.prob(o)));
  return 0.5 * acc.value();
}

double tv_to_counts(const FiniteDistribution& exact,
                    const std::vector<int64_t>& counts) {
  if (static_cast<int64_t>(counts.size()) != exact.space().size())
    throw std::invalid_argument("tv_to_counts: size mismatch");
  int64_t total = 0;
  for (int64_t c : counts) total += c;
  if (total <= 0) throw std::invalid_argument("tv_to_counts: no samples");
  KahanSum acc;
  for (int64_t o = 0; o < exact.space().size(); ++o)
    acc.add(std::abs(double(counts[o]) / total - exact.prob(o)));
  return 0.5 * acc.value();
}

PartialOrder coordinatewise_order(const OutcomeSpace& space) {
  return PartialOrder{[space](int64_t a, int64_t b) {
    for (int s = 0; s < space.num_slots(); ++s)
      if (space.digit(a, s) > space.digit(b, s)) return false;
    return true;
  }};
}

namespace {

// Dinic max-flow, double capacities. Deterministic: adjacency explored in
// insertion order.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(n, -1), level_(n), it_(n) {}

  void add_edge(int from, int to, double cap) {
    edges_.push_back({to, head_[from], cap});
    head_[from] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({from, head_[to], 0.0});
    head_[to] = static_cast<int>(edges_.size()) - 1;
  }

  double run(int s, int t) {
    double flow = 0;
    while (bfs(s, t)) {
      it_ = head_;
      double f;
      while ((f = dfs(s, t, kInfiniteEnergy)) > 0) flow += f;
    }
    return flow;
  }

  double edge_flow(int idx) const { return edges_[2 * idx + 1].cap; }

 private:
  struct Edge {
    int to;
    int next;
    double cap;
  };
  static constexpr double kEps = 1e-14;

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    level_[s] = 0;
    std::vector<int> queue = {s};
    for (size_t qi = 0; qi < queue.size(); ++qi) {
      int x = queue[qi];
      for (int e = head_[x]; e >= 0; e = edges_[e].next)
        if (edges_[e].cap > kEps && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[x] + 1;
          queue.push_back(edges_[e].to);
        }
    }
    return level_[t] >= 0;
  }

  double dfs(int x, int t, double limit) {
    if (x == t) return limit;
    for (int& e = it_[x]; e >= 0; e = edges_[e].next) {
      int y = edges_[e].to;
      if (edges_[e].cap > kEps && level_[y] == level_[x] + 1) {
        double f = dfs(y, t, std::min(limit, edges_[e].cap));
        if (f > 0) {
          edges_[e].cap -= f;
          edges_[e ^ 1].cap += f;
          return f;
        }
      }
    }
    return 0;
  }

  std::vector<Edge> edges_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> it_;
};

}  // namespace

DominationResult dominates(const FiniteDistribution& mu,
                           const FiniteDistribution& nu,
                           const PartialOrder& order) {
  if (!(mu.space() == nu.space()))
    throw std::invalid_argument("dominates: mismatched outcome spaces");
  constexpr double kSupportEps = 0.0;
  std::vector<int64_t> sup_mu, sup_nu;
  for (int64_t o = 0; o < mu.space().size(); ++o) {
    if (mu.prob(o) > kSupportEps) sup_mu.push_back(o);
    if (nu.prob(o) > kSupportEps) sup_nu.push_back(o);
  }
  if (static_cast<int64_t>(sup_mu.size()) * sup_nu.size() > (1LL << 26))
    throw std::invalid_argument("dominates: support too large for flow");

  int n_mu = static_cast<int>(sup_mu.size());
  int n_nu = static_cast<int>(sup_nu.size());
  int source = 0, sink = 1 + n_mu + n_nu;
  MaxFlow flow(sink + 1);
  for (int i = 0; i < n_mu; ++i) flow.add_edge(source, 1 + i, mu.prob(sup_mu[i]));
  std::vector<std::pair<int, int>> pair_edges;  // (i, j) in edge order
  for (int i = 0; i < n_mu; ++i)
    for (int j = 0; j < n_nu; ++j)
      if (order.leq(sup_mu[i], sup_nu[j])) {
        flow.add_edge(1 + i, 1 + n_mu + j, 2.0);
        pair_edges.emplace_back(i, j);
      }
  for (int j = 0; j < n_nu; ++j)
    flow.add_edge(1 + n_mu + j, sink, nu.prob(sup_nu[j]));

  double value = flow.run(source, sink);
  DominationResult out;
  out.dominated = value >= 1.0 - 1e-9;
  if (out.dominated) {
    // Edge list order: n_mu source edges first, then the pair edges.
    for (size_t k = 0; k < pair_edges.size(); ++k) {
      double f = flow.edge_flow(n_mu + static_cast<int>(k));
      if (f > 1e-15)
        out.witness.emplace_back(sup_mu[pair_edges[k].first],
                                 sup_nu[pair_edges[k].second], f);
    }
  }
  return out;
}

// --- exact Gibbs ------------------------------------------------------------

GibbsExact exact_gibbs(const Graph& g, const Interaction& in,
                       const Region& lambda, const SpinConfig& eta,
                       const ExactOptions& opts) {
  const SpinAlphabet& alpha = in.alphabet();
  int ns = lambda.size();
  OutcomeSpace space(ns, alpha.size());
  if (space.size() > opts.cap)
    throw std::runtime_error("exact_gibbs: state space exceeds cap");
  const std::vector<VertexId>& sites = lambda.members();

  std::vector<double> logw(space.size());
  parallel_fill(
      logw,
      [&](int64_t o) {
        SpinConfig sigma = eta;
        for (int s = 0; s < ns; ++s)
          sigma[sites[s]] = alpha.value(space.digit(o, s));
        return gibbs_log_weight(g, in, sigma, eta, lambda);
      },
      opts.parallel);

  FiniteDistribution dist(space, std::move(logw), opts.parallel);
  double log_z = dist.log_normalizer();
  return {std::move(dist), sites, log_z};
}

std::vector<double> exact_site_marginal(const Graph& g, const Interaction& in,
                                        const Region& lambda,
                                        const SpinConfig& eta, VertexId x,
                                        const ExactOptions& opts) {
  if (!lambda.contains(x))
    throw std::invalid_argument("exact_site_marginal: x not in lambda");
  const SpinAlphabet& alpha = in.alphabet();
  const std::vector<VertexId>& sites = lambda.members();
  int ns = lambda.size();
  {
    double states = std::pow(double(alpha.size()), double(ns));
    if (states > double(opts.cap))
      throw std::runtime_error("exact_site_marginal: state space exceeds cap");
  }
  // DFS over sites in index order; energy terms are added as soon as both
  // endpoints of a bond are assigned, so hard-constraint subtrees are cut.
  std::vector<int> site_slot(g.num_vertices(), -1);
  for (int s = 0; s < ns; ++s) site_slot[sites[s]] = s;
  // bonds charged at the later-assigned endpoint
  std::vector<std::vector<std::pair<VertexId, BondId>>> charged(ns);
  for (int b = 0; b < g.num_bonds(); ++b) {
    auto [u, v] = g.bond(b);
    int su = site_slot[u], sv = site_slot[v];
    if (su < 0 && sv < 0) continue;
    int later = std::max(su, sv);
    charged[later].emplace_back(later == su ? v : u, b);
  }
  int x_slot = site_slot[x];
  std::vector<LogSum> per_value(alpha.size());
  SpinConfig sigma = eta;
  // iterative DFS with explicit value stack
  std::vector<int> choice(ns, -1);
  std::vector<double> partial(ns + 1, 0.0);
  int depth = 0;
  while (depth >= 0) {
    if (++choice[depth] >= alpha.size()) {
      choice[depth] = -1;
      --depth;
      continue;
    }
    VertexId site = sites[depth];
    sigma[site] = alpha.value(choice[depth]);
    double e = in.self_energy(sigma[site]);
    for (auto [other, bond] : charged[depth]) {
      (void)bond;
      e += in.pair_energy(sigma[site], sigma[other]);
      if (e == kInfiniteEnergy) break;
    }
    if (e == kInfiniteEnergy) continue;  // prune
    partial[depth + 1] = partial[depth] + e;
    if (depth + 1 == ns) {
      per_value[choice[x_slot]].add(-in.beta() * partial[depth + 1]);
    } else {
      ++depth;
    }
  }
  LogSum total;
  for (const LogSum& l : per_value) total.merge(l);
  double log_z = total.value();
  if (log_z == -kInfiniteEnergy)
    throw std::runtime_error("exact_site_marginal: empty support");
  std::vector<double> out(alpha.size());
  for (int a = 0; a < alpha.size(); ++a)
    out[a] = std::exp(per_value[a].value() - log_z);
  return out;
}

// --- exact random-cluster ---------------------------------------------------

WiredCounts wired_cluster_counts(const Graph& g,
                                 const std::vector<BondId>& slots,
                                 const std::vector<uint8_t>& open,
                                 const Region& lambda) {
  // Fuse everything outside lambda into the lowest outside vertex.
  UnionFind uf(g.num_vertices());
  int super = -1;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!lambda.contains(v)) {
      if (super < 0)
        super = v;
      else
        uf.unite(super, v);
    }
  for (size_t i = 0; i < slots.size(); ++i)
    if (open[i]) uf.unite(g.bond(slots[i]).u, g.bond(slots[i]).v);
  WiredCounts counts;
  std::vector<char> seen(g.num_vertices(), 0);
  int super_root = super >= 0 ? uf.find(super) : -1;
  for (VertexId v : lambda.members()) {
    int r = uf.find(v);
    if (r == super_root) continue;
    if (!seen[r]) {
      seen[r] = 1;
      ++counts.interior;
    }
  }
  // The fused boundary is itself a cluster of the all-open exterior and is
  // always counted once; dropping it would change the conditional law of
  // boundary bonds, not just the normalization.
  counts.meeting = counts.interior + (super >= 0 ? 1 : 0);
  return counts;
}

RcExact exact_rc(const Graph& g, const std::vector<double>& p_bond, double q,
                 const RcCounting& counting, const ExactOptions& opts) {
  if (q <= 0) throw std::invalid_argument("exact_rc: q > 0 required");
  if (static_cast<int>(p_bond.size()) != g.num_bonds())
    throw std::invalid_argument("exact_rc: p vector size mismatch");
  for (double p : p_bond)
    if (p < 0 || p > 1) throw std::invalid_argument("exact_rc: p in [0,1]");

  std::vector<BondId> slots;
  if (counting.kind == RcCounting::Kind::free_counting) {
    slots.resize(g.num_bonds());
    for (int b = 0; b < g.num_bonds(); ++b) slots[b] = b;
  } else {
    slots = bond_sets(g, counting.lambda).touching;
  }
  int nb = static_cast<int>(slots.size());
  OutcomeSpace space(nb, 2);
  if (space.size() > opts.cap)
    throw std::runtime_error("exact_rc: state space exceeds cap");

  std::vector<double> log_p(nb), log_1p(nb);
  for (int i = 0; i < nb; ++i) {
    log_p[i] = std::log(p_bond[slots[i]]);      // -inf at p=0 is fine
    log_1p[i] = std::log1p(-p_bond[slots[i]]);  // -inf at p=1 is fine
  }
  double log_q = std::log(q);

  std::vector<double> logw(space.size());
  parallel_fill(
      logw,
      [&](int64_t o) {
        thread_local std::vector<uint8_t> open;
        open.assign(nb, 0);
        double w = 0;
        for (int i = 0; i < nb; ++i) {
          open[i] = static_cast<uint8_t>(space.digit(o, i));
          w += open[i] ? log_p[i] : log_1p[i];
        }
        if (w == -kInfiniteEnergy) return w;
        int count;
        if (counting.kind == RcCounting::Kind::free_counting) {
          UnionFind uf(g.num_vertices());
          for (int i = 0; i < nb; ++i)
            if (open[i]) uf.unite(g.bond(slots[i]).u, g.bond(slots[i]).v);
          count = uf.count();
        } else {
          WiredCounts c = wired_cluster_counts(g, slots, open, counting.lambda);
          count = counting.kind == RcCounting::Kind::wired ? c.meeting
                                                           : c.interior;
        }
        return w + count * log_q;
      },
      opts.parallel);

  FiniteDistribution dist(space, std::move(logw), opts.parallel);
  return {std::move(dist), std::move(slots)};
}

RcExact exact_rc(const Graph& g, double p, double q, const RcCounting& counting,
                 const ExactOptions& opts) {
  return exact_rc(g, std::vector<double>(g.num_bonds(), p), q, counting, opts);
}

FiniteDistribution exact_site_rc(const Graph& g, double p, double q,
                                 const ExactOptions& opts) {
  if (q <= 0) throw std::invalid_argument("exact_site_rc: q > 0 required");
  if (p < 0 || p > 1) throw std::invalid_argument("exact_site_rc: p in [0,1]");
  int nv = g.num_vertices();
  OutcomeSpace space(nv, 2);
  if (space.size() > opts.cap)
    throw std::runtime_error("exact_site_rc: state space exceeds cap");
  double log_p = std::log(p), log_1p = std::log1p(-p), log_q = std::log(q);

  std::vector<double> logw(space.size());
  parallel_fill(
      logw,
      [&](int64_t o) {
        thread_local std::vector<uint8_t> open;
        open.assign(nv, 0);
        double w = 0;
        for (int v = 0; v < nv; ++v) {
          open[v] = static_cast<uint8_t>(space.digit(o, v));
          w += open[v] ? log_p : log_1p;
        }
        if (w == -kInfiniteEnergy) return w;
        UnionFind uf(nv);
        for (const Bond& b : g.bonds())
          if (open[b.u] && open[b.v]) uf.unite(b.u, b.v);
        int k = 0;
        std::vector<char> seen(nv, 0);
        for (int v = 0; v < nv; ++v)
          if (open[v]) {
            int r = uf.find(v);
            if (!seen[r]) {
              seen[r] = 1;
              ++k;
            }
          }
        return w + k * log_q;
      },
      opts.parallel);

  return FiniteDistribution(space, std::move(logw), opts.parallel);
}

}  // namespace gibbs
