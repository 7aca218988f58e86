#include "gibbs/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gibbs/parallel.hpp"

namespace gibbs {

double Coupling::prob_not_equal() const {
  KahanSum off;
  for (auto& [a, b, m] : mass)
    if (a != b) off.add(m);
  return off.value();
}

std::vector<double> Coupling::first_marginal() const {
  std::vector<KahanSum> acc(space.size());
  for (auto& [a, b, m] : mass) {
    (void)b;
    acc[a].add(m);
  }
  std::vector<double> out(space.size());
  for (int64_t i = 0; i < space.size(); ++i) out[i] = acc[i].value();
  return out;
}

std::vector<double> Coupling::second_marginal() const {
  std::vector<KahanSum> acc(space.size());
  for (auto& [a, b, m] : mass) {
    (void)a;
    acc[b].add(m);
  }
  std::vector<double> out(space.size());
  for (int64_t i = 0; i < space.size(); ++i) out[i] = acc[i].value();
  return out;
}

void Coupling::write_csv(std::ostream& os) const {
  os << "first,second,mass\n";
  char buf[96];
  for (auto& [a, b, m] : mass) {
    std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g\n",
                  static_cast<long long>(a), static_cast<long long>(b), m);
    os << buf;
  }
}

// --- Edwards-Sokal maps -----------------------------------------------------

std::vector<uint8_t> potts_to_rc(const Graph& g,
                                 const std::vector<double>& p_slot,
                                 const std::vector<BondId>& slots,
                                 const SpinConfig& sigma, Rng& rng) {
  if (p_slot.size() != slots.size())
    throw std::invalid_argument("potts_to_rc: p/slot size mismatch");
  std::vector<uint8_t> open(slots.size(), 0);
  for (size_t i = 0; i < slots.size(); ++i) {
    const Bond& b = g.bond(slots[i]);
    if (sigma[b.u] == sigma[b.v] && rng.next_bernoulli(p_slot[i]))
      open[i] = 1;
  }
  return open;
}

BondConfig potts_to_rc(const Graph& g, double beta, const SpinConfig& sigma,
                       Rng& rng) {
  std::vector<BondId> slots(g.num_bonds());
  for (int b = 0; b < g.num_bonds(); ++b) slots[b] = b;
  double p = -std::expm1(-2.0 * beta);
  return potts_to_rc(g, std::vector<double>(slots.size(), p), slots, sigma,
                     rng);
}

SpinConfig rc_to_potts(const Graph& g, int q, const std::vector<uint8_t>& open,
                       const std::vector<BondId>& slots, Rng& rng,
                       const std::optional<ForcedSpin>& forced) {
  if (q < 2) throw std::invalid_argument("rc_to_potts: q >= 2");
  UnionFind uf(g.num_vertices());
  for (size_t i = 0; i < slots.size(); ++i)
    if (open[i]) uf.unite(g.bond(slots[i]).u, g.bond(slots[i]).v);
  std::vector<int> cluster_spin(g.num_vertices(), 0);
  std::vector<char> is_forced(g.num_vertices(), 0);
  if (forced)
    for (VertexId v : forced->region.members()) {
      int r = uf.find(v);
      is_forced[r] = 1;
      cluster_spin[r] = forced->spin;
    }
  // Draw spins in root index order so output is stream-deterministic.
  for (int v = 0; v < g.num_vertices(); ++v)
    if (uf.find(v) == v && !is_forced[v])
      cluster_spin[v] = 1 + static_cast<int>(rng.next_index(q));
  SpinConfig sigma(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v)
    sigma[v] = cluster_spin[uf.find(v)];
  return sigma;
}

SpinConfig site_rc_to_wr(const Graph& g, const SiteConfig& open, Rng& rng) {
  UnionFind uf(g.num_vertices());
  for (const Bond& b : g.bonds())
    if (open[b.u] && open[b.v]) uf.unite(b.u, b.v);
  std::vector<int> cluster_spin(g.num_vertices(), 0);
  for (int v = 0; v < g.num_vertices(); ++v)
    if (open[v] && uf.find(v) == v)
      cluster_spin[v] = rng.next_bernoulli(0.5) ? +1 : -1;
  SpinConfig sigma(g.num_vertices(), 0);
  for (int v = 0; v < g.num_vertices(); ++v)
    if (open[v]) sigma[v] = cluster_spin[uf.find(v)];
  return sigma;
}

SiteConfig wr_to_site_rc(const SpinConfig& sigma) {
  SiteConfig open(sigma.size());
  for (size_t i = 0; i < sigma.size(); ++i) open[i] = sigma[i] != 0;
  return open;
}

EsMarginals es_joint_marginals(const Graph& g, double p, int q) {
  if (q < 2 || p < 0 || p > 1)
    throw std::invalid_argument("es_joint_marginals: bad parameters");
  int nv = g.num_vertices(), nb = g.num_bonds();
  OutcomeSpace vspace(nv, q), espace(nb, 2);
  if (vspace.size() * espace.size() > (int64_t(1) << 26))
    throw std::invalid_argument("es_joint_marginals: joint too large");
  std::vector<KahanSum> vacc(vspace.size()), eacc(espace.size());
  KahanSum z;
  std::vector<int> spin(nv);
  for (int64_t so = 0; so < vspace.size(); ++so) {
    for (int v = 0; v < nv; ++v) spin[v] = vspace.digit(so, v);
    for (int64_t eo = 0; eo < espace.size(); ++eo) {
      double w = 1;
      for (int b = 0; b < nb; ++b) {
        bool open = espace.digit(eo, b);
        if (open) {
          if (spin[g.bond(b).u] != spin[g.bond(b).v]) {
            w = 0;
            break;
          }
          w *= p;
        } else {
          w *= 1 - p;
        }
      }
      if (w == 0) continue;
      vacc[so].add(w);
      eacc[eo].add(w);
      z.add(w);
    }
  }
  EsMarginals out;
  out.vertex.resize(vspace.size());
  out.edge.resize(espace.size());
  double total = z.value();
  for (int64_t i = 0; i < vspace.size(); ++i)
    out.vertex[i] = vacc[i].value() / total;
  for (int64_t i = 0; i < espace.size(); ++i)
    out.edge[i] = eacc[i].value() / total;
  return out;
}

// --- optimal coupling -------------------------------------------------------

Coupling optimal_coupling(const FiniteDistribution& mu,
                          const FiniteDistribution& nu) {
  if (!(mu.space() == nu.space()))
    throw std::invalid_argument("optimal_coupling: mismatched spaces");
  int64_t n = mu.space().size();
  Coupling out{mu.space(), {}};
  std::vector<double> res_mu(n), res_nu(n);
  KahanSum total_residual;
  for (int64_t o = 0; o < n; ++o) {
    double a = mu.prob(o), b = nu.prob(o);
    double common = std::min(a, b);
    if (common > 0) out.mass.emplace_back(o, o, common);
    res_mu[o] = a - common;
    res_nu[o] = b - common;
    total_residual.add(res_mu[o]);
  }
  double r = total_residual.value();
  if (r > 1e-15) {
    for (int64_t a = 0; a < n; ++a) {
      if (res_mu[a] <= 0) continue;
      for (int64_t b = 0; b < n; ++b) {
        if (res_nu[b] <= 0) continue;
        out.mass.emplace_back(a, b, res_mu[a] * res_nu[b] / r);
      }
    }
  }
  return out;
}

SiteConditional gibbs_site_conditional(const Graph& g, const Interaction& in) {
  return [&g, &in](VertexId x, const SpinConfig& sigma) {
    const SpinAlphabet& alpha = in.alphabet();
    std::vector<double> logw(alpha.size());
    for (int a = 0; a < alpha.size(); ++a) {
      double e = in.self_energy_by_index(a);
      for (VertexId y : g.neighbors(x)) {
        e += in.pair_energy(alpha.value(a), sigma[y]);
        if (e == kInfiniteEnergy) break;
      }
      logw[a] = e == kInfiniteEnergy ? -kInfiniteEnergy : -in.beta() * e;
    }
    LogSum z;
    for (double w : logw) z.add(w);
    if (z.value() == -kInfiniteEnergy) {
      std::ostringstream os;
      os << "site conditional: no feasible spin at vertex " << x;
      throw std::runtime_error(os.str());
    }
    std::vector<double> probs(alpha.size());
    for (int a = 0; a < alpha.size(); ++a)
      probs[a] = std::exp(logw[a] - z.value());
    return probs;
  };
}

namespace {

// max{a : P(X >= a) >= u}, computed from the tail CDF. The shared-uniform
// update of the coupled Gibbs sampler.
int tail_quantile(const std::vector<double>& probs, double u) {
  double tail = 0;
  for (int a = static_cast<int>(probs.size()) - 1; a > 0; --a) {
    tail += probs[a];
    if (tail >= u) return a;
  }
  return 0;
}

}  // namespace

HolleyChainResult holley_coupled_chain(const Graph& g,
                                       const SpinAlphabet& alphabet,
                                       const SiteConditional& mu,
                                       const SiteConditional& nu,
                                       SpinConfig x, SpinConfig x_prime,
                                       int64_t steps, Rng& rng) {
  HolleyChainResult res;
  auto ordered = [&] {
    for (int v = 0; v < g.num_vertices(); ++v)
      if (x[v] > x_prime[v]) return false;
    return true;
  };
  bool attained = ordered();
  for (int64_t k = 0; k < steps; ++k) {
    VertexId site = static_cast<VertexId>(rng.next_index(g.num_vertices()));
    double u = rng.next_double();
    std::vector<double> pm = mu(site, x);
    std::vector<double> pn = nu(site, x_prime);
    x[site] = alphabet.value(tail_quantile(pm, u));
    x_prime[site] = alphabet.value(tail_quantile(pn, u));
    bool now = ordered();
    if (attained && !now && res.violation_step < 0) {
      res.order_held = false;
      res.violation_step = k;
    }
    attained = attained || now;
  }
  res.x = std::move(x);
  res.x_prime = std::move(x_prime);
  return res;
}

namespace {

std::string describe_outcome(const OutcomeSpace& space, int64_t o) {
  std::ostringstream os;
  os << '(';
  for (int s = 0; s < space.num_slots(); ++s) {
    if (s) os << ',';
    os << space.digit(o, s);
  }
  os << ')';
  return os.str();
}

}  // namespace

HolleyCheckResult holley_check(const FiniteDistribution& mu,
                               const FiniteDistribution& nu) {
  if (!(mu.space() == nu.space()))
    throw std::invalid_argument("holley_check: mismatched spaces");
  const OutcomeSpace& space = mu.space();
  int n = space.num_slots(), r = space.radix();
  OutcomeSpace rest(n - 1, r);
  HolleyCheckResult res;
  for (int x = 0; x < n; ++x) {
    // exterior slots in original order, skipping x
    std::vector<int> ext;
    for (int s = 0; s < n; ++s)
      if (s != x) ext.push_back(s);
    // conditional tails and exterior marginals for both measures
    auto tails = [&](const FiniteDistribution& d, int64_t e,
                     std::vector<double>& tail, double& margin) {
      std::vector<int> full(n);
      for (int i = 0; i < n - 1; ++i) full[ext[i]] = rest.digit(e, i);
      std::vector<double> probs(r, 0);
      KahanSum m;
      for (int a = 0; a < r; ++a) {
        full[x] = a;
        probs[a] = d.prob(space.pack(full));
        m.add(probs[a]);
      }
      margin = m.value();
      tail.assign(r, 0);
      double acc = 0;
      for (int a = r - 1; a >= 0; --a) {
        acc += probs[a];
        tail[a] = margin > 0 ? acc / margin : 0;
      }
    };
    PartialOrder rest_order = coordinatewise_order(rest);
    for (int64_t e1 = 0; e1 < rest.size(); ++e1) {
      std::vector<double> tail1;
      double m1;
      tails(mu, e1, tail1, m1);
      if (m1 <= 0) continue;
      for (int64_t e2 = 0; e2 < rest.size(); ++e2) {
        if (!rest_order.leq(e1, e2)) continue;
        std::vector<double> tail2;
        double m2;
        tails(nu, e2, tail2, m2);
        if (m2 <= 0) continue;
        for (int a = 1; a < r; ++a) {
          if (tail1[a] > tail2[a] + 1e-12) {
            res.holds = false;
            std::ostringstream os;
            os << "site slot " << x << ", level " << a << ", exteriors "
               << describe_outcome(rest, e1) << " <= "
               << describe_outcome(rest, e2) << ": " << tail1[a] << " > "
               << tail2[a];
            res.counterexample = os.str();
            return res;
          }
        }
      }
    }
  }
  return res;
}

std::vector<uint32_t> upset_masks(int n) {
  if (n < 0 || n > 5) throw std::invalid_argument("upset_masks: n in [0,5]");
  std::vector<uint32_t> cur = {0u, 1u};  // n = 0: empty set and full set
  for (int k = 1; k <= n; ++k) {
    // Outcome ids: high bit = digit of slot 0. An up-set F = F0 on the
    // low half, F1 on the high half, with F0 a subset of F1.
    std::vector<uint32_t> next;
    uint32_t half = 1u << (k - 1);
    uint32_t low_mask = (k - 1 >= 5) ? 0xffffffffu : ((1u << half) - 1u);
    for (uint32_t f1 : cur)
      for (uint32_t f0 : cur)
        if ((f0 & ~f1) == 0)
          next.push_back((f1 << half) | (f0 & low_mask));
    cur = std::move(next);
  }
  return cur;
}

FkgCheckResult fkg_check(const FiniteDistribution& mu, int random_pairs,
                         uint64_t seed) {
  const OutcomeSpace& space = mu.space();
  FkgCheckResult res;
  if (space.radix() == 2 && space.num_slots() <= 5) {
    int n = space.num_slots();
    std::vector<uint32_t> upsets = upset_masks(n);
    int64_t size = space.size();
    // Outcome id o has digit(slot s) = bit (n-1-s); the subset order on ids
    // equals the coordinatewise order, so masks index outcomes directly.
    std::vector<double> p(size);
    for (int64_t o = 0; o < size; ++o) p[o] = mu.prob(o);
    std::vector<double> pf(upsets.size());
    for (size_t i = 0; i < upsets.size(); ++i) {
      KahanSum s;
      for (int64_t o = 0; o < size; ++o)
        if (upsets[i] >> o & 1) s.add(p[o]);
      pf[i] = s.value();
    }
    for (size_t i = 0; i < upsets.size(); ++i)
      for (size_t j = i; j < upsets.size(); ++j) {
        uint32_t both = upsets[i] & upsets[j];
        double pij = 0;
        for (int64_t o = 0; o < size; ++o)
          if (both >> o & 1) pij += p[o];
        if (pij < pf[i] * pf[j] - 1e-12) {
          res.holds = false;
          std::ostringstream os;
          os << "up-sets mask " << upsets[i] << " and " << upsets[j] << ": "
             << pij << " < " << pf[i] * pf[j];
          res.counterexample = os.str();
          return res;
        }
      }
    return res;
  }
  // Randomized fallback: unions of principal up-sets and weighted
  // threshold indicators, all increasing by construction.
  res.exhaustive = false;
  Rng rng(seed);
  PartialOrder order = coordinatewise_order(space);
  std::vector<double> p(space.size());
  for (int64_t o = 0; o < space.size(); ++o) p[o] = mu.prob(o);
  auto random_increasing = [&]() {
    std::vector<char> f(space.size(), 0);
    if (rng.next_bernoulli(0.5)) {
      int gens = 1 + static_cast<int>(rng.next_index(3));
      for (int k = 0; k < gens; ++k) {
        int64_t base = static_cast<int64_t>(rng.next_index(space.size()));
        for (int64_t o = 0; o < space.size(); ++o)
          if (order.leq(base, o)) f[o] = 1;
      }
    } else {
      std::vector<double> w(space.num_slots());
      double total = 0;
      for (double& wi : w) {
        wi = rng.next_double();
        total += wi * (space.radix() - 1);
      }
      double t = rng.next_double() * total;
      for (int64_t o = 0; o < space.size(); ++o) {
        double s = 0;
        for (int slot = 0; slot < space.num_slots(); ++slot)
          s += w[slot] * space.digit(o, slot);
        f[o] = s >= t;
      }
    }
    return f;
  };
  for (int k = 0; k < random_pairs; ++k) {
    auto f = random_increasing();
    auto g = random_increasing();
    double pf = 0, pg = 0, pfg = 0;
    for (int64_t o = 0; o < space.size(); ++o) {
      if (f[o]) pf += p[o];
      if (g[o]) pg += p[o];
      if (f[o] && g[o]) pfg += p[o];
    }
    if (pfg < pf * pg - 1e-12) {
      res.holds = false;
      std::ostringstream os;
      os << "randomized increasing pair " << k << ": " << pfg << " < "
         << pf * pg;
      res.counterexample = os.str();
      return res;
    }
  }
  return res;
}

// --- oscillation / Dobrushin -------------------------------------------------

namespace {

// Conditional at x for a boundary pattern on its neighbors; empty optional
// when no spin is feasible (such patterns cannot occur around a feasible
// configuration and are skipped by the maxima below).
std::optional<std::vector<double>> pattern_conditional(
    const Graph& g, const Interaction& in, VertexId x,
    const std::vector<int>& pattern_idx) {
  const SpinAlphabet& alpha = in.alphabet();
  const auto& nbrs = g.neighbors(x);
  std::vector<double> logw(alpha.size());
  for (int a = 0; a < alpha.size(); ++a) {
    double e = in.self_energy_by_index(a);
    for (size_t i = 0; i < nbrs.size(); ++i) {
      e += in.pair_energy_by_index(a, pattern_idx[i]);
      if (e == kInfiniteEnergy) break;
    }
    logw[a] = e == kInfiniteEnergy ? -kInfiniteEnergy : -in.beta() * e;
  }
  LogSum z;
  for (double w : logw) z.add(w);
  if (z.value() == -kInfiniteEnergy) return std::nullopt;
  std::vector<double> probs(alpha.size());
  for (int a = 0; a < alpha.size(); ++a)
    probs[a] = std::exp(logw[a] - z.value());
  return probs;
}

double half_l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

}  // namespace

double oscillation_px(const Graph& g, const Interaction& in, VertexId x) {
  int deg = g.degree(x);
  int r = in.alphabet().size();
  OutcomeSpace patterns(deg, r);
  std::vector<std::optional<std::vector<double>>> cond(patterns.size());
  for (int64_t o = 0; o < patterns.size(); ++o)
    cond[o] = pattern_conditional(g, in, x, patterns.digits(o));
  double best = 0;
  for (int64_t a = 0; a < patterns.size(); ++a) {
    if (!cond[a]) continue;
    for (int64_t b = a + 1; b < patterns.size(); ++b) {
      if (!cond[b]) continue;
      best = std::max(best, half_l1(*cond[a], *cond[b]));
    }
  }
  return best;
}

double dobrushin_coefficient(const Graph& g, const Interaction& in,
                             VertexId x) {
  int deg = g.degree(x);
  int r = in.alphabet().size();
  OutcomeSpace patterns(deg, r);
  std::vector<std::optional<std::vector<double>>> cond(patterns.size());
  for (int64_t o = 0; o < patterns.size(); ++o)
    cond[o] = pattern_conditional(g, in, x, patterns.digits(o));
  double total = 0;
  for (int slot = 0; slot < deg; ++slot) {
    double best = 0;
    for (int64_t o = 0; o < patterns.size(); ++o) {
      if (!cond[o] || patterns.digit(o, slot) != 0) continue;
      std::vector<int> d = patterns.digits(o);
      for (int v1 = 0; v1 < r; ++v1)
        for (int v2 = v1 + 1; v2 < r; ++v2) {
          d[slot] = v1;
          int64_t o1 = patterns.pack(d);
          d[slot] = v2;
          int64_t o2 = patterns.pack(d);
          if (!cond[o1] || !cond[o2]) continue;
          best = std::max(best, half_l1(*cond[o1], *cond[o2]));
        }
    }
    total += best;
  }
  return total;
}

// --- disagreement couplings ---------------------------------------------------

namespace {

struct DisagreementScan {
  const Graph& g;
  const Interaction& in;
  const Region& lambda;

  // smallest undecided vertex with a decided disagreeing neighbor
  VertexId pick(const std::vector<char>& undecided, const SpinConfig& x,
                const SpinConfig& x_prime) const {
    for (VertexId v : lambda.members()) {
      if (!undecided[v]) continue;
      for (VertexId y : g.neighbors(v))
        if (!undecided[y] && x[y] != x_prime[y]) return v;
    }
    return -1;
  }

  Region undecided_region(const std::vector<char>& undecided) const {
    std::vector<VertexId> m;
    for (VertexId v : lambda.members())
      if (undecided[v]) m.push_back(v);
    return Region(std::move(m), g.num_vertices());
  }
};

}  // namespace

DisagreementExact disagreement_coupling_exact(const Graph& g,
                                              const Interaction& in,
                                              const Region& lambda,
                                              const SpinConfig& eta,
                                              const SpinConfig& eta_prime,
                                              const ExactOptions& opts) {
  const SpinAlphabet& alpha = in.alphabet();
  const std::vector<VertexId>& sites = lambda.members();
  OutcomeSpace space(lambda.size(), alpha.size());
  if (space.size() * space.size() > opts.cap)
    throw std::runtime_error("disagreement_coupling_exact: pair space too big");
  std::vector<int> slot_of(g.num_vertices(), -1);
  for (size_t i = 0; i < sites.size(); ++i) slot_of[sites[i]] = int(i);

  DisagreementScan scan{g, in, lambda};
  std::map<std::pair<int64_t, int64_t>, double> joint;

  // depth-first expansion of the adaptive construction
  struct Frame {
    SpinConfig x, x_prime;
    std::vector<char> undecided;
    double mass;
  };
  std::vector<Frame> stack;
  {
    Frame root{eta, eta_prime, std::vector<char>(g.num_vertices(), 0), 1.0};
    for (VertexId v : sites) root.undecided[v] = 1;
    stack.push_back(std::move(root));
  }
  auto pack_pair = [&](const SpinConfig& x, const SpinConfig& x_prime) {
    std::vector<int> dx(sites.size()), dy(sites.size());
    for (size_t i = 0; i < sites.size(); ++i) {
      dx[i] = alpha.index_of(x[sites[i]]);
      dy[i] = alpha.index_of(x_prime[sites[i]]);
    }
    return std::make_pair(space.pack(dx), space.pack(dy));
  };

  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    VertexId x = scan.pick(f.undecided, f.x, f.x_prime);
    if (x < 0) {
      // no disagreeing exterior neighbor anywhere: couple the remainder
      // diagonally with the common conditional law
      Region rest = scan.undecided_region(f.undecided);
      if (rest.empty()) {
        joint[pack_pair(f.x, f.x_prime)] += f.mass;
        continue;
      }
      GibbsExact block = exact_gibbs(g, in, rest, f.x, opts);
      for (int64_t o = 0; o < block.dist.space().size(); ++o) {
        double p = block.dist.prob(o);
        if (p <= 0) continue;
        SpinConfig cx = f.x, cy = f.x_prime;
        for (int s = 0; s < block.dist.space().num_slots(); ++s) {
          Spin val = alpha.value(block.dist.space().digit(o, s));
          cx[block.sites[s]] = val;
          cy[block.sites[s]] = val;
        }
        joint[pack_pair(cx, cy)] += f.mass * p;
      }
      continue;
    }
    Region rest = scan.undecided_region(f.undecided);
    std::vector<double> pm = exact_site_marginal(g, in, rest, f.x, x, opts);
    std::vector<double> pn =
        exact_site_marginal(g, in, rest, f.x_prime, x, opts);
    // optimal coupling of the two single-site laws
    std::vector<double> rm = pm, rn = pn;
    double resid = 0;
    for (int a = 0; a < alpha.size(); ++a) {
      double common = std::min(pm[a], pn[a]);
      rm[a] -= common;
      rn[a] -= common;
      resid += rm[a];
      if (common > 0) {
        Frame child = f;
        child.x[x] = alpha.value(a);
        child.x_prime[x] = alpha.value(a);
        child.undecided[x] = 0;
        child.mass = f.mass * common;
        stack.push_back(std::move(child));
      }
    }
    if (resid > 1e-15) {
      for (int a = 0; a < alpha.size(); ++a) {
        if (rm[a] <= 0) continue;
        for (int b = 0; b < alpha.size(); ++b) {
          if (rn[b] <= 0) continue;
          Frame child = f;
          child.x[x] = alpha.value(a);
          child.x_prime[x] = alpha.value(b);
          child.undecided[x] = 0;
          child.mass = f.mass * rm[a] * rn[b] / resid;
          stack.push_back(std::move(child));
        }
      }
    }
  }

  DisagreementExact out{
      Coupling{space, {}},
      FiniteDistribution(OutcomeSpace(0, 2), {0.0}, false),
      sites,
      true};
  OutcomeSpace indicator_space(lambda.size(), 2);
  std::vector<double> dis_prob(indicator_space.size(), 0.0);
  for (auto& [key, mass] : joint) {
    out.coupling.mass.emplace_back(key.first, key.second, mass);
    std::vector<int> bits(sites.size());
    SpinConfig cx = eta, cy = eta_prime;
    for (size_t i = 0; i < sites.size(); ++i) {
      cx[sites[i]] = alpha.value(space.digit(key.first, int(i)));
      cy[sites[i]] = alpha.value(space.digit(key.second, int(i)));
      bits[i] = cx[sites[i]] != cy[sites[i]];
    }
    dis_prob[indicator_space.pack(bits)] += mass;
    if (out.path_property && mass > 1e-15) {
      for (VertexId v : sites)
        if (cx[v] != cy[v] &&
            !disagreement_path_exists(g, lambda, cx, cy,
                                      Region({v}, g.num_vertices()))) {
          out.path_property = false;
        }
    }
  }
  std::vector<double> logw(indicator_space.size());
  for (int64_t i = 0; i < indicator_space.size(); ++i)
    logw[i] = dis_prob[i] > 0 ? std::log(dis_prob[i]) : -kInfiniteEnergy;
  out.disagreement_law =
      FiniteDistribution(indicator_space, std::move(logw), false);
  return out;
}

std::pair<SpinConfig, SpinConfig> disagreement_coupling_sample(
    const Graph& g, const Interaction& in, const Region& lambda,
    const SpinConfig& eta, const SpinConfig& eta_prime, Rng& rng,
    const ExactOptions& opts) {
  const SpinAlphabet& alpha = in.alphabet();
  SpinConfig x = eta, x_prime = eta_prime;
  std::vector<char> undecided(g.num_vertices(), 0);
  for (VertexId v : lambda.members()) undecided[v] = 1;
  DisagreementScan scan{g, in, lambda};
  while (true) {
    VertexId v = scan.pick(undecided, x, x_prime);
    if (v < 0) {
      Region rest = scan.undecided_region(undecided);
      if (rest.empty()) break;
      GibbsExact block = exact_gibbs(g, in, rest, x, opts);
      int64_t o = block.dist.sample(rng);
      for (int s = 0; s < block.dist.space().num_slots(); ++s) {
        Spin val = alpha.value(block.dist.space().digit(o, s));
        x[block.sites[s]] = val;
        x_prime[block.sites[s]] = val;
      }
      break;
    }
    Region rest = scan.undecided_region(undecided);
    std::vector<double> pm = exact_site_marginal(g, in, rest, x, v, opts);
    std::vector<double> pn = exact_site_marginal(g, in, rest, x_prime, v, opts);
    // draw from the optimal coupling of pm and pn
    double diag = 0;
    for (int a = 0; a < alpha.size(); ++a) diag += std::min(pm[a], pn[a]);
    double u = rng.next_double();
    if (u < diag) {
      double acc = 0;
      for (int a = 0; a < alpha.size(); ++a) {
        acc += std::min(pm[a], pn[a]);
        if (u < acc) {
          x[v] = x_prime[v] = alpha.value(a);
          break;
        }
      }
    } else {
      double resid = 1 - diag;
      double u1 = rng.next_double(), u2 = rng.next_double();
      double acc = 0;
      for (int a = 0; a < alpha.size(); ++a) {
        acc += (pm[a] - std::min(pm[a], pn[a])) / resid;
        if (u1 < acc || a == alpha.size() - 1) {
          x[v] = alpha.value(a);
          break;
        }
      }
      acc = 0;
      for (int b = 0; b < alpha.size(); ++b) {
        acc += (pn[b] - std::min(pm[b], pn[b])) / resid;
        if (u2 < acc || b == alpha.size() - 1) {
          x_prime[v] = alpha.value(b);
          break;
        }
      }
    }
    undecided[v] = 0;
  }
  return {std::move(x), std::move(x_prime)};
}

bool disagreement_path_exists(const Graph& g, const Region& lambda,
                              const SpinConfig& x, const SpinConfig& x_prime,
                              const Region& delta) {
  Region bd = boundary(g, lambda);
  std::vector<char> disagree(g.num_vertices(), 0);
  for (int v = 0; v < g.num_vertices(); ++v) disagree[v] = x[v] != x_prime[v];
  // start set: disagreeing vertices of delta
  std::deque<VertexId> queue;
  std::vector<char> seen(g.num_vertices(), 0);
  for (VertexId v : delta.members())
    if (disagree[v]) {
      if (bd.contains(v)) return true;
      seen[v] = 1;
      queue.push_back(v);
    }
  while (!queue.empty()) {
    VertexId v = queue.front();
    queue.pop_front();
    for (VertexId y : g.neighbors(v)) {
      if (seen[y] || !disagree[y]) continue;
      if (bd.contains(y)) return true;
      if (lambda.contains(y)) {
        seen[y] = 1;
        queue.push_back(y);
      }
    }
  }
  return false;
}

double duplicated_disagreement_prob(
    const Graph& g, const Region& lambda,
    const std::function<SpinConfig(Rng&)>& sample_eta,
    const std::function<SpinConfig(Rng&)>& sample_eta_prime,
    const Region& delta, int samples, Rng& rng) {
  if (samples <= 0)
    throw std::invalid_argument("duplicated_disagreement_prob: samples > 0");
  int64_t hits = 0;
  for (int s = 0; s < samples; ++s) {
    SpinConfig x = sample_eta(rng);
    SpinConfig y = sample_eta_prime(rng);
    if (disagreement_path_exists(g, lambda, x, y, delta)) ++hits;
  }
  return double(hits) / samples;
}

double duplicated_disagreement_prob(const Graph& g, const Interaction& in,
                                    const Region& lambda,
                                    const SpinConfig& eta,
                                    const SpinConfig& eta_prime,
                                    const Region& delta, int samples, Rng& rng,
                                    const ExactOptions& opts) {
  GibbsExact a = exact_gibbs(g, in, lambda, eta, opts);
  GibbsExact b = exact_gibbs(g, in, lambda, eta_prime, opts);
  const SpinAlphabet& alpha = in.alphabet();
  auto make_sampler = [&](const GibbsExact& d, const SpinConfig& bc) {
    return [&d, &bc, &alpha](Rng& r) {
      SpinConfig out = bc;
      int64_t o = d.dist.sample(r);
      for (size_t i = 0; i < d.sites.size(); ++i)
        out[d.sites[i]] = alpha.value(d.dist.space().digit(o, int(i)));
      return out;
    };
  };
  return duplicated_disagreement_prob(g, lambda, make_sampler(a, eta),
                                      make_sampler(b, eta_prime), delta,
                                      samples, rng);
}

}  // namespace gibbs
