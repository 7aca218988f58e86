#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "gibbs/coupling.hpp"
#include "gibbs/exact.hpp"
#include "gibbs/model.hpp"
#include "gibbs/parallel.hpp"
#include "gibbs/percolation.hpp"
#include "gibbs/random_cluster.hpp"
#include "gibbs/rng.hpp"

using namespace gibbs;

namespace {

FiniteDistribution bernoulli_product(const std::vector<double>& p) {
  OutcomeSpace space(int(p.size()), 2);
  std::vector<double> logw(space.size());
  for (int64_t o = 0; o < space.size(); ++o) {
    double lw = 0;
    for (size_t s = 0; s < p.size(); ++s)
      lw += space.digit(o, int(s)) ? std::log(p[s]) : std::log1p(-p[s]);
    logw[o] = lw;
  }
  return FiniteDistribution(space, logw, false);
}

GibbsExact exact_potts_free(const Graph& g, int q, double beta) {
  Model m = make_potts(q, beta);
  return exact_gibbs(g, m.interaction, Region::all(g.num_vertices()),
                     SpinConfig(g.num_vertices(), 1));
}

}  // namespace

TEST_CASE("bond map extremes") {
  Graph g = Graph::box(2, 3, Topology::free);
  Rng rng(1);
  SpinConfig aligned(g.num_vertices(), 2);
  // beta large: p -> 1, all bonds between equal spins open
  BondConfig all = potts_to_rc(g, 50.0, aligned, rng);
  for (uint8_t b : all) CHECK(b == 1);
  // adjacent spins all distinct on a chessboard: everything closed
  SpinConfig chess(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) {
    auto c = g.coords_of(v);
    chess[v] = 1 + (c[0] + c[1]) % 2;
  }
  BondConfig none = potts_to_rc(g, 50.0, chess, rng);
  for (uint8_t b : none) CHECK(b == 0);
}

TEST_CASE("cluster-map composition: spin law to edge law and back") {
  // exact transition-matrix push on a 4-bond cycle
  Graph g = Graph::custom(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  int q = 2;
  double p = 0.6;
  double beta = -0.5 * std::log1p(-p);
  GibbsExact potts = exact_potts_free(g, q, beta);
  RcExact rc = exact_rc(g, p, q, RcCounting::free());
  std::vector<BondId> slots = rc_slots(g, RcCounting::free());
  const OutcomeSpace& sspace = potts.dist.space();
  const OutcomeSpace& espace = rc.dist.space();

  // forward: P(omega) = sum_sigma potts(sigma) P(omega|sigma)
  std::vector<KahanSum> edge_acc(espace.size());
  std::vector<int> spin(4);
  for (int64_t so = 0; so < sspace.size(); ++so) {
    for (int v = 0; v < 4; ++v) spin[v] = sspace.digit(so, v);
    for (int64_t eo = 0; eo < espace.size(); ++eo) {
      double prob = 1;
      for (int b = 0; b < 4; ++b) {
        bool open = espace.digit(eo, b);
        bool equal = spin[g.bond(b).u] == spin[g.bond(b).v];
        if (open)
          prob *= equal ? p : 0.0;
        else
          prob *= equal ? 1 - p : 1.0;
        if (prob == 0) break;
      }
      if (prob > 0) edge_acc[eo].add(potts.dist.prob(so) * prob);
    }
  }
  for (int64_t eo = 0; eo < espace.size(); ++eo)
    CHECK(edge_acc[eo].value() ==
          doctest::Approx(rc.dist.prob(eo)).epsilon(1e-12));

  // backward: P(sigma) = sum_omega rc(omega) P(sigma|omega), uniform spin
  // per cluster
  Region none({}, 4);
  std::vector<KahanSum> spin_acc(sspace.size());
  for (int64_t eo = 0; eo < espace.size(); ++eo) {
    BondConfig open(4);
    for (int b = 0; b < 4; ++b) open[b] = uint8_t(espace.digit(eo, b));
    ClusterLabeling lab = label_clusters(g, open, none);
    double per_config = std::pow(1.0 / q, lab.num_clusters);
    for (int64_t so = 0; so < sspace.size(); ++so) {
      bool compatible = true;
      for (int b = 0; b < 4 && compatible; ++b)
        if (open[b])
          compatible &=
              sspace.digit(so, g.bond(b).u) == sspace.digit(so, g.bond(b).v);
      // constant on clusters <=> compatible with every open bond
      if (compatible) spin_acc[so].add(rc.dist.prob(eo) * per_config);
    }
  }
  for (int64_t so = 0; so < sspace.size(); ++so)
    CHECK(spin_acc[so].value() ==
          doctest::Approx(potts.dist.prob(so)).epsilon(1e-12));
}

TEST_CASE("rc_to_potts forces boundary clusters") {
  Graph g = Graph::custom(3, {{0, 1}, {1, 2}});
  std::vector<BondId> slots = {0, 1};
  std::vector<uint8_t> open = {1, 0};
  Rng rng(9);
  ForcedSpin forced{Region({0}, 3), 3};
  SpinConfig sigma = rc_to_potts(g, 3, open, slots, rng, forced);
  CHECK(sigma[0] == 3);
  CHECK(sigma[1] == 3);  // joined to the forced cluster
  CHECK(sigma[2] >= 1);
  CHECK(sigma[2] <= 3);
}

TEST_CASE("two-type maps between site laws and spin laws") {
  // exact push: wr law -> site law under the absolute value
  Graph g = Graph::custom(4, {{0, 1}, {1, 2}, {2, 3}});
  for (double lambda : {0.5, 2.0}) {
    double p = lambda / (1 + lambda);
    Model wr = make_widom_rowlinson(lambda, lambda);
    GibbsExact mu =
        exact_gibbs(g, wr.interaction, Region::all(4), SpinConfig(4, 0));
    FiniteDistribution site = exact_site_rc(g, p, 2.0);
    std::vector<KahanSum> pushed(site.space().size());
    for (int64_t o = 0; o < mu.dist.space().size(); ++o) {
      std::vector<int> bits(4);
      for (int s = 0; s < 4; ++s)
        bits[s] = mu.dist.space().digit(o, s) == 1 ? 0 : 1;  // 0 spin = idx 1
      pushed[site.space().pack(bits)].add(mu.dist.prob(o));
    }
    for (int64_t o = 0; o < site.space().size(); ++o)
      CHECK(pushed[o].value() ==
            doctest::Approx(site.prob(o)).epsilon(1e-12));

    // and back: site law -> wr law under fair cluster signs
    std::vector<KahanSum> spins(mu.dist.space().size());
    Region none({}, 4);
    for (int64_t o = 0; o < site.space().size(); ++o) {
      SiteConfig open(4);
      for (int s = 0; s < 4; ++s) open[s] = uint8_t(site.space().digit(o, s));
      ClusterLabeling lab = label_clusters_sites(g, open, none);
      double per = std::pow(0.5, lab.num_clusters);
      // enumerate sign choices per cluster
      for (int64_t signs = 0; signs < (int64_t(1) << lab.num_clusters);
           ++signs) {
        std::vector<int> digits(4);
        for (int s = 0; s < 4; ++s) {
          if (!open[s])
            digits[s] = 1;  // spin 0
          else
            digits[s] = (signs >> lab.label[s] & 1) ? 2 : 0;  // +1 : -1
        }
        spins[mu.dist.space().pack(digits)].add(site.prob(o) * per);
      }
    }
    for (int64_t o = 0; o < mu.dist.space().size(); ++o)
      CHECK(spins[o].value() ==
            doctest::Approx(mu.dist.prob(o)).epsilon(1e-12));
  }
  // deterministic direction on a sample
  SpinConfig zeros(4, 0);
  CHECK(wr_to_site_rc(zeros) == SiteConfig({0, 0, 0, 0}));
  Rng rng(3);
  SiteConfig one_cluster = {1, 1, 1, 0};
  SpinConfig colored = site_rc_to_wr(g, one_cluster, rng);
  CHECK(std::abs(colored[0]) == 1);
  CHECK(colored[0] == colored[1]);
  CHECK(colored[1] == colored[2]);
  CHECK(colored[3] == 0);
}

TEST_CASE("optimal coupling") {
  FiniteDistribution a = bernoulli_product({0.3});
  FiniteDistribution b = bernoulli_product({0.7});
  Coupling c = optimal_coupling(a, b);
  CHECK(c.prob_not_equal() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(c.prob_not_equal() ==
        doctest::Approx(tv_distance(a, b)).epsilon(1e-12));
  Coupling diag = optimal_coupling(a, a);
  CHECK(diag.prob_not_equal() == doctest::Approx(0.0));
  OutcomeSpace bit(1, 2);
  FiniteDistribution p0(bit, {0.0, -kInfiniteEnergy}, false);
  FiniteDistribution p1(bit, {-kInfiniteEnergy, 0.0}, false);
  CHECK(optimal_coupling(p0, p1).prob_not_equal() == doctest::Approx(1.0));
}

TEST_CASE("witness couplings export as csv matrices") {
  FiniteDistribution a = bernoulli_product({0.3});
  FiniteDistribution b = bernoulli_product({0.7});
  Coupling c = optimal_coupling(a, b);
  std::ostringstream os;
  c.write_csv(os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "first,second,mass");
  double diagonal = 0, shifted = 0;
  long long x, y;
  char comma;
  double mass;
  while (is >> x >> comma >> y >> comma >> mass) {
    if (x == y) diagonal += mass;
    if (x == 0 && y == 1) shifted += mass;
  }
  CHECK(diagonal == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(shifted == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("coupled chains with identical laws stay glued") {
  Graph g = Graph::box(2, 3, Topology::free);
  Model ising = make_ising(0.0, 0.4);
  SiteConditional cond = gibbs_site_conditional(g, ising.interaction);
  Rng rng(12);
  SpinConfig start(g.num_vertices(), +1);
  HolleyChainResult res = holley_coupled_chain(
      g, ising.alphabet, cond, cond, start, start, 20000, rng);
  CHECK(res.x == res.x_prime);
  CHECK(res.order_held);
}

TEST_CASE("field ordering is preserved by the coupled chains") {
  Graph g = Graph::box(2, 4, Topology::free);
  Model low = make_ising(0.0, 0.5);
  Model high = make_ising(0.5, 0.5);
  SiteConditional mu = gibbs_site_conditional(g, low.interaction);
  SiteConditional nu = gibbs_site_conditional(g, high.interaction);
  Rng rng(13);
  SpinConfig bottom(g.num_vertices(), -1), top(g.num_vertices(), +1);
  HolleyChainResult res = holley_coupled_chain(g, low.alphabet, mu, nu,
                                               bottom, top, 100000, rng);
  CHECK(res.order_held);
  for (int v = 0; v < g.num_vertices(); ++v) CHECK(res.x[v] <= res.x_prime[v]);
}

TEST_CASE("independent bits with shared uniforms couple ordered") {
  Graph g = Graph::custom(3, {{0, 1}, {1, 2}});
  SpinAlphabet bits({0, 1});
  auto constant = [](double p) {
    return SiteConditional(
        [p](VertexId, const SpinConfig&) { return std::vector<double>{1 - p, p}; });
  };
  Rng rng(21);
  SpinConfig zero(3, 0), one(3, 1);
  HolleyChainResult res = holley_coupled_chain(g, bits, constant(0.3),
                                               constant(0.5), one, zero,
                                               10000, rng);
  for (int v = 0; v < 3; ++v) CHECK(res.x[v] <= res.x_prime[v]);
}

TEST_CASE("conditional monotonicity check on product laws") {
  FiniteDistribution lo = bernoulli_product({0.3, 0.3, 0.3});
  FiniteDistribution hi = bernoulli_product({0.5, 0.5, 0.5});
  CHECK(holley_check(lo, hi).holds);
  CHECK(!holley_check(hi, lo).holds);
}

TEST_CASE("oscillation of the single-site law") {
  Graph g = Graph::box(2, 5, Topology::free);
  VertexId center = g.index_of({2, 2});
  int d = 2;
  for (double beta : {0.3, 0.8})
    for (double h : {0.0, 0.4}) {
      Model ising = make_ising(h, beta);
      double expect = (std::tanh(beta * (h + 2 * d)) -
                       std::tanh(beta * (h - 2 * d))) / 2;
      CHECK(oscillation_px(g, ising.interaction, center) ==
            doctest::Approx(expect).epsilon(1e-12));
    }
  for (double lambda : {0.4, 1.7}) {
    Model hc = make_hardcore(lambda);
    CHECK(oscillation_px(g, hc.interaction, center) ==
          doctest::Approx(lambda / (1 + lambda)).epsilon(1e-12));
    Model wr = make_widom_rowlinson(lambda, lambda);
    CHECK(oscillation_px(g, wr.interaction, center) ==
          doctest::Approx(2 * lambda / (1 + 2 * lambda)).epsilon(1e-12));
  }
}

TEST_CASE("dobrushin interdependence coefficient") {
  Graph g = Graph::box(2, 5, Topology::free);
  VertexId center = g.index_of({2, 2});
  Model frozen = make_ising(0.0, 0.0);
  CHECK(dobrushin_coefficient(g, frozen.interaction, center) ==
        doctest::Approx(0.0));
  // exact supremum per neighbor: the best exterior has the other three
  // neighbors balanced, giving [tanh(2 beta) - tanh(0)] / 2; the classical
  // sufficient condition "2d tanh(beta) < 1" bounds this from above
  Model ising = make_ising(0.0, 0.1);
  double exact = dobrushin_coefficient(g, ising.interaction, center);
  CHECK(exact == doctest::Approx(4 * std::tanh(0.2) / 2).epsilon(1e-12));
  CHECK(exact <= 4 * std::tanh(0.1));
  for (double lambda : {0.4, 1.7}) {
    Model hc = make_hardcore(lambda);
    CHECK(dobrushin_coefficient(g, hc.interaction, center) ==
          doctest::Approx(4 * lambda / (1 + lambda)).epsilon(1e-12));
  }
}

TEST_CASE("equal boundaries couple diagonally") {
  Graph g = Graph::box(2, 4, Topology::free);
  std::vector<VertexId> block;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) block.push_back(g.index_of({i, j}));
  Region lambda(block, g.num_vertices());
  Model ising = make_ising(0.0, 0.6);
  SpinConfig plus(g.num_vertices(), +1);
  DisagreementExact dc =
      disagreement_coupling_exact(g, ising.interaction, lambda, plus, plus);
  for (auto& [a, b, m] : dc.coupling.mass) {
    CHECK(a == b);
    (void)m;
  }
  CHECK(dc.disagreement_law.prob(0) == doctest::Approx(1.0));
}

TEST_CASE("disagreement coupling marginals for the hard-core pair") {
  Graph g = Graph::box(2, 4, Topology::free);
  std::vector<VertexId> block;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) block.push_back(g.index_of({i, j}));
  Region lambda(block, g.num_vertices());
  Model hc = make_hardcore(2.0);
  SpinConfig even(g.num_vertices()), odd(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) {
    auto c = g.coords_of(v);
    even[v] = (c[0] + c[1]) % 2 == 0 ? 1 : 0;
    odd[v] = (c[0] + c[1]) % 2 == 1 ? 1 : 0;
  }
  DisagreementExact dc =
      disagreement_coupling_exact(g, hc.interaction, lambda, even, odd);
  GibbsExact mu = exact_gibbs(g, hc.interaction, lambda, even);
  GibbsExact nu = exact_gibbs(g, hc.interaction, lambda, odd);
  std::vector<double> m1 = dc.coupling.first_marginal();
  std::vector<double> m2 = dc.coupling.second_marginal();
  for (int64_t o = 0; o < mu.dist.space().size(); ++o) {
    CHECK(m1[o] == doctest::Approx(mu.dist.prob(o)).epsilon(1e-12));
    CHECK(m2[o] == doctest::Approx(nu.dist.prob(o)).epsilon(1e-12));
  }
  CHECK(dc.path_property);
  // product-law domination with the oscillation densities
  std::vector<double> px;
  for (VertexId v : lambda.members())
    px.push_back(oscillation_px(g, hc.interaction, v));
  FiniteDistribution psi = bernoulli_product(px);
  CHECK(dominates(dc.disagreement_law, psi,
                  coordinatewise_order(psi.space()))
            .dominated);
}

TEST_CASE("sampled disagreement coupling matches the exact joint") {
  Graph g = Graph::box(2, 4, Topology::free);
  std::vector<VertexId> block;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) block.push_back(g.index_of({i, j}));
  Region lambda(block, g.num_vertices());
  Model ising = make_ising(0.0, 0.5);
  SpinConfig plus(g.num_vertices(), +1), minus(g.num_vertices(), -1);
  DisagreementExact dc = disagreement_coupling_exact(g, ising.interaction,
                                                     lambda, plus, minus);
  std::map<std::pair<int64_t, int64_t>, double> exact_mass;
  for (auto& [a, b, m] : dc.coupling.mass) exact_mass[{a, b}] = m;
  Rng rng(99);
  std::map<std::pair<int64_t, int64_t>, int64_t> counts;
  int64_t n = 40000;
  const OutcomeSpace& space = dc.coupling.space;
  for (int64_t i = 0; i < n; ++i) {
    auto [x, xp] = disagreement_coupling_sample(g, ising.interaction, lambda,
                                                plus, minus, rng);
    std::vector<int> dx, dy;
    for (VertexId v : lambda.members()) {
      dx.push_back(ising.alphabet.index_of(x[v]));
      dy.push_back(ising.alphabet.index_of(xp[v]));
    }
    ++counts[{space.pack(dx), space.pack(dy)}];
  }
  double tv = 0;
  for (auto& [key, m] : exact_mass) {
    auto it = counts.find(key);
    double freq = it == counts.end() ? 0.0 : double(it->second) / n;
    tv += std::abs(freq - m);
  }
  for (auto& [key, c] : counts)
    if (!exact_mass.count(key)) tv += double(c) / n;
  CHECK(tv / 2 < 0.02);
}

TEST_CASE("disagreement paths in independent duplicates") {
  Graph g = Graph::box(2, 3, Topology::free);
  Region lambda({g.index_of({1, 1})}, g.num_vertices());
  Model ising = make_ising(0.0, 20.0);
  SpinConfig plus(g.num_vertices(), +1);
  Rng rng(5);
  // frozen chains agree surely
  CHECK(duplicated_disagreement_prob(g, ising.interaction, lambda, plus, plus,
                                     lambda, 200, rng) == 0.0);
  // a disagreeing boundary point inside delta gives a sure path
  SpinConfig minus(g.num_vertices(), -1);
  std::vector<VertexId> block = {g.index_of({1, 1})};
  Region delta_touching = boundary(g, lambda);
  Model soft = make_ising(0.0, 0.3);
  CHECK(duplicated_disagreement_prob(g, soft.interaction, lambda, plus, minus,
                                     delta_touching, 100, rng) == 1.0);
}

TEST_CASE("independent duplicates at infinite temperature") {
  // beta = 0: both samples are uniform fields; the disagreement event
  // matches its exhaustive enumeration on the 3x3 window
  Graph g = Graph::box(2, 5, Topology::free);
  std::vector<VertexId> block;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) block.push_back(g.index_of({i, j}));
  Region lambda(block, g.num_vertices());
  Region delta({g.index_of({2, 2})}, g.num_vertices());
  Model free_ising = make_ising(0.0, 0.0);
  SpinConfig plus(g.num_vertices(), +1), minus(g.num_vertices(), -1);

  // exhaustive two-layer enumeration
  OutcomeSpace window(9, 2);
  double exact_prob = 0;
  SpinConfig x = plus, y = minus;
  for (int64_t a = 0; a < window.size(); ++a)
    for (int64_t b = 0; b < window.size(); ++b) {
      for (int s = 0; s < 9; ++s) {
        x[block[s]] = window.digit(a, s) ? +1 : -1;
        y[block[s]] = window.digit(b, s) ? +1 : -1;
      }
      if (disagreement_path_exists(g, lambda, x, y, delta))
        exact_prob += 1.0 / double(window.size() * window.size());
    }
  Rng rng(71);
  int samples = 40000;
  double freq = duplicated_disagreement_prob(
      g, free_ising.interaction, lambda, plus, minus, delta, samples, rng);
  double sigma = std::sqrt(exact_prob * (1 - exact_prob) / samples);
  CHECK(std::abs(freq - exact_prob) < 4 * sigma + 1e-9);
}

TEST_CASE("equal single-site marginals plus domination forces equality") {
  // equal-marginal pair that is NOT ordered: neither direction dominates
  OutcomeSpace space(2, 2);
  std::vector<double> diag_w = {std::log(0.5), -kInfiniteEnergy,
                                -kInfiniteEnergy, std::log(0.5)};
  std::vector<double> anti_w = {-kInfiniteEnergy, std::log(0.5),
                                std::log(0.5), -kInfiniteEnergy};
  FiniteDistribution diag(space, diag_w, false);
  FiniteDistribution anti(space, anti_w, false);
  PartialOrder order = coordinatewise_order(space);
  CHECK(!dominates(diag, anti, order).dominated);
  CHECK(!dominates(anti, diag, order).dominated);
  // an ordered pair with equal marginals must be a single law
  FiniteDistribution prod = bernoulli_product({0.4, 0.6});
  DominationResult res = dominates(prod, prod, order);
  CHECK(res.dominated);
  for (auto& [a, b, m] : res.witness) {
    CHECK(a == b);
    (void)m;
  }
}

TEST_CASE("spin-one probability equals the wired connection identity on a "
          "1x3 window") {
  Graph g = Graph::custom(15, [] {
    // 3x5 grid
    std::vector<Bond> bonds;
    auto id = [](int i, int j) { return i * 5 + j; };
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 5; ++j) {
        if (j + 1 < 5) bonds.push_back({id(i, j), id(i, j + 1)});
        if (i + 1 < 3) bonds.push_back({id(i, j), id(i + 1, j)});
      }
    return bonds;
  }());
  Region lambda({6, 7, 8}, 15);  // middle row, columns 1..3
  for (int q : {2, 3}) {
    double beta = 0.55;
    double p = -std::expm1(-2 * beta);
    Model potts = make_potts(q, beta);
    SpinConfig eta(15, 1);
    GibbsExact spin = exact_gibbs(g, potts.interaction, lambda, eta);
    RcExact rc = exact_rc(g, p, q, RcCounting::wired(lambda));
    Region outside = boundary(g, lambda);
    for (int slot = 0; slot < 3; ++slot) {
      VertexId x = lambda.members()[slot];
      KahanSum spin_prob;
      for (int64_t o = 0; o < spin.dist.space().size(); ++o)
        if (spin.dist.space().digit(o, slot) == 0)
          spin_prob.add(spin.dist.prob(o));
      KahanSum connect;
      for (int64_t o = 0; o < rc.dist.space().size(); ++o) {
        BondConfig full(g.num_bonds(), 0);
        for (size_t i = 0; i < rc.slots.size(); ++i)
          full[rc.slots[i]] = uint8_t(rc.dist.space().digit(o, int(i)));
        if (connected(g, full, x, outside)) connect.add(rc.dist.prob(o));
      }
      double expect = 1.0 / q + (q - 1.0) / q * connect.value();
      CHECK(spin_prob.value() == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}
