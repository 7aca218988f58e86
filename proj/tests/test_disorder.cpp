#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gibbs/disorder.hpp"
#include "gibbs/exact.hpp"
#include "gibbs/model.hpp"
#include "gibbs/parallel.hpp"
#include "gibbs/percolation.hpp"
#include "gibbs/rng.hpp"

using namespace gibbs;

TEST_CASE("coupling fields") {
  Graph g = Graph::box(2, 6, Topology::free);
  Rng rng(2);
  CouplingField all = sample_couplings(g, DisorderLaw::dilution(1.0), rng);
  for (double j : all.j) CHECK(j == 1.0);
  CouplingField none = sample_couplings(g, DisorderLaw::dilution(0.0), rng);
  for (double j : none.j) CHECK(j == 0.0);

  // gamma(a) has mean a: check over ~1e6 bonds
  double a = 2.0;
  KahanSum sum;
  int64_t n = 0;
  DisorderLaw law = DisorderLaw::gamma(a);
  for (int rep = 0; rep < 17000; ++rep) {
    CouplingField f = sample_couplings(g, law, rng);
    for (double j : f.j) {
      sum.add(j);
      ++n;
    }
  }
  double mean = sum.value() / n;
  double sigma = std::sqrt(a / double(n));  // variance of gamma(a) is a
  CHECK(std::abs(mean - a) < 4 * sigma);
}

TEST_CASE("bond probabilities and their law-level means") {
  Graph g = Graph::box(2, 4, Topology::free);
  Rng rng(5);
  double beta = 1.0, q = 2.0;

  DisorderLaw dil = DisorderLaw::dilution(0.9);
  CouplingField f = sample_couplings(g, dil, rng);
  BondProbs probs = disorder_bond_probs(f, dil, beta, q);
  CHECK(probs.pbar ==
        doctest::Approx(0.9 * -std::expm1(-2.0)).epsilon(1e-12));
  double p1 = -std::expm1(-2.0);
  CHECK(probs.punder ==
        doctest::Approx(0.9 * p1 / (p1 + q * (1 - p1))).epsilon(1e-12));
  for (size_t b = 0; b < f.j.size(); ++b) {
    CHECK(probs.p[b] == doctest::Approx(-std::expm1(-2 * beta * f.j[b])));
    CHECK(probs.p_prime[b] ==
          doctest::Approx(probs.p[b] / (probs.p[b] + q * (1 - probs.p[b]))));
  }

  // zero temperature decouples everything
  BondProbs cold = disorder_bond_probs(f, dil, 0.0, q);
  CHECK(cold.pbar == doctest::Approx(0.0));
  CHECK(cold.punder == doctest::Approx(0.0));
}

TEST_CASE("gamma-law means: closed form and quadrature") {
  Graph g = Graph::custom(2, {{0, 1}});
  Rng rng(6);
  for (double a : {0.5, 1.0, 2.0})
    for (double beta : {0.3, 1.0}) {
      DisorderLaw law = DisorderLaw::gamma(a);
      CouplingField f = sample_couplings(g, law, rng);
      BondProbs probs = disorder_bond_probs(f, law, beta, 2.0);
      double closed = -std::expm1(-a * std::log1p(2 * beta));
      CHECK(probs.pbar == doctest::Approx(closed).epsilon(1e-12));
      CHECK(probs.punder <= probs.pbar);
      CHECK(probs.punder > 0);
    }
  // quadrature cross-check against a large Monte Carlo average
  double a = 1.7, beta = 0.8, q = 3.0;
  DisorderLaw law = DisorderLaw::gamma(a);
  Graph big = Graph::box(2, 40, Topology::free);
  Rng rng2(7);
  KahanSum acc;
  int64_t n = 0;
  for (int rep = 0; rep < 80; ++rep) {
    CouplingField f = sample_couplings(big, law, rng2);
    for (double j : f.j) {
      double p = -std::expm1(-2 * beta * j);
      acc.add(p / (p + q * (1 - p)));
      ++n;
    }
  }
  CouplingField f = sample_couplings(big, law, rng2);
  BondProbs probs = disorder_bond_probs(f, law, beta, q);
  double mc = acc.value() / n;
  CHECK(std::abs(probs.punder - mc) < 5e-3);  // MC noise dominates
}

TEST_CASE("discrete law means are exact sums") {
  DisorderLaw law = DisorderLaw::discrete({0.0, 0.5, 2.0}, {0.2, 0.5, 0.3});
  Graph g = Graph::custom(2, {{0, 1}});
  Rng rng(8);
  CouplingField f = sample_couplings(g, law, rng);
  double beta = 0.6, q = 2.0;
  BondProbs probs = disorder_bond_probs(f, law, beta, q);
  double expect = 0.2 * 0.0 + 0.5 * -std::expm1(-2 * beta * 0.5) +
                  0.3 * -std::expm1(-2 * beta * 2.0);
  CHECK(probs.pbar == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS(DisorderLaw::discrete({-1.0}, {1.0}));
  CHECK_THROWS(DisorderLaw::discrete({1.0}, {0.5}));
}

TEST_CASE("means are ordered below the retention probability") {
  Graph g = Graph::custom(2, {{0, 1}});
  Rng rng(9);
  for (double beta : {0.2, 0.7, 2.0})
    for (double q : {1.0, 2.0, 4.0}) {
      DisorderLaw law = DisorderLaw::dilution(0.8, 1.3);
      CouplingField f = sample_couplings(g, law, rng);
      BondProbs probs = disorder_bond_probs(f, law, beta, q);
      CHECK(probs.punder <= probs.pbar + 1e-12);
      CHECK(probs.pbar <= 0.8 + 1e-12);  // p(law) = P(J > 0)
    }
}

TEST_CASE("logarithmic bounds for the diluted critical temperature") {
  auto [lo, hi] = dilution_beta_bounds(1.0, 2.0, 0.5);
  CHECK(lo == doctest::Approx(-std::log(0.5)));
  CHECK(hi == doctest::Approx(-std::log(0.25)));
  CHECK(lo <= hi);

  auto [l1, h1] = dilution_beta_bounds(0.8, 1.0, 0.5);
  CHECK(l1 == doctest::Approx(h1));  // q = 1 collapses the bounds

  auto [l2, h2] = dilution_beta_bounds(0.500001, 2.0, 0.5);
  CHECK(l2 > 12.0);  // diverges as p -> p_c
  CHECK(h2 > l2);

  CHECK_THROWS(dilution_beta_bounds(0.4, 2.0, 0.5));
  CHECK_THROWS(dilution_beta_bounds(0.5, 2.0, 0.5));
}

TEST_CASE("bondwise spin-edge joint with inhomogeneous couplings") {
  // explicit joint on a 3-path with J = (0.3, 1.7): spin marginal equals
  // the quenched Gibbs weights, edge marginal the bondwise cluster law
  Graph g = Graph::custom(3, {{0, 1}, {1, 2}});
  double beta = 0.75;
  int q = 2;
  std::vector<double> jj = {0.3, 1.7};
  std::vector<double> p_b = {-std::expm1(-2 * beta * jj[0]),
                             -std::expm1(-2 * beta * jj[1])};
  OutcomeSpace sspace(3, q), espace(2, 2);
  std::vector<KahanSum> vacc(sspace.size()), eacc(espace.size());
  KahanSum z;
  for (int64_t so = 0; so < sspace.size(); ++so)
    for (int64_t eo = 0; eo < espace.size(); ++eo) {
      double w = 1;
      for (int b = 0; b < 2; ++b) {
        bool open = espace.digit(eo, b);
        bool equal =
            sspace.digit(so, g.bond(b).u) == sspace.digit(so, g.bond(b).v);
        if (open)
          w *= equal ? p_b[b] : 0.0;
        else
          w *= 1 - p_b[b];
        if (w == 0) break;
      }
      if (w == 0) continue;
      vacc[so].add(w);
      eacc[eo].add(w);
      z.add(w);
    }
  // spin side: exp(-2 beta sum J_b 1{unequal}) up to normalization
  KahanSum zg;
  std::vector<double> gibbs(sspace.size());
  for (int64_t so = 0; so < sspace.size(); ++so) {
    double h = 0;
    for (int b = 0; b < 2; ++b)
      if (sspace.digit(so, g.bond(b).u) != sspace.digit(so, g.bond(b).v))
        h += 2 * jj[b];
    gibbs[so] = std::exp(-beta * h);
    zg.add(gibbs[so]);
  }
  for (int64_t so = 0; so < sspace.size(); ++so)
    CHECK(vacc[so].value() / z.value() ==
          doctest::Approx(gibbs[so] / zg.value()).epsilon(1e-12));
  // edge side: the exact bondwise cluster law
  RcExact rc = exact_rc(g, p_b, q, RcCounting::free());
  for (int64_t eo = 0; eo < espace.size(); ++eo)
    CHECK(eacc[eo].value() / z.value() ==
          doctest::Approx(rc.dist.prob(eo)).epsilon(1e-12));
}

TEST_CASE("raising couplings never closes open bonds pathwise") {
  Graph g = Graph::box(2, 6, Topology::free);
  Rng rng(11);
  double beta = 0.8;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> field = uniform_field(g, Structure::bond, rng);
    CouplingField lo = sample_couplings(g, DisorderLaw::gamma(1.0), rng);
    CouplingField hi = lo;
    for (double& j : hi.j) j += 0.4;
    BondConfig open_lo(g.num_bonds()), open_hi(g.num_bonds());
    for (int b = 0; b < g.num_bonds(); ++b) {
      open_lo[b] = field[b] < -std::expm1(-2 * beta * lo.j[b]);
      open_hi[b] = field[b] < -std::expm1(-2 * beta * hi.j[b]);
      CHECK(open_lo[b] <= open_hi[b]);
    }
    // the boundary-connection indicator inherits the ordering
    Region target({g.num_vertices() - 1}, g.num_vertices());
    bool c_lo = connected(g, open_lo, 0, target);
    bool c_hi = connected(g, open_hi, 0, target);
    CHECK((!c_lo || c_hi));
  }
}

TEST_CASE("homogeneous dilution reduces to the clean chain") {
  // p = 1 keeps every bond: the quenched estimate must agree with a
  // homogeneous run at the same seed count
  Graph g = Graph::box(2, 8, Topology::periodic);
  Region lambda = Region::all(g.num_vertices());
  Region target({g.num_vertices() - 1}, g.num_vertices());
  QuenchedSummary clean = quenched_experiment(
      g, DisorderLaw::dilution(1.0), 0.8, 2, 4, 200, 50, 0, target, lambda,
      std::nullopt, 99, false);
  for (const QuenchedReplica& rep : clean.replicas)
    CHECK(rep.open_bond_fraction > 0.5);  // p = 1 - e^{-1.6} ~ 0.8
  CHECK(clean.m_hat > 0.5);

  // beta = 0 freezes every bond closed: connection estimate vanishes
  QuenchedSummary cold = quenched_experiment(
      g, DisorderLaw::dilution(0.9), 0.0, 2, 4, 100, 10, 0, target, lambda,
      std::nullopt, 100, false);
  CHECK(cold.m_hat == doctest::Approx(0.0));
}
