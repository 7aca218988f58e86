#include "gibbs/checks.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gibbs/coupling.hpp"
#include "gibbs/exact.hpp"
#include "gibbs/model.hpp"
#include "gibbs/parallel.hpp"
#include "gibbs/percolation.hpp"
#include "gibbs/random_cluster.hpp"
#include "gibbs/sampler.hpp"
#include "gibbs/small_graphs.hpp"

namespace gibbs {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

void add(CheckReport& report, const std::string& name, bool passed,
         const std::string& detail) {
  report.items.push_back({name, passed, detail});
}

// Exact Potts law on all vertices of g (free boundary).
GibbsExact exact_potts(const Graph& g, int q, double beta) {
  Model model = make_potts(q, beta);
  SpinConfig eta(g.num_vertices(), 1);
  return exact_gibbs(g, model.interaction, Region::all(g.num_vertices()), eta);
}

CheckReport check_rc_identities() {
  CheckReport report{"rc-identities", {}};
  std::vector<Graph> graphs = connected_graphs_up_to(4);

  // single-edge conditional law vs the closed form, all counting kinds
  {
    double worst = 0;
    for (const Graph& g : graphs) {
      std::vector<RcCounting> countings = {RcCounting::free()};
      if (g.num_vertices() >= 3) {
        std::vector<VertexId> interior;
        for (int v = 0; v + 1 < g.num_vertices(); ++v) interior.push_back(v);
        Region lambda(interior, g.num_vertices());
        countings.push_back(RcCounting::wired(lambda));
        countings.push_back(RcCounting::compactified(lambda));
      }
      for (const RcCounting& counting : countings)
        for (double p : {0.3, 0.7})
          for (double q : {0.5, 2.0}) {
            RcExact rc = exact_rc(g, p, q, counting);
            RcParams params = RcParams::uniform(g, p, q, counting);
            int nb = static_cast<int>(rc.slots.size());
            const OutcomeSpace& space = rc.dist.space();
            for (int slot = 0; slot < nb; ++slot) {
              OutcomeSpace rest(nb - 1, 2);
              for (int64_t e = 0; e < rest.size(); ++e) {
                std::vector<uint8_t> open(nb, 0);
                for (int i = 0, k = 0; i < nb; ++i)
                  if (i != slot) open[i] = uint8_t(rest.digit(e, k++));
                // conditional from the exact law
                std::vector<int> d(nb);
                for (int i = 0; i < nb; ++i) d[i] = open[i];
                d[slot] = 1;
                double w1 = std::exp(rc.dist.log_weight(space.pack(d)) -
                                     rc.dist.log_normalizer());
                d[slot] = 0;
                double w0 = std::exp(rc.dist.log_weight(space.pack(d)) -
                                     rc.dist.log_normalizer());
                double from_exact = w1 / (w1 + w0);
                double closed =
                    rc_conditional_edge(g, params, rc.slots, open, slot);
                worst = std::max(worst, std::abs(from_exact - closed));
              }
            }
          }
    }
    add(report, "single-edge conditional law equals its closed form",
        worst < 1e-12, "max deviation " + fmt(worst));
  }

  // explicit spin-and-edge joint marginals vs exact Potts / exact rc laws
  {
    double worst = 0;
    for (const Graph& g : graphs)
      for (int q : {2, 3})
        for (double p : {0.4, 0.8}) {
          double beta = -0.5 * std::log1p(-p);
          EsMarginals joint = es_joint_marginals(g, p, q);
          GibbsExact potts = exact_potts(g, q, beta);
          RcExact rc = exact_rc(g, p, q, RcCounting::free());
          for (int64_t o = 0; o < potts.dist.space().size(); ++o)
            worst = std::max(worst,
                             std::abs(joint.vertex[o] - potts.dist.prob(o)));
          for (int64_t o = 0; o < rc.dist.space().size(); ++o)
            worst =
                std::max(worst, std::abs(joint.edge[o] - rc.dist.prob(o)));
        }
    add(report, "joint spin-edge measure has the spin and edge marginals",
        worst < 1e-12, "max deviation " + fmt(worst));
  }

  // equal-spin two-point correlation at least 1/q^2, strictly for beta > 0
  {
    bool ok = true;
    double margin = 1.0;
    for (const Graph& g : graphs)
      for (int q : {2, 3}) {
        GibbsExact potts = exact_potts(g, q, 0.5);
        const OutcomeSpace& space = potts.dist.space();
        for (int x = 0; x < g.num_vertices(); ++x)
          for (int y = x + 1; y < g.num_vertices(); ++y) {
            KahanSum both;
            for (int64_t o = 0; o < space.size(); ++o)
              if (space.digit(o, x) == 0 && space.digit(o, y) == 0)
                both.add(potts.dist.prob(o));
            double lhs = both.value() - 1.0 / (q * q);
            margin = std::min(margin, lhs);
            ok &= lhs > 1e-12;
          }
      }
    add(report, "equal-spin events are strictly positively correlated", ok,
        "min margin over 1/q^2: " + fmt(margin));
  }

  // single-spin law vs boundary-connection probability in the wired rc law
  {
    Graph g = Graph::box(2, 4, Topology::free);
    std::vector<VertexId> block;
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j) block.push_back(g.index_of({i, j}));
    Region lambda(block, g.num_vertices());
    double worst = 0;
    for (int q : {2, 3})
      for (double beta : {0.4, 0.9}) {
        double p = -std::expm1(-2 * beta);
        Model model = make_potts(q, beta);
        SpinConfig eta(g.num_vertices(), 1);
        GibbsExact spin = exact_gibbs(g, model.interaction, lambda, eta);
        RcExact rc = exact_rc(g, p, q, RcCounting::wired(lambda));
        VertexId x = block[0];
        int slot_x = 0;
        while (lambda.members()[slot_x] != x) ++slot_x;
        KahanSum spin_prob;
        for (int64_t o = 0; o < spin.dist.space().size(); ++o)
          if (spin.dist.space().digit(o, slot_x) == 0)
            spin_prob.add(spin.dist.prob(o));
        KahanSum connect_prob;
        for (int64_t o = 0; o < rc.dist.space().size(); ++o) {
          std::vector<uint8_t> open(rc.slots.size());
          for (size_t i = 0; i < rc.slots.size(); ++i)
            open[i] = uint8_t(rc.dist.space().digit(o, int(i)));
          BondConfig full(g.num_bonds(), 0);
          for (size_t i = 0; i < rc.slots.size(); ++i)
            full[rc.slots[i]] = open[i];
          Region outside = boundary(g, lambda);
          if (connected(g, full, x, outside))
            connect_prob.add(rc.dist.prob(o));
        }
        double identity = 1.0 / q + (q - 1.0) / q * connect_prob.value();
        worst = std::max(worst, std::abs(spin_prob.value() - identity));
      }
    add(report, "single-spin law equals the wired connection identity",
        worst < 1e-12, "max deviation " + fmt(worst));
  }
  return report;
}

CheckReport check_domination() {
  CheckReport report{"domination", {}};
  std::vector<Graph> graphs = connected_graphs_up_to(4);

  {
    bool ok = true;
    for (const Graph& g : graphs) {
      RcCounting counting = RcCounting::free();
      for (double p : {0.2, 0.5, 0.8})
        for (double q : {1.0, 2.0, 3.0}) {
          RcExact rc = exact_rc(g, p, q, counting);
          PartialOrder order = coordinatewise_order(rc.dist.space());
          RcExact bern_hi = exact_rc(g, p, 1.0, counting);
          double p_low = p / (p + (1 - p) * q);
          RcExact bern_lo = exact_rc(g, p_low, 1.0, counting);
          ok &= dominates(rc.dist, bern_hi.dist, order).dominated;
          ok &= dominates(bern_lo.dist, rc.dist, order).dominated;
          if (p < 0.8) {
            RcExact rc_hi = exact_rc(g, p + 0.2, q, counting);
            ok &= dominates(rc.dist, rc_hi.dist, order).dominated;
          }
        }
    }
    add(report, "cluster-weighted law sits between its product envelopes",
        ok, "flow witnesses found for every instance");
  }

  {
    bool ok = true;
    for (const Graph& g : graphs) {
      if (g.num_bonds() > 4) continue;
      // free side: graphical law on all bonds vs free-counting law
      for (double beta : {0.5, 1.0}) {
        Model potts = make_potts(2, beta);
        Interaction shifted = potts.interaction.shifted_by(-1.0);
        GroupSpec group = GroupSpec::cyclic(2);
        GreyParams params = grey_params(shifted, group);
        Region all = Region::all(g.num_vertices());
        RcExact grey = exact_grey(g, shifted, group, std::nullopt, all);
        RcExact rc = exact_rc(g, params.p, params.q, RcCounting::free());
        PartialOrder order = coordinatewise_order(grey.dist.space());
        ok &= dominates(grey.dist, rc.dist, order).dominated;
      }
      // wired side with a fused boundary vertex and an asymmetric group law
      if (g.num_vertices() >= 3) {
        std::vector<VertexId> interior;
        for (int v = 0; v + 1 < g.num_vertices(); ++v) interior.push_back(v);
        Region lambda(interior, g.num_vertices());
        SpinAlphabet alpha({0, 1});
        std::vector<std::vector<double>> u = {{-2.0, -1.0}, {-1.0, -2.0}};
        Interaction in(alpha, u, {0.0, 0.0}, 1.0);
        GroupSpec group = GroupSpec::cyclic(2);
        GreyParams params = grey_params(in, group);
        SpinConfig eta(g.num_vertices(), 0);
        RcExact grey = exact_grey(g, in, group, eta, lambda);
        RcExact rc =
            exact_rc(g, params.p, params.q, RcCounting::wired(lambda));
        PartialOrder order = coordinatewise_order(grey.dist.space());
        ok &= dominates(grey.dist, rc.dist, order).dominated;
      }
    }
    add(report, "graphical law is dominated by its cluster-weighted envelope",
        ok, "flow witnesses found for every instance");
  }

  {
    // nested plus-boundary laws: smaller windows are stochastically larger
    Graph g = Graph::box(2, 5, Topology::free);
    Model ising = make_ising(0.0, 0.45);
    SpinConfig plus(g.num_vertices(), +1);
    auto block = [&](int radius) {
      std::vector<VertexId> m;
      for (int i = 2 - radius; i <= 2 + radius; ++i)
        for (int j = 2 - radius; j <= 2 + radius; ++j)
          m.push_back(g.index_of({i, j}));
      return Region(m, g.num_vertices());
    };
    Region small = block(0), big = block(1);
    GibbsExact mu_small = exact_gibbs(g, ising.interaction, small, plus);
    GibbsExact mu_big = exact_gibbs(g, ising.interaction, big, plus);
    // restrict the big-window law to the small window's site
    int slot = 0;
    while (mu_big.sites[slot] != mu_small.sites[0]) ++slot;
    FiniteDistribution restricted = mu_big.dist.marginal({slot});
    PartialOrder order = coordinatewise_order(restricted.space());
    bool ok = dominates(restricted, mu_small.dist, order).dominated;
    double p_small = mu_small.dist.prob(1);
    KahanSum acc;
    for (int64_t o = 0; o < restricted.space().size(); ++o)
      if (restricted.space().digit(o, 0) == 1) acc.add(restricted.prob(o));
    add(report, "plus-boundary single-spin law shrinks with the window",
        ok && acc.value() <= p_small + 1e-12,
        "P(+) " + fmt(acc.value()) + " (5x5 window) vs " + fmt(p_small) +
            " (single site)");
  }
  return report;
}

CheckReport check_couplings() {
  CheckReport report{"couplings", {}};

  {
    // optimal coupling attains the half-L1 distance
    Graph g = Graph::custom(3, {{0, 1}, {1, 2}});
    RcExact a = exact_rc(g, 0.3, 2.0, RcCounting::free());
    RcExact b = exact_rc(g, 0.6, 1.5, RcCounting::free());
    Coupling c = optimal_coupling(a.dist, b.dist);
    double tv = tv_distance(a.dist, b.dist);
    bool ok = std::abs(c.prob_not_equal() - tv) < 1e-12;
    std::vector<double> m1 = c.first_marginal(), m2 = c.second_marginal();
    for (int64_t o = 0; o < a.dist.space().size(); ++o) {
      ok &= std::abs(m1[o] - a.dist.prob(o)) < 1e-12;
      ok &= std::abs(m2[o] - b.dist.prob(o)) < 1e-12;
    }
    add(report, "optimal coupling attains the variation distance", ok,
        "P(X != X') = " + fmt(c.prob_not_equal()));
  }

  {
    // conditional-monotonicity: edge-cluster conditionals pass, the site
    // analogue on a 5-star fails
    Graph path = Graph::custom(4, {{0, 1}, {1, 2}, {2, 3}});
    RcExact rc = exact_rc(path, 0.5, 2.0, RcCounting::free());
    HolleyCheckResult edge_ok = holley_check(rc.dist, rc.dist);
    Graph star = Graph::custom(
        5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    FiniteDistribution site_rc = exact_site_rc(star, 0.5, 2.0);
    HolleyCheckResult site_bad = holley_check(site_rc, site_rc);
    add(report, "edge conditionals are monotone, site conditionals are not",
        edge_ok.holds && !site_bad.holds,
        site_bad.holds ? "expected a counterexample on the star"
                       : site_bad.counterexample);
  }

  {
    // positive correlations: product and cluster-weighted laws pass, a
    // crafted anti-aligned two-bit law fails
    Graph cycle = Graph::custom(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    FkgCheckResult rc_ok = fkg_check(exact_rc(cycle, 0.5, 2.0,
                                              RcCounting::free())
                                         .dist);
    Graph two = Graph::custom(2, {{0, 1}});
    FkgCheckResult prod_ok = fkg_check(exact_rc(two, 0.37, 1.0,
                                                RcCounting::free())
                                           .dist);
    OutcomeSpace bits(2, 2);
    std::vector<double> w = {std::log(0.1), std::log(0.4), std::log(0.4),
                             std::log(0.1)};
    FkgCheckResult bad = fkg_check(FiniteDistribution(bits, w, false));
    add(report, "positive-correlation check and its counterexample",
        rc_ok.holds && prod_ok.holds && !bad.holds,
        bad.holds ? "anti-aligned law slipped through" : bad.counterexample);
  }

  {
    // disagreement coupling: marginals and product-law domination
    Graph g = Graph::box(2, 4, Topology::free);
    std::vector<VertexId> block;
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j) block.push_back(g.index_of({i, j}));
    Region lambda(block, g.num_vertices());
    Model ising = make_ising(0.0, 0.4);
    SpinConfig plus(g.num_vertices(), +1), minus(g.num_vertices(), -1);
    DisagreementExact dc = disagreement_coupling_exact(
        g, ising.interaction, lambda, plus, minus);
    GibbsExact mu = exact_gibbs(g, ising.interaction, lambda, plus);
    GibbsExact nu = exact_gibbs(g, ising.interaction, lambda, minus);
    std::vector<double> m1 = dc.coupling.first_marginal();
    std::vector<double> m2 = dc.coupling.second_marginal();
    double worst = 0;
    for (int64_t o = 0; o < mu.dist.space().size(); ++o) {
      worst = std::max(worst, std::abs(m1[o] - mu.dist.prob(o)));
      worst = std::max(worst, std::abs(m2[o] - nu.dist.prob(o)));
    }
    double px = oscillation_px(g, ising.interaction, block[0]);
    OutcomeSpace ind(lambda.size(), 2);
    std::vector<double> bern(ind.size());
    for (int64_t o = 0; o < ind.size(); ++o) {
      double lw = 0;
      for (int s = 0; s < ind.num_slots(); ++s)
        lw += ind.digit(o, s) ? std::log(px) : std::log1p(-px);
      bern[o] = lw;
    }
    FiniteDistribution psi(ind, bern, false);
    PartialOrder order = coordinatewise_order(ind);
    bool dominated = dominates(dc.disagreement_law, psi, order).dominated;
    add(report, "disagreement coupling reproduces marginals and is "
                "product-dominated",
        worst < 1e-12 && dc.path_property && dominated,
        "max marginal deviation " + fmt(worst));
  }
  return report;
}

CheckReport check_concavity() {
  CheckReport report{"concavity", {}};
  std::vector<Graph> graphs = connected_graphs_up_to(4);
  double worst = -1;
  for (const Graph& g : graphs) {
    if (g.num_vertices() < 3) continue;
    std::vector<VertexId> interior;
    for (int v = 0; v + 1 < g.num_vertices(); ++v) interior.push_back(v);
    Region lambda(interior, g.num_vertices());
    RcCounting counting = RcCounting::wired(lambda);
    VertexId x = 0, y = 1;
    auto connect_prob = [&](const std::vector<double>& k_bond) {
      std::vector<double> p(g.num_bonds());
      for (int b = 0; b < g.num_bonds(); ++b)
        p[b] = -std::expm1(-2.0 * k_bond[b]);
      RcExact rc = exact_rc(g, p, 2.0, counting);
      KahanSum acc;
      for (int64_t o = 0; o < rc.dist.space().size(); ++o) {
        BondConfig full(g.num_bonds(), 0);
        for (size_t i = 0; i < rc.slots.size(); ++i)
          full[rc.slots[i]] = uint8_t(rc.dist.space().digit(o, int(i)));
        // wired connectivity: fuse the complement of the window
        UnionFind uf(g.num_vertices());
        int super = -1;
        for (int v = 0; v < g.num_vertices(); ++v)
          if (!lambda.contains(v)) {
            if (super < 0)
              super = v;
            else
              uf.unite(super, v);
          }
        for (int b = 0; b < g.num_bonds(); ++b)
          if (full[b]) uf.unite(g.bond(b).u, g.bond(b).v);
        if (uf.connected(x, y)) acc.add(rc.dist.prob(o));
      }
      return acc.value();
    };
    const double h = 1e-3;
    for (double k0 : {0.1, 0.7, 1.3, 2.0})
      for (int b = 0; b < g.num_bonds(); ++b) {
        std::vector<double> k(g.num_bonds(), k0);
        double f0 = connect_prob(k);
        k[b] = k0 + h;
        double fp = connect_prob(k);
        k[b] = k0 - h;
        double fm = connect_prob(k);
        worst = std::max(worst, fp - 2 * f0 + fm);
      }
  }
  add(report, "connection probability is concave in each coupling strength",
      worst <= 1e-7, "max centered second difference " + fmt(worst));
  return report;
}

}  // namespace

CheckReport run_check_suite(const std::string& name) {
  if (name == "couplings") return check_couplings();
  if (name == "domination") return check_domination();
  if (name == "rc-identities") return check_rc_identities();
  if (name == "concavity") return check_concavity();
  throw std::invalid_argument("unknown check suite '" + name + "'");
}

std::vector<CheckReport> run_check_suites(const std::string& which) {
  if (which == "all")
    return {check_couplings(), check_domination(), check_rc_identities(),
            check_concavity()};
  return {run_check_suite(which)};
}

}  // namespace gibbs
