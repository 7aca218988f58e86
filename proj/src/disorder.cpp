#include "gibbs/disorder.hpp"

#include <cmath>
#include <stdexcept>

#include "gibbs/parallel.hpp"
#include "gibbs/percolation.hpp"
#include "gibbs/sampler.hpp"

namespace gibbs {

DisorderLaw DisorderLaw::dilution(double p, double value) {
  if (p < 0 || p > 1) throw std::invalid_argument("dilution: p in [0,1]");
  if (value < 0) throw std::invalid_argument("dilution: value >= 0");
  DisorderLaw law;
  law.kind = Kind::dilution;
  law.retain = p;
  law.value = value;
  return law;
}

DisorderLaw DisorderLaw::gamma(double shape) {
  if (shape <= 0) throw std::invalid_argument("gamma: shape > 0");
  DisorderLaw law;
  law.kind = Kind::gamma;
  law.shape = shape;
  return law;
}

DisorderLaw DisorderLaw::discrete(std::vector<double> values,
                                  std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size())
    throw std::invalid_argument("discrete: bad tables");
  double total = 0;
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0)
      throw std::invalid_argument("discrete: couplings must be >= 0");
    if (probs[i] < 0) throw std::invalid_argument("discrete: negative prob");
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("discrete: probabilities must sum to 1");
  DisorderLaw law;
  law.kind = Kind::discrete;
  law.values = std::move(values);
  law.probs = std::move(probs);
  return law;
}

double sample_gamma(double shape, Rng& rng) {
  // Marsaglia-Tsang squeeze; shape < 1 boosted via U^(1/a).
  if (shape < 1.0) {
    double u = rng.next_double();
    while (u <= 0) u = rng.next_double();
    return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double u1 = rng.next_double();
    double u2 = rng.next_double();
    if (u1 <= 0) continue;
    double z = std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * M_PI * u2);  // standard normal
    double v = 1.0 + c * z;
    if (v <= 0) continue;
    v = v * v * v;
    double u = rng.next_double();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (u > 0 && std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

CouplingField sample_couplings(const Graph& g, const DisorderLaw& law,
                               Rng& rng) {
  CouplingField field;
  field.j.resize(g.num_bonds());
  for (double& j : field.j) {
    switch (law.kind) {
      case DisorderLaw::Kind::dilution:
        j = rng.next_bernoulli(law.retain) ? law.value : 0.0;
        break;
      case DisorderLaw::Kind::gamma:
        j = sample_gamma(law.shape, rng);
        break;
      case DisorderLaw::Kind::discrete: {
        double u = rng.next_double();
        double acc = 0;
        j = law.values.back();
        for (size_t i = 0; i < law.values.size(); ++i) {
          acc += law.probs[i];
          if (u < acc) {
            j = law.values[i];
            break;
          }
        }
        break;
      }
    }
  }
  return field;
}

namespace {

double p_of(double beta, double j) { return -std::expm1(-2.0 * beta * j); }

double p_prime_of(double p, double q) { return p / (p + q * (1.0 - p)); }

// E[f(J)] under Gamma(shape) by composite Simpson; the substitution
// t = s^(1/shape) removes the density singularity for shape < 1.
double gamma_expectation(double shape,
                         const std::function<double(double)>& f) {
  auto simpson = [](const std::function<double(double)>& h, double a, double b,
                    int intervals) {
    double step = (b - a) / intervals;
    double acc = h(a) + h(b);
    for (int i = 1; i < intervals; ++i)
      acc += h(a + i * step) * (i % 2 ? 4.0 : 2.0);
    return acc * step / 3.0;
  };
  double norm = std::tgamma(shape);
  if (shape >= 1.0) {
    double upper = shape + 40.0 * std::sqrt(std::max(1.0, shape)) + 40.0;
    auto h = [&](double t) {
      return f(t) * std::pow(t, shape - 1.0) * std::exp(-t) / norm;
    };
    return simpson(h, 1e-12, upper, 200000);
  }
  double upper = std::pow(shape + 80.0, shape);
  auto h = [&](double s) {
    double t = std::pow(s, 1.0 / shape);
    return f(t) * std::exp(-t) / (shape * norm);
  };
  return simpson(h, 1e-12, upper, 200000);
}

}  // namespace

BondProbs disorder_bond_probs(const CouplingField& field,
                              const DisorderLaw& law, double beta, double q) {
  if (beta < 0) throw std::invalid_argument("disorder_bond_probs: beta >= 0");
  if (q < 1) throw std::invalid_argument("disorder_bond_probs: q >= 1");
  BondProbs out;
  out.p.resize(field.j.size());
  out.p_prime.resize(field.j.size());
  KahanSum emp_p, emp_pp;
  for (size_t b = 0; b < field.j.size(); ++b) {
    out.p[b] = p_of(beta, field.j[b]);
    out.p_prime[b] = p_prime_of(out.p[b], q);
    emp_p.add(out.p[b]);
    emp_pp.add(out.p_prime[b]);
  }
  if (!field.j.empty()) {
    out.pbar_empirical = emp_p.value() / field.j.size();
    out.punder_empirical = emp_pp.value() / field.j.size();
  }
  switch (law.kind) {
    case DisorderLaw::Kind::dilution: {
      double p1 = p_of(beta, law.value);
      out.pbar = law.retain * p1;
      out.punder = law.retain * p_prime_of(p1, q);
      break;
    }
    case DisorderLaw::Kind::discrete: {
      KahanSum pb, pu;
      for (size_t i = 0; i < law.values.size(); ++i) {
        double p1 = p_of(beta, law.values[i]);
        pb.add(law.probs[i] * p1);
        pu.add(law.probs[i] * p_prime_of(p1, q));
      }
      out.pbar = pb.value();
      out.punder = pu.value();
      break;
    }
    case DisorderLaw::Kind::gamma: {
      // closed form: 1 - (1 + 2 beta)^(-shape)
      out.pbar = -std::expm1(-law.shape * std::log1p(2.0 * beta));
      out.punder = gamma_expectation(law.shape, [&](double t) {
        return p_prime_of(p_of(beta, t), q);
      });
      break;
    }
  }
  return out;
}

std::pair<double, double> dilution_beta_bounds(double p, double q,
                                               double p_c) {
  if (q < 1) throw std::invalid_argument("dilution_beta_bounds: q >= 1");
  if (!(p > p_c))
    throw std::invalid_argument("dilution_beta_bounds: requires p > p_c");
  double lower = -std::log((p - p_c) / p);
  double upper = -std::log((p - p_c) / (p * q));
  return {lower, upper};
}

QuenchedSummary quenched_experiment(const Graph& g, const DisorderLaw& law,
                                    double beta, int q, int replicas,
                                    int64_t sweeps, int64_t burn_in,
                                    VertexId source, const Region& target,
                                    const Region& lambda,
                                    std::optional<Spin> boundary_spin,
                                    uint64_t seed, bool parallel) {
  if (replicas < 2)
    throw std::invalid_argument("quenched_experiment: replicas >= 2");
  auto one_replica = [&](int r, Rng& rng) -> std::vector<double> {
    (void)r;
    CouplingField field = sample_couplings(g, law, rng);
    SwParams params = make_sw_params(g, lambda, q, beta, field.j,
                                     boundary_spin);
    // prune dead bonds (J = 0 forces them closed surely)
    {
      std::vector<BondId> slots;
      std::vector<double> ps;
      for (size_t i = 0; i < params.slots.size(); ++i)
        if (params.p_slot[i] > 0) {
          slots.push_back(params.slots[i]);
          ps.push_back(params.p_slot[i]);
        }
      params.slots = std::move(slots);
      params.p_slot = std::move(ps);
    }
    SpinConfig sigma(g.num_vertices(),
                     boundary_spin ? *boundary_spin : Spin(1));
    std::vector<uint8_t> bonds;
    for (int64_t t = 0; t < burn_in; ++t)
      swendsen_wang_sweep(g, params, lambda, sigma, rng, nullptr);
    KahanSum connect, order, open_frac;
    BondConfig full(g.num_bonds(), 0);
    for (int64_t t = 0; t < sweeps; ++t) {
      swendsen_wang_sweep(g, params, lambda, sigma, rng, &bonds);
      std::fill(full.begin(), full.end(), 0);
      int64_t open_count = 0;
      for (size_t i = 0; i < params.slots.size(); ++i) {
        full[params.slots[i]] = bonds[i];
        open_count += bonds[i];
      }
      connect.add(connected(g, full, source, target) ? 1.0 : 0.0);
      order.add(potts_order_parameter(sigma, lambda, q));
      open_frac.add(params.slots.empty()
                        ? 0.0
                        : double(open_count) / params.slots.size());
    }
    return {connect.value() / sweeps, order.value() / sweeps,
            open_frac.value() / sweeps};
  };

  std::vector<std::vector<double>> rows =
      replica_map(replicas, seed, one_replica, parallel);

  QuenchedSummary out;
  KahanSum m_sum, o_sum;
  for (int r = 0; r < replicas; ++r) {
    QuenchedReplica rep;
    rep.stream = Rng::derive(seed, 0x7265706cULL, static_cast<uint64_t>(r));
    rep.connect_frequency = rows[r][0];
    rep.order_parameter = rows[r][1];
    rep.open_bond_fraction = rows[r][2];
    out.replicas.push_back(rep);
    m_sum.add(rep.connect_frequency);
    o_sum.add(rep.order_parameter);
  }
  out.m_hat = m_sum.value() / replicas;
  out.order_hat = o_sum.value() / replicas;
  KahanSum m_var, o_var;
  for (const QuenchedReplica& rep : out.replicas) {
    m_var.add((rep.connect_frequency - out.m_hat) *
              (rep.connect_frequency - out.m_hat));
    o_var.add((rep.order_parameter - out.order_hat) *
              (rep.order_parameter - out.order_hat));
  }
  // Between-replica scatter already carries the within-replica noise; this
  // is the total-variance estimate of the double expectation's error.
  out.m_stderr = std::sqrt(m_var.value() / (replicas - 1) / replicas);
  out.order_stderr = std::sqrt(o_var.value() / (replicas - 1) / replicas);
  return out;
}

}  // namespace gibbs
