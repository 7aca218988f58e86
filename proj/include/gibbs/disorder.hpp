#ifndef GIBBS_DISORDER_HPP
#define GIBBS_DISORDER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "gibbs/lattice.hpp"
#include "gibbs/model.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

// i.i.d. law of the nonnegative bond couplings.
struct DisorderLaw {
  enum class Kind { dilution, gamma, discrete };
  Kind kind = Kind::dilution;
  double retain = 1.0;  // dilution: P(J = value)
  double value = 1.0;   // dilution: the retained coupling
  double shape = 1.0;   // gamma shape a (mean a)
  std::vector<double> values;  // discrete support
  std::vector<double> probs;

  static DisorderLaw dilution(double p, double value = 1.0);
  static DisorderLaw gamma(double shape);
  static DisorderLaw discrete(std::vector<double> values,
                              std::vector<double> probs);
};

struct CouplingField {
  std::vector<double> j;  // per bond, >= 0
};

CouplingField sample_couplings(const Graph& g, const DisorderLaw& law,
                               Rng& rng);

double sample_gamma(double shape, Rng& rng);

// Per-bond p_b = 1 - exp(-2 beta J_b) and p_b' = p_b / (p_b + q(1 - p_b)),
// plus the law-level means p-bar and p-under (closed form for dilution and
// discrete, quadrature for gamma) and their empirical counterparts.
struct BondProbs {
  std::vector<double> p;
  std::vector<double> p_prime;
  double pbar = 0;
  double punder = 0;
  double pbar_empirical = 0;
  double punder_empirical = 0;
};

BondProbs disorder_bond_probs(const CouplingField& field,
                              const DisorderLaw& law, double beta, double q);

// Logarithmic bounds on 2 beta_c for the diluted q-state ferromagnet:
// -ln((p - p_c)/p) <= 2 beta_c <= -ln((p - p_c)/(p q)). Requires p > p_c.
std::pair<double, double> dilution_beta_bounds(double p, double q, double p_c);

// Quenched experiment: per disorder replica, prune zero bonds, run the
// cluster chain with bondwise open probabilities, and record the frequency
// of {source <-> target} in the bond layer together with the spin order
// parameter. Aggregation treats replicas as the outer level of the
// variance.
struct QuenchedReplica {
  uint64_t stream = 0;
  double open_bond_fraction = 0;  // of the retained bonds
  double connect_frequency = 0;
  double order_parameter = 0;
};

struct QuenchedSummary {
  std::vector<QuenchedReplica> replicas;
  double m_hat = 0;         // mean connection frequency
  double m_stderr = 0;      // between-replica stderr (total variance)
  double order_hat = 0;
  double order_stderr = 0;
};

QuenchedSummary quenched_experiment(const Graph& g, const DisorderLaw& law,
                                    double beta, int q, int replicas,
                                    int64_t sweeps, int64_t burn_in,
                                    VertexId source, const Region& target,
                                    const Region& lambda,
                                    std::optional<Spin> boundary_spin,
                                    uint64_t seed, bool parallel = true);

}  // namespace gibbs

#endif
