#ifndef GIBBS_COUPLING_HPP
#define GIBBS_COUPLING_HPP

#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "gibbs/exact.hpp"
#include "gibbs/lattice.hpp"
#include "gibbs/model.hpp"
#include "gibbs/percolation.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

// Sparse joint law of an ordered pair over one shared outcome space; both
// marginals recoverable by summation.
struct Coupling {
  OutcomeSpace space;
  std::vector<std::tuple<int64_t, int64_t, double>> mass;

  double prob_not_equal() const;
  std::vector<double> first_marginal() const;
  std::vector<double> second_marginal() const;
  void write_csv(std::ostream& os) const;
};

// --- Edwards-Sokal maps -----------------------------------------------------

// Bond slots get value 1 with probability p_slot when endpoint spins agree,
// 0 surely otherwise.
std::vector<uint8_t> potts_to_rc(const Graph& g,
                                 const std::vector<double>& p_slot,
                                 const std::vector<BondId>& slots,
                                 const SpinConfig& sigma, Rng& rng);
BondConfig potts_to_rc(const Graph& g, double beta, const SpinConfig& sigma,
                       Rng& rng);  // all bonds, p = 1 - exp(-2 beta)

struct ForcedSpin {
  Region region;  // clusters meeting this region are forced
  Spin spin;
};

// Uniform i.i.d. spin per open cluster; forced clusters get the fixed spin.
// Spin values are the alphabet of the q-state model (1..q).
SpinConfig rc_to_potts(const Graph& g, int q, const std::vector<uint8_t>& open,
                       const std::vector<BondId>& slots, Rng& rng,
                       const std::optional<ForcedSpin>& forced = std::nullopt);

// Widom-Rowlinson <-> site-random-cluster maps at p = lambda/(1+lambda).
SpinConfig site_rc_to_wr(const Graph& g, const SiteConfig& open, Rng& rng);
SiteConfig wr_to_site_rc(const SpinConfig& sigma);

// Explicit joint of the spin-and-edge measure, marginalized numerically;
// independent of the closed-form random-cluster weights.
struct EsMarginals {
  std::vector<double> vertex;  // over q^V in outcome order
  std::vector<double> edge;    // over 2^B in outcome order
};
EsMarginals es_joint_marginals(const Graph& g, double p, int q);

// --- optimal coupling and Holley machinery ----------------------------------

// Diagonal carries the pointwise minimum; residuals couple as a product.
// Achieves P(X != X') = tv_distance(mu, nu).
Coupling optimal_coupling(const FiniteDistribution& mu,
                          const FiniteDistribution& nu);

using SiteConditional =
    std::function<std::vector<double>(VertexId, const SpinConfig&)>;

// Single-site Gibbs conditional of an interaction (probabilities by
// alphabet index). Throws when the boundary pattern leaves no feasible spin.
SiteConditional gibbs_site_conditional(const Graph& g, const Interaction& in);

struct HolleyChainResult {
  SpinConfig x;
  SpinConfig x_prime;
  bool order_held = true;        // once attained, never broken
  int64_t violation_step = -1;   // first step that broke it, if any
};

// Coupled Gibbs samplers with shared site choice and shared uniform,
// updating by inverse tail-CDF. Preserves x <= x' when the conditionals
// satisfy the pairwise monotonicity condition (holley_check).
HolleyChainResult holley_coupled_chain(const Graph& g,
                                       const SpinAlphabet& alphabet,
                                       const SiteConditional& mu,
                                       const SiteConditional& nu,
                                       SpinConfig x, SpinConfig x_prime,
                                       int64_t steps, Rng& rng);

struct HolleyCheckResult {
  bool holds = true;
  std::string counterexample;  // empty when holds
};

// Exhaustive verification of the conditional-monotonicity inequality for
// all sites, levels, and ordered pairs of positive-probability exteriors.
HolleyCheckResult holley_check(const FiniteDistribution& mu,
                               const FiniteDistribution& nu);

struct FkgCheckResult {
  bool holds = true;
  bool exhaustive = true;      // false = randomized search only
  std::string counterexample;  // witness pair of increasing indicators
};

// Positive-correlations check. Exhaustive over all pairs of up-sets for
// binary spaces with <= 5 slots; degrades to randomized increasing pairs
// above that (a miss is then possible and flagged via `exhaustive`).
FkgCheckResult fkg_check(const FiniteDistribution& mu, int random_pairs = 4000,
                         uint64_t seed = 0x666b67);

// All up-set masks of {0,1}^n (bit o of the mask = membership of outcome o).
std::vector<uint32_t> upset_masks(int n);

// --- oscillation and Dobrushin coefficients ---------------------------------

// Max over boundary-pattern pairs of the single-site conditional TV.
double oscillation_px(const Graph& g, const Interaction& in, VertexId x);

// Sum over neighbors y of the max single-site TV over pattern pairs
// differing only at y.
double dobrushin_coefficient(const Graph& g, const Interaction& in,
                             VertexId x);

// --- disagreement couplings -------------------------------------------------

struct DisagreementExact {
  Coupling coupling;                     // over S^Lambda x S^Lambda
  FiniteDistribution disagreement_law;   // over {0,1}^Lambda
  std::vector<VertexId> sites;           // slot order (= lambda members)
  bool path_property = true;             // disagreement implies boundary path
};

// Site-by-site construction: scan order is the fixed integer vertex order;
// at each step the smallest still-undecided vertex with a disagreeing
// decided neighbor is coupled optimally, and any fully-agreeing remainder
// is coupled diagonally. The output law depends on this documented order.
DisagreementExact disagreement_coupling_exact(const Graph& g,
                                              const Interaction& in,
                                              const Region& lambda,
                                              const SpinConfig& eta,
                                              const SpinConfig& eta_prime,
                                              const ExactOptions& opts = {});

std::pair<SpinConfig, SpinConfig> disagreement_coupling_sample(
    const Graph& g, const Interaction& in, const Region& lambda,
    const SpinConfig& eta, const SpinConfig& eta_prime, Rng& rng,
    const ExactOptions& opts = {});

// Is there a path of disagreeing vertices from delta to a disagreeing
// vertex of the boundary of lambda? (Vertices off lambda disagree where
// eta != eta_prime.)
bool disagreement_path_exists(const Graph& g, const Region& lambda,
                              const SpinConfig& x, const SpinConfig& x_prime,
                              const Region& delta);

// Monte Carlo frequency of that event in an independent pair of samples.
double duplicated_disagreement_prob(
    const Graph& g, const Region& lambda,
    const std::function<SpinConfig(Rng&)>& sample_eta,
    const std::function<SpinConfig(Rng&)>& sample_eta_prime,
    const Region& delta, int samples, Rng& rng);

// Convenience overload drawing both sides exactly (cap-guarded).
double duplicated_disagreement_prob(const Graph& g, const Interaction& in,
                                    const Region& lambda,
                                    const SpinConfig& eta,
                                    const SpinConfig& eta_prime,
                                    const Region& delta, int samples, Rng& rng,
                                    const ExactOptions& opts = {});

}  // namespace gibbs

#endif
