#ifndef GIBBS_EXACT_HPP
#define GIBBS_EXACT_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <tuple>
#include <vector>

#include "gibbs/lattice.hpp"
#include "gibbs/model.hpp"
#include "gibbs/percolation.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

// Enumerated product space with a fixed, documented order: outcome id o
// spells its digits with slot 0 most significant, i.e.
//   digit(o, s) = (o / radix^(num_slots-1-s)) % radix.
// Slots follow increasing vertex/bond index; digits follow alphabet order.
// Oracle outputs are therefore byte-stable across runs.
class OutcomeSpace {
 public:
  OutcomeSpace(int num_slots, int radix);

  int num_slots() const { return num_slots_; }
  int radix() const { return radix_; }
  int64_t size() const { return size_; }

  int digit(int64_t outcome, int slot) const {
    return static_cast<int>((outcome / place_[slot]) % radix_);
  }
  std::vector<int> digits(int64_t outcome) const;
  int64_t pack(const std::vector<int>& digits) const;

  bool operator==(const OutcomeSpace& o) const {
    return num_slots_ == o.num_slots_ && radix_ == o.radix_;
  }

 private:
  int num_slots_;
  int radix_;
  int64_t size_;
  std::vector<int64_t> place_;
};

struct ExactOptions {
  int64_t cap = int64_t(1) << 24;  // maximum number of weighted states
  bool parallel = true;
};

// Exact probability vector in log-domain: prob(o) = exp(logw(o) - logZ).
class FiniteDistribution {
 public:
  FiniteDistribution(OutcomeSpace space, std::vector<double> log_weights,
                     bool parallel = true);

  const OutcomeSpace& space() const { return space_; }
  double log_normalizer() const { return log_z_; }
  double log_weight(int64_t o) const { return logw_[o]; }
  double prob(int64_t o) const;
  std::vector<double> probabilities() const;

  // Marginal over the given slots (ascending subset of slot indices).
  FiniteDistribution marginal(const std::vector<int>& slots) const;

  // Conditions on fixed digits at given (slot, digit) pairs; the result
  // lives on the remaining slots in their original order.
  FiniteDistribution condition(
      const std::vector<std::pair<int, int>>& fixed) const;

  int64_t sample(Rng& rng) const;  // inverse-CDF draw

  void write_csv(std::ostream& os) const;  // outcome-id, probability

 private:
  OutcomeSpace space_;
  std::vector<double> logw_;
  double log_z_;
};

// Half L1 distance of the probability vectors, optionally after
// marginalizing both onto the given slots.
double tv_distance(const FiniteDistribution& a, const FiniteDistribution& b,
                   const std::optional<std::vector<int>>& slots = std::nullopt);

// TV between an empirical histogram (counts over outcomes) and an exact law.
double tv_to_counts(const FiniteDistribution& exact,
                    const std::vector<int64_t>& counts);

struct PartialOrder {
  std::function<bool(int64_t, int64_t)> leq;
};

// Coordinatewise order induced by digit order (= alphabet order).
PartialOrder coordinatewise_order(const OutcomeSpace& space);

struct DominationResult {
  bool dominated = false;  // mu \preceq_D nu
  // Witness coupling on {(x, y) : x <= y}, present when dominated.
  std::vector<std::tuple<int64_t, int64_t, double>> witness;
};

// Strassen criterion decided by max-flow feasibility on the ordered
// support pairs; feasibility slack 1e-9 absorbs float noise.
DominationResult dominates(const FiniteDistribution& mu,
                           const FiniteDistribution& nu,
                           const PartialOrder& order);

// --- exact laws -----------------------------------------------------------

struct GibbsExact {
  FiniteDistribution dist;
  std::vector<VertexId> sites;  // slot order
  double log_z;                 // log Z_Lambda(beta, eta)
};

// Full conditional law on lambda given eta outside; weights
// exp(-beta H(sigma|eta)). Throws on cap overflow and on empty support.
GibbsExact exact_gibbs(const Graph& g, const Interaction& in,
                       const Region& lambda, const SpinConfig& eta,
                       const ExactOptions& opts = {});

// Streaming single-site marginal of the same law (no state vector kept;
// hard-constraint branches are pruned). Returns P(X(x) = a) by alphabet
// index a.
std::vector<double> exact_site_marginal(const Graph& g, const Interaction& in,
                                        const Region& lambda,
                                        const SpinConfig& eta, VertexId x,
                                        const ExactOptions& opts = {});

struct RcCounting {
  enum class Kind { free_counting, wired, compactified };
  Kind kind = Kind::free_counting;
  Region lambda;  // ignored for free counting

  static RcCounting free() { return {Kind::free_counting, {}}; }
  static RcCounting wired(Region lambda) {
    return {Kind::wired, std::move(lambda)};
  }
  static RcCounting compactified(Region lambda) {
    return {Kind::compactified, std::move(lambda)};
  }
};

struct RcExact {
  FiniteDistribution dist;
  std::vector<BondId> slots;  // bond ids, ascending
};

// Random-cluster law with per-bond probabilities. Free counting runs over
// all bonds of g and counts every component (isolated vertices included).
// Wired/compactified counting runs over the bonds touching lambda with the
// complement of lambda fused into one always-present super vertex; wired
// counts the interior clusters plus the fused boundary cluster,
// compactified only the clusters not touching the fused boundary.
RcExact exact_rc(const Graph& g, const std::vector<double>& p_bond, double q,
                 const RcCounting& counting, const ExactOptions& opts = {});
RcExact exact_rc(const Graph& g, double p, double q, const RcCounting& counting,
                 const ExactOptions& opts = {});

// Site analogue: weights over {0,1}^V with k(eta) = components of the open
// induced subgraph.
FiniteDistribution exact_site_rc(const Graph& g, double p, double q,
                                 const ExactOptions& opts = {});

// All clusters meeting lambda, with everything outside lambda fused; the
// count pair (wired, interior-only) used by the rc weights above.
struct WiredCounts {
  int meeting = 0;   // k(eta, lambda)
  int interior = 0;  // k-hat
};
WiredCounts wired_cluster_counts(const Graph& g,
                                 const std::vector<BondId>& slots,
                                 const std::vector<uint8_t>& open,
                                 const Region& lambda);

}  // namespace gibbs

#endif
