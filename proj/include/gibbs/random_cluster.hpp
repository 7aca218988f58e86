#ifndef GIBBS_RANDOM_CLUSTER_HPP
#define GIBBS_RANDOM_CLUSTER_HPP

#include <optional>
#include <vector>

#include "gibbs/exact.hpp"
#include "gibbs/lattice.hpp"
#include "gibbs/model.hpp"
#include "gibbs/percolation.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

// Parameters of a random-cluster law over a bond slot set. For wired and
// compactified boundaries the slots are the bonds touching the region and
// the complement acts as one fused, always-present vertex.
struct RcParams {
  std::vector<double> p_bond;  // per slot
  double q = 1.0;
  RcCounting counting;

  static RcParams uniform(const Graph& g, double p, double q,
                          RcCounting counting);
};

std::vector<BondId> rc_slots(const Graph& g, const RcCounting& counting);

// Single-edge conditional law: p when the endpoints of slot e are already
// connected (through the fused boundary for wired/compactified), else
// p/(p+(1-p)q).
double rc_conditional_edge(const Graph& g, const RcParams& params,
                           const std::vector<BondId>& slots,
                           const std::vector<uint8_t>& open, int slot);

// Heat-bath resampling of one slot; other bonds unchanged.
void rc_heatbath_step(const Graph& g, const RcParams& params,
                      const std::vector<BondId>& slots,
                      std::vector<uint8_t>& open, int slot, Rng& rng);

// Site analogue: p q^(1-kappa) / (p q^(1-kappa) + 1 - p) where kappa is
// the number of open clusters of eta (x removed) meeting x's neighborhood.
double src_conditional_site(const Graph& g, double p, double q,
                            const SiteConfig& open, VertexId x);
int src_kappa(const Graph& g, const SiteConfig& open, VertexId x);

// --- graphical (grey) representation ---------------------------------------

// Finite group on the alphabet indices 0..n-1.
struct GroupSpec {
  std::vector<std::vector<int>> mult;
  int identity = 0;

  static GroupSpec cyclic(int n);
  void validate() const;
  int inverse(int a) const;
  int size() const { return static_cast<int>(mult.size()); }
};

struct GreyParams {
  std::vector<double> r;  // R_a = exp(-beta u(a)) - 1, by group element
  double r_star;          // max R_a
  double r_bar;           // mean R_a
  double p;               // R*/(1+R*)
  double q;               // R*/R-bar
};

// Requires U(a,b) = u(inverse(a) b) with u <= 0 and V = 0; rejects
// interactions without that structure (shift U first if needed).
GreyParams grey_params(const Interaction& in, const GroupSpec& group);

// log of the graphical weight of omega over the slot bonds. With a boundary
// configuration the slots are the bonds touching lambda and spins off
// lambda are fixed; without one the slots are the bonds inside lambda.
// Computed by the per-cluster factorization.
double grey_log_weight(const Graph& g, const Interaction& in,
                       const GroupSpec& group,
                       const std::optional<SpinConfig>& eta,
                       const Region& lambda, const std::vector<BondId>& slots,
                       const std::vector<uint8_t>& open);

// Independent route: direct sum over all spin configurations on lambda.
double grey_log_weight_brute(const Graph& g, const Interaction& in,
                             const GroupSpec& group,
                             const std::optional<SpinConfig>& eta,
                             const Region& lambda,
                             const std::vector<BondId>& slots,
                             const std::vector<uint8_t>& open);

std::vector<BondId> grey_slots(const Graph& g,
                               const std::optional<SpinConfig>& eta,
                               const Region& lambda);

// Exact grey distribution over the slot bonds (factorized weights).
RcExact exact_grey(const Graph& g, const Interaction& in,
                   const GroupSpec& group,
                   const std::optional<SpinConfig>& eta, const Region& lambda,
                   const ExactOptions& opts = {});

}  // namespace gibbs

#endif
