#ifndef GIBBS_SAMPLER_HPP
#define GIBBS_SAMPLER_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gibbs/coupling.hpp"
#include "gibbs/lattice.hpp"
#include "gibbs/model.hpp"
#include "gibbs/random_cluster.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

// One sweep = |lambda| single-site heat-bath updates at uniformly chosen
// sites. Throws (naming the site) when a boundary makes a site unsatisfiable.
void heat_bath_sweep(const Graph& g, const Interaction& in,
                     const Region& lambda, SpinConfig& sigma, Rng& rng);

// Swendsen-Wang over a window: bond slots are the bonds touching lambda
// when a forced boundary spin is given, else the bonds inside lambda.
struct SwParams {
  int q = 2;
  std::vector<BondId> slots;
  std::vector<double> p_slot;
  std::optional<Spin> boundary_spin;
};

SwParams make_sw_params(const Graph& g, const Region& lambda, int q,
                        double beta, std::optional<Spin> boundary_spin);
// Inhomogeneous couplings: p_b = 1 - exp(-2 beta J_b) per bond of g.
SwParams make_sw_params(const Graph& g, const Region& lambda, int q,
                        double beta, const std::vector<double>& j_bond,
                        std::optional<Spin> boundary_spin);

// One sweep: spins -> bonds -> spins. Returns nothing but exposes the bond
// configuration drawn in the middle step via *bonds_out when non-null.
void swendsen_wang_sweep(const Graph& g, const SwParams& params,
                         const Region& lambda, SpinConfig& sigma, Rng& rng,
                         std::vector<uint8_t>* bonds_out = nullptr);

// One sweep = |slots| single-bond heat-bath updates at uniform slots.
void sweeny_sweep(const Graph& g, const RcParams& params,
                  const std::vector<BondId>& slots, std::vector<uint8_t>& open,
                  Rng& rng);

// --- exact sampling via monotone coupling from the past ---------------------

struct CftpOptions {
  int64_t max_sweeps = int64_t(1) << 20;
};

struct CftpResult {
  SpinConfig config;
  int64_t horizon = 0;       // sweeps needed for coalescence
  bool sandwich_held = true; // lower <= upper at every step
};

// Exact draw from the Ising law on lambda with boundary eta. Two chains
// from the all-minus and all-plus states share site choices and uniforms;
// the horizon doubles (1, 2, 4, ...) reusing the same randomness blocks
// until the chains coalesce at time zero. Never returns a biased sample:
// exceeding the horizon cap throws.
CftpResult cftp_ising(const Graph& g, double h, double beta,
                      const Region& lambda, const SpinConfig& eta, Rng& rng,
                      const CftpOptions& options = {});

// --- measurement ------------------------------------------------------------

struct Schedule {
  int64_t burn_in = 0;
  int64_t thinning = 1;  // record every thinning-th sweep
  int64_t samples = 0;   // number of recorded rows
};

struct SummaryStats {
  double mean = 0;
  double variance = 0;
  double stderr_ = 0;   // autocorrelation-adjusted
  double tau_int = 0.5; // integrated autocorrelation time
  int64_t count = 0;
};

SummaryStats summarize(const std::vector<double>& series);

struct MeasurementSeries {
  std::vector<std::string> names;
  std::vector<std::vector<double>> series;  // per observable
  Schedule schedule;

  SummaryStats summary(int observable) const {
    return summarize(series[observable]);
  }
};

// Drives sweep() through burn-in and the thinned measurement schedule,
// recording observe() rows.
MeasurementSeries measure(const std::function<void()>& sweep,
                          const std::function<std::vector<double>()>& observe,
                          const std::vector<std::string>& names,
                          const Schedule& schedule);

// Stock observables.
double magnetization(const SpinConfig& sigma, const Region& lambda);
double potts_order_parameter(const SpinConfig& sigma, const Region& lambda,
                             int q);  // (q f_max - 1)/(q - 1)
double energy_per_site(const Graph& g, const Interaction& in,
                       const SpinConfig& sigma, const Region& lambda);

}  // namespace gibbs

#endif
