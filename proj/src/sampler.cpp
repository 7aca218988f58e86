#include "gibbs/sampler.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gibbs/parallel.hpp"

namespace gibbs {

void heat_bath_sweep(const Graph& g, const Interaction& in,
                     const Region& lambda, SpinConfig& sigma, Rng& rng) {
  const SpinAlphabet& alpha = in.alphabet();
  const std::vector<VertexId>& sites = lambda.members();
  int ns = lambda.size();
  std::vector<double> logw(alpha.size());
  for (int step = 0; step < ns; ++step) {
    VertexId x = sites[rng.next_index(ns)];
    double max_logw = -kInfiniteEnergy;
    for (int a = 0; a < alpha.size(); ++a) {
      double e = in.self_energy_by_index(a);
      for (VertexId y : g.neighbors(x)) {
        e += in.pair_energy(alpha.value(a), sigma[y]);
        if (e == kInfiniteEnergy) break;
      }
      logw[a] = e == kInfiniteEnergy ? -kInfiniteEnergy : -in.beta() * e;
      max_logw = std::max(max_logw, logw[a]);
    }
    if (max_logw == -kInfiniteEnergy) {
      std::ostringstream os;
      os << "heat_bath_sweep: empty conditional support at vertex " << x;
      throw std::runtime_error(os.str());
    }
    double z = 0;
    for (int a = 0; a < alpha.size(); ++a) z += std::exp(logw[a] - max_logw);
    double u = rng.next_double() * z;
    double acc = 0;
    int chosen = alpha.size() - 1;
    for (int a = 0; a < alpha.size(); ++a) {
      acc += std::exp(logw[a] - max_logw);
      if (u < acc) {
        chosen = a;
        break;
      }
    }
    sigma[x] = alpha.value(chosen);
  }
}

SwParams make_sw_params(const Graph& g, const Region& lambda, int q,
                        double beta, std::optional<Spin> boundary_spin) {
  return make_sw_params(g, lambda, q, beta,
                        std::vector<double>(g.num_bonds(), 1.0),
                        boundary_spin);
}

SwParams make_sw_params(const Graph& g, const Region& lambda, int q,
                        double beta, const std::vector<double>& j_bond,
                        std::optional<Spin> boundary_spin) {
  if (q < 2) throw std::invalid_argument("make_sw_params: q >= 2");
  if (static_cast<int>(j_bond.size()) != g.num_bonds())
    throw std::invalid_argument("make_sw_params: coupling size mismatch");
  SwParams params;
  params.q = q;
  params.boundary_spin = boundary_spin;
  BondSets sets = bond_sets(g, lambda);
  params.slots = boundary_spin ? sets.touching : sets.inner;
  params.p_slot.resize(params.slots.size());
  for (size_t i = 0; i < params.slots.size(); ++i) {
    double j = j_bond[params.slots[i]];
    if (j < 0) throw std::invalid_argument("make_sw_params: J must be >= 0");
    params.p_slot[i] = -std::expm1(-2.0 * beta * j);
  }
  return params;
}

void swendsen_wang_sweep(const Graph& g, const SwParams& params,
                         const Region& lambda, SpinConfig& sigma, Rng& rng,
                         std::vector<uint8_t>* bonds_out) {
  std::vector<uint8_t> open =
      potts_to_rc(g, params.p_slot, params.slots, sigma, rng);
  std::optional<ForcedSpin> forced;
  if (params.boundary_spin) {
    std::vector<VertexId> outside;
    for (int v = 0; v < g.num_vertices(); ++v)
      if (!lambda.contains(v)) outside.push_back(v);
    forced = ForcedSpin{Region(std::move(outside), g.num_vertices()),
                        *params.boundary_spin};
  }
  SpinConfig fresh = rc_to_potts(g, params.q, open, params.slots, rng, forced);
  for (VertexId v : lambda.members()) sigma[v] = fresh[v];
  if (bonds_out) *bonds_out = std::move(open);
}

void sweeny_sweep(const Graph& g, const RcParams& params,
                  const std::vector<BondId>& slots, std::vector<uint8_t>& open,
                  Rng& rng) {
  int nb = static_cast<int>(slots.size());
  for (int step = 0; step < nb; ++step) {
    int slot = static_cast<int>(rng.next_index(nb));
    rc_heatbath_step(g, params, slots, open, slot, rng);
  }
}

// --- CFTP --------------------------------------------------------------------

namespace {

// Heat-bath update for the Ising model written as a monotone map of the
// shared uniform: new spin is +1 iff u < P(+1 | neighborhood).
void ising_update(const Graph& g, double h, double beta, SpinConfig& sigma,
                  VertexId x, double u) {
  double field = h;
  for (VertexId y : g.neighbors(x)) field += sigma[y];
  double p_plus = 1.0 / (1.0 + std::exp(-2.0 * beta * field));
  sigma[x] = u < p_plus ? +1 : -1;
}

}  // namespace

CftpResult cftp_ising(const Graph& g, double h, double beta,
                      const Region& lambda, const SpinConfig& eta, Rng& rng,
                      const CftpOptions& options) {
  const std::vector<VertexId>& sites = lambda.members();
  int ns = lambda.size();
  if (ns == 0) return {eta, 0, true};
  for (Spin s : eta)
    if (s != -1 && s != 1)
      throw std::invalid_argument("cftp_ising: boundary must be -1/+1");
  uint64_t stream = rng.next_u64();  // one fresh stream per exact draw
  Rng draws(stream);
  CftpResult res;

  for (int64_t horizon = 1;; horizon *= 2) {
    if (horizon > options.max_sweeps)
      throw std::runtime_error("cftp_ising: no coalescence within horizon cap");
    SpinConfig lower = eta, upper = eta;
    for (VertexId v : sites) {
      lower[v] = -1;
      upper[v] = +1;
    }
    // Sweep at time -s (s = horizon..1) replays the draw block for s.
    for (int64_t s = horizon; s >= 1; --s) {
      for (int k = 0; k < ns; ++k) {
        draws.seek(2 * (static_cast<uint64_t>(s - 1) * ns + k));
        VertexId x = sites[draws.next_index(ns)];
        double u = draws.next_double();
        ising_update(g, h, beta, lower, x, u);
        ising_update(g, h, beta, upper, x, u);
      }
      for (VertexId v : sites)
        if (lower[v] > upper[v]) res.sandwich_held = false;
    }
    bool coalesced = true;
    for (VertexId v : sites) coalesced &= (lower[v] == upper[v]);
    if (coalesced) {
      res.config = lower;
      res.horizon = horizon;
      return res;
    }
  }
}

// --- measurement --------------------------------------------------------------

SummaryStats summarize(const std::vector<double>& series) {
  SummaryStats stats;
  int64_t n = static_cast<int64_t>(series.size());
  stats.count = n;
  if (n == 0) return stats;
  KahanSum sum;
  for (double v : series) sum.add(v);
  stats.mean = sum.value() / n;
  KahanSum sq;
  for (double v : series) sq.add((v - stats.mean) * (v - stats.mean));
  stats.variance = n > 1 ? sq.value() / (n - 1) : 0.0;
  if (n < 8 || stats.variance == 0) {
    stats.tau_int = 0.5;
    stats.stderr_ = n > 0 ? std::sqrt(stats.variance / n) : 0.0;
    return stats;
  }
  // Integrated autocorrelation time with the self-consistent window
  // W >= 6 tau(W).
  int64_t max_lag = n / 4;
  double tau = 0.5;
  int64_t window = 1;
  std::vector<double> centered(series);
  for (double& v : centered) v -= stats.mean;
  double c0 = stats.variance * (n - 1) / n;
  for (int64_t t = 1; t <= max_lag; ++t) {
    double ct = 0;
    for (int64_t i = 0; i + t < n; ++i) ct += centered[i] * centered[i + t];
    ct /= n;
    tau += ct / c0;
    window = t;
    if (double(t) >= 6.0 * tau) break;
    if (ct < 0 && t > 2) break;
  }
  (void)window;
  stats.tau_int = std::max(0.5, tau);
  stats.stderr_ = std::sqrt(2.0 * stats.tau_int * stats.variance / n);
  return stats;
}

MeasurementSeries measure(const std::function<void()>& sweep,
                          const std::function<std::vector<double>()>& observe,
                          const std::vector<std::string>& names,
                          const Schedule& schedule) {
  if (schedule.thinning < 1)
    throw std::invalid_argument("measure: thinning >= 1");
  MeasurementSeries out;
  out.names = names;
  out.schedule = schedule;
  out.series.assign(names.size(), {});
  for (auto& s : out.series)
    s.reserve(static_cast<size_t>(schedule.samples));
  for (int64_t i = 0; i < schedule.burn_in; ++i) sweep();
  for (int64_t row = 0; row < schedule.samples; ++row) {
    for (int64_t t = 0; t < schedule.thinning; ++t) sweep();
    std::vector<double> vals = observe();
    if (vals.size() != names.size())
      throw std::invalid_argument("measure: observable row size mismatch");
    for (size_t i = 0; i < vals.size(); ++i) out.series[i].push_back(vals[i]);
  }
  return out;
}

double magnetization(const SpinConfig& sigma, const Region& lambda) {
  if (lambda.empty()) return 0;
  KahanSum sum;
  for (VertexId v : lambda.members()) sum.add(sigma[v]);
  return sum.value() / lambda.size();
}

double potts_order_parameter(const SpinConfig& sigma, const Region& lambda,
                             int q) {
  if (lambda.empty() || q < 2) return 0;
  std::vector<int> counts(q + 1, 0);
  for (VertexId v : lambda.members()) {
    if (sigma[v] < 1 || sigma[v] > q)
      throw std::invalid_argument("potts_order_parameter: spin out of range");
    ++counts[sigma[v]];
  }
  int max_count = 0;
  for (int a = 1; a <= q; ++a) max_count = std::max(max_count, counts[a]);
  double f = double(max_count) / lambda.size();
  return (q * f - 1.0) / (q - 1.0);
}

double energy_per_site(const Graph& g, const Interaction& in,
                       const SpinConfig& sigma, const Region& lambda) {
  if (lambda.empty()) return 0;
  KahanSum sum;
  for (const Bond& b : g.bonds()) {
    if (!lambda.contains(b.u) && !lambda.contains(b.v)) continue;
    sum.add(in.pair_energy(sigma[b.u], sigma[b.v]));
  }
  for (VertexId v : lambda.members()) sum.add(in.self_energy(sigma[v]));
  return sum.value() / lambda.size();
}

}  // namespace gibbs
