#ifndef GIBBS_PARALLEL_HPP
#define GIBBS_PARALLEL_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gibbs/lattice.hpp"
#include "gibbs/percolation.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

int max_threads();

// Streaming log-sum-exp accumulator. Merging is associative in exact
// arithmetic; the kernels below always merge fixed blocks in index order,
// so serial and OpenMP runs produce bit-identical results.
class LogSum {
 public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > max_) {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      sum_ += std::exp(log_term - max_);
    }
  }
  void merge(const LogSum& o) {
    if (o.max_ == -std::numeric_limits<double>::infinity()) return;
    if (o.max_ > max_) {
      sum_ = sum_ * std::exp(max_ - o.max_) + o.sum_;
      max_ = o.max_;
    } else {
      sum_ += o.sum_ * std::exp(o.max_ - max_);
    }
  }
  double value() const {
    if (max_ == -std::numeric_limits<double>::infinity()) return max_;
    return max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

// Neumaier compensated sum, for probability-domain accumulation where
// plain summation noise would exceed the 1e-12 tolerances.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

constexpr int kReductionBlocks = 256;

// Fills out[i] = fn(i). Slots are independent, so the parallel result is
// identical to the serial one.
template <class Fn>
void parallel_fill(std::vector<double>& out, Fn&& fn, bool parallel) {
  int64_t n = static_cast<int64_t>(out.size());
#ifdef _OPENMP
  if (parallel && n > 4096) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) out[i] = fn(i);
    return;
  }
#endif
  (void)parallel;
  for (int64_t i = 0; i < n; ++i) out[i] = fn(i);
}

// log(sum_i exp(log_term(i))) over i < n via a fixed block partition.
template <class Fn>
double block_logsumexp(int64_t n, Fn&& log_term, bool parallel) {
  int blocks = static_cast<int>(std::min<int64_t>(kReductionBlocks, n));
  if (blocks <= 0) return -std::numeric_limits<double>::infinity();
  std::vector<LogSum> partial(blocks);
  auto run_block = [&](int b) {
    int64_t lo = n * b / blocks, hi = n * (b + 1) / blocks;
    for (int64_t i = lo; i < hi; ++i) partial[b].add(log_term(i));
  };
#ifdef _OPENMP
  if (parallel && n > 4096) {
#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < blocks; ++b) run_block(b);
  } else
#endif
  {
    (void)parallel;
    for (int b = 0; b < blocks; ++b) run_block(b);
  }
  LogSum total;
  for (int b = 0; b < blocks; ++b) total.merge(partial[b]);
  return total.value();
}

// Monte Carlo kernels. Every sample s draws from its own derived stream
// Rng(derive(seed, s)), and per-sample results are written to slot s before
// the serial reduction, so thread count never changes the output.

struct CrossingSweepResult {
  std::vector<double> crossing_frequency;  // per grid point
  std::vector<double> crossing_stderr;
  std::vector<double> mean_cluster_size;   // size-weighted mean
  std::vector<double> largest_fraction;
};

// One uniform field per sample drives every p level (nested coupling), so
// crossing indicators are monotone in p sample by sample.
CrossingSweepResult crossing_sweep(const Graph& g,
                                   const std::vector<double>& p_grid,
                                   int samples, Structure structure,
                                   CrossingMode mode, uint64_t seed,
                                   bool parallel);

struct ConnectionSweepResult {
  std::vector<double> frequency;
  std::vector<double> stderr_;
};

// Frequency of {source <-> target} under Bernoulli(p) marks, same nested
// construction as crossing_sweep.
ConnectionSweepResult connection_sweep(const Graph& g,
                                       const std::vector<double>& p_grid,
                                       int samples, Structure structure,
                                       VertexId source, const Region& target,
                                       uint64_t seed, bool parallel);

// Runs fn(replica, rng) for each replica with a derived stream; results
// ordered by replica id.
std::vector<std::vector<double>> replica_map(
    int replicas, uint64_t seed,
    const std::function<std::vector<double>(int, Rng&)>& fn, bool parallel);

}  // namespace gibbs

#endif
