#include "gibbs/parallel.hpp"

#include <stdexcept>

namespace gibbs {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

template <class PerSample>
void run_samples(int samples, uint64_t seed, bool parallel, PerSample body) {
#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (int s = 0; s < samples; ++s) {
      Rng rng(Rng::derive(seed, static_cast<uint64_t>(s)));
      body(s, rng);
    }
    return;
  }
#endif
  (void)parallel;
  for (int s = 0; s < samples; ++s) {
    Rng rng(Rng::derive(seed, static_cast<uint64_t>(s)));
    body(s, rng);
  }
}

}  // namespace

CrossingSweepResult crossing_sweep(const Graph& g,
                                   const std::vector<double>& p_grid,
                                   int samples, Structure structure,
                                   CrossingMode mode, uint64_t seed,
                                   bool parallel) {
  if (samples <= 0) throw std::invalid_argument("crossing_sweep: samples > 0");
  int np = static_cast<int>(p_grid.size());
  int n_sites = g.num_vertices();
  // per-sample, per-p observations
  std::vector<uint8_t> crossed(static_cast<size_t>(samples) * np);
  std::vector<double> mean_size(static_cast<size_t>(samples) * np);
  std::vector<double> largest(static_cast<size_t>(samples) * np);
  Region no_boundary({}, n_sites);

  run_samples(samples, seed, parallel, [&](int s, Rng& rng) {
    std::vector<double> field = uniform_field(g, structure, rng);
    for (int i = 0; i < np; ++i) {
      auto config = threshold_field(field, p_grid[i]);
      bool cross;
      ClusterLabeling lab;
      if (structure == Structure::bond) {
        cross = crossing(g, config, mode);
        lab = label_clusters(g, config, no_boundary);
      } else {
        cross = crossing_sites(g, config, mode);
        lab = label_clusters_sites(g, config, no_boundary);
      }
      size_t at = static_cast<size_t>(s) * np + i;
      crossed[at] = cross;
      double sum = 0, sum_sq = 0;
      for (int c = 0; c < lab.num_clusters; ++c) {
        sum += lab.sizes[c];
        sum_sq += double(lab.sizes[c]) * lab.sizes[c];
      }
      mean_size[at] = sum > 0 ? sum_sq / sum : 0.0;
      largest[at] = double(lab.largest) / n_sites;
    }
  });

  CrossingSweepResult out;
  out.crossing_frequency.assign(np, 0);
  out.crossing_stderr.assign(np, 0);
  out.mean_cluster_size.assign(np, 0);
  out.largest_fraction.assign(np, 0);
  for (int i = 0; i < np; ++i) {
    KahanSum f, ms, lf;
    for (int s = 0; s < samples; ++s) {
      size_t at = static_cast<size_t>(s) * np + i;
      f.add(crossed[at]);
      ms.add(mean_size[at]);
      lf.add(largest[at]);
    }
    double freq = f.value() / samples;
    out.crossing_frequency[i] = freq;
    out.crossing_stderr[i] = std::sqrt(freq * (1 - freq) / samples);
    out.mean_cluster_size[i] = ms.value() / samples;
    out.largest_fraction[i] = lf.value() / samples;
  }
  return out;
}

ConnectionSweepResult connection_sweep(const Graph& g,
                                       const std::vector<double>& p_grid,
                                       int samples, Structure structure,
                                       VertexId source, const Region& target,
                                       uint64_t seed, bool parallel) {
  if (samples <= 0)
    throw std::invalid_argument("connection_sweep: samples > 0");
  int np = static_cast<int>(p_grid.size());
  std::vector<uint8_t> hit(static_cast<size_t>(samples) * np);

  run_samples(samples, seed, parallel, [&](int s, Rng& rng) {
    std::vector<double> field = uniform_field(g, structure, rng);
    for (int i = 0; i < np; ++i) {
      auto config = threshold_field(field, p_grid[i]);
      bool c = structure == Structure::bond
                   ? connected(g, config, source, target)
                   : connected_sites(g, config, source, target);
      hit[static_cast<size_t>(s) * np + i] = c;
    }
  });

  ConnectionSweepResult out;
  out.frequency.assign(np, 0);
  out.stderr_.assign(np, 0);
  for (int i = 0; i < np; ++i) {
    KahanSum f;
    for (int s = 0; s < samples; ++s)
      f.add(hit[static_cast<size_t>(s) * np + i]);
    double freq = f.value() / samples;
    out.frequency[i] = freq;
    out.stderr_[i] = std::sqrt(freq * (1 - freq) / samples);
  }
  return out;
}

std::vector<std::vector<double>> replica_map(
    int replicas, uint64_t seed,
    const std::function<std::vector<double>(int, Rng&)>& fn, bool parallel) {
  std::vector<std::vector<double>> out(replicas);
#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < replicas; ++r) {
      Rng rng(Rng::derive(seed, 0x7265706cULL, static_cast<uint64_t>(r)));
      out[r] = fn(r, rng);
    }
    return out;
  }
#endif
  (void)parallel;
  for (int r = 0; r < replicas; ++r) {
    Rng rng(Rng::derive(seed, 0x7265706cULL, static_cast<uint64_t>(r)));
    out[r] = fn(r, rng);
  }
  return out;
}

}  // namespace gibbs
