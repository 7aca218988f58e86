// Timing comparison of the serial reference kernels against their OpenMP
// counterparts. The outputs must agree bit for bit; the table reports both
// timings and the speedup.

#include <chrono>
#include <cstdio>
#include <vector>

#include "gibbs/exact.hpp"
#include "gibbs/lattice.hpp"
#include "gibbs/model.hpp"
#include "gibbs/parallel.hpp"

using namespace gibbs;

namespace {

template <class Fn>
double time_ms(Fn&& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

void report(const char* name, double serial_ms, double parallel_ms,
            bool identical) {
  std::printf("%-34s %10.1f ms %10.1f ms   x%.2f   %s\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms,
              identical ? "outputs identical" : "OUTPUT MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", max_threads());
  std::printf("%-34s %13s %13s %7s\n", "kernel", "serial", "openmp",
              "speedup");

  {
    Graph g = Graph::box(2, 96, Topology::free);
    std::vector<double> grid = {0.45, 0.5, 0.55};
    CrossingSweepResult serial, parallel;
    double ts = time_ms([&] {
      serial = crossing_sweep(g, grid, 600, Structure::bond,
                              CrossingMode::left_right, 42, false);
    });
    double tp = time_ms([&] {
      parallel = crossing_sweep(g, grid, 600, Structure::bond,
                                CrossingMode::left_right, 42, true);
    });
    bool same = serial.crossing_frequency == parallel.crossing_frequency &&
                serial.mean_cluster_size == parallel.mean_cluster_size &&
                serial.largest_fraction == parallel.largest_fraction;
    report("bond crossing sweep 96x96", ts, tp, same);
  }

  {
    Graph g = Graph::box(2, 96, Topology::free);
    std::vector<double> grid = {0.55, 0.6};
    Region target = boundary(
        g, Region({g.index_of({48, 48})}, g.num_vertices()));
    Region far({0}, g.num_vertices());
    ConnectionSweepResult serial, parallel;
    double ts = time_ms([&] {
      serial = connection_sweep(g, grid, 600, Structure::site,
                                g.index_of({48, 48}), far, 43, false);
    });
    double tp = time_ms([&] {
      parallel = connection_sweep(g, grid, 600, Structure::site,
                                  g.index_of({48, 48}), far, 43, true);
    });
    (void)target;
    report("site connection sweep 96x96", ts, tp,
           serial.frequency == parallel.frequency);
  }

  {
    Graph g = Graph::box(2, 4, Topology::free);
    Model ising = make_ising(0.0, 0.45);
    SpinConfig plus(g.num_vertices(), +1);
    Region lambda = Region::all(g.num_vertices());
    ExactOptions serial_opts{int64_t(1) << 24, false};
    ExactOptions parallel_opts{int64_t(1) << 24, true};
    double zs = 0, zp = 0;
    double ts = time_ms([&] {
      zs = exact_gibbs(g, ising.interaction, lambda, plus, serial_opts).log_z;
    });
    double tp = time_ms([&] {
      zp = exact_gibbs(g, ising.interaction, lambda, plus, parallel_opts).log_z;
    });
    report("exact enumeration 4x4 (2^16)", ts, tp, zs == zp);
  }

  return 0;
}
