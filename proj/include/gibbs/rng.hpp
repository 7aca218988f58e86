#ifndef GIBBS_RNG_HPP
#define GIBBS_RNG_HPP

#include <cstdint>

namespace gibbs {

// Counter-based generator: output i of stream (key) is mix(key + i*PHI).
// Seekable, so identical randomness blocks can be replayed (needed by
// coupling-from-the-past) and independent streams can be derived for
// concurrent chains/replicas without shared state.
class Rng {
 public:
  Rng() : key_(0), ctr_(0) {}
  explicit Rng(uint64_t key) : key_(key), ctr_(0) {}

  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Stream derivation: hash-chain the master key with the stream ids.
  static uint64_t derive(uint64_t key, uint64_t id) {
    return mix(key ^ (0x9e3779b97f4a7c15ULL + mix(id)));
  }
  static uint64_t derive(uint64_t key, uint64_t a, uint64_t b) {
    return derive(derive(key, a), b);
  }

  uint64_t key() const { return key_; }
  uint64_t counter() const { return ctr_; }
  void seek(uint64_t counter) { ctr_ = counter; }

  uint64_t next_u64() { return mix(key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform in [0,1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  // Uniform in {0,...,n-1}; n is tiny in all call sites, so the modulo
  // bias of ~n/2^64 is far below any tolerance used here.
  uint64_t next_index(uint64_t n) { return next_u64() % n; }

 private:
  uint64_t key_;
  uint64_t ctr_;
};

}  // namespace gibbs

#endif
