#ifndef GIBBS_MODEL_HPP
#define GIBBS_MODEL_HPP

#include <limits>
#include <string>
#include <vector>

#include "gibbs/lattice.hpp"

namespace gibbs {

using Spin = int;

// Spin values, strictly increasing. The value order is also the base of
// the coordinatewise partial order on configurations.
class SpinAlphabet {
 public:
  explicit SpinAlphabet(std::vector<Spin> values);

  const std::vector<Spin>& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  Spin value(int index) const { return values_[index]; }
  int index_of(Spin s) const;  // throws for foreign values
  Spin min() const { return values_.front(); }
  Spin max() const { return values_.back(); }

 private:
  std::vector<Spin> values_;
  std::vector<int> index_;  // offset-based lookup
  Spin offset_ = 0;
};

// A full assignment of spin values to the vertices of a host graph.
using SpinConfig = std::vector<Spin>;

inline SpinConfig constant_config(const Graph& g, Spin s) {
  return SpinConfig(g.num_vertices(), s);
}

constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

// Symmetric neighbor energy U (possibly +inf), self energy V, inverse
// temperature beta. Immutable once built.
class Interaction {
 public:
  Interaction(const SpinAlphabet& alphabet,
              std::vector<std::vector<double>> pair_energy,
              std::vector<double> self_energy, double beta);

  const SpinAlphabet& alphabet() const { return alphabet_; }
  double beta() const { return beta_; }

  double pair_energy(Spin a, Spin b) const {
    return u_[alphabet_.index_of(a)][alphabet_.index_of(b)];
  }
  double self_energy(Spin a) const { return v_[alphabet_.index_of(a)]; }
  double pair_energy_by_index(int ia, int ib) const { return u_[ia][ib]; }
  double self_energy_by_index(int ia) const { return v_[ia]; }

  // Minimal pair energy (always finite: no all-infinite rows allowed).
  double min_pair_energy() const { return min_u_; }

  Interaction with_beta(double beta) const;
  Interaction shifted_by(double c) const;  // U' = U + c, V unchanged

  // Folds V into U via U'(a,b) = U(a,b) + (V(a)+V(b))/(2 d), V' = 0.
  Interaction absorb_self_potential(int dim) const;

 private:
  SpinAlphabet alphabet_;
  std::vector<std::vector<double>> u_;
  std::vector<double> v_;
  double beta_;
  double min_u_;
};

struct Model {
  SpinAlphabet alphabet;
  Interaction interaction;
};

Model make_ising(double h, double beta);
Model make_antiferro_ising(double h, double beta);
Model make_potts(int q, double beta);
Model make_hardcore(double activity);
Model make_widom_rowlinson(double activity_plus, double activity_minus);

// Parses "ising h=0 beta=0.4", "potts q=3 beta=1.0", "hardcore lambda=2",
// "widom_rowlinson lambda+=1 lambda-=1", "antiferro_ising h=0 beta=0.7".
Model parse_model(const std::string& text);

// Relative energy of sigma w.r.t. eta over the window lambda: U-differences
// over bonds touching lambda plus V-differences inside lambda. Requires
// sigma == eta off lambda. May be +inf; saturating arithmetic.
double relative_energy(const Graph& g, const Interaction& in,
                       const SpinConfig& sigma, const SpinConfig& eta,
                       const Region& lambda);

// log of exp(-beta * H(sigma|eta)); -inf encodes weight zero.
double gibbs_log_weight(const Graph& g, const Interaction& in,
                        const SpinConfig& sigma, const SpinConfig& eta,
                        const Region& lambda);

// Two-coloring of a bipartite graph; throws for non-bipartite inputs.
// Color of vertex 0 is 0 ("even").
std::vector<int> two_coloring(const Graph& g);

// Negates spins on the odd color class. Involutive. Alphabet {-1,+1} only.
SpinConfig flip_odd_sublattice(const Graph& g, const SpinConfig& sigma);

}  // namespace gibbs

#endif
