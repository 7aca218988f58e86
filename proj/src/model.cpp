#include "gibbs/model.hpp"

#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace gibbs {

SpinAlphabet::SpinAlphabet(std::vector<Spin> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("alphabet: empty");
  for (size_t i = 1; i < values_.size(); ++i)
    if (values_[i] <= values_[i - 1])
      throw std::invalid_argument("alphabet: values must strictly increase");
  offset_ = values_.front();
  index_.assign(values_.back() - offset_ + 1, -1);
  for (int i = 0; i < size(); ++i) index_[values_[i] - offset_] = i;
}

int SpinAlphabet::index_of(Spin s) const {
  int pos = s - offset_;
  if (pos < 0 || pos >= static_cast<int>(index_.size()) || index_[pos] < 0)
    throw std::invalid_argument("alphabet: unknown spin value");
  return index_[pos];
}

Interaction::Interaction(const SpinAlphabet& alphabet,
                         std::vector<std::vector<double>> pair_energy,
                         std::vector<double> self_energy, double beta)
    : alphabet_(alphabet),
      u_(std::move(pair_energy)),
      v_(std::move(self_energy)),
      beta_(beta) {
  int n = alphabet_.size();
  if (static_cast<int>(u_.size()) != n ||
      static_cast<int>(v_.size()) != n)
    throw std::invalid_argument("interaction: table size mismatch");
  if (beta_ < 0) throw std::invalid_argument("interaction: beta < 0");
  min_u_ = kInfiniteEnergy;
  for (int a = 0; a < n; ++a) {
    if (static_cast<int>(u_[a].size()) != n)
      throw std::invalid_argument("interaction: table size mismatch");
    for (int b = 0; b < n; ++b) {
      if (u_[a][b] != u_[b][a])
        throw std::invalid_argument("interaction: U not symmetric");
      if (std::isnan(u_[a][b]) || u_[a][b] == -kInfiniteEnergy)
        throw std::invalid_argument("interaction: bad U entry");
      min_u_ = std::min(min_u_, u_[a][b]);
    }
    if (!std::isfinite(v_[a]))
      throw std::invalid_argument("interaction: V must be finite");
  }
  if (!std::isfinite(min_u_))
    throw std::invalid_argument("interaction: U has no finite entry");
}

Interaction Interaction::with_beta(double beta) const {
  return Interaction(alphabet_, u_, v_, beta);
}

Interaction Interaction::shifted_by(double c) const {
  auto u = u_;
  for (auto& row : u)
    for (double& e : row) e += c;  // +inf stays +inf
  return Interaction(alphabet_, std::move(u), v_, beta_);
}

Interaction Interaction::absorb_self_potential(int dim) const {
  if (dim < 1) throw std::invalid_argument("absorb_self_potential: d >= 1");
  auto u = u_;
  int n = alphabet_.size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) u[a][b] += (v_[a] + v_[b]) / (2.0 * dim);
  return Interaction(alphabet_, std::move(u),
                     std::vector<double>(n, 0.0), beta_);
}

Model make_ising(double h, double beta) {
  SpinAlphabet s({-1, +1});
  std::vector<std::vector<double>> u(2, std::vector<double>(2));
  for (int a : {0, 1})
    for (int b : {0, 1}) u[a][b] = -double(s.value(a)) * s.value(b);
  std::vector<double> v = {-h * s.value(0), -h * s.value(1)};
  return {s, Interaction(s, u, v, beta)};
}

Model make_antiferro_ising(double h, double beta) {
  SpinAlphabet s({-1, +1});
  std::vector<std::vector<double>> u(2, std::vector<double>(2));
  for (int a : {0, 1})
    for (int b : {0, 1}) u[a][b] = double(s.value(a)) * s.value(b);
  std::vector<double> v = {-h * s.value(0), -h * s.value(1)};
  return {s, Interaction(s, u, v, beta)};
}

Model make_potts(int q, double beta) {
  if (q < 2) throw std::invalid_argument("potts: q >= 2 required");
  std::vector<Spin> vals(q);
  for (int i = 0; i < q; ++i) vals[i] = i + 1;
  SpinAlphabet s(std::move(vals));
  std::vector<std::vector<double>> u(q, std::vector<double>(q, 1.0));
  for (int a = 0; a < q; ++a) u[a][a] = -1.0;
  return {s, Interaction(s, u, std::vector<double>(q, 0.0), beta)};
}

Model make_hardcore(double activity) {
  if (activity <= 0) throw std::invalid_argument("hardcore: activity > 0");
  SpinAlphabet s({0, 1});
  std::vector<std::vector<double>> u(2, std::vector<double>(2, 0.0));
  u[1][1] = kInfiniteEnergy;
  std::vector<double> v = {0.0, -std::log(activity)};
  return {s, Interaction(s, u, v, 1.0)};
}

Model make_widom_rowlinson(double activity_plus, double activity_minus) {
  if (activity_plus <= 0 || activity_minus <= 0)
    throw std::invalid_argument("widom_rowlinson: activities > 0");
  SpinAlphabet s({-1, 0, +1});
  std::vector<std::vector<double>> u(3, std::vector<double>(3, 0.0));
  u[0][2] = u[2][0] = kInfiniteEnergy;  // opposite particle types clash
  std::vector<double> v = {-std::log(activity_minus), 0.0,
                           -std::log(activity_plus)};
  return {s, Interaction(s, u, v, 1.0)};
}

Model parse_model(const std::string& text) {
  std::istringstream is(text);
  std::string name;
  is >> name;
  auto params = [&is] {
    std::vector<std::pair<std::string, double>> kv;
    std::string tok;
    while (is >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("model: expected key=value, got " + tok);
      kv.emplace_back(tok.substr(0, eq), std::stod(tok.substr(eq + 1)));
    }
    return kv;
  }();
  auto get = [&params](const std::string& key, double fallback,
                       bool required = false) {
    for (auto& [k, v] : params)
      if (k == key) return v;
    if (required) throw std::invalid_argument("model: missing " + key);
    return fallback;
  };
  if (name == "ising") return make_ising(get("h", 0.0), get("beta", 0, true));
  if (name == "antiferro_ising")
    return make_antiferro_ising(get("h", 0.0), get("beta", 0, true));
  if (name == "potts")
    return make_potts(static_cast<int>(get("q", 0, true)),
                      get("beta", 0, true));
  if (name == "hardcore") return make_hardcore(get("lambda", 0, true));
  if (name == "widom_rowlinson")
    return make_widom_rowlinson(get("lambda+", get("lambda", 0, true)),
                                get("lambda-", get("lambda", 0, true)));
  throw std::invalid_argument("model: unknown name '" + name + "'");
}

double relative_energy(const Graph& g, const Interaction& in,
                       const SpinConfig& sigma, const SpinConfig& eta,
                       const Region& lambda) {
  if (static_cast<int>(sigma.size()) != g.num_vertices() ||
      static_cast<int>(eta.size()) != g.num_vertices())
    throw std::invalid_argument("relative_energy: config size mismatch");
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!lambda.contains(v) && sigma[v] != eta[v])
      throw std::invalid_argument(
          "relative_energy: configurations differ off the window");
  double h = 0.0;
  for (const Bond& b : g.bonds()) {
    if (!lambda.contains(b.u) && !lambda.contains(b.v)) continue;
    double du = in.pair_energy(sigma[b.u], sigma[b.v]);
    double de = in.pair_energy(eta[b.u], eta[b.v]);
    if (du == kInfiniteEnergy) return kInfiniteEnergy;
    h += du - (de == kInfiniteEnergy ? 0.0 : de);
  }
  for (VertexId x : lambda.members())
    h += in.self_energy(sigma[x]) - in.self_energy(eta[x]);
  return h;
}

double gibbs_log_weight(const Graph& g, const Interaction& in,
                        const SpinConfig& sigma, const SpinConfig& eta,
                        const Region& lambda) {
  double h = relative_energy(g, in, sigma, eta, lambda);
  if (h == kInfiniteEnergy) return -kInfiniteEnergy;
  return -in.beta() * h;
}

std::vector<int> two_coloring(const Graph& g) {
  std::vector<int> color(g.num_vertices(), -1);
  for (int start = 0; start < g.num_vertices(); ++start) {
    if (color[start] >= 0) continue;
    color[start] = 0;
    std::deque<VertexId> queue = {start};
    while (!queue.empty()) {
      VertexId x = queue.front();
      queue.pop_front();
      for (VertexId y : g.neighbors(x)) {
        if (color[y] < 0) {
          color[y] = 1 - color[x];
          queue.push_back(y);
        } else if (color[y] == color[x]) {
          throw std::invalid_argument("two_coloring: graph is not bipartite");
        }
      }
    }
  }
  return color;
}

SpinConfig flip_odd_sublattice(const Graph& g, const SpinConfig& sigma) {
  for (Spin s : sigma)
    if (s != -1 && s != 1)
      throw std::invalid_argument("flip_odd_sublattice: alphabet must be -1/+1");
  std::vector<int> color = two_coloring(g);
  SpinConfig out = sigma;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (color[v] == 1) out[v] = -out[v];
  return out;
}

}  // namespace gibbs
