#include "gibbs/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "gibbs/checks.hpp"
#include "gibbs/coupling.hpp"
#include "gibbs/disorder.hpp"
#include "gibbs/exact.hpp"
#include "gibbs/model.hpp"
#include "gibbs/parallel.hpp"
#include "gibbs/percolation.hpp"
#include "gibbs/random_cluster.hpp"
#include "gibbs/sampler.hpp"
#include "gibbs/small_graphs.hpp"

namespace gibbs {

namespace fs = std::filesystem;
using nlohmann::json;

uint64_t fnv1a64(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// --- config access with path-to-field errors --------------------------------

const json& field(const json& j, const std::string& key,
                  const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(path + "." + key + ": missing required field");
  return j.at(key);
}

int64_t get_int(const json& j, const std::string& key, const std::string& path,
                std::optional<int64_t> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key + ": missing required integer");
  }
  if (!j.at(key).is_number_integer())
    throw ConfigError(path + "." + key + ": expected an integer");
  return j.at(key).get<int64_t>();
}

double get_num(const json& j, const std::string& key, const std::string& path,
               std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key + ": missing required number");
  }
  if (!j.at(key).is_number())
    throw ConfigError(path + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

std::string get_str(const json& j, const std::string& key,
                    const std::string& path,
                    std::optional<std::string> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key + ": missing required string");
  }
  if (!j.at(key).is_string())
    throw ConfigError(path + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

Graph parse_graph(const json& j) {
  std::string kind = get_str(j, "kind", "config.graph");
  try {
    if (kind == "box") {
      std::string topo = get_str(j, "topology", "config.graph", "free");
      if (topo != "free" && topo != "periodic")
        throw ConfigError("config.graph.topology: 'free' or 'periodic'");
      return Graph::box(int(get_int(j, "d", "config.graph")),
                        int(get_int(j, "n", "config.graph")),
                        topo == "free" ? Topology::free : Topology::periodic);
    }
    if (kind == "tree")
      return Graph::tree(int(get_int(j, "branching", "config.graph")),
                         int(get_int(j, "depth", "config.graph")));
    if (kind == "triangular")
      return Graph::triangular(int(get_int(j, "side", "config.graph")));
    if (kind == "custom")
      return Graph::parse_descriptor(get_str(j, "descriptor", "config.graph"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config.graph: ") + e.what());
  }
  throw ConfigError("config.graph.kind: unknown kind '" + kind + "'");
}

struct ModelSpec {
  std::string name;
  double h = 0, beta = 0, lambda = 1, lambda_minus = 1;
  int q = 2;

  // grid_key in {beta, h, lambda, q} overrides that parameter per job
  Model instantiate(const std::string& grid_key, double grid_value) const {
    ModelSpec spec = *this;
    if (grid_key == "beta")
      spec.beta = grid_value;
    else if (grid_key == "h")
      spec.h = grid_value;
    else if (grid_key == "lambda")
      spec.lambda = spec.lambda_minus = grid_value;
    else if (grid_key == "q")
      spec.q = int(grid_value);
    if (spec.name == "ising") return make_ising(spec.h, spec.beta);
    if (spec.name == "antiferro_ising")
      return make_antiferro_ising(spec.h, spec.beta);
    if (spec.name == "potts") return make_potts(spec.q, spec.beta);
    if (spec.name == "hardcore") return make_hardcore(spec.lambda);
    if (spec.name == "widom_rowlinson")
      return make_widom_rowlinson(spec.lambda, spec.lambda_minus);
    throw ConfigError("config.model.name: unknown model '" + name + "'");
  }
  Model instantiate(double beta_override) const {
    return instantiate("beta", beta_override);
  }
};

ModelSpec parse_model_spec(const json& j) {
  ModelSpec spec;
  spec.name = get_str(j, "name", "config.model");
  if (spec.name == "ising" || spec.name == "antiferro_ising") {
    spec.h = get_num(j, "h", "config.model", 0.0);
    spec.beta = get_num(j, "beta", "config.model");
  } else if (spec.name == "potts") {
    spec.q = int(get_int(j, "q", "config.model"));
    if (spec.q < 2) throw ConfigError("config.model.q: must be >= 2");
    spec.beta = get_num(j, "beta", "config.model");
  } else if (spec.name == "hardcore") {
    spec.lambda = get_num(j, "lambda", "config.model");
    if (spec.lambda <= 0) throw ConfigError("config.model.lambda: must be > 0");
    spec.beta = 1;
  } else if (spec.name == "widom_rowlinson") {
    spec.lambda = get_num(j, "lambda+", "config.model",
                          get_num(j, "lambda", "config.model", 1.0));
    spec.lambda_minus = get_num(j, "lambda-", "config.model", spec.lambda);
    if (spec.lambda <= 0 || spec.lambda_minus <= 0)
      throw ConfigError("config.model: activities must be > 0");
    spec.beta = 1;
  } else {
    throw ConfigError("config.model.name: unknown model '" + spec.name + "'");
  }
  return spec;
}

// Window = box coordinates at least `margin` from every face.
Region window_region(const Graph& g, int margin) {
  if (margin == 0) return Region::all(g.num_vertices());
  if (g.kind() != GraphKind::box)
    throw ConfigError("config.boundary.margin: needs a box graph");
  std::vector<VertexId> members;
  for (int v = 0; v < g.num_vertices(); ++v) {
    bool inside = true;
    for (int c : g.coords_of(v))
      inside &= (c >= margin && c <= g.side() - 1 - margin);
    if (inside) members.push_back(v);
  }
  return Region(std::move(members), g.num_vertices());
}

struct EffectiveConfig {
  json j;
  Graph graph = Graph::custom(1, {});
  ModelSpec model;
  std::string algorithm;
  std::string grid_key = "beta";
  std::vector<double> grid;
  int replicas = 1;
  int64_t sweeps = 0, burn_in = 0, thinning = 1;
  uint64_t seed = 0;
  int margin = 0;
  std::optional<Spin> boundary_spin;
  int snapshots = 0;
  std::string out_root;
};

EffectiveConfig parse_config(json j, const RunOptions& options) {
  EffectiveConfig cfg;
  cfg.j = std::move(j);
  cfg.graph = parse_graph(field(cfg.j, "graph", "config"));
  cfg.model = parse_model_spec(field(cfg.j, "model", "config"));
  cfg.algorithm = get_str(cfg.j, "algorithm", "config");
  if (!cfg.j.contains("seed"))
    throw ConfigError("config.seed: a master seed is mandatory");
  cfg.seed = uint64_t(get_int(cfg.j, "seed", "config"));
  if (options.seed_override) cfg.seed = *options.seed_override;
  cfg.replicas = int(get_int(cfg.j, "replicas", "config", 1));
  if (cfg.replicas < 1) throw ConfigError("config.replicas: must be >= 1");
  cfg.sweeps = get_int(cfg.j, "sweeps", "config", 0);
  cfg.burn_in = get_int(cfg.j, "burn_in", "config", 0);
  cfg.thinning = get_int(cfg.j, "thinning", "config", 1);
  if (cfg.thinning < 1) throw ConfigError("config.thinning: must be >= 1");
  cfg.snapshots = int(get_int(cfg.j, "snapshots", "config", 0));

  if (cfg.j.contains("grid")) {
    const json& grid = cfg.j.at("grid");
    cfg.grid_key.clear();
    for (const char* key : {"beta", "p", "h", "lambda", "q"})
      if (grid.contains(key)) cfg.grid_key = key;
    if (cfg.grid_key.empty() || !grid.at(cfg.grid_key).is_array() ||
        grid.at(cfg.grid_key).empty())
      throw ConfigError(
          "config.grid: expected one nonempty array among beta|p|h|lambda|q");
    for (const json& v : grid.at(cfg.grid_key)) {
      if (!v.is_number()) throw ConfigError("config.grid: numeric grid only");
      cfg.grid.push_back(v.get<double>());
    }
  }
  if (cfg.grid.empty()) cfg.grid = {cfg.model.beta};

  if (cfg.j.contains("boundary")) {
    const json& b = cfg.j.at("boundary");
    cfg.margin = int(get_int(b, "margin", "config.boundary", 1));
    if (b.contains("spin"))
      cfg.boundary_spin = Spin(get_int(b, "spin", "config.boundary"));
  }

  cfg.out_root = options.out_override.value_or(
      get_str(cfg.j, "out", "config", [] {
        const char* env = std::getenv("GIBBSLAB_OUT");
        return std::string(env ? env : "runs");
      }()));

  // materialize defaults into the manifest copy
  cfg.j["replicas"] = cfg.replicas;
  cfg.j["sweeps"] = cfg.sweeps;
  cfg.j["burn_in"] = cfg.burn_in;
  cfg.j["thinning"] = cfg.thinning;
  cfg.j["seed"] = cfg.seed;
  cfg.j["snapshots"] = cfg.snapshots;
  cfg.j["out"] = cfg.out_root;
  return cfg;
}

// --- algorithm drivers -------------------------------------------------------

struct JobOutput {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // series rows
  std::vector<json> summaries;
  std::vector<std::pair<std::string, std::string>> extra_files;
};

std::vector<std::string> observable_names(const ModelSpec& model) {
  if (model.name == "potts") return {"order_parameter", "energy_per_site"};
  return {"magnetization", "energy_per_site"};
}

std::vector<double> observe_spins(const Graph& g, const Interaction& in,
                                  const ModelSpec& model,
                                  const SpinConfig& sigma,
                                  const Region& lambda) {
  if (model.name == "potts")
    return {potts_order_parameter(sigma, lambda, model.q),
            energy_per_site(g, in, sigma, lambda)};
  return {magnetization(sigma, lambda), energy_per_site(g, in, sigma, lambda)};
}

JobOutput run_chain_job(const EffectiveConfig& cfg, double grid_value,
                        int replica, uint64_t stream) {
  const Graph& g = cfg.graph;
  Model model = cfg.model.instantiate(cfg.grid_key, grid_value);
  double beta = cfg.grid_key == "beta" ? grid_value : cfg.model.beta;
  double h = cfg.grid_key == "h" ? grid_value : cfg.model.h;
  int q_potts = cfg.grid_key == "q" ? int(grid_value) : cfg.model.q;
  Region lambda = window_region(g, cfg.margin);
  Rng rng(stream);
  JobOutput out;
  out.columns = observable_names(cfg.model);

  SpinConfig sigma(g.num_vertices(), cfg.boundary_spin.value_or(
                                         model.alphabet.values().front()));
  if (cfg.model.name == "hardcore" || cfg.model.name == "widom_rowlinson")
    sigma.assign(g.num_vertices(), 0);
  if (cfg.boundary_spin) {
    // feasible start: window matches the boundary spin
    for (VertexId v : lambda.members()) sigma[v] = *cfg.boundary_spin;
  }

  std::function<void()> sweep;
  if (cfg.algorithm == "heat-bath") {
    sweep = [&] { heat_bath_sweep(g, model.interaction, lambda, sigma, rng); };
  } else if (cfg.algorithm == "sw") {
    if (cfg.model.name != "potts" && cfg.model.name != "ising")
      throw ConfigError("config.algorithm: sw needs a potts or ising model");
    int q = cfg.model.name == "potts" ? q_potts : 2;
    SwParams params = make_sw_params(g, lambda, q, beta, cfg.boundary_spin);
    if (cfg.model.name == "ising") {
      // run in potts labels, observe in ising labels
      sweep = [&, params, q] {
        SpinConfig labels(g.num_vertices());
        for (int v = 0; v < g.num_vertices(); ++v)
          labels[v] = sigma[v] > 0 ? 1 : 2;
        swendsen_wang_sweep(g, params, lambda, labels, rng, nullptr);
        for (VertexId v : lambda.members())
          sigma[v] = labels[v] == 1 ? +1 : -1;
      };
    } else {
      sweep = [&, params] {
        swendsen_wang_sweep(g, params, lambda, sigma, rng, nullptr);
      };
    }
  } else if (cfg.algorithm == "cftp") {
    if (cfg.model.name != "ising")
      throw ConfigError("config.algorithm: cftp drives the ising model only");
    sweep = [] {};
  } else {
    throw ConfigError("config.algorithm: unknown algorithm '" +
                      cfg.algorithm + "'");
  }

  if (cfg.algorithm == "cftp") {
    SpinConfig eta(g.num_vertices(), cfg.boundary_spin.value_or(+1));
    out.columns.push_back("horizon");
    for (int64_t draw = 0; draw < cfg.sweeps; ++draw) {
      CftpResult res =
          cftp_ising(g, h, beta, lambda, eta, rng);
      std::vector<double> row = observe_spins(g, model.interaction, cfg.model,
                                              res.config, lambda);
      row.push_back(double(res.horizon));
      out.rows.push_back(std::move(row));
    }
  } else {
    Schedule schedule{cfg.burn_in, cfg.thinning, cfg.sweeps};
    MeasurementSeries series = measure(
        sweep,
        [&] {
          return observe_spins(g, model.interaction, cfg.model, sigma, lambda);
        },
        out.columns, schedule);
    for (int64_t r = 0; r < schedule.samples; ++r) {
      std::vector<double> row;
      for (const auto& s : series.series) row.push_back(s[r]);
      out.rows.push_back(std::move(row));
    }
    for (size_t i = 0; i < out.columns.size(); ++i) {
      SummaryStats st = series.summary(int(i));
      out.summaries.push_back(
          {{"grid", grid_value},
           {"replica", replica},
           {"observable", out.columns[i]},
           {"mean", st.mean},
           {"stderr", st.stderr_},
           {"tau_int", st.tau_int},
           {"n", st.count}});
    }
  }
  if (cfg.snapshots > 0) {
    bool binary = true;
    for (Spin s : model.alphabet.values()) binary &= (s == -1 || s == +1);
    if (!binary)
      throw ConfigError(
          "config.snapshots: packed snapshots need a two-spin model");
    std::vector<std::vector<uint8_t>> rows;
    SiteConfig bits(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) bits[v] = sigma[v] > 0;
    rows.push_back(bits);
    std::ostringstream os;
    write_packed(os, g, Structure::site, rows);
    std::ostringstream name;
    name << "snapshots/final-" << num(grid_value) << "-" << replica << ".bits";
    out.extra_files.emplace_back(name.str(), os.str());
  }
  return out;
}

JobOutput run_sweeny_job(const EffectiveConfig& cfg, double grid_value,
                         int replica, uint64_t stream) {
  (void)replica;
  const Graph& g = cfg.graph;
  double q = cfg.model.name == "potts" ? cfg.model.q : 2.0;
  if (cfg.grid_key == "q") q = grid_value;
  double beta = cfg.grid_key == "beta" ? grid_value : cfg.model.beta;
  double p = cfg.grid_key == "p" ? grid_value : -std::expm1(-2.0 * beta);
  Region lambda = window_region(g, cfg.margin);
  RcCounting counting = cfg.margin > 0 ? RcCounting::wired(lambda)
                                       : RcCounting::free();
  RcParams params = RcParams::uniform(g, p, q, counting);
  std::vector<BondId> slots = rc_slots(g, counting);
  std::vector<uint8_t> open(slots.size(), 0);
  Rng rng(stream);
  JobOutput out;
  out.columns = {"open_fraction", "largest_cluster_fraction"};
  Region no_boundary({}, g.num_vertices());
  Schedule schedule{cfg.burn_in, cfg.thinning, cfg.sweeps};
  MeasurementSeries series = measure(
      [&] { sweeny_sweep(g, params, slots, open, rng); },
      [&] {
        BondConfig full(g.num_bonds(), 0);
        int64_t open_count = 0;
        for (size_t i = 0; i < slots.size(); ++i) {
          full[slots[i]] = open[i];
          open_count += open[i];
        }
        ClusterLabeling lab = label_clusters(g, full, no_boundary);
        return std::vector<double>{
            slots.empty() ? 0.0 : double(open_count) / slots.size(),
            double(lab.largest) / g.num_vertices()};
      },
      out.columns, schedule);
  for (int64_t r = 0; r < schedule.samples; ++r)
    out.rows.push_back({series.series[0][r], series.series[1][r]});
  for (size_t i = 0; i < out.columns.size(); ++i) {
    SummaryStats st = series.summary(int(i));
    out.summaries.push_back({{"grid", grid_value},
                             {"replica", replica},
                             {"observable", out.columns[i]},
                             {"mean", st.mean},
                             {"stderr", st.stderr_},
                             {"tau_int", st.tau_int},
                             {"n", st.count}});
  }
  return out;
}

JobOutput run_bernoulli_job(const EffectiveConfig& cfg) {
  const json& b = cfg.j.contains("bernoulli") ? cfg.j.at("bernoulli") : json::object();
  std::string structure_word =
      get_str(b, "structure", "config.bernoulli", "bond");
  if (structure_word != "bond" && structure_word != "site")
    throw ConfigError("config.bernoulli.structure: 'bond' or 'site'");
  Structure structure =
      structure_word == "bond" ? Structure::bond : Structure::site;
  int samples = int(get_int(b, "samples", "config.bernoulli", 1000));
  if (samples < 1) throw ConfigError("config.bernoulli.samples: must be >= 1");
  std::vector<double> grid = cfg.grid;
  for (double p : grid)
    if (p < 0 || p > 1)
      throw ConfigError("config.grid.p: probabilities must lie in [0,1]");
  CrossingSweepResult res =
      crossing_sweep(cfg.graph, grid, samples, structure,
                     CrossingMode::left_right, cfg.seed, true);
  JobOutput out;
  out.columns = {"p", "crossing_frequency", "stderr", "mean_cluster_size",
                 "largest_cluster_fraction"};
  for (size_t i = 0; i < grid.size(); ++i) {
    out.rows.push_back({grid[i], res.crossing_frequency[i],
                        res.crossing_stderr[i], res.mean_cluster_size[i],
                        res.largest_fraction[i]});
    out.summaries.push_back({{"grid", grid[i]},
                             {"observable", "crossing_frequency"},
                             {"mean", res.crossing_frequency[i]},
                             {"stderr", res.crossing_stderr[i]},
                             {"n", samples}});
  }
  return out;
}

JobOutput run_exact_job(const EffectiveConfig& cfg, int* exit_code) {
  const json& e = cfg.j.contains("exact") ? cfg.j.at("exact") : json::object();
  std::string task = get_str(e, "task", "config.exact", "es-check");
  JobOutput out;
  if (task == "es-check") {
    int max_edges = int(get_int(e, "max_edges", "config.exact", 4));
    double tolerance = get_num(e, "tolerance", "config.exact", 1e-12);
    out.columns = {"graph_index", "q", "p", "max_vertex_deviation",
                   "max_edge_deviation"};
    std::vector<Graph> graphs = connected_graphs_up_to(max_edges);
    double worst = 0;
    for (size_t idx = 0; idx < graphs.size(); ++idx)
      for (int q : {2, 3})
        for (double p : {0.4, 0.8}) {
          const Graph& g = graphs[idx];
          double beta = -0.5 * std::log1p(-p);
          EsMarginals joint = es_joint_marginals(g, p, q);
          Model potts_model = make_potts(q, beta);
          SpinConfig one(g.num_vertices(), 1);
          GibbsExact potts = exact_gibbs(g, potts_model.interaction,
                                         Region::all(g.num_vertices()), one);
          RcExact rc = exact_rc(g, p, q, RcCounting::free());
          double dv = 0, de = 0;
          for (int64_t o = 0; o < potts.dist.space().size(); ++o)
            dv = std::max(dv, std::abs(joint.vertex[o] - potts.dist.prob(o)));
          for (int64_t o = 0; o < rc.dist.space().size(); ++o)
            de = std::max(de, std::abs(joint.edge[o] - rc.dist.prob(o)));
          out.rows.push_back({double(idx), double(q), p, dv, de});
          worst = std::max(worst, std::max(dv, de));
        }
    out.summaries.push_back({{"observable", "max_marginal_deviation"},
                             {"mean", worst},
                             {"tolerance", tolerance},
                             {"n", out.rows.size()}});
    if (worst >= tolerance) *exit_code = 3;
    return out;
  }
  if (task == "gibbs") {
    Model model = cfg.model.instantiate(cfg.model.beta);
    Region lambda = window_region(cfg.graph, cfg.margin);
    SpinConfig eta(cfg.graph.num_vertices(),
                   cfg.boundary_spin.value_or(model.alphabet.values().front()));
    GibbsExact dist = exact_gibbs(cfg.graph, model.interaction, lambda, eta);
    std::ostringstream os;
    dist.dist.write_csv(os);
    out.extra_files.emplace_back("distribution.csv", os.str());
    out.columns = {"log_normalizer"};
    out.rows.push_back({dist.log_z});
    out.summaries.push_back(
        {{"observable", "log_normalizer"}, {"mean", dist.log_z}});
    return out;
  }
  throw ConfigError("config.exact.task: unknown task '" + task + "'");
}

JobOutput run_disorder_job(const EffectiveConfig& cfg) {
  const json& d = field(cfg.j, "disorder", "config");
  std::string law_name = get_str(d, "law", "config.disorder");
  DisorderLaw law = DisorderLaw::dilution(1.0);
  if (law_name == "dilution")
    law = DisorderLaw::dilution(get_num(d, "p", "config.disorder"),
                                get_num(d, "value", "config.disorder", 1.0));
  else if (law_name == "gamma")
    law = DisorderLaw::gamma(get_num(d, "shape", "config.disorder"));
  else
    throw ConfigError("config.disorder.law: 'dilution' or 'gamma'");
  int q = int(get_int(d, "q", "config.disorder", 2));
  if (cfg.grid_key != "beta")
    throw ConfigError("config.grid: disorder sweeps run over beta only");
  double beta = cfg.grid.front();
  const Graph& g = cfg.graph;
  Region lambda = window_region(g, cfg.margin);

  VertexId source;
  Region target({}, g.num_vertices());
  if (cfg.boundary_spin) {
    source = lambda.members()[lambda.size() / 2];
    target = boundary(g, lambda);
  } else {
    if (g.kind() != GraphKind::box)
      throw ConfigError("config.disorder: free boundary needs a box graph");
    source = 0;
    int n = g.side();
    std::vector<VertexId> far;
    for (int v = 0; v < g.num_vertices(); ++v) {
      int dist = 0;
      for (int c : g.coords_of(v)) {
        int axis = std::min(c, g.topology() == Topology::periodic ? n - c : c);
        dist = std::max(dist, axis);
      }
      if (dist >= n / 2) far.push_back(v);
    }
    target = Region(std::move(far), g.num_vertices());
  }

  QuenchedSummary summary = quenched_experiment(
      g, law, beta, q, cfg.replicas, cfg.sweeps, cfg.burn_in, source, target,
      lambda, cfg.boundary_spin, cfg.seed, true);
  JobOutput out;
  out.columns = {"replica", "open_bond_fraction", "connect_frequency",
                 "order_parameter"};
  for (size_t r = 0; r < summary.replicas.size(); ++r) {
    const QuenchedReplica& rep = summary.replicas[r];
    out.rows.push_back({double(r), rep.open_bond_fraction,
                        rep.connect_frequency, rep.order_parameter});
    out.summaries.push_back({{"replica", int(r)},
                             {"stream", rep.stream},
                             {"open_bond_fraction", rep.open_bond_fraction},
                             {"connect_frequency", rep.connect_frequency},
                             {"order_parameter", rep.order_parameter}});
  }
  out.summaries.push_back({{"observable", "quenched_connection"},
                           {"mean", summary.m_hat},
                           {"stderr", summary.m_stderr},
                           {"n", int(summary.replicas.size())}});
  out.summaries.push_back({{"observable", "quenched_order_parameter"},
                           {"mean", summary.order_hat},
                           {"stderr", summary.order_stderr},
                           {"n", int(summary.replicas.size())}});
  return out;
}

}  // namespace

int run_checks_cli(const std::string& suite, std::ostream& os) {
  std::vector<CheckReport> reports;
  try {
    reports = run_check_suites(suite);
  } catch (const std::invalid_argument& e) {
    os << "error: " << e.what() << "\n";
    return 2;
  }
  bool all = true;
  for (const CheckReport& report : reports) {
    os << "suite " << report.suite << "\n";
    for (const CheckItem& item : report.items) {
      os << (item.passed ? "  PASS " : "  FAIL ") << item.name;
      if (!item.detail.empty()) os << " | " << item.detail;
      os << "\n";
      all &= item.passed;
    }
  }
  os << (all ? "all checks passed" : "CHECK FAILURES PRESENT") << "\n";
  return all ? 0 : 3;
}

RunResult run_experiment(const std::string& config_path,
                         const RunOptions& options, std::ostream& log) {
  json config;
  {
    std::ifstream in(config_path);
    if (!in) return {2, "", "config: cannot open '" + config_path + "'"};
    try {
      in >> config;
    } catch (const json::parse_error& e) {
      return {2, "", std::string("config: JSON parse error: ") + e.what()};
    }
  }

#ifdef _OPENMP
  if (options.jobs > 0) omp_set_num_threads(options.jobs);
#endif

  std::optional<EffectiveConfig> parsed;
  try {
    parsed = parse_config(std::move(config), options);
  } catch (const ConfigError& e) {
    return {2, "", e.what()};
  }
  EffectiveConfig& cfg = *parsed;

  // check-* algorithms delegate to the suites and write no artifacts
  if (cfg.algorithm.rfind("check-", 0) == 0) {
    int code = run_checks_cli(cfg.algorithm.substr(6), log);
    return {code, "", code == 0 ? "checks passed" : "check failures"};
  }

  std::string canonical = cfg.j.dump();
  uint64_t hash = fnv1a64(canonical);
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                static_cast<unsigned long long>(hash));

  fs::path root(cfg.out_root);
  fs::path final_dir = root / (std::string("run-") + hash_hex);
  fs::path tmp_dir = root / (std::string(".tmp-") + hash_hex);
  std::error_code ec;
  fs::remove_all(tmp_dir, ec);
  fs::create_directories(tmp_dir);

  int exit_code = 0;
  try {
    std::vector<JobOutput> jobs;
    std::vector<std::pair<double, int>> job_keys;
    if (cfg.algorithm == "bernoulli") {
      jobs.push_back(run_bernoulli_job(cfg));
      job_keys.push_back({0, 0});
    } else if (cfg.algorithm == "exact") {
      jobs.push_back(run_exact_job(cfg, &exit_code));
      job_keys.push_back({0, 0});
    } else if (cfg.algorithm == "disorder") {
      jobs.push_back(run_disorder_job(cfg));
      job_keys.push_back({0, 0});
    } else {
      for (double grid_value : cfg.grid)
        for (int replica = 0; replica < cfg.replicas; ++replica) {
          uint64_t stream = Rng::derive(cfg.seed, fnv1a64(num(grid_value)),
                                        uint64_t(replica));
          if (cfg.algorithm == "sweeny")
            jobs.push_back(run_sweeny_job(cfg, grid_value, replica, stream));
          else
            jobs.push_back(run_chain_job(cfg, grid_value, replica, stream));
          job_keys.push_back({grid_value, replica});
        }
    }

    // series.csv
    {
      std::ofstream series(tmp_dir / "series.csv");
      series << "grid,replica,row";
      for (const std::string& c : jobs.front().columns) series << ',' << c;
      series << '\n';
      for (size_t jidx = 0; jidx < jobs.size(); ++jidx) {
        for (size_t r = 0; r < jobs[jidx].rows.size(); ++r) {
          series << num(job_keys[jidx].first) << ',' << job_keys[jidx].second
                 << ',' << r;
          for (double v : jobs[jidx].rows[r]) series << ',' << num(v);
          series << '\n';
        }
      }
    }
    // summary.jsonl
    {
      std::ofstream summary(tmp_dir / "summary.jsonl");
      for (size_t jidx = 0; jidx < jobs.size(); ++jidx)
        for (json line : jobs[jidx].summaries) {
          line["seed"] = cfg.seed;
          line["config_hash"] = hash_hex;
          summary << line.dump() << '\n';
        }
    }
    // extra files (exact distributions, snapshots)
    for (const JobOutput& job : jobs)
      for (const auto& [rel, content] : job.extra_files) {
        fs::path p = tmp_dir / rel;
        fs::create_directories(p.parent_path());
        std::ofstream f(p, std::ios::binary);
        f << content;
      }
    // manifest
    {
      json manifest;
      manifest["config"] = cfg.j;
      manifest["config_hash"] = hash_hex;
      manifest["code_version"] = kVersion;
      manifest["seed"] = cfg.seed;
      manifest["outputs"] = {"series.csv", "summary.jsonl"};
      std::ofstream mf(tmp_dir / "manifest.json");
      mf << manifest.dump(2) << '\n';
    }
  } catch (const ConfigError& e) {
    fs::remove_all(tmp_dir, ec);
    return {2, "", e.what()};
  } catch (...) {
    fs::remove_all(tmp_dir, ec);
    throw;
  }

  fs::remove_all(final_dir, ec);
  fs::rename(tmp_dir, final_dir);
  log << "run directory: " << final_dir.string() << "\n";
  return {exit_code, final_dir.string(),
          exit_code == 0 ? "ok" : "tolerance violation"};
}

}  // namespace gibbs
