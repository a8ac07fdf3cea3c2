#include "ivf/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "ivf/coeffs.hpp"
#include "ivf/csv.hpp"
#include "ivf/errors.hpp"
#include "ivf/flow.hpp"
#include "ivf/parallel.hpp"

#ifndef IVF_VERSION
#define IVF_VERSION "0.0.0"
#endif

namespace ivf {

namespace fs = std::filesystem;

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::iterate: return "iterate";
    case ExperimentKind::flow_error: return "flow-error";
    case ExperimentKind::dh_scan: return "dh-scan";
    case ExperimentKind::restore_field: return "restore-field";
    case ExperimentKind::section: return "section";
    case ExperimentKind::invariant_series: return "invariant-series";
    case ExperimentKind::seed_levelset: return "seed-levelset";
    case ExperimentKind::coeff_dump: return "coeff-dump";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
  for (ExperimentKind k : {ExperimentKind::iterate, ExperimentKind::flow_error, ExperimentKind::dh_scan,
                           ExperimentKind::restore_field, ExperimentKind::section, ExperimentKind::invariant_series,
                           ExperimentKind::seed_levelset, ExperimentKind::coeff_dump})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

namespace {

// ---------------------------------------------------------------------------
// JSON helpers. Every accessor throws ConfigError naming the offending key.

const Json& need(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError("missing field '" + where + key + "'");
  return obj.at(key);
}

double num(const Json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError("'" + name + "' must be a number");
  return v.get<double>();
}

long integer(const Json& v, const std::string& name) {
  if (!v.is_number_integer()) throw ConfigError("'" + name + "' must be an integer");
  return v.get<long>();
}

double num_or(const Json& obj, const std::string& key, double fallback, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return num(obj.at(key), where + key);
}

long int_or(const Json& obj, const std::string& key, long fallback, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return integer(obj.at(key), where + key);
}

double positive(double v, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("'" + name + "' must be positive");
  return v;
}

std::vector<double> num_list(const Json& v, const std::string& name) {
  if (!v.is_array()) throw ConfigError("'" + name + "' must be an array of numbers");
  std::vector<double> out;
  for (const Json& e : v) out.push_back(num(e, name));
  return out;
}

std::vector<int> int_list(const Json& v, const std::string& name) {
  if (!v.is_array()) throw ConfigError("'" + name + "' must be an array of integers");
  std::vector<int> out;
  for (const Json& e : v) out.push_back(static_cast<int>(integer(e, name)));
  return out;
}

Vec vec_of(const Json& v, std::size_t dim, const std::string& name) {
  const std::vector<double> xs = num_list(v, name);
  if (xs.size() != dim)
    throw ConfigError("'" + name + "' has " + std::to_string(xs.size()) + " entries, expected " + std::to_string(dim));
  return Vec::from(xs);
}

std::vector<double> linspace(double a, double b, std::size_t count) {
  std::vector<double> out;
  if (count == 1) return {a};
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  return out;
}

int order_of(const Json& config) {
  const Json& ivf = need(config, "ivf", "");
  const long n = integer(need(ivf, "n", "ivf."), "ivf.n");
  if (n < 1 || n > kMaxOrder)
    throw ConfigError("'ivf.n' must be in [1, " + std::to_string(kMaxOrder) + "], got " +
                      std::to_string(n));
  return static_cast<int>(n);
}

GridSpec parse_grid(const Json& config, std::size_t dim) {
  const Json& g = need(config, "grid", "");
  GridSpec grid;
  grid.lower = num_list(need(g, "lower", "grid."), "grid.lower");
  grid.upper = num_list(need(g, "upper", "grid."), "grid.upper");
  for (int r : int_list(need(g, "resolution", "grid."), "grid.resolution")) {
    if (r < 1) throw ConfigError("'grid.resolution' entries must be >= 1");
    grid.resolution.push_back(static_cast<std::size_t>(r));
  }
  grid.validate(dim);
  return grid;
}

std::vector<double> parse_eps_list(const Json& scan) {
  std::vector<double> eps;
  if (scan.contains("epsilon_list")) {
    eps = num_list(scan.at("epsilon_list"), "scan.epsilon_list");
  } else if (scan.contains("epsilon_range")) {
    const Json& r = scan.at("epsilon_range");
    const double a = num(need(r, "from", "scan.epsilon_range."), "scan.epsilon_range.from");
    const double b = num(need(r, "to", "scan.epsilon_range."), "scan.epsilon_range.to");
    const long c = integer(need(r, "count", "scan.epsilon_range."), "scan.epsilon_range.count");
    if (c < 1) throw ConfigError("'scan.epsilon_range.count' must be >= 1");
    eps = linspace(a, b, static_cast<std::size_t>(c));
  } else {
    throw ConfigError("missing field 'scan.epsilon_list' (or 'scan.epsilon_range')");
  }
  if (eps.empty()) throw ConfigError("'scan' needs at least one epsilon");
  for (double e : eps)
    if (!(e > 0.0)) throw ConfigError("scan epsilons must be positive");
  return eps;
}

std::vector<int> parse_n_list(const Json& scan) {
  const std::vector<int> ns = int_list(need(scan, "n_list", "scan."), "scan.n_list");
  if (ns.empty()) throw ConfigError("'scan.n_list' must not be empty");
  for (int n : ns)
    if (n < 1 || n > kMaxOrder) throw ConfigError("'scan.n_list' entries must be in [1, 64]");
  return ns;
}

struct LevelsetSpec {
  double energy = 0.0;
  std::vector<double> psi_values;
  std::size_t count = 1;
};

struct SeedSpec {
  std::vector<Vec> points;  // explicit or generated
  std::optional<LevelsetSpec> levelset;
};

SeedSpec parse_seeds(const Json& config, std::size_t dim) {
  const Json& s = need(config, "seeds", "");
  SeedSpec out;
  if (s.contains("points")) {
    const Json& pts = s.at("points");
    if (!pts.is_array()) throw ConfigError("'seeds.points' must be an array");
    for (const Json& p : pts) out.points.push_back(vec_of(p, dim, "seeds.points[]"));
  } else if (s.contains("line")) {
    const Json& l = s.at("line");
    const Vec a = vec_of(need(l, "from", "seeds.line."), dim, "seeds.line.from");
    const Vec b = vec_of(need(l, "to", "seeds.line."), dim, "seeds.line.to");
    const long c = integer(need(l, "count", "seeds.line."), "seeds.line.count");
    if (c < 1) throw ConfigError("'seeds.line.count' must be >= 1");
    for (double s01 : linspace(0.0, 1.0, static_cast<std::size_t>(c))) out.points.push_back(a + s01 * (b - a));
  } else if (s.contains("random")) {
    const Json& r = s.at("random");
    const Vec lo = vec_of(need(r, "lower", "seeds.random."), dim, "seeds.random.lower");
    const Vec hi = vec_of(need(r, "upper", "seeds.random."), dim, "seeds.random.upper");
    const long c = integer(need(r, "count", "seeds.random."), "seeds.random.count");
    if (c < 1) throw ConfigError("'seeds.random.count' must be >= 1");
    std::mt19937_64 rng(static_cast<std::uint64_t>(int_or(config, "random_seed", 1, "")));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (long i = 0; i < c; ++i) {
      Vec p(dim);
      for (std::size_t d = 0; d < dim; ++d) p[d] = lo[d] + (hi[d] - lo[d]) * u(rng);
      out.points.push_back(p);
    }
  } else if (s.contains("levelset")) {
    const Json& l = s.at("levelset");
    LevelsetSpec ls;
    ls.energy = num(need(l, "energy", "seeds.levelset."), "seeds.levelset.energy");
    ls.psi_values = num_list(need(l, "psi_values", "seeds.levelset."), "seeds.levelset.psi_values");
    const long c = integer(need(l, "count", "seeds.levelset."), "seeds.levelset.count");
    if (c < 1) throw ConfigError("'seeds.levelset.count' must be >= 1");
    if (ls.psi_values.empty()) throw ConfigError("'seeds.levelset.psi_values' must not be empty");
    ls.count = static_cast<std::size_t>(c);
    out.levelset = ls;
  } else {
    throw ConfigError("'seeds' needs one of 'points', 'line', 'random', 'levelset'");
  }
  return out;
}

struct OrbitSpec {
  long iterates = 0;
  long stride = 1;
  std::string mode = "map";       // iterate: map | field
  std::string sample = "iterates";  // invariant-series: iterates | crossings
};

OrbitSpec parse_orbit(const Json& config) {
  const Json& o = need(config, "orbit", "");
  OrbitSpec out;
  out.iterates = integer(need(o, "iterates", "orbit."), "orbit.iterates");
  if (out.iterates < 0) throw ConfigError("'orbit.iterates' must be >= 0");
  out.stride = int_or(o, "stride", 1, "orbit.");
  if (out.stride < 1) throw ConfigError("'orbit.stride' must be >= 1");
  if (o.contains("mode")) out.mode = o.at("mode").get<std::string>();
  if (out.mode != "map" && out.mode != "field") throw ConfigError("'orbit.mode' must be 'map' or 'field'");
  if (o.contains("sample")) out.sample = o.at("sample").get<std::string>();
  if (out.sample != "iterates" && out.sample != "crossings")
    throw ConfigError("'orbit.sample' must be 'iterates' or 'crossings'");
  return out;
}

struct SectionRun {
  SectionSpec spec;
  std::size_t crossings_per_seed = 100;
  long max_iterates_per_seed = 10'000'000;
};

SectionRun parse_section_run(const Json& config, std::size_t dim) {
  const Json& s = need(config, "section", "");
  SectionRun out;
  out.spec = parse_section_spec(s, dim);
  const long c = int_or(s, "crossings_per_seed", 100, "section.");
  if (c < 1) throw ConfigError("'section.crossings_per_seed' must be >= 1");
  out.crossings_per_seed = static_cast<std::size_t>(c);
  out.max_iterates_per_seed = int_or(s, "max_iterates_per_seed", 10'000'000, "section.");
  if (out.max_iterates_per_seed < 1) throw ConfigError("'section.max_iterates_per_seed' must be >= 1");
  return out;
}

Vec base_point(const Json& config, const MapConfig& mc) {
  if (config.contains("invariant") && config.at("invariant").contains("base_point"))
    return vec_of(config.at("invariant").at("base_point"), mc.dim(), "invariant.base_point");
  return mc.default_base_point();
}

std::string output_name(const Json& config, ExperimentKind kind) {
  if (config.contains("output")) {
    const std::string s = config.at("output").get<std::string>();
    if (s.empty() || fs::path(s).has_parent_path() || s == "." || s == "..")
      throw ConfigError("'output' must be a plain file name");
    return s;
  }
  return std::string(to_string(kind)) + ".csv";
}

// Everything a run needs, resolved once so validate and run agree.
struct Plan {
  ExperimentKind kind{};
  std::optional<MapConfig> map;
  int n = 0;
  IntegratorSettings integ;
  InvariantOptions inv;
  std::string output;
  int workers = 1;
  std::uint64_t random_seed = 1;
  Json config;
};

Plan make_plan(const Json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> kKnown = {"experiment", "map",   "ivf",    "integrator", "invariant",
                                               "section",    "grid",  "scan",   "seeds",      "orbit",
                                               "output",     "workers", "random_seed"};
  for (const auto& item : config.items())
    if (!kKnown.count(item.key())) throw ConfigError("unknown field '" + item.key() + "'");
  Plan p;
  p.config = config;
  const Json& kind = need(config, "experiment", "");
  if (!kind.is_string()) throw ConfigError("'experiment' must be a string");
  p.kind = parse_experiment_kind(kind.get<std::string>());
  p.output = output_name(config, p.kind);
  p.workers = static_cast<int>(int_or(config, "workers", 1, ""));
  if (p.workers < 1) throw ConfigError("'workers' must be >= 1");
  p.random_seed = static_cast<std::uint64_t>(int_or(config, "random_seed", 1, ""));
  p.integ = parse_integrator(config);
  p.inv = parse_invariant_options(config);

  if (p.kind == ExperimentKind::coeff_dump) {
    const Json& ivf = need(config, "ivf", "");
    if (ivf.contains("n_list"))
      for (int n : int_list(ivf.at("n_list"), "ivf.n_list")) {
        if (n < 1 || n > kMaxOrder) throw ConfigError("'ivf.n_list' entries must be in [1, 64]");
      }
    else
      p.n = order_of(config);
    return p;
  }

  p.map = parse_map_config(need(config, "map", ""));
  const std::size_t dim = p.map->dim();
  // Building the family once catches inconsistent parameter blocks early.
  (void)p.map->build();

  switch (p.kind) {
    case ExperimentKind::iterate: {
      const OrbitSpec o = parse_orbit(config);
      parse_seeds(config, dim);
      if (o.mode == "field") p.n = order_of(config);
      break;
    }
    case ExperimentKind::flow_error:
      p.n = order_of(config);
      parse_grid(config, dim);
      break;
    case ExperimentKind::dh_scan: {
      const Json& scan = need(config, "scan", "");
      parse_n_list(scan);
      parse_eps_list(scan);
      parse_grid(config, dim);
      if (dim % 2 != 0) throw ConfigError("dh-scan needs an even-dimensional map");
      break;
    }
    case ExperimentKind::restore_field: {
      if (p.map->kind != "flow") throw ConfigError("restore-field needs \"map\": \"flow\" (the field is the oracle)");
      const Json& scan = need(config, "scan", "");
      parse_n_list(scan);
      parse_eps_list(scan);
      const SeedSpec s = parse_seeds(config, dim);
      if (s.levelset) throw ConfigError("restore-field needs explicit or random seeds");
      break;
    }
    case ExperimentKind::section: {
      p.n = order_of(config);
      parse_section_run(config, dim);
      const SeedSpec s = parse_seeds(config, dim);
      if (s.levelset && dim != 4) throw ConfigError("levelset seeds need a four-dimensional map");
      if (s.levelset) need(config, "invariant", "");
      break;
    }
    case ExperimentKind::invariant_series: {
      p.n = order_of(config);
      need(config, "invariant", "");
      const OrbitSpec o = parse_orbit(config);
      vec_of(need(need(config, "orbit", ""), "x0", "orbit."), dim, "orbit.x0");
      if (o.sample == "crossings") parse_section_run(config, dim);
      if (dim % 2 != 0) throw ConfigError("invariant-series needs an even-dimensional map");
      break;
    }
    case ExperimentKind::seed_levelset: {
      p.n = order_of(config);
      need(config, "invariant", "");
      const SeedSpec s = parse_seeds(config, dim);
      if (!s.levelset) throw ConfigError("seed-levelset needs 'seeds.levelset'");
      if (dim != 4) throw ConfigError("seed-levelset needs a four-dimensional map");
      break;
    }
    case ExperimentKind::coeff_dump:
      break;
  }
  if (p.map && p.map->epsilon == 0.0 && p.n > 0 && p.map->kind != "flow")
    throw ConfigError("'map.epsilon' must be nonzero for interpolating fields");
  // The invariant's base point must be a valid state.
  if (config.contains("invariant")) {
    const Vec b = base_point(config, *p.map);
    if (!p.map->build().in_domain(b)) throw ConfigError("'invariant.base_point' lies outside the map domain");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Cost model, in map applications. One evaluation of X_n costs 2n map
// applications; an RKF7(8) step costs 13 evaluations.

constexpr double kStages = 13.0;
constexpr double kDefaultRombergEvals = 65.0;

// Steps an adaptive run needs to cover a span starting from h_init, when the
// step can grow by at most a factor 4 per accepted step.
double steps_for_span(double span, const IntegratorSettings& s) {
  span = std::abs(span);
  double t = 0.0, h = s.h_init;
  int steps = 0;
  while (t < span && steps < 100000) {
    t += h;
    h = std::min(4.0 * h, s.h_max);
    ++steps;
  }
  return std::max(1, steps);
}

double flow_evals(double span, const IntegratorSettings& s) { return kStages * steps_for_span(span, s); }

// Projection onto a section: one full step to bracket the root, about three
// refinement flows over half a step, and a slope evaluation per iteration.
double projection_evals(double h, const IntegratorSettings& s) {
  return flow_evals(h, s) + 3.0 * flow_evals(h / 2.0, s) + 4.0;
}

// Field evaluations of one invariant evaluation, measured at a few points.
double invariant_evals(const MapFamily& map, int n, const Vec& base, const InvariantOptions& opts,
                       const std::vector<Vec>& probes) {
  double total = 0.0;
  int count = 0;
  try {
    const AdiabaticInvariant h(InterpolatingField(map, n), base, opts);
    for (const Vec& x : probes) {
      const InvariantEvaluation e = h.evaluate(x);
      if (e.status == InvariantStatus::domain_escape) continue;
      total += static_cast<double>(e.evaluations);
      ++count;
    }
  } catch (const std::exception&) {
  }
  return count ? total / count : kDefaultRombergEvals;
}

// Iterates between consecutive section crossings, measured on the plain map
// from a representative seed.
double iterates_per_crossing(const MapFamily& map, const SectionSpec& spec, Vec x) {
  constexpr long kPilot = 20000;
  long crossings = 0;
  long k = 0;
  x = map.reduce(x);
  double gx = spec.g(x);
  for (; k < kPilot && crossings < 50; ++k) {
    const Vec next = map.reduce(map.apply(x));
    if (!map.in_domain(next)) break;
    const double gn = spec.g(next);
    if (gx * gn <= 0.0 && std::abs(gx) < spec.local_bound && std::abs(gn) < spec.local_bound) ++crossings;
    x = next;
    gx = gn;
  }
  if (crossings == 0) return static_cast<double>(std::max<long>(k, 1));
  return static_cast<double>(k) / static_cast<double>(crossings);
}

// Representative level-set seed from the closed-form limit Hamiltonian.
std::optional<Vec> limit_levelset_point(const MapFamily& map, const Vec& base, const LevelsetSpec& ls) {
  if (!map.limit_hamiltonian() || map.dim() != 4) return std::nullopt;
  const auto& h0 = *map.limit_hamiltonian();
  const double psi = ls.psi_values.front();
  auto f = [&](double j2) { return h0(Vec{psi, psi, 0.0, j2}) - h0(base) - ls.energy; };
  double lo = 0.0, hi = 0.5;
  if (f(lo) >= 0.0) return std::nullopt;
  while (f(hi) < 0.0 && hi < 64.0) hi *= 2.0;
  if (f(hi) < 0.0) return std::nullopt;
  for (int i = 0; i < 60; ++i) {
    const double m = 0.5 * (lo + hi);
    (f(m) < 0.0 ? lo : hi) = m;
  }
  return Vec{psi, psi, 0.0, 0.5 * (lo + hi)};
}

struct LoopPilot {
  double evals = 0.0;   // auxiliary-field evaluations for one loop
  double period = 0.0;  // time to close the loop
};

// One loop of the level curve, traced on the limit Hamiltonian with the
// seeding integrator settings.
IntegratorSettings levelset_integrator() {
  IntegratorSettings s;
  s.abs_tol = s.rel_tol = 1e-7;
  s.h_init = 1e-2;
  s.h_max = 0.5;
  s.h_min = 1e-10;
  s.max_steps = 100000;
  return s;
}

std::optional<LoopPilot> levelset_loop(const MapFamily& map, const Vec& start) {
  if (!map.limit_hamiltonian()) return std::nullopt;
  const auto& h0 = *map.limit_hamiltonian();
  const double psi = start[0];
  constexpr double kDelta = 1e-5, kChunk = 0.05;
  auto value = [&](double j1, double j2) { return h0(Vec{psi, psi, j1, j2}); };
  const VectorField aux = [&](const Vec& j) {
    return Vec{-(value(j[0], j[1] + kDelta) - value(j[0], j[1] - kDelta)) / (2 * kDelta),
               (value(j[0] + kDelta, j[1]) - value(j[0] - kDelta, j[1])) / (2 * kDelta)};
  };
  const IntegratorSettings s = levelset_integrator();
  Vec j{start[2], start[3]};
  LoopPilot out;
  double turned = 0.0;
  for (int chunk = 0; chunk < 100000; ++chunk) {
    const IntegrationResult r = integrate_rkf78(aux, j, kChunk, s);
    if (!r.ok()) return std::nullopt;
    out.evals += static_cast<double>(r.evaluations);
    out.period += kChunk;
    turned += wrap_angle(std::atan2(r.state[1], r.state[0]) - std::atan2(j[1], j[0]));
    if (std::abs(turned) >= kTwoPi) return out;
    j = r.state;
  }
  return std::nullopt;
}

// Invariant evaluations per psi value: bisection along J2, one timed loop with
// four invariant evaluations per auxiliary evaluation, count - 1 placement
// segments, and a radial bisection per placed point.
double levelset_cost(const MapFamily& map, const Vec& base, const LevelsetSpec& ls, int n,
                     const InvariantOptions& opts, std::vector<std::string>& notes) {
  const std::optional<Vec> start = limit_levelset_point(map, base, ls);
  std::optional<LoopPilot> loop;
  if (start) loop = levelset_loop(map, *start);
  if (!loop) {
    notes.push_back("no closed-form level set for the seeding estimate; assumed 2000 auxiliary evaluations per loop");
    loop = LoopPilot{2000.0, 10.0};
  }
  const double count = static_cast<double>(ls.count);
  double placement = 0.0;
  if (ls.count > 1) {
    const double segment = kStages * steps_for_span(loop->period / count, levelset_integrator());
    placement = std::max(loop->evals, (count - 1.0) * segment);
  }
  const double per_psi = 30.0 + 4.0 * (loop->evals + placement) + count * 25.0;
  const double inv = invariant_evals(map, n, base, opts, {start.value_or(base)});
  return static_cast<double>(ls.psi_values.size()) * per_psi * inv * 2.0 * n;
}

double estimate_cost(const Plan& p, std::vector<std::string>& notes) {
  const Json& c = p.config;
  const double field_maps = 2.0 * p.n;
  switch (p.kind) {
    case ExperimentKind::coeff_dump:
      return 0.0;
    case ExperimentKind::iterate: {
      const OrbitSpec o = parse_orbit(c);
      const MapFamily map = p.map->build();
      const double seeds = static_cast<double>(parse_seeds(c, map.dim()).points.size());
      const double per = o.mode == "map" ? 1.0 : flow_evals(map.time_step(), p.integ) * field_maps;
      return seeds * static_cast<double>(o.iterates) * per;
    }
    case ExperimentKind::flow_error: {
      const MapFamily map = p.map->build();
      const double pts = static_cast<double>(parse_grid(c, map.dim()).size());
      return pts * (1.0 + flow_evals(map.time_step(), p.integ) * field_maps);
    }
    case ExperimentKind::dh_scan: {
      const Json& scan = c.at("scan");
      const GridSpec grid = parse_grid(c, p.map->dim());
      const double pts = static_cast<double>(grid.size());
      const std::vector<double> eps = parse_eps_list(scan);
      const Vec base = base_point(c, *p.map);
      std::vector<Vec> probes;
      for (std::size_t i : {grid.size() / 4, grid.size() / 2, 3 * grid.size() / 4}) probes.push_back(grid.point(i));
      const MapFamily mid = p.map->build(eps[eps.size() / 2]);
      double total = 0.0;
      for (int n : parse_n_list(scan)) {
        const double inv = invariant_evals(mid, n, base, p.inv, probes);
        total += static_cast<double>(eps.size()) * pts * (1.0 + 2.0 * inv * 2.0 * n);
      }
      return total;
    }
    case ExperimentKind::restore_field: {
      const Json& scan = c.at("scan");
      const double pts = static_cast<double>(parse_seeds(c, p.map->dim()).points.size());
      const double eps_count = static_cast<double>(parse_eps_list(scan).size());
      double total = 0.0;
      for (int n : parse_n_list(scan)) total += eps_count * pts * 2.0 * n;
      notes.push_back("restore-field map applications are RKF7(8) flow integrations, each far costlier than a map step");
      return total;
    }
    case ExperimentKind::section: {
      const MapFamily map = p.map->build();
      const SectionRun sr = parse_section_run(c, map.dim());
      const SeedSpec seeds = parse_seeds(c, map.dim());
      double seed_count = static_cast<double>(seeds.points.size());
      double total = 0.0;
      std::optional<Vec> probe = seeds.points.empty() ? std::nullopt : std::optional<Vec>(seeds.points.front());
      if (seeds.levelset) {
        seed_count = static_cast<double>(seeds.levelset->psi_values.size() * seeds.levelset->count);
        const Vec base = base_point(c, *p.map);
        total += levelset_cost(map, base, *seeds.levelset, p.n, p.inv, notes);
        probe = limit_levelset_point(map, base, *seeds.levelset);
      }
      double ipc = 2.0 * kPi / (std::abs(map.time_step()) + 1e-300);
      if (probe) {
        ipc = iterates_per_crossing(map, sr.spec, *probe);
      } else {
        notes.push_back("no representative seed for the crossing rate; assumed one crossing per 2*pi/h iterates");
      }
      const double per_crossing = ipc + projection_evals(map.time_step(), p.integ) * field_maps;
      total += seed_count * static_cast<double>(sr.crossings_per_seed) * per_crossing;
      return total;
    }
    case ExperimentKind::invariant_series: {
      const OrbitSpec o = parse_orbit(c);
      const MapFamily map = p.map->build();
      const Vec x0 = vec_of(c.at("orbit").at("x0"), map.dim(), "orbit.x0");
      const double inv = invariant_evals(map, p.n, base_point(c, *p.map), p.inv, {x0}) * field_maps;
      const double iters = static_cast<double>(o.iterates);
      if (o.sample == "iterates") return iters + (iters / static_cast<double>(o.stride) + 1.0) * inv;
      const SectionRun sr = parse_section_run(c, map.dim());
      const double ipc = iterates_per_crossing(map, sr.spec, x0);
      const double samples = iters / ipc / static_cast<double>(o.stride) + 1.0;
      return iters + samples * (projection_evals(map.time_step(), p.integ) * field_maps + inv);
    }
    case ExperimentKind::seed_levelset: {
      const MapFamily map = p.map->build();
      const SeedSpec s = parse_seeds(c, map.dim());
      return levelset_cost(map, base_point(c, *p.map), *s.levelset, p.n, p.inv, notes);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Output plumbing.

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_atomic(const fs::path& path, const std::string& body) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os << body;
    os.flush();
    if (!os) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename " + tmp.string() + " to " + path.string());
  }
}

std::string coords_header(std::size_t dim, const std::string& prefix) {
  std::string s;
  for (std::size_t i = 0; i < dim; ++i) s += (i ? "," : "") + prefix + std::to_string(i + 1);
  return s;
}

// Shared state of a run: artifacts, failures and counters.
struct Ctx {
  const Plan& plan;
  const RunOptions& opts;
  int workers = 1;
  std::vector<std::string> failures;
  std::uint64_t field_evals = 0;
  std::uint64_t direct_maps = 0;
  std::uint64_t weighted_field_maps = 0;  // field evaluations times 2n
  std::vector<fs::path> outputs;

  void emit(const std::string& name, const std::string& body) {
    const fs::path path = opts.out_dir / name;
    write_atomic(path, body);
    outputs.push_back(path);
  }
  void count_field(const InterpolatingField& f) {
    const std::uint64_t e = f.eval_count();
    field_evals += e;
    weighted_field_maps += e * 2u * static_cast<std::uint64_t>(f.order());
  }
  void log(const std::string& msg) {
    if (!opts.quiet) std::fprintf(stderr, "%s\n", msg.c_str());
  }
};

// ---------------------------------------------------------------------------
// Runners.

void run_coeff_dump(Ctx& ctx) {
  const Json& ivf = ctx.plan.config.at("ivf");
  std::vector<int> ns = ivf.contains("n_list") ? int_list(ivf.at("n_list"), "ivf.n_list")
                                                : std::vector<int>{ctx.plan.n};
  std::ostringstream os;
  os << "n,k,p_nk\n";
  for (int n : ns) {
    const CoeffTable t(n);
    for (int k = -n; k <= n; ++k) os << n << ',' << k << ',' << fmt_num(t[k]) << '\n';
  }
  ctx.emit(ctx.plan.output, os.str());
}

void run_iterate(Ctx& ctx) {
  const Plan& p = ctx.plan;
  const MapFamily map = p.map->build();
  const OrbitSpec o = parse_orbit(p.config);
  const std::vector<Vec> seeds = parse_seeds(p.config, map.dim()).points;
  std::vector<std::vector<Vec>> paths(seeds.size());
  std::vector<std::string> errs(seeds.size());
  std::optional<InterpolatingField> field;
  if (o.mode == "field") field.emplace(map, p.n);

  parallel_for(seeds.size(), ctx.workers, [&](std::size_t i) {
    Vec x = map.reduce(seeds[i]);
    paths[i].push_back(x);
    for (long k = 0; k < o.iterates; ++k) {
      if (o.mode == "map") {
        x = map.reduce(map.apply(x));
      } else {
        const IntegrationResult r = try_advance(*field, x, map.time_step(), p.integ);
        if (!r.ok()) {
          errs[i] = "seed " + std::to_string(i) + ": flow stopped at iterate " + std::to_string(k) + " (" +
                    to_string(r.status) + ")";
          return;
        }
        x = map.reduce(r.state);
      }
      if (!map.in_domain(x)) {
        errs[i] = "seed " + std::to_string(i) + ": left the domain at iterate " + std::to_string(k + 1);
        return;
      }
      paths[i].push_back(x);
    }
  });

  std::ostringstream os;
  os << "seed_id,k," << coords_header(map.dim(), "x") << '\n';
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (std::size_t k = 0; k < paths[i].size(); ++k) {
      os << i << ',' << k;
      for (double v : paths[i][k]) os << ',' << fmt_num(v);
      os << '\n';
    }
    if (o.mode == "map") ctx.direct_maps += paths[i].size() - 1;
    if (!errs[i].empty()) ctx.failures.push_back(errs[i]);
  }
  if (field) ctx.count_field(*field);
  ctx.emit(p.output, os.str());
}

void run_flow_error(Ctx& ctx) {
  const Plan& p = ctx.plan;
  const MapFamily map = p.map->build();
  const GridSpec grid = parse_grid(p.config, map.dim());
  const ErrorGrid eg = flowmap_error_grid(map, p.n, grid, p.integ, ctx.workers);
  std::ostringstream os;
  eg.write_csv(os);
  ctx.field_evals += eg.field_evaluations;
  ctx.weighted_field_maps += eg.field_evaluations * 2u * static_cast<std::uint64_t>(p.n);
  ctx.direct_maps += grid.size();
  for (std::size_t i = 0; i < eg.log10_err.size(); ++i)
    if (std::isnan(eg.log10_err[i])) ctx.failures.push_back("grid point " + to_string(eg.points[i]) + ": flow failed");
  ctx.emit(p.output, os.str());
}

void run_dh_scan(Ctx& ctx) {
  const Plan& p = ctx.plan;
  const Json& scan = p.config.at("scan");
  const std::vector<int> ns = parse_n_list(scan);
  const std::vector<double> eps = parse_eps_list(scan);
  const GridSpec grid = parse_grid(p.config, p.map->dim());
  const Vec base = base_point(p.config, *p.map);
  const MapConfig mc = *p.map;
  std::ostringstream os;
  std::vector<DeltaHRow> all;
  for (int n : ns) {
    for (double e : eps) {
      const MapFamily map = mc.build(e);
      const std::vector<DeltaHRow> rows = delta_h_scan([&](double) { return map; }, {n}, {e}, grid, base, p.inv,
                                                       ctx.workers);
      for (const DeltaHRow& r : rows) {
        all.push_back(r);
        ctx.field_evals += r.field_evaluations;
        ctx.weighted_field_maps += r.field_evaluations * 2u * static_cast<std::uint64_t>(n);
        if (r.failures > 0)
          ctx.failures.push_back("n=" + std::to_string(n) + " eps=" + fmt_num(e) + ": " + std::to_string(r.failures) +
                                 " grid points failed");
      }
      ctx.direct_maps += grid.size();
    }
  }
  write_delta_h_csv(os, all);
  ctx.emit(p.output, os.str());
}

void run_restore_field(Ctx& ctx) {
  const Plan& p = ctx.plan;
  const Json& scan = p.config.at("scan");
  const std::vector<int> ns = parse_n_list(scan);
  const std::vector<double> eps = parse_eps_list(scan);
  const std::vector<Vec> pts = parse_seeds(p.config, p.map->dim()).points;
  std::ostringstream os;
  os << "n,epsilon,max_error,failures\n";
  for (int n : ns) {
    for (double e : eps) {
      const MapFamily map = p.map->build(e);
      const VectorField& y = *map.limit_field();
      const InterpolatingField field(map, n);
      std::vector<double> err(pts.size(), std::numeric_limits<double>::quiet_NaN());
      parallel_for(pts.size(), ctx.workers, [&](std::size_t i) {
        try {
          err[i] = distance(field.eval(pts[i]), y(pts[i]));
        } catch (const std::exception&) {
        }
      });
      double worst = 0.0;
      std::size_t fails = 0;
      for (double v : err) {
        if (std::isnan(v)) ++fails;
        else worst = std::max(worst, v);
      }
      if (fails) ctx.failures.push_back("n=" + std::to_string(n) + " eps=" + fmt_num(e) + ": " +
                                        std::to_string(fails) + " points failed");
      os << n << ',' << fmt_num(e) << ',' << fmt_num(worst) << ',' << fails << '\n';
      ctx.count_field(field);
    }
  }
  ctx.emit(p.output, os.str());
}

std::vector<Vec> resolve_seeds(Ctx& ctx, const AdiabaticInvariant* h, std::vector<std::string>& log) {
  const Plan& p = ctx.plan;
  const SeedSpec s = parse_seeds(p.config, p.map->dim());
  if (!s.levelset) return s.points;
  SeedResult r = seed_levelset(*h, s.levelset->energy, s.levelset->psi_values, s.levelset->count);
  for (std::string& m : r.log) log.push_back(std::move(m));
  return r.seeds;
}

void run_section(Ctx& ctx) {
  const Plan& p = ctx.plan;
  const MapFamily map = p.map->build();
  const SectionRun sr = parse_section_run(p.config, map.dim());
  const InterpolatingField field(map, p.n);
  std::vector<std::string> seed_log;
  std::optional<AdiabaticInvariant> h;
  if (p.config.contains("invariant")) h.emplace(field, base_point(p.config, *p.map), p.inv);
  const std::vector<Vec> seeds = resolve_seeds(ctx, h ? &*h : nullptr, seed_log);
  for (const std::string& m : seed_log) ctx.failures.push_back("seeding: " + m);
  ctx.log("section: " + std::to_string(seeds.size()) + " seeds");

  const SectionCloud cloud =
      section_cloud(field, sr.spec, seeds, sr.crossings_per_seed, p.integ, sr.max_iterates_per_seed, ctx.workers);
  std::ostringstream os;
  write_cloud_csv(os, cloud);
  for (std::size_t i = 0; i < cloud.seeds.size(); ++i) {
    const SeedStatus& st = cloud.seeds[i];
    ctx.direct_maps += static_cast<std::uint64_t>(st.iterates);
    if (st.escaped) ctx.failures.push_back("seed " + std::to_string(i) + ": escaped the domain");
    if (st.exhausted)
      ctx.failures.push_back("seed " + std::to_string(i) + ": iterate cap reached with " +
                             std::to_string(st.collected) + " crossings");
  }
  // Skipped tangencies and in-section orbits are expected outcomes, logged but not failures.
  for (const std::string& m : cloud.log) ctx.log(m);
  ctx.count_field(field);
  ctx.emit(p.output, os.str());
}

void run_invariant_series(Ctx& ctx) {
  const Plan& p = ctx.plan;
  const MapFamily map = p.map->build();
  const OrbitSpec o = parse_orbit(p.config);
  const Vec x0 = vec_of(p.config.at("orbit").at("x0"), map.dim(), "orbit.x0");
  const InterpolatingField field(map, p.n);
  const AdiabaticInvariant h(field, base_point(p.config, *p.map), p.inv);
  std::vector<SeriesPoint> series;
  if (o.sample == "iterates") {
    series = invariant_series(h, x0, o.iterates, o.stride);
  } else {
    const SectionRun sr = parse_section_run(p.config, map.dim());
    series = section_invariant_series(h, sr.spec, x0, o.iterates, o.stride, p.integ);
  }
  ctx.direct_maps += static_cast<std::uint64_t>(o.iterates);
  for (const SeriesPoint& s : series)
    if (std::isnan(s.value)) ctx.failures.push_back("iterate " + std::to_string(s.index) + ": invariant failed");
  std::ostringstream os;
  write_series_csv(os, series);
  ctx.count_field(field);
  ctx.emit(p.output, os.str());
}

void run_seed_levelset(Ctx& ctx) {
  const Plan& p = ctx.plan;
  const MapFamily map = p.map->build();
  const InterpolatingField field(map, p.n);
  const AdiabaticInvariant h(field, base_point(p.config, *p.map), p.inv);
  std::vector<std::string> log;
  const std::vector<Vec> seeds = resolve_seeds(ctx, &h, log);
  for (const std::string& m : log) ctx.failures.push_back("seeding: " + m);
  std::ostringstream os;
  os << "seed_id," << coords_header(map.dim(), "x") << ",h_n\n";
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const InvariantEvaluation e = h.evaluate(seeds[i]);
    os << i;
    for (double v : seeds[i]) os << ',' << fmt_num(v);
    os << ',' << fmt_num(e.ok() ? e.value : std::numeric_limits<double>::quiet_NaN()) << '\n';
  }
  ctx.count_field(field);
  ctx.emit(p.output, os.str());
}

}  // namespace

// ---------------------------------------------------------------------------
// Public parsing helpers.

MapFamily MapConfig::build(double eps) const {
  MapFamily base = [&]() -> MapFamily {
    if (kind == "standard") return standard_map(eps);
    if (kind == "froeschle") {
      FroeschleParams fp;
      fp.a1 = num_or(params, "a1", fp.a1, "map.params.");
      fp.a2 = num_or(params, "a2", fp.a2, "map.params.");
      fp.a3 = num_or(params, "a3", fp.a3, "map.params.");
      fp.eta = num_or(params, "eta", fp.eta, "map.params.");
      return froeschle_map(eps, fp);
    }
    if (kind == "flow") {
      const std::string field = params.value("field", std::string("pendulum"));
      const double tol = positive(num_or(params, "integ_tol", 1e-13, "map.params."), "map.params.integ_tol");
      if (field == "pendulum") return flow_map(pendulum_field(), 2, eps, tol, "pendulum-flow", {true, false});
      if (field == "linear")
        return flow_map(linear_field(num_or(params, "a", 1.0, "map.params.")), 1, eps, tol, "linear-flow", {false});
      throw ConfigError("unknown flow field '" + field + "' (expected pendulum or linear)");
    }
    throw ConfigError("unknown map '" + kind + "' (expected standard, froeschle or flow)");
  }();
  if (!domain.lower.empty() || !domain.upper.empty() || std::isfinite(domain.action_radius)) {
    if ((!domain.lower.empty() && domain.lower.size() != base.dim()) ||
        (!domain.upper.empty() && domain.upper.size() != base.dim()))
      throw ConfigError("'map.domain' bounds must have one entry per coordinate");
    base.set_domain(domain);
  }
  if (power != 1 || std::any_of(winding.begin(), winding.end(), [](int w) { return w != 0; })) {
    if (!winding.empty() && winding.size() != base.dim())
      throw ConfigError("'map.winding' must have one entry per coordinate");
    return iterate_power(base, power, winding);
  }
  return base;
}

std::size_t MapConfig::dim() const {
  if (kind == "standard") return 2;
  if (kind == "froeschle") return 4;
  if (kind == "flow") return params.value("field", std::string("pendulum")) == "linear" ? 1 : 2;
  throw ConfigError("unknown map '" + kind + "'");
}

Vec MapConfig::default_base_point() const {
  if (kind == "froeschle") return Vec{kPi, kPi, 0.0, 0.0};
  return Vec(dim());
}

MapConfig parse_map_config(const Json& block) {
  if (!block.is_object()) throw ConfigError("'map' must be an object");
  MapConfig mc;
  const Json& kind = need(block, "map", "map.");
  if (!kind.is_string()) throw ConfigError("'map.map' must be a string");
  mc.kind = kind.get<std::string>();
  mc.epsilon = num(need(block, "epsilon", "map."), "map.epsilon");
  if (block.contains("params")) {
    mc.params = block.at("params");
    if (!mc.params.is_object()) throw ConfigError("'map.params' must be an object");
  }
  mc.power = static_cast<int>(int_or(block, "power", 1, "map."));
  if (mc.power < 1) throw ConfigError("'map.power' must be >= 1");
  if (block.contains("winding")) mc.winding = int_list(block.at("winding"), "map.winding");
  if (block.contains("domain")) {
    const Json& d = block.at("domain");
    if (d.contains("lower")) mc.domain.lower = num_list(d.at("lower"), "map.domain.lower");
    if (d.contains("upper")) mc.domain.upper = num_list(d.at("upper"), "map.domain.upper");
    if (d.contains("action_radius"))
      mc.domain.action_radius = positive(num(d.at("action_radius"), "map.domain.action_radius"),
                                         "map.domain.action_radius");
  }
  mc.dim();
  return mc;
}

IntegratorSettings parse_integrator(const Json& config) {
  IntegratorSettings s;
  if (!config.contains("integrator")) return s;
  const Json& b = config.at("integrator");
  const std::string w = "integrator.";
  s.abs_tol = positive(num_or(b, "abs_tol", s.abs_tol, w), w + "abs_tol");
  s.rel_tol = positive(num_or(b, "rel_tol", s.rel_tol, w), w + "rel_tol");
  s.h_init = positive(num_or(b, "h_init", s.h_init, w), w + "h_init");
  s.h_min = positive(num_or(b, "h_min", s.h_min, w), w + "h_min");
  s.h_max = positive(num_or(b, "h_max", s.h_max, w), w + "h_max");
  s.max_steps = int_or(b, "max_steps", s.max_steps, w);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("integrator: ") + e.what());
  }
  return s;
}

InvariantOptions parse_invariant_options(const Json& config) {
  InvariantOptions o;
  if (!config.contains("invariant")) return o;
  const Json& b = config.at("invariant");
  o.quad_tol = positive(num_or(b, "quad_tol", o.quad_tol, "invariant."), "invariant.quad_tol");
  o.max_levels = static_cast<int>(int_or(b, "max_levels", o.max_levels, "invariant."));
  if (o.max_levels < 2 || o.max_levels > 30) throw ConfigError("'invariant.max_levels' must be in [2, 30]");
  if (b.contains("path")) {
    const std::string path = b.at("path").get<std::string>();
    if (path == "straight") o.path = PathRule::straight;
    else if (path == "axis_parallel") o.path = PathRule::axis_parallel;
    else throw ConfigError("'invariant.path' must be 'straight' or 'axis_parallel'");
  }
  return o;
}

SectionSpec parse_section_spec(const Json& block, std::size_t dim) {
  const Json& surf = need(block, "surface", "section.");
  const std::string kind = need(surf, "kind", "section.surface.").get<std::string>();
  auto index = [&](const char* key) {
    const long i = integer(need(surf, key, "section.surface."), std::string("section.surface.") + key);
    if (i < 0 || static_cast<std::size_t>(i) >= dim) throw ConfigError("section index out of range");
    return static_cast<std::size_t>(i);
  };
  SectionSpec spec;
  if (kind == "angle_difference") {
    spec = angle_difference_section(index("i"), index("j"), dim);
  } else if (kind == "coordinate") {
    spec = coordinate_section(index("i"), num(need(surf, "value", "section.surface."), "section.surface.value"), dim);
  } else {
    throw ConfigError("'section.surface.kind' must be 'angle_difference' or 'coordinate'");
  }
  spec.newton_tol = positive(num_or(block, "newton_tol", spec.newton_tol, "section."), "section.newton_tol");
  spec.newton_max_iter = static_cast<int>(int_or(block, "newton_max_iter", spec.newton_max_iter, "section."));
  if (spec.newton_max_iter < 1) throw ConfigError("'section.newton_max_iter' must be >= 1");
  spec.transversality_floor =
      positive(num_or(block, "transversality_floor", spec.transversality_floor, "section."),
               "section.transversality_floor");
  return spec;
}

ValidationReport validate_config(const Json& config) {
  ValidationReport r;
  try {
    const Plan p = make_plan(config);
    r.estimated_map_applications = estimate_cost(p, r.notes);
  } catch (const ConfigError& e) {
    r.errors.push_back(e.what());
  } catch (const Json::exception& e) {
    r.errors.push_back(std::string("malformed value: ") + e.what());
  } catch (const std::exception& e) {
    r.errors.push_back(e.what());
  }
  return r;
}

std::string config_hash(const Json& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunSummary run_experiment(const Json& config, const RunOptions& opts) {
  RunSummary out;
  const auto start = std::chrono::steady_clock::now();
  const ValidationReport report = validate_config(config);
  if (!report.ok()) {
    out.exit_code = exit_code::schema;
    out.message = report.errors.front();
    return out;
  }
  out.estimated_map_applications = report.estimated_map_applications;
  const Plan plan = make_plan(config);

  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec || !fs::is_directory(opts.out_dir)) {
    out.exit_code = exit_code::io;
    out.message = "cannot create output directory " + opts.out_dir.string();
    return out;
  }

  Ctx ctx{plan, opts, 1, {}, 0, 0, 0, {}};
  ctx.workers = opts.workers > 0 ? opts.workers : plan.workers;
  try {
    switch (plan.kind) {
      case ExperimentKind::coeff_dump: run_coeff_dump(ctx); break;
      case ExperimentKind::iterate: run_iterate(ctx); break;
      case ExperimentKind::flow_error: run_flow_error(ctx); break;
      case ExperimentKind::dh_scan: run_dh_scan(ctx); break;
      case ExperimentKind::restore_field: run_restore_field(ctx); break;
      case ExperimentKind::section: run_section(ctx); break;
      case ExperimentKind::invariant_series: run_invariant_series(ctx); break;
      case ExperimentKind::seed_levelset: run_seed_levelset(ctx); break;
    }
  } catch (const IoError& e) {
    out.exit_code = exit_code::io;
    out.message = e.what();
  } catch (const ConfigError& e) {
    out.exit_code = exit_code::schema;
    out.message = e.what();
  } catch (const std::exception& e) {
    ctx.failures.push_back(std::string("aborted: ") + e.what());
  }

  out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.field_evaluations = ctx.field_evals;
  out.map_applications = ctx.direct_maps + ctx.weighted_field_maps;
  out.failures = ctx.failures.size();
  out.failure_log = ctx.failures;
  if (out.exit_code == exit_code::ok && !ctx.failures.empty()) {
    out.exit_code = exit_code::numerical;
    out.message = ctx.failures.front();
  }

  try {
    if (!ctx.failures.empty()) {
      std::string body;
      for (const std::string& f : ctx.failures) body += f + '\n';
      ctx.emit("failures.log", body);
    }
    Json manifest = {
        {"experiment", to_string(plan.kind)},
        {"config_hash", config_hash(config)},
        {"version", IVF_VERSION},
        {"compiler", __VERSION__},
        {"wall_time_s", out.wall_time_s},
        {"workers", ctx.workers},
        {"field_evaluations", out.field_evaluations},
        {"map_applications", out.map_applications},
        {"estimated_map_applications", out.estimated_map_applications},
        {"failures", out.failures},
        {"exit_code", out.exit_code},
        {"config", config},
    };
    Json files = Json::array();
    for (const fs::path& p : ctx.outputs) files.push_back(p.filename().string());
    manifest["outputs"] = files;
    ctx.emit("manifest.json", manifest.dump(2) + "\n");
  } catch (const IoError& e) {
    out.exit_code = exit_code::io;
    out.message = e.what();
  }
  out.outputs = ctx.outputs;
  return out;
}

}  // namespace ivf
