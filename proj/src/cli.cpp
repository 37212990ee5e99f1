#include "chainforge/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "chainforge/corpus.hpp"
#include "chainforge/ekeland.hpp"
#include "chainforge/filling.hpp"
#include "chainforge/flatnorm.hpp"
#include "chainforge/metric.hpp"
#include "chainforge/parallel.hpp"
#include "chainforge/slicing.hpp"
#include "chainforge/systolic.hpp"

namespace chainforge::cli {

namespace {

constexpr const char* kVersion = "1.0.0";

using clock = std::chrono::steady_clock;

class Legs {
 public:
  void start(std::string name) {
    name_ = std::move(name);
    t0_ = clock::now();
  }
  void stop() {
    timings_[name_] = std::chrono::duration<double, std::milli>(clock::now() - t0_).count();
  }
  void record(const std::string& name, double ms) { timings_[name] = ms; }
  Json json() const { return timings_; }

 private:
  std::string name_;
  clock::time_point t0_;
  Json timings_ = Json::object();
};

class Inputs {
 public:
  std::string load(const std::string& role, const std::string& path) {
    std::string text = read_file(path);
    Json e;
    e["role"] = role;
    e["path"] = path;
    e["sha256"] = sha256_hex(text);
    list_.push_back(std::move(e));
    return text;
  }
  ComplexPtr complex(const std::string& role, const std::string& path, EdgeMetric metric) {
    std::string text = load(role, path);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".off") == 0) return parse_off(text, path, metric);
    return complex_from_json(parse_json(text, path), path);
  }
  Chain chain(const std::string& role, const std::string& path, const ComplexPtr& cx) {
    return chain_from_json(parse_json(load(role, path), path), cx, path);
  }
  const Json& json() const { return list_; }

 private:
  Json list_ = Json::array();
};

Rational rational_flag(const std::optional<std::string>& v, const char* flag, const char* fallback) {
  std::string text = v ? *v : std::string(fallback);
  try {
    return parse_rational(text);
  } catch (const InputError&) {
    throw InputError(std::string(flag) + ": expected a number, got '" + text + "'");
  }
}

EdgeMetric edge_metric(const RunConfig& c) {
  if (c.edge_metric == "euclidean") return EdgeMetric::kEuclidean;
  if (c.edge_metric == "unit") return EdgeMetric::kUnit;
  throw InputError("--edge-metric: expected euclidean or unit");
}

NeighborhoodRule rule(const RunConfig& c) {
  if (c.rule == "reach") return NeighborhoodRule::kReach;
  if (c.rule == "vertex") return NeighborhoodRule::kVertex;
  throw InputError("--rule: expected reach or vertex");
}

NetStrategy strategy(const RunConfig& c) {
  if (c.strategy == "index") return NetStrategy::kIndexScan;
  if (c.strategy == "farthest") return NetStrategy::kFarthestPoint;
  throw InputError("--strategy: expected index or farthest");
}

int modulus(const RunConfig& c) { return c.p.value_or(2); }

Json optional_chain(const std::optional<Chain>& c) { return c ? chain_to_json(*c) : Json(nullptr); }

Json certificate_json(const FillingCertificate& c) {
  Json j;
  j["method"] = c.method;
  j["p"] = c.p;
  j["mass_L"] = rational_json(c.mass_L);
  j["mass_T"] = rational_json(c.mass_T);
  j["mass_ratio"] = c.mass_ratio;
  j["radius"] = rational_json(c.radius);
  j["proven_optimal"] = c.proven_optimal;
  j["T"] = chain_to_json(c.T);
  j["boundary_verified"] = true;
  return j;
}

Json cmd_flatnorm(const RunConfig& c, Inputs& in, Legs& legs) {
  legs.start("load");
  ComplexPtr cx = in.complex("complex", c.complex, edge_metric(c));
  Chain t = in.chain("chain", c.chain, cx);
  legs.stop();
  const FlatMode mode = c.relaxed ? FlatMode::kRelaxed : FlatMode::kExact;
  legs.start("compute");
  FlatDecomposition d = c.p ? flat_norm_mod_p(t, *c.p, mode) : flat_norm(t.with_modulus(std::nullopt), mode);
  legs.stop();
  legs.start("verify");
  if (!d.relaxed || d.integral) verify_decomposition(t, d, c.p);
  legs.stop();
  Json r;
  r["value"] = rational_json(d.value);
  r["relaxed"] = d.relaxed;
  r["integral"] = d.integral;
  r["R"] = chain_to_json(d.R);
  r["S"] = chain_to_json(d.S);
  r["Q"] = optional_chain(d.Q);
  if (d.relaxed) {
    r["relaxed_R"] = fractional_chain_to_json(d.relaxed_R, *cx, t.dim());
    r["relaxed_S"] = fractional_chain_to_json(d.relaxed_S, *cx, t.dim() + 1);
  }
  r["mass"] = rational_json(mass(t.with_modulus(std::nullopt)));
  if (c.p) r["mass_p"] = rational_json(mass_p(t.with_modulus(std::nullopt), *c.p));
  r["lp_solves"] = d.lp_solves;
  r["nodes"] = d.nodes;
  return r;
}

Json cmd_slice(const RunConfig& c, Inputs& in, Legs& legs) {
  legs.start("load");
  ComplexPtr cx = in.complex("complex", c.complex, edge_metric(c));
  Chain t = in.chain("chain", c.chain, cx);
  VertexFunction u = function_from_json(parse_json(in.load("function", c.function), c.function), cx->vertex_count(),
                                        c.function);
  legs.stop();
  if (c.p) t = t.modulus() ? t : reduce_mod_p(t, *c.p);
  legs.start("compute");
  Json r;
  r["lipschitz"] = rational_json(u.lipschitz(*cx));
  if (c.r) {
    Rational level = rational_flag(c.r, "--r", "0");
    Chain restricted = restrict_sublevel(t, u, level);
    Chain s = slice(t, u, level);
    r["r"] = rational_json(level);
    r["restricted"] = chain_to_json(restricted);
    r["slice"] = chain_to_json(s);
    r["slice_mass"] = rational_json(c.p ? mass_p(s, *c.p) : mass(s));
    bool critical = false;
    for (const Rational& v : u.values())
      if (v == level) critical = true;
    r["critical"] = critical;
    if (!critical && t.dim() >= 2) {
      // d<T,u,r> = -<dT,u,r>
      if (!(boundary(s) == -slice(boundary(t), u, level)))
        throw InvariantError("slice does not anticommute with the boundary");
      r["anticommutes"] = true;
    }
  }
  if (c.spectrum || !c.r) {
    SliceSpectrum sp = slice_spectrum(t, u, c.p);
    Json intervals = Json::array();
    for (const auto& iv : sp.intervals) {
      Json e;
      e["lo"] = rational_json(iv.lo);
      e["hi"] = rational_json(iv.hi);
      e["mass"] = rational_json(iv.mass);
      e["slice"] = chain_to_json(iv.slice);
      intervals.push_back(std::move(e));
    }
    Json s;
    s["intervals"] = std::move(intervals);
    s["integral"] = rational_json(sp.integral);
    s["lipschitz_mass"] = rational_json(sp.bound);
    s["ratio"] = sgn(sp.bound) > 0 ? Json(rational_json(sp.integral / sp.bound)) : Json(nullptr);
    r["spectrum"] = std::move(s);
  }
  legs.stop();
  return r;
}

Json cmd_embed(const RunConfig& c, Inputs& in, Legs& legs) {
  legs.start("load");
  FiniteMetricSpace space = parse_metric_csv(in.load("metric", c.metric), c.metric);
  legs.stop();
  const Rational eps = rational_flag(c.epsilon, "--epsilon", "1/1000");
  legs.start("compute");
  auto net = maximal_epsilon_net(space, eps, strategy(c));
  Embedding e = kuratowski_embed(space, net);
  Distortion d = distortion(space, e);
  legs.stop();
  legs.start("verify");
  for (std::size_t x = 0; x < space.size(); ++x)
    for (std::size_t y = x + 1; y < space.size(); ++y) {
      const Rational img = e.image_distance(x, y);
      if (img > space(x, y)) throw InvariantError("embedding expands a distance");
      if (space(x, y) > img + 4 * eps) throw InvariantError("embedding violates the 4 epsilon bound");
    }
  legs.stop();
  Json r;
  r["epsilon"] = rational_json(eps);
  r["net"] = net;
  r["covering_radius"] = rational_json(covering_radius(space, net));
  Json coords = Json::array();
  for (std::size_t x = 0; x < e.size(); ++x) {
    Json row = Json::array();
    for (const auto& v : e.coords(x)) row.push_back(to_exact_string(v));
    coords.push_back(std::move(row));
  }
  r["coords"] = std::move(coords);
  r["expansion"] = rational_json(d.expansion);
  r["contraction"] = rational_json(d.contraction);
  r["nonexpanding"] = true;
  r["four_epsilon_bound"] = true;
  return r;
}

Json cmd_rips(const RunConfig& c, Inputs& in, Legs& legs) {
  legs.start("load");
  FiniteMetricSpace space = parse_metric_csv(in.load("metric", c.metric), c.metric);
  legs.stop();
  if (c.max_dim < 1) throw InputError("--max-dim must be at least 1");
  legs.start("compute");
  ComplexPtr cx;
  Rational scale;
  if (c.epsilon) {
    Embedding e = kuratowski_embed(space, maximal_epsilon_net(space, rational_flag(c.epsilon, "--epsilon", ""), strategy(c)));
    FiniteMetricSpace image = e.image_metric();
    scale = c.scale ? rational_flag(c.scale, "--scale", "") : image.diameter();
    cx = build_rips(image, scale, c.max_dim, c.budget);
  } else {
    scale = c.scale ? rational_flag(c.scale, "--scale", "") : space.diameter();
    cx = c.serial ? build_rips_serial(space, scale, c.max_dim, c.budget) : build_rips(space, scale, c.max_dim, c.budget);
  }
  legs.stop();
  Json r;
  r["scale"] = rational_json(scale);
  Json counts = Json::array();
  for (int d = 0; d <= cx->dimension(); ++d) counts.push_back(cx->count(d));
  r["counts"] = std::move(counts);
  r["complex"] = complex_to_json(*cx);
  return r;
}

Json cmd_fillrad(const RunConfig& c, Inputs& in, Legs& legs) {
  legs.start("load");
  ComplexPtr cx = in.complex("ambient", c.ambient, edge_metric(c));
  Chain l = in.chain("cycle", c.cycle, cx);
  legs.stop();
  legs.start("compute");
  FillingRadius fr = c.serial ? filling_radius_serial(l, rule(c)) : filling_radius(l, rule(c));
  legs.stop();
  legs.start("verify");
  verify_filling(fr.witness);
  legs.stop();
  Json r;
  r["radius"] = rational_json(fr.radius);
  r["rule"] = c.rule;
  r["candidates"] = fr.candidates.size();
  r["probes"] = fr.probes;
  const Rational m = fr.witness.mass_L;
  if (sgn(m) > 0) r["radius_over_mass_root"] = to_double(fr.radius) / std::pow(to_double(m), 1.0 / l.dim());
  r["witness"] = certificate_json(fr.witness);
  if (c.profile) {
    Json prof = Json::array();
    for (const auto& [rad, ok] : fr.profile) prof.push_back(Json{{"radius", rational_json(rad)}, {"solvable", ok}});
    r["profile"] = std::move(prof);
  }
  return r;
}

Json cmd_fillvol(const RunConfig& c, Inputs& in, Legs& legs) {
  if (c.exact && c.greedy) throw InputError("--exact and --greedy are exclusive");
  legs.start("load");
  ComplexPtr cx = in.complex("ambient", c.ambient, edge_metric(c));
  Chain l = in.chain("cycle", c.cycle, cx);
  legs.stop();
  legs.start("compute");
  FillingCertificate cert = filling_volume(l, modulus(c), c.exact ? FillMode::kExact : FillMode::kGreedy);
  legs.stop();
  legs.start("verify");
  verify_filling(cert);
  legs.stop();
  Json r = certificate_json(cert);
  r["mode"] = c.exact ? "exact" : "greedy";
  return r;
}

Json cmd_decompose(const RunConfig& c, Inputs& in, Legs& legs) {
  legs.start("load");
  ComplexPtr cx = in.complex("ambient", c.ambient, edge_metric(c));
  Chain l = in.chain("cycle", c.cycle, cx);
  legs.stop();
  legs.start("compute");
  CycleDecomposition d = decompose_cycle(l, modulus(c));
  legs.stop();
  Json pieces = Json::array();
  for (const auto& piece : d.pieces) {
    Json e;
    e["center"] = piece.center;
    e["radius"] = rational_json(piece.radius);
    e["eta"] = rational_json(piece.eta);
    e["mass"] = rational_json(piece.mass);
    e["diameter"] = rational_json(piece.diameter);
    e["round"] = piece.round;
    e["chain"] = chain_to_json(piece.chain);
    pieces.push_back(std::move(e));
  }
  Json r;
  r["p"] = d.p;
  r["total_mass"] = rational_json(d.total_mass);
  r["rounds"] = d.rounds;
  Json rounds = Json::array();
  for (const auto& m : d.round_mass) rounds.push_back(rational_json(m));
  r["remainder_mass_by_round"] = std::move(rounds);
  r["pieces"] = std::move(pieces);
  r["remainder"] = chain_to_json(d.remainder);
  return r;
}

Json loewner_json(const ClosedManifoldComplex& m) {
  try {
    LoewnerReport lr = loewner_check(m);
    Json j;
    j["sys_squared"] = rational_json(lr.sys_squared);
    j["area"] = rational_json(lr.area);
    j["bound"] = lr.bound;
    j["ratio"] = lr.ratio;
    j["pass"] = lr.pass;
    j["strict"] = lr.strict;
    return j;
  } catch (const InputError&) {
    return nullptr;
  }
}

Json cmd_systole(const RunConfig& c, Inputs& in, Legs& legs) {
  legs.start("load");
  ClosedManifoldComplex m(in.complex("mesh", c.mesh, edge_metric(c)));
  legs.stop();
  legs.start("compute");
  SystoleResult s = c.serial ? systole_serial(m) : systole(m);
  legs.stop();
  Json r;
  r["dimension"] = m.dimension();
  r["euler_characteristic"] = m.euler_characteristic();
  r["orientable"] = m.orientable();
  r["h1_rank"] = s.h1_rank;
  r["sys"] = s.sys ? rational_json(*s.sys) : Json("infinite");
  r["loop"] = s.loop;
  r["witness"] = optional_chain(s.witness);
  r["loewner"] = m.dimension() == 2 ? loewner_json(m) : Json(nullptr);
  return r;
}

Json cmd_verify(const RunConfig& c, Inputs& in, Legs& legs, int& exit_code) {
  legs.start("load");
  ClosedManifoldComplex m(in.complex("mesh", c.mesh, edge_metric(c)));
  legs.stop();
  VerifyParams params;
  params.epsilon = rational_flag(c.epsilon, "--epsilon", "1/1000");
  params.net_strategy = strategy(c);
  params.rule = rule(c);
  params.fillvol_mode = c.exact ? FillMode::kExact : FillMode::kGreedy;
  params.simplex_budget = c.budget;
  SystoleReport s = verify_chain(m, params);
  for (const auto& [leg, ms] : s.timings_ms) legs.record(leg, ms);
  Json r;
  r["n"] = s.n;
  r["sys"] = s.sys ? rational_json(*s.sys) : Json("infinite");
  r["loop"] = s.loop;
  r["fillrad"] = rational_json(s.fillrad);
  r["fillvol"] = rational_json(s.fillvol);
  r["fillvol_method"] = s.fillvol_method;
  r["vol"] = rational_json(s.vol);
  r["epsilon"] = rational_json(s.epsilon);
  r["covering_radius"] = rational_json(s.covering_radius);
  r["net_size"] = s.net_size;
  r["ambient_simplices"] = s.ambient_simplices;
  r["expansion"] = rational_json(s.distortion.expansion);
  r["contraction"] = rational_json(s.distortion.contraction);
  Json ratios;
  ratios["sys_over_6fillrad"] = s.sys_over_6fillrad;
  ratios["6fillrad_over_fillvol_root"] = s.fillrad_over_fillvol_root;
  ratios["fillvol_root_over_vol_root"] = s.fillvol_root_over_vol_root;
  ratios["fillrad_over_vol_root"] = s.fillrad_over_vol_root;
  r["ratios"] = std::move(ratios);
  r["systolic_pass"] = s.systolic_pass;
  r["systolic_strict"] = s.systolic_strict;
  r["loewner"] = m.dimension() == 2 ? loewner_json(m) : Json(nullptr);
  if (!s.systolic_pass) exit_code = kInvariantFailure;
  return r;
}

Json cmd_ekeland(const RunConfig& c, Inputs& in, Legs& legs) {
  legs.start("load");
  ComplexPtr cx = in.complex("ambient", c.ambient, edge_metric(c));
  Chain l = in.chain("cycle", c.cycle, cx);
  legs.stop();
  const int p = modulus(c);
  EkelandOptions o;
  o.epsilon = rational_flag(c.epsilon, "--epsilon", "1/2");
  o.restarts = c.restarts;
  o.seed = c.seed;
  legs.start("seed");
  Chain lp = l.modulus() ? l : reduce_mod_p(l, p);
  std::optional<FillingCertificate> seed;
  try {
    seed = isoperimetric_fill(lp, p);
  } catch (const InputError&) {
    for (Vertex v = 0; v < cx->vertex_count(); ++v) {
      try {
        ConeFill cf = cone_fill(lp, v, p);
        if (!seed || cf.mass < seed->mass_T) seed = make_certificate(lp, cf.T, p, "cone");
      } catch (const InputError&) {
      }
    }
  }
  if (!seed) throw InputError("no seed filling found for the cycle");
  legs.stop();
  legs.start("compute");
  QuasiMinimizer q = c.serial ? quasi_minimize_serial(lp, seed->T, p, o) : quasi_minimize(lp, seed->T, p, o);
  legs.stop();
  legs.start("profile");
  std::vector<Vertex> xs;
  std::vector<std::vector<Rational>> radii;
  auto lsupport = lp.support_vertices();
  for (Vertex x : q.S.support_vertices()) {
    if (std::binary_search(lsupport.begin(), lsupport.end(), x)) continue;
    auto rs = default_radii(q.S, lp, x);
    if (rs.empty()) continue;
    xs.push_back(x);
    radii.push_back(std::move(rs));
  }
  DensityProfile prof = density_profile(q, xs, radii);
  legs.stop();
  Json r;
  r["p"] = p;
  r["epsilon"] = rational_json(o.epsilon);
  r["seed_method"] = seed->method;
  r["seed_mass"] = rational_json(q.seed_mass);
  r["mass"] = rational_json(q.trace.back());
  r["within_three_seed"] = q.trace.back() <= 3 * q.seed_mass;
  Json trace = Json::array();
  for (const auto& v : q.trace) trace.push_back(rational_json(v));
  r["trace"] = std::move(trace);
  r["restart"] = q.restart;
  r["certified"] = q.certified;
  r["S"] = chain_to_json(q.S);
  r["support_distance"] = rational_json(support_distance(q.S, lp));
  r["seed_support_distance"] = rational_json(support_distance(seed->T, lp));
  Json rows = Json::array();
  for (const auto& row : prof.rows)
    rows.push_back(Json{{"x", row.x}, {"rho", rational_json(row.rho)}, {"mass", rational_json(row.mass)},
                        {"model", row.model}, {"monotone_quantity", row.monotone_quantity}});
  Json pj;
  pj["rows"] = std::move(rows);
  pj["delta"] = prof.delta;
  pj["nondecreasing"] = prof.nondecreasing;
  pj["monotone_quantity_nondecreasing"] = prof.monotone_quantity_nondecreasing;
  r["density_profile"] = std::move(pj);
  if (q.trace.back() > 3 * q.seed_mass) throw InvariantError("quasi-minimizer exceeds three times the seed mass");
  return r;
}

Json cmd_corpus(const RunConfig& c, Legs& legs) {
  CorpusOptions o;
  o.seed = c.seed;
  o.circle_sizes = c.sizes;
  legs.start("generate");
  auto files = write_corpus(o, c.out_dir);
  legs.stop();
  Json list = Json::array();
  for (const auto& f : files) list.push_back(Json{{"name", f.name}, {"kind", f.kind}, {"sha256", sha256_hex(f.bytes)}});
  Json r;
  r["directory"] = c.out_dir;
  r["seed"] = c.seed;
  r["files"] = std::move(list);
  return r;
}

void require_path(const std::string& path, const char* flag) {
  if (path.empty()) throw InputError(std::string(flag) + " is required");
  if (!std::filesystem::is_regular_file(path)) throw InputError(std::string(flag) + ": no such file: " + path);
}

}  // namespace

void validate(const RunConfig& c) {
  if (c.p && *c.p < 2) throw InputError("--p must be at least 2");
  if (c.epsilon && sgn(rational_flag(c.epsilon, "--epsilon", "")) <= 0) throw InputError("--epsilon must be positive");
  if (c.scale && sgn(rational_flag(c.scale, "--scale", "")) <= 0) throw InputError("--scale must be positive");
  const std::string& cmd = c.command;
  if (cmd == "flatnorm") {
    require_path(c.chain, "--chain");
    require_path(c.complex, "--complex");
  } else if (cmd == "slice") {
    require_path(c.chain, "--chain");
    require_path(c.complex, "--complex");
    require_path(c.function, "--function");
  } else if (cmd == "embed") {
    require_path(c.metric, "--metric");
    if (!c.epsilon) throw InputError("--epsilon is required");
  } else if (cmd == "rips") {
    require_path(c.metric, "--metric");
  } else if (cmd == "fillrad" || cmd == "fillvol" || cmd == "decompose" || cmd == "ekeland") {
    require_path(c.cycle, "--cycle");
    require_path(c.ambient, "--ambient");
  } else if (cmd == "systole" || cmd == "verify") {
    require_path(c.mesh, "--mesh");
  } else if (cmd == "corpus") {
    if (c.out_dir.empty()) throw InputError("--out is required");
  } else {
    throw InputError("unknown command '" + cmd + "'");
  }
}

RunResult run(const RunConfig& c) {
  validate(c);
  configure_threads();
  RunResult out;
  Inputs in;
  Legs legs;
  Json result;
  const std::string& cmd = c.command;
  if (cmd == "flatnorm") result = cmd_flatnorm(c, in, legs);
  else if (cmd == "slice") result = cmd_slice(c, in, legs);
  else if (cmd == "embed") result = cmd_embed(c, in, legs);
  else if (cmd == "rips") result = cmd_rips(c, in, legs);
  else if (cmd == "fillrad") result = cmd_fillrad(c, in, legs);
  else if (cmd == "fillvol") result = cmd_fillvol(c, in, legs);
  else if (cmd == "decompose") result = cmd_decompose(c, in, legs);
  else if (cmd == "systole") result = cmd_systole(c, in, legs);
  else if (cmd == "verify") result = cmd_verify(c, in, legs, out.exit_code);
  else if (cmd == "ekeland") result = cmd_ekeland(c, in, legs);
  else result = cmd_corpus(c, legs);
  Json& r = out.report;
  r["command"] = cmd;
  r["version"] = kVersion;
  r["status"] = out.exit_code == kOk ? "ok" : "fail";
  r["threads"] = thread_count();
  r["inputs"] = in.json();
  r["result"] = std::move(result);
  r["timings_ms"] = legs.json();
  return out;
}

namespace {

struct ConfigEntry {
  std::string key, value;
  std::size_t line;
};

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<ConfigEntry> read_config(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<ConfigEntry> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') throw InputError(path + ":" + std::to_string(n) + ": sections are not supported");
    auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(path + ":" + std::to_string(n) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw InputError(path + ":" + std::to_string(n) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out.push_back({key, value, n});
  }
  return out;
}

const std::set<std::string> kFlags{"relaxed", "exact", "greedy", "profile", "spectrum", "serial"};

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--json", c.json_out, "write the report here instead of stdout");
  sub->add_option("--config", "key = value defaults; flags override");
}

}  // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"chainforge: chains mod p, flat norms, fillings and systoles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  auto int_p = [&](CLI::App* s) { s->add_option("--p", c.p, "modulus p >= 2"); };
  auto metric_opt = [&](CLI::App* s) { s->add_option("--edge-metric", c.edge_metric, "euclidean or unit (meshes)"); };

  auto* flat = app.add_subcommand("flatnorm", "flat norm or flat norm mod p with witness");
  flat->add_option("--chain", c.chain);
  flat->add_option("--complex", c.complex);
  int_p(flat);
  flat->add_flag("--relaxed", c.relaxed, "LP relaxation");
  metric_opt(flat);

  auto* sl = app.add_subcommand("slice", "restriction and slice by a vertex function");
  sl->add_option("--chain", c.chain);
  sl->add_option("--complex", c.complex);
  sl->add_option("--function", c.function);
  sl->add_option("--r", c.r, "level");
  int_p(sl);
  sl->add_flag("--spectrum", c.spectrum, "all slices between critical values");
  metric_opt(sl);

  auto* em = app.add_subcommand("embed", "epsilon-net Kuratowski embedding");
  em->add_option("--metric", c.metric, "distance matrix CSV");
  em->add_option("--epsilon", c.epsilon);
  em->add_option("--strategy", c.strategy, "index or farthest");

  auto* ri = app.add_subcommand("rips", "Vietoris-Rips complex");
  ri->add_option("--metric", c.metric, "distance matrix CSV");
  ri->add_option("--scale", c.scale);
  ri->add_option("--max-dim", c.max_dim);
  ri->add_option("--epsilon", c.epsilon, "build over the net embedding");
  ri->add_option("--strategy", c.strategy, "index or farthest");
  ri->add_option("--budget", c.budget, "simplex budget");
  ri->add_flag("--serial", c.serial, "single-threaded construction");

  auto* fr = app.add_subcommand("fillrad", "mod 2 filling radius");
  fr->add_option("--cycle", c.cycle);
  fr->add_option("--ambient", c.ambient);
  fr->add_option("--rule", c.rule, "reach or vertex");
  fr->add_flag("--profile", c.profile, "solvability per probed radius");
  fr->add_flag("--serial", c.serial, "single sweep");
  metric_opt(fr);

  auto* fv = app.add_subcommand("fillvol", "filling volume mod p");
  fv->add_option("--cycle", c.cycle);
  fv->add_option("--ambient", c.ambient);
  int_p(fv);
  fv->add_flag("--exact", c.exact);
  fv->add_flag("--greedy", c.greedy);
  metric_opt(fv);

  auto* de = app.add_subcommand("decompose", "ball-cover decomposition of a cycle");
  de->add_option("--cycle", c.cycle);
  de->add_option("--ambient", c.ambient);
  int_p(de);
  metric_opt(de);

  auto* sy = app.add_subcommand("systole", "shortest Z_2-essential loop of a surface");
  sy->add_option("--mesh", c.mesh);
  sy->add_flag("--serial", c.serial);
  metric_opt(sy);

  auto* ve = app.add_subcommand("verify", "Sys, FillRad, FillVol and Vol of a closed mesh");
  ve->add_option("--mesh", c.mesh);
  ve->add_option("--epsilon", c.epsilon, "net parameter");
  ve->add_option("--rule", c.rule, "reach or vertex");
  ve->add_option("--strategy", c.strategy, "index or farthest");
  ve->add_option("--budget", c.budget, "simplex budget");
  ve->add_flag("--exact", c.exact, "exact filling volume");
  metric_opt(ve);

  auto* ek = app.add_subcommand("ekeland", "penalized local search for a filling");
  ek->add_option("--cycle", c.cycle);
  ek->add_option("--ambient", c.ambient);
  ek->add_option("--epsilon", c.epsilon, "penalty in (0, 1/2]");
  ek->add_option("--restarts", c.restarts);
  ek->add_option("--seed", c.seed);
  int_p(ek);
  ek->add_flag("--serial", c.serial);
  metric_opt(ek);

  auto* co = app.add_subcommand("corpus", "generate the instance corpus");
  co->add_option("--seed", c.seed);
  co->add_option("--sizes", c.sizes, "circle sizes")->delimiter(',');
  co->add_option("--out", c.out_dir);

  for (auto* s : app.get_subcommands({})) add_common(s, c);

  // merge the config file below explicit flags
  std::vector<std::string> args(argv, argv + argc);
  std::string config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  try {
    if (!config_path.empty()) {
      if (args.size() < 2) throw InputError("config file given without a command");
      CLI::App* sub = nullptr;
      for (auto* s : app.get_subcommands({}))
        if (s->get_name() == args[1]) sub = s;
      if (!sub) throw InputError("unknown command '" + args[1] + "'");
      std::vector<std::string> extra;
      for (const auto& e : read_config(config_path)) {
        if (e.key == "config" || !sub->get_option_no_throw("--" + e.key))
          throw InputError(config_path + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");
        bool given = false;
        for (const auto& a : args)
          if (a == "--" + e.key || a.rfind("--" + e.key + "=", 0) == 0) given = true;
        if (given) continue;
        if (kFlags.count(e.key)) {
          if (e.value == "true") extra.push_back("--" + e.key);
          else if (e.value != "false")
            throw InputError(config_path + ":" + std::to_string(e.line) + ": expected true or false");
        } else {
          extra.push_back("--" + e.key);
          extra.push_back(e.value);
        }
      }
      args.insert(args.begin() + 2, extra.begin(), extra.end());
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kInputError;
  }
  for (auto* s : app.get_subcommands())
    if (s->parsed()) c.command = s->get_name();

  try {
    RunResult r = run(c);
    const std::string text = r.report.dump(2) + "\n";
    if (c.json_out.empty())
      out << text;
    else
      write_file(c.json_out, text);
    if (r.exit_code != kOk) err << "error: invariant check failed\n";
    return r.exit_code;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const InvariantError& e) {
    err << "invariant failure: " << e.what() << "\n";
    return kInvariantFailure;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kInvariantFailure;
  }
}

}  // namespace chainforge::cli
