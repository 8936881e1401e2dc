#include "metastab/harness.hpp"

#include "metastab/moduli.hpp"

#include <chrono>
#include <fstream>
#include <future>
#include <sstream>

namespace metastab {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

Nat nat_arg(const std::string& text, const std::string& spec) {
  try {
    return parse_nat(text);
  } catch (const DomainError& e) {
    throw ConfigError("g", "'" + spec + "': " + e.what());
  }
}

class ArgmaxGap final : public NatFn {
 public:
  ArgmaxGap(const Space& space, PointSeqPtr seq, NatFnPtr inner)
      : NatFn(intern_key("argmax-gap[" + seq->key() + "," + inner->key() + "]")), space_(space),
        seq_(std::move(seq)), inner_(std::move(inner)) {}

  Nat apply(const Nat& n) const override {
    const std::uint64_t top = to_u64(inner_->apply(n));
    const Point xn = seq_->at(n);
    std::uint64_t best = 0;
    if (space_.hilbert()) {
      Rat best_d = 0;
      for (std::uint64_t i = 1; i <= top; ++i) {
        Rat d = space_.norm_sq_exact(sub(seq_->at(n + Nat(std::to_string(i))), xn));
        if (d > best_d) best_d = d, best = i;
      }
    } else {
      Real best_d = 0;
      for (std::uint64_t i = 1; i <= top; ++i) {
        Real d = space_.norm(sub(seq_->at(n + Nat(std::to_string(i))), xn));
        if (d > best_d) best_d = d, best = i;
      }
    }
    return Nat(std::to_string(best));
  }

 private:
  Space space_;
  PointSeqPtr seq_;
  NatFnPtr inner_;
};

// Window sizes above this are rejected rather than scanned.
constexpr std::uint64_t kMaxWindow = 1u << 20;

std::vector<Point> window(const PointSequence& seq, const Nat& N, const Nat& gN) {
  if (gN > Nat(std::to_string(kMaxWindow))) throw DomainError("g(" + N.get_str() + ") = " + gN.get_str() + " is too large to scan");
  std::vector<Point> pts;
  const std::uint64_t len = to_u64(gN) + 1;
  pts.reserve(len);
  for (std::uint64_t i = 0; i < len; ++i) pts.push_back(seq.at(N + Nat(std::to_string(i))));
  return pts;
}

const nlohmann::json* find(const nlohmann::json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string get_string(const nlohmann::json& j, const std::string& key, const std::string& path,
                       std::optional<std::string> dflt) {
  const nlohmann::json* v = find(j, key);
  if (!v) {
    if (dflt) return *dflt;
    throw ConfigError(path, "missing required key");
  }
  if (!v->is_string()) throw ConfigError(path, "expected a string");
  return v->get<std::string>();
}

Nat get_nat(const nlohmann::json& j, const std::string& key, const std::string& path, const Nat& dflt) {
  const nlohmann::json* v = find(j, key);
  if (!v) return dflt;
  try {
    if (v->is_number_unsigned() || v->is_number_integer()) return parse_nat(v->dump());
    if (v->is_string()) return parse_nat(v->get<std::string>());
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "expected a natural number");
}

std::uint64_t get_u64(const nlohmann::json& j, const std::string& key, const std::string& path,
                      std::uint64_t dflt) {
  Nat n = get_nat(j, key, path, Nat(std::to_string(dflt)));
  if (!fits_u64(n)) throw ConfigError(path, "value does not fit in 64 bits");
  return to_u64(n);
}

bool get_bool(const nlohmann::json& j, const std::string& key, const std::string& path, bool dflt) {
  const nlohmann::json* v = find(j, key);
  if (!v) return dflt;
  if (!v->is_boolean()) throw ConfigError(path, "expected a boolean");
  return v->get<bool>();
}

Point get_point(const nlohmann::json& j, const std::string& key, const std::string& path) {
  const nlohmann::json* v = find(j, key);
  if (!v) throw ConfigError(path, "missing required key");
  if (!v->is_array()) throw ConfigError(path, "expected an array of rationals");
  Point p;
  for (std::size_t i = 0; i < v->size(); ++i) p.push_back(rat_from_json((*v)[i], path + "[" + std::to_string(i) + "]"));
  return p;
}

const nlohmann::json& get_object(const nlohmann::json& j, const std::string& key, const std::string& path) {
  const nlohmann::json* v = find(j, key);
  if (!v) throw ConfigError(path, "missing required key");
  if (!v->is_object()) throw ConfigError(path, "expected an object");
  return *v;
}

bool monotone_schedule(const std::string& name) { return name == "canonical" || name == "shifted"; }

std::string outcome_text(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::value: return o.value.get_str();
    case Outcome::Kind::fuel_exceeded: return "FUEL_EXCEEDED";
    case Outcome::Kind::skipped: return "SKIPPED";
  }
  return "SKIPPED";
}

Outcome outcome_from(const nlohmann::json& j, const std::string& key) {
  Outcome o;
  std::string s = j.at(key).get<std::string>();
  if (s == "FUEL_EXCEEDED") o.kind = Outcome::Kind::fuel_exceeded;
  else if (s == "SKIPPED") o.kind = Outcome::Kind::skipped;
  else o.kind = Outcome::Kind::value, o.value = parse_nat(s);
  return o;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* kCsvHeader = "instance,epsilon,g_spec,least_N,theta,realizer_N,pairwise_check\n";

std::string csv_row(const MetastabilityReport& r) {
  std::string row = csv_field(r.instance) + "," + to_string(r.epsilon) + "," + csv_field(r.g_spec) + ",";
  row += (r.least_N ? r.least_N->get_str() : std::string("NONE")) + ",";
  row += outcome_text(r.theta) + "," + outcome_text(r.realizer_N) + ",";
  row += r.pairwise_check ? "true" : "false";
  return row + "\n";
}

}  // namespace

GSpec parse_g_spec(const std::string& text, const Space* space, PointSeqPtr seq) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("g", "'" + text + "' lacks a kind prefix");
  const std::string kind = text.substr(0, colon), rest = text.substr(colon + 1);
  GSpec spec;
  spec.text = text;
  if (kind == "const") {
    spec.g = constant_fn(nat_arg(rest, text));
    spec.gM = spec.g;
  } else if (kind == "table") {
    std::vector<Nat> vals;
    for (const auto& part : split(rest, ',')) vals.push_back(nat_arg(part, text));
    if (vals.empty()) throw ConfigError("g", "'" + text + "' has no entries");
    auto t = table_fn("table[" + rest + "]", vals);
    spec.g = t;
    spec.gM = running_max(t);
  } else if (kind == "affine") {
    auto parts = split(rest, ',');
    if (parts.size() != 2) throw ConfigError("g", "'" + text + "' expects affine:<a>,<c>");
    spec.g = affine_fn(nat_arg(parts[0], text), nat_arg(parts[1], text));
    spec.gM = spec.g;
  } else if (kind == "argmax-gap") {
    if (!space || !seq) throw ConfigError("g", "argmax-gap needs a sequence");
    GSpec inner = parse_g_spec(rest, space, seq);
    spec.g = std::make_shared<ArgmaxGap>(*space, seq, inner.g);
    spec.gM = inner.gM;
  } else {
    throw ConfigError("g", "unknown counterfunction kind '" + kind + "'");
  }
  return spec;
}

bool pairwise_within(const Space& space, const PointSequence& seq, const Rat& eps, const Nat& N, const Nat& gN) {
  std::vector<Point> pts = window(seq, N, gN);
  if (space.dim() == 1) {
    Rat lo = pts[0][0], hi = pts[0][0];
    for (const auto& p : pts) lo = min_rat(lo, p[0]), hi = max_rat(hi, p[0]);
    return hi - lo <= eps;
  }
  if (space.hilbert()) {
    const Rat e2 = eps * eps;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        if (space.norm_sq_exact(sub(pts[i], pts[j])) > e2) return false;
    return true;
  }
  const Real bound = to_real(eps) + space.slack();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (space.norm(sub(pts[i], pts[j])) > bound) return false;
  return true;
}

std::optional<Nat> verify_metastability(const Space& space, const PointSequence& seq, const Rat& eps, const NatFn& g,
                                        const Nat& horizon, const Nat& first) {
  if (eps <= 0) throw DomainError("epsilon must be positive");
  for (Nat N = first; N <= horizon; ++N)
    if (pairwise_within(space, seq, eps, N, g.apply(N))) return N;
  return std::nullopt;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("", "configuration must be a JSON object");
  ExperimentConfig c;
  c.name = get_string(j, "name", "name", std::string("experiment"));

  const auto& map = get_object(j, "map", "map");
  c.map_name = get_string(map, "name", "map.name", std::nullopt);
  if (const auto* params = find(map, "params")) {
    if (!params->is_object()) throw ConfigError("map.params", "expected an object");
    c.map_params = *params;
  }

  if (const auto* space = find(j, "space")) {
    if (!space->is_object()) throw ConfigError("space", "expected an object");
    if (const auto* p = find(*space, "p")) c.p = rat_from_json(*p, "space.p");
    if (find(*space, "b")) c.b = get_nat(*space, "b", "space.b", 1);
    if (c.p && *c.p < 2) throw ConfigError("space.p", "p must be at least 2");
    if (c.b && *c.b < 1) throw ConfigError("space.b", "b must be positive");
  }

  const auto& schema = get_object(j, "schema", "schema");
  c.schema = get_string(schema, "kind", "schema.kind", std::string("resolvent"));
  if (c.schema == "resolvent") {
    c.anchor = get_point(schema, "anchor", "schema.anchor");
    c.schedule = get_string(schema, "schedule", "schema.schedule", std::string("canonical"));
  } else if (c.schema == "halpern") {
    c.anchor = get_point(schema, "x0", "schema.x0");
    c.halpern_u = get_point(schema, "u", "schema.u");
    c.halpern_lambda = get_string(schema, "lambda", "schema.lambda", std::string("harmonic"));
    if (c.halpern_lambda != "harmonic") throw ConfigError("schema.lambda", "unknown rate preset '" + c.halpern_lambda + "'");
  } else if (c.schema == "bruck") {
    c.anchor = get_point(schema, "x1", "schema.x1");
    c.bruck_preset = get_string(schema, "preset", "schema.preset", std::nullopt);
  } else {
    throw ConfigError("schema.kind", "unknown schema '" + c.schema + "'");
  }

  const auto* eps = find(j, "epsilon");
  if (!eps) throw ConfigError("epsilon", "missing required key");
  c.epsilon = rat_from_json(*eps, "epsilon");
  if (c.epsilon <= 0 || c.epsilon > 2) throw ConfigError("epsilon", "epsilon must lie in (0,2]");
  c.g_spec = get_string(j, "g", "g", std::nullopt);
  c.horizon = get_nat(j, "horizon", "horizon", c.horizon);
  if (c.horizon < 1) throw ConfigError("horizon", "horizon must be at least 1");
  c.fuel = get_u64(j, "fuel", "fuel", c.fuel);
  c.seed = get_u64(j, "seed", "seed", c.seed);
  c.realizer = get_bool(j, "realizer", "realizer", c.realizer);
  c.bound = get_bool(j, "bound", "bound", c.bound);

  if (const auto* solver = find(j, "solver")) {
    if (!solver->is_object()) throw ConfigError("solver", "expected an object");
    if (const auto* tol = find(*solver, "tol")) c.solver.tol = rat_from_json(*tol, "solver.tol");
    if (c.solver.tol <= 0) throw ConfigError("solver.tol", "tolerance must be positive");
    c.solver.budget = get_u64(*solver, "budget", "solver.budget", c.solver.budget);
    c.solver.bits = static_cast<unsigned>(get_u64(*solver, "bits", "solver.bits", c.solver.bits));
  }
  c.solver.seed = c.seed;

  if (const auto* moduli = find(j, "moduli")) {
    if (!moduli->is_object()) throw ConfigError("moduli", "expected an object");
    c.eta = get_string(*moduli, "eta", "moduli.eta", c.eta);
    c.tau = get_string(*moduli, "tau", "moduli.tau", c.tau);
  }
  for (const auto& [key, name] : {std::pair{"moduli.eta", c.eta}, std::pair{"moduli.tau", c.tau}}) {
    try {
      modulus_preset(name);
    } catch (const Error& e) {
      throw ConfigError(key, e.what());
    }
  }

  if (const auto* inj = find(j, "constants")) {
    if (!inj->is_object()) throw ConfigError("constants", "expected an object");
    InjectedConstants ic;
    auto field = [&](const char* key) {
      const std::string path = std::string("constants.") + key;
      const auto* v = find(*inj, key);
      if (!v) throw ConfigError(path, "missing required key");
      Rat r = rat_from_json(*v, path);
      if (r <= 0) throw ConfigError(path, "must be positive");
      return r;
    };
    ic.u = field("u");
    ic.nu2 = field("nu2");
    ic.nu1 = field("nu1");
    ic.delta = field("delta");
    ic.nu1_star = field("nu1_star");
    c.injected = ic;
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", e.what());
  }
  return parse_config(j);
}

Instance build_instance(const ExperimentConfig& cfg) {
  MapInstance T = map_library(cfg.map_name, cfg.map_params);
  Space base = default_space(T);
  Space space(base.dim(), cfg.p.value_or(base.p()), cfg.b.value_or(base.b()), base.set());
  const std::string key = cfg.schema == "resolvent" ? "schema.anchor" : cfg.schema == "halpern" ? "schema.x0" : "schema.x1";
  if (cfg.anchor.size() != space.dim()) throw ConfigError(key, "dimension differs from the map");
  if (!space.contains(cfg.anchor)) throw ConfigError(key, "point lies outside the feasible set");
  Instance inst{space, T, nullptr, nullptr};
  if (cfg.schema == "resolvent") {
    Schedule s;
    try {
      s = schedule_preset(cfg.schedule);
    } catch (const ConfigError& e) {
      throw ConfigError("schema.schedule", e.what());
    }
    inst.resolvent = resolvent_sequence(space, T, cfg.anchor, s, cfg.solver);
    inst.seq = inst.resolvent;
  } else if (cfg.schema == "halpern") {
    if (cfg.halpern_u.size() != space.dim() || !space.contains(cfg.halpern_u))
      throw ConfigError("schema.u", "point lies outside the feasible set");
    inst.seq = halpern(space, T, cfg.anchor, cfg.halpern_u, wittmann_rates_harmonic());
  } else {
    BruckParams bp;
    try {
      bp = bruck_preset(cfg.bruck_preset);
    } catch (const Error& e) {
      throw ConfigError("schema.preset", e.what());
    }
    inst.seq = bruck(space, T, cfg.anchor, bp);
  }
  return inst;
}

BoundParams bound_params(const ExperimentConfig& cfg, const Instance& inst, const GSpec& g) {
  Schedule s = schedule_preset(cfg.schedule);
  BoundParams p;
  p.b = inst.space.b();
  p.eta = modulus_preset(cfg.eta);
  p.tau = modulus_preset(cfg.tau);
  p.theta = inst.T.theta;
  p.alpha = s.alpha;
  p.gamma = s.gamma;
  p.alpha_monotone = monotone_schedule(s.name.empty() ? cfg.schedule : s.name);
  p.epsilon = cfg.epsilon;
  p.g = g.g;
  p.gM = g.gM;
  return p;
}

Claim2Data claim2_data(const ExperimentConfig& cfg, const Instance& inst, const GSpec& g) {
  if (!inst.resolvent) throw DomainError("the realizer needs a resolvent path");
  BoundParams p = bound_params(cfg, inst, g);
  Claim2Data d;
  d.x = inst.resolvent;
  d.anchor = cfg.anchor;
  d.hT = h_map(inst.space, inst.T, cfg.solver);
  d.epsilon = cfg.epsilon;
  d.g = g.g;
  d.alpha = alphaM(p.alpha, p.alpha_monotone);
  if (cfg.injected) {
    const InjectedConstants ic = *cfg.injected;
    ConstantsBundle c;
    c.b = p.b;
    c.u = [ic](const Rat&) -> Rat { return ic.u; };
    c.nu2 = [ic](const Rat&) -> Rat { return ic.nu2; };
    c.delta = [ic](const Rat&) -> Rat { return ic.delta; };
    c.nu1 = [ic](const Nat&, const Nat&, const Rat&) -> Rat { return ic.nu1; };
    c.alphaM = d.alpha;
    d.constants = c;
  } else {
    d.constants = constants(p);
  }
  return d;
}

ThetaConstants injected_theta_constants(const InjectedConstants& c, const Nat& b, const NatMap& alphaM) {
  ThetaConstants t;
  t.b = b;
  t.u = c.u;
  t.nu2 = c.nu2;
  const Rat v = c.nu1_star;
  t.nu1_star = [v](const Nat&, const Nat&) -> Rat { return v; };
  t.alphaM = alphaM;
  return t;
}

Nat bruck_bound(const BruckRates& rates, const ThetaOracle& theta, const Rat& eps, const NatFnPtr& g) {
  if (!rates.chiM || !rates.g_prime || !rates.Psi) throw DomainError("Bruck rates are incomplete");
  return rates.chiM(theta(eps / 2, rates.g_prime(g))) + rates.Psi(eps) + 1;
}

MetastabilityReport run_experiment(const ExperimentConfig& cfg, const ExperimentHooks& hooks) {
  MetastabilityReport r;
  r.instance = cfg.name;
  r.g_spec = cfg.g_spec;
  r.epsilon = cfg.epsilon;
  r.horizon = cfg.horizon;
  r.constants = cfg.injected ? "injected" : "exact";

  Instance inst = build_instance(cfg);
  GSpec g = parse_g_spec(cfg.g_spec, &inst.space, inst.seq);
  const Nat first = cfg.schema == "bruck" ? Nat(1) : Nat(0);

  auto t0 = Clock::now();
  r.least_N = verify_metastability(inst.space, *inst.seq, cfg.epsilon, *g.g, cfg.horizon, first);
  r.timings.scan_ms = ms_since(t0);
  r.pairwise_check = r.least_N.has_value();
  if (!r.least_N) r.findings.push_back("no N <= " + cfg.horizon.get_str() + " satisfies the pairwise interval property");

  auto run_bound = [&](Outcome& out, auto&& body) {
    Fuel fuel(cfg.fuel);
    auto t = Clock::now();
    try {
      out.value = body(fuel);
      out.kind = Outcome::Kind::value;
    } catch (const FuelExceeded& e) {
      out.kind = Outcome::Kind::fuel_exceeded;
      out.note = e.stage;
    }
    out.applications = fuel.used();
    return ms_since(t);
  };

  if (!cfg.bound) {
    r.theta.note = "disabled";
  } else if (cfg.schema == "resolvent") {
    r.timings.theta_ms = run_bound(r.theta, [&](Fuel& fuel) {
      if (!cfg.injected) return theta_bound(bound_params(cfg, inst, g), &fuel).theta;
      BoundParams p = bound_params(cfg, inst, g);
      return theta_prime(injected_theta_constants(*cfg.injected, p.b, alphaM(p.alpha, p.alpha_monotone)), &fuel).theta;
    });
  } else if (cfg.schema == "halpern" && hooks.halpern) {
    r.timings.theta_ms = run_bound(r.theta, [&](Fuel&) { return hooks.halpern(cfg.epsilon, g.g); });
  } else if (cfg.schema == "bruck" && hooks.bruck) {
    r.timings.theta_ms = run_bound(r.theta, [&](Fuel& fuel) {
      ThetaOracle oracle = [&](const Rat& e, const NatFnPtr& gp) {
        BoundParams p = bound_params(cfg, inst, g);
        p.epsilon = e;
        p.g = gp;
        p.gM = running_max(gp);
        return theta_bound(p, &fuel).theta;
      };
      return bruck_bound(*hooks.bruck, oracle, cfg.epsilon, g.g);
    });
  } else {
    r.theta.note = "no composed rates supplied";
  }
  if (r.theta.kind == Outcome::Kind::value && r.least_N && *r.least_N > r.theta.value)
    r.failures.push_back("least_N " + r.least_N->get_str() + " exceeds theta " + r.theta.value.get_str());
  if (r.theta.kind == Outcome::Kind::fuel_exceeded) r.findings.push_back("theta exceeded fuel at " + r.theta.note);

  if (!cfg.realizer) {
    r.realizer_N.note = "disabled";
  } else if (!inst.resolvent) {
    r.realizer_N.note = "needs a resolvent path";
  } else if (!inst.space.hilbert()) {
    r.realizer_N.note = "needs p = 2";
  } else {
    auto t = Clock::now();
    Fuel fuel(cfg.fuel);
    try {
      RealizerReport rep = run_realizer(inst.space, claim2_data(cfg, inst, g), &fuel);
      r.realizer_N.kind = Outcome::Kind::value;
      r.realizer_N.value = rep.N;
      r.realizer_endpoint_ok = rep.endpoint_ok;
      r.realizer_checks_ok = rep.phi.all_ok();
      if (!rep.endpoint_ok) r.failures.push_back("realizer endpoint inequality fails at N=" + rep.N.get_str());
      if (!r.realizer_checks_ok) r.failures.push_back("a realizer A-instance failed re-verification");
    } catch (const FuelExceeded& e) {
      r.realizer_N.kind = Outcome::Kind::fuel_exceeded;
      r.realizer_N.note = e.stage;
      r.failures.push_back("realizer exceeded fuel at " + e.stage);
    } catch (const ContractViolation& e) {
      r.realizer_N.kind = Outcome::Kind::skipped;
      r.realizer_N.note = e.what();
      r.failures.push_back(std::string("realizer contract violation: ") + e.what());
    }
    r.realizer_N.applications = fuel.used();
    r.timings.realizer_ms = ms_since(t);
  }
  return r;
}

std::vector<MetastabilityReport> run_batch(const std::vector<ExperimentConfig>& cfgs, const ExperimentHooks& hooks) {
  std::vector<std::future<MetastabilityReport>> tasks;
  for (const auto& c : cfgs) tasks.push_back(std::async(std::launch::async, [&c, &hooks] { return run_experiment(c, hooks); }));
  std::vector<MetastabilityReport> out;
  for (auto& t : tasks) out.push_back(t.get());
  return out;
}

bool SunnyReport::ok() const {
  if (!rejected_samples.empty()) return false;
  for (const auto& e : entries)
    if (!e.ok) return false;
  return true;
}

Real sunny_slack(const Space& space, const Rat& tol, const Rat& t_close) {
  if (t_close <= 0 || t_close >= 1) throw DomainError("t_close must lie in (0,1)");
  Rat s = tol * (1 + t_close) * Rat(space.b()) / (1 - t_close);
  return to_real(s) + space.slack();
}

SunnyReport check_sunny(const Space& space, const MapInstance& T, const std::vector<Point>& anchors,
                        const std::vector<Point>& fixed_point_samples, const Rat& t_close, const Rat& tol) {
  SunnyReport rep;
  const Real slack = sunny_slack(space, tol, t_close);
  std::vector<Point> fixed;
  for (const auto& p : fixed_point_samples) {
    if (space.norm(sub(p, T(p))) <= to_real(tol)) fixed.push_back(p);
    else rep.rejected_samples.push_back(point_key(p));
  }
  SolverOptions opts;
  opts.tol = tol;
  bool first = true;
  for (const auto& x : anchors) {
    Point q = resolvent_point(space, T, x, t_close, opts);
    Point xq = sub(x, q);
    for (const auto& y : fixed) {
      SunnyEntry e{x, q, y, space.pairing(xq, space.duality_map(sub(y, q))), slack, false};
      e.ok = e.pairing <= slack;
      Real margin = e.pairing - slack;
      if (first || margin > rep.max_margin) rep.max_margin = margin;
      first = false;
      rep.entries.push_back(std::move(e));
    }
  }
  return rep;
}

Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  throw ConfigError("format", "expected json or csv, got '" + s + "'");
}

nlohmann::ordered_json report_to_json(const MetastabilityReport& r) {
  nlohmann::ordered_json j;
  j["instance"] = r.instance;
  j["epsilon"] = to_string(r.epsilon);
  j["g_spec"] = r.g_spec;
  j["horizon"] = r.horizon.get_str();
  j["constants"] = r.constants;
  j["least_N"] = r.least_N ? r.least_N->get_str() : "NONE";
  j["theta"] = outcome_text(r.theta);
  j["theta_note"] = r.theta.note;
  j["theta_applications"] = std::to_string(r.theta.applications);
  j["realizer_N"] = outcome_text(r.realizer_N);
  j["realizer_note"] = r.realizer_N.note;
  j["realizer_applications"] = std::to_string(r.realizer_N.applications);
  j["realizer_endpoint_ok"] = r.realizer_endpoint_ok;
  j["realizer_checks_ok"] = r.realizer_checks_ok;
  j["pairwise_check"] = r.pairwise_check;
  j["findings"] = r.findings;
  j["failures"] = r.failures;
  j["timings"] = {{"scan_ms", r.timings.scan_ms}, {"theta_ms", r.timings.theta_ms}, {"realizer_ms", r.timings.realizer_ms}};
  return j;
}

MetastabilityReport report_from_json(const nlohmann::json& j) {
  MetastabilityReport r;
  try {
    r.instance = j.at("instance").get<std::string>();
    r.epsilon = parse_rat(j.at("epsilon").get<std::string>());
    r.g_spec = j.at("g_spec").get<std::string>();
    r.horizon = parse_nat(j.at("horizon").get<std::string>());
    r.constants = j.at("constants").get<std::string>();
    std::string least = j.at("least_N").get<std::string>();
    if (least != "NONE") r.least_N = parse_nat(least);
    r.theta = outcome_from(j, "theta");
    r.theta.note = j.at("theta_note").get<std::string>();
    r.theta.applications = std::stoull(j.at("theta_applications").get<std::string>());
    r.realizer_N = outcome_from(j, "realizer_N");
    r.realizer_N.note = j.at("realizer_note").get<std::string>();
    r.realizer_N.applications = std::stoull(j.at("realizer_applications").get<std::string>());
    r.realizer_endpoint_ok = j.at("realizer_endpoint_ok").get<bool>();
    r.realizer_checks_ok = j.at("realizer_checks_ok").get<bool>();
    r.pairwise_check = j.at("pairwise_check").get<bool>();
    r.findings = j.at("findings").get<std::vector<std::string>>();
    r.failures = j.at("failures").get<std::vector<std::string>>();
    const auto& t = j.at("timings");
    r.timings = Timings{t.at("scan_ms").get<double>(), t.at("theta_ms").get<double>(), t.at("realizer_ms").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("report", e.what());
  }
  return r;
}

std::string export_report(const MetastabilityReport& r, Format f) {
  if (f == Format::json) return report_to_json(r).dump(2) + "\n";
  return std::string(kCsvHeader) + csv_row(r);
}

std::string export_reports(const std::vector<MetastabilityReport>& rs, Format f) {
  if (f == Format::json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rs) arr.push_back(report_to_json(r));
    return arr.dump(2) + "\n";
  }
  std::string out = kCsvHeader;
  for (const auto& r : rs) out += csv_row(r);
  return out;
}

std::string export_sequence_csv(const ResolventSequence& seq, std::uint64_t n_max) {
  std::ostringstream os;
  os << "n";
  for (std::size_t i = 0; i < seq.space().dim(); ++i) os << ",x" << i;
  os << ",residual\n";
  for (std::uint64_t n = 0; n <= n_max; ++n) {
    Nat k(std::to_string(n));
    Point x = seq.at(k);
    os << n;
    for (const auto& c : x) os << "," << to_string(c);
    os << "," << seq.residual(k).str(12, std::ios_base::scientific) << "\n";
  }
  return os.str();
}

}  // namespace metastab
