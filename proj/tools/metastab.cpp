#include "metastab/approx_limsup.hpp"
#include "metastab/harness.hpp"
#include "metastab/moduli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

using namespace metastab;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0, kCheckFailed = 2, kConfigError = 3;

std::vector<Rat> parse_rat_list(const std::string& text, const std::string& key) {
  std::vector<Rat> out;
  if (text.empty()) return out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ',')) {
    try {
      out.push_back(parse_rat(cur));
    } catch (const DomainError& e) {
      throw ConfigError(key, e.what());
    }
  }
  return out;
}

std::vector<Point> parse_points(const std::string& text, const std::string& key) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(key, e.what());
  }
  if (!j.is_array()) throw ConfigError(key, "expected an array of points");
  std::vector<Point> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) throw ConfigError(key, "expected an array of points");
    Point p;
    for (std::size_t c = 0; c < j[i].size(); ++c)
      p.push_back(rat_from_json(j[i][c], key + "[" + std::to_string(i) + "][" + std::to_string(c) + "]"));
    out.push_back(std::move(p));
  }
  return out;
}

void emit(const ojson& j, Format f) {
  if (f == Format::json) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::string header, row;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it->is_structured()) continue;
    header += (header.empty() ? "" : ",") + it.key();
    row += (row.empty() ? "" : ",") + (it->is_string() ? it->get<std::string>() : it->dump());
  }
  std::cout << header << "\n" << row << "\n";
}

ojson sample_json(const SampleReport& r) {
  ojson j;
  j["property"] = r.property;
  j["checked"] = r.checked;
  j["violations"] = r.violations;
  j["examples"] = r.examples;
  return j;
}

ExperimentConfig config_with_seed(const std::string& path, std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = load_config(path);
  if (seed) cfg.seed = *seed, cfg.solver.seed = *seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metastability rates for resolvent paths of pseudocontractions"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed, "Random seed");

  std::string config;
  auto* run = app.add_subcommand("run", "Run one experiment and print its report");
  run->add_option("--config", config, "Experiment JSON")->required();

  auto* bound = app.add_subcommand("bound", "Evaluate Theta for an experiment");
  bound->add_option("--config", config, "Experiment JSON")->required();

  auto* realizer = app.add_subcommand("realizer", "Run the realizer for an experiment");
  realizer->add_option("--config", config, "Experiment JSON")->required();

  std::string head, cycle;
  std::string B = "1", k = "4";
  auto* limsup = app.add_subcommand("limsup", "Approximate limsup of an eventually periodic sequence");
  limsup->add_option("--head", head, "Preperiod values a/b,...");
  limsup->add_option("--cycle", cycle, "Cycle values a/b,...")->required();
  limsup->add_option("--B", B, "Bound on the sequence");
  limsup->add_option("--k", k, "Precision k");

  std::size_t dim = 2, samples = 10000;
  auto* moduli = app.add_subcommand("check-moduli", "Sample the modulus inequalities on R^d, p = 2");
  moduli->add_option("--dim", dim, "Dimension")->check(CLI::Range(1, 8));
  moduli->add_option("--samples", samples, "Sampled pairs");

  std::string map_name, map_params = "{}", anchors, fixed, t_close = "999/1000", tol = "1/1000000000";
  auto* sunny = app.add_subcommand("sunny", "Check the sunny variational inequality");
  sunny->add_option("--map", map_name, "Map library name")->required();
  sunny->add_option("--params", map_params, "Map parameters as JSON");
  sunny->add_option("--anchors", anchors, "JSON array of points")->required();
  sunny->add_option("--fixed", fixed, "JSON array of fixed points")->required();
  sunny->add_option("--t-close", t_close, "Resolvent parameter");
  sunny->add_option("--tol", tol, "Tolerance");

  CLI11_PARSE(app, argc, argv);
  const Format fmt = parse_format(format);
  const std::uint64_t rng_seed = seed.value_or(1);

  try {
    if (*run) {
      MetastabilityReport r = run_experiment(config_with_seed(config, seed));
      std::cout << export_report(r, fmt);
      return r.ok() ? kOk : kCheckFailed;
    }
    if (*bound) {
      ExperimentConfig cfg = config_with_seed(config, seed);
      cfg.realizer = false;
      cfg.horizon = 1;
      MetastabilityReport r = run_experiment(cfg);
      ojson j;
      j["theta"] = r.theta.kind == Outcome::Kind::value           ? r.theta.value.get_str()
                   : r.theta.kind == Outcome::Kind::fuel_exceeded ? std::string("FUEL_EXCEEDED")
                                                                  : std::string("SKIPPED");
      j["applications"] = std::to_string(r.theta.applications);
      j["stage"] = r.theta.note;
      j["constants"] = r.constants;
      emit(j, fmt);
      return r.ok() ? kOk : kCheckFailed;
    }
    if (*realizer) {
      ExperimentConfig cfg = config_with_seed(config, seed);
      Instance inst = build_instance(cfg);
      GSpec g = parse_g_spec(cfg.g_spec, &inst.space, inst.seq);
      Fuel fuel(cfg.fuel);
      ojson j;
      int code = kOk;
      try {
        RealizerReport rep = run_realizer(inst.space, claim2_data(cfg, inst, g), &fuel);
        j["N"] = rep.N.get_str();
        j["gN"] = rep.gN.get_str();
        j["gap_sq"] = to_string(rep.gap_sq);
        j["endpoint_ok"] = rep.endpoint_ok;
        j["u"] = to_string(rep.u);
        j["u_prime"] = to_string(rep.u_prime);
        ojson checks = ojson::array();
        for (const auto& c : rep.phi.checks) checks.push_back({{"label", c.label}, {"holds", c.report.holds}});
        j["checks"] = checks;
        if (!rep.ok()) code = kCheckFailed;
      } catch (const FuelExceeded& e) {
        j["N"] = "FUEL_EXCEEDED";
        j["stage"] = e.stage;
        code = kCheckFailed;
      }
      j["applications"] = std::to_string(fuel.used());
      emit(j, fmt);
      return code;
    }
    if (*limsup) {
      std::vector<Rat> h = parse_rat_list(head, "head"), c = parse_rat_list(cycle, "cycle");
      Nat Bn = parse_nat(B), kn = parse_nat(k);
      SequenceOracle a = eventually_periodic_oracle(h, c, Rat(Bn));
      auto cf = exhaustive_counterfunctions(a, h.size(), c.size());
      LimsupWitness w = eps_limsup_witness(Bn, kn, a, cf.U, cf.M);
      LimsupCheck chk = check_limsup_postconditions(Bn, kn, a, cf.U, cf.M, w);
      Rat est = Rat(w.P) / Rat(kn + 1), truth = periodic_limsup(c);
      bool sound = abs(est - truth) <= Rat(1) / Rat(kn + 1);
      ojson j;
      j["P"] = w.P.get_str();
      j["T"] = w.T.get_str();
      j["estimate"] = to_string(est);
      j["limsup"] = to_string(truth);
      j["lower_ok"] = chk.lower;
      j["upper_ok"] = chk.upper;
      j["range_ok"] = chk.range;
      j["sound"] = sound;
      emit(j, fmt);
      return chk.ok() && sound ? kOk : kCheckFailed;
    }
    if (*moduli) {
      Point lo(dim, Rat(-1)), hi(dim, Rat(1));
      Space space(dim, Rat(2), Nat(2), FeasibleSet::box(lo, hi));
      Modulus eta = modulus_preset("hilbert-eta"), tau = modulus_preset("identity-tau");
      std::vector<SampleReport> reps = {check_psi_inequality(space, eta, samples, rng_seed),
                                        check_omega_contract(space, tau, samples, rng_seed),
                                        check_duality_lemma(space, samples, rng_seed)};
      ojson j;
      ojson arr = ojson::array();
      bool ok = true;
      for (const auto& r : reps) arr.push_back(sample_json(r)), ok = ok && r.ok();
      j["ok"] = ok;
      j["reports"] = arr;
      if (fmt == Format::csv) {
        std::cout << "property,checked,violations\n";
        for (const auto& r : reps) std::cout << "\"" << r.property << "\"," << r.checked << "," << r.violations << "\n";
      } else {
        emit(j, fmt);
      }
      return ok ? kOk : kCheckFailed;
    }
    if (*sunny) {
      nlohmann::json params;
      try {
        params = nlohmann::json::parse(map_params);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("params", e.what());
      }
      MapInstance T = map_library(map_name, params);
      Space space = default_space(T);
      SunnyReport rep = check_sunny(space, T, parse_points(anchors, "anchors"), parse_points(fixed, "fixed"),
                                    parse_rat(t_close), parse_rat(tol));
      ojson j;
      j["ok"] = rep.ok();
      j["entries"] = rep.entries.size();
      j["max_margin"] = rep.entries.empty() ? std::string("0") : rep.max_margin.str(12, std::ios_base::scientific);
      j["rejected_samples"] = rep.rejected_samples;
      ojson arr = ojson::array();
      for (const auto& e : rep.entries)
        arr.push_back({{"x", point_key(e.x)}, {"Qx", point_key(e.Qx)}, {"y", point_key(e.y)},
                       {"pairing", e.pairing.str(12, std::ios_base::scientific)}, {"ok", e.ok}});
      j["pairings"] = arr;
      emit(j, fmt);
      return rep.ok() ? kOk : kCheckFailed;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kOk;
}
