#ifndef METASTAB_HARNESS_HPP
#define METASTAB_HARNESS_HPP

#include "metastab/bound.hpp"
#include "metastab/claim2.hpp"
#include "metastab/schemas.hpp"
#include "metastab/theta.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace metastab {

// Counterfunction g with its majorant g^M.
struct GSpec {
  std::string text;
  NatFnPtr g, gM;
};

// const:<c> | table:<v0>,<v1>,... | affine:<a>,<c> | argmax-gap:<inner>.
// Tables repeat their last value. argmax-gap needs the sequence and the space.
GSpec parse_g_spec(const std::string& text, const Space* space = nullptr, PointSeqPtr seq = nullptr);

// |x_m - x_n| <= eps for all m, n in [N, N + g(N)].
bool pairwise_within(const Space& space, const PointSequence& seq, const Rat& eps, const Nat& N, const Nat& gN);

// Least N in [first, horizon] with the pairwise interval property, or none.
std::optional<Nat> verify_metastability(const Space& space, const PointSequence& seq, const Rat& eps, const NatFn& g,
                                        const Nat& horizon, const Nat& first = 0);

// Tractable constants replacing the exact families for diagnostic runs.
struct InjectedConstants {
  Rat u, nu2, nu1, delta, nu1_star;
};

struct ExperimentConfig {
  std::string name;
  std::string map_name;
  nlohmann::json map_params = nlohmann::json::object();
  std::optional<Rat> p;
  std::optional<Nat> b;
  std::string schema = "resolvent";
  Point anchor;
  std::string schedule = "canonical";
  Point halpern_u;
  std::string halpern_lambda = "harmonic";
  std::string bruck_preset;
  Rat epsilon;
  std::string g_spec;
  Nat horizon = 10000;
  std::uint64_t fuel = 100000000;
  SolverOptions solver;
  std::string eta = "hilbert-eta", tau = "identity-tau";
  bool realizer = true, bound = true;
  std::optional<InjectedConstants> injected;
  std::uint64_t seed = 1;
};

// Errors are ConfigError carrying the offending key path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct Outcome {
  enum class Kind { value, fuel_exceeded, skipped };
  Kind kind = Kind::skipped;
  Nat value;
  // Stage for fuel_exceeded, reason for skipped.
  std::string note;
  std::uint64_t applications = 0;
};

struct Timings {
  double scan_ms = 0, theta_ms = 0, realizer_ms = 0;
};

struct MetastabilityReport {
  std::string instance, g_spec;
  std::string constants = "exact";
  Rat epsilon;
  Nat horizon;
  std::optional<Nat> least_N;
  Outcome theta, realizer_N;
  bool realizer_endpoint_ok = false, realizer_checks_ok = false;
  bool pairwise_check = false;
  // Observations that are not failures, such as horizon exhaustion.
  std::vector<std::string> findings;
  std::vector<std::string> failures;
  Timings timings;
  bool ok() const { return failures.empty(); }
};

struct Instance {
  Space space;
  MapInstance T;
  PointSeqPtr seq;
  std::shared_ptr<const ResolventSequence> resolvent;
};

Instance build_instance(const ExperimentConfig& cfg);

// chi^M(Theta(eps/2, g')) + Psi(eps) + 1 with caller-supplied chi^M, g' and Psi.
struct BruckRates {
  NatMap chiM;
  std::function<NatFnPtr(const NatFnPtr&)> g_prime;
  std::function<Nat(const Rat&)> Psi;
};
using ThetaOracle = std::function<Nat(const Rat&, const NatFnPtr&)>;
Nat bruck_bound(const BruckRates& rates, const ThetaOracle& theta, const Rat& eps, const NatFnPtr& g);

// Sigma(eps, g) supplied by the caller for Halpern runs.
using HalpernSigma = std::function<Nat(const Rat&, const NatFnPtr&)>;

// Composed bounds for the iterative schemas; without them theta is skipped.
struct ExperimentHooks {
  HalpernSigma halpern;
  std::optional<BruckRates> bruck;
};

MetastabilityReport run_experiment(const ExperimentConfig& cfg, const ExperimentHooks& hooks = {});
// One task per config; reports keep the input order.
std::vector<MetastabilityReport> run_batch(const std::vector<ExperimentConfig>& cfgs, const ExperimentHooks& hooks = {});

// Realizer and Theta inputs for a resolvent configuration.
Claim2Data claim2_data(const ExperimentConfig& cfg, const Instance& inst, const GSpec& g);
BoundParams bound_params(const ExperimentConfig& cfg, const Instance& inst, const GSpec& g);
ThetaConstants injected_theta_constants(const InjectedConstants& c, const Nat& b, const NatMap& alphaM);

struct SunnyEntry {
  Point x, Qx, y;
  Real pairing, slack;
  bool ok = false;
};

struct SunnyReport {
  std::vector<SunnyEntry> entries;
  std::vector<std::string> rejected_samples;
  Real max_margin;
  bool ok() const;
};

// Slack for <x - Qx, j(y - Qx)> with Qx = x_t and |y - Ty| <= tol.
Real sunny_slack(const Space& space, const Rat& tol, const Rat& t_close);

SunnyReport check_sunny(const Space& space, const MapInstance& T, const std::vector<Point>& anchors,
                        const std::vector<Point>& fixed_point_samples, const Rat& t_close, const Rat& tol);

enum class Format { json, csv };
Format parse_format(const std::string& s);

nlohmann::ordered_json report_to_json(const MetastabilityReport& r);
MetastabilityReport report_from_json(const nlohmann::json& j);
std::string export_report(const MetastabilityReport& r, Format f);
std::string export_reports(const std::vector<MetastabilityReport>& rs, Format f);

// Columns n, coordinates..., residual.
std::string export_sequence_csv(const ResolventSequence& seq, std::uint64_t n_max);

}  // namespace metastab

#endif
