#ifndef METASTAB_SCHEMAS_HPP
#define METASTAB_SCHEMAS_HPP

#include "metastab/functional.hpp"
#include "metastab/spaces.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace metastab {

struct Schedule {
  std::string name;
  std::function<Rat(const Nat&)> t;
  std::function<Nat(const Nat&)> alpha;
  std::function<Nat(const Nat&)> gamma;
};

// t_n = 1 - 1/(n+1), alpha(n) = n, gamma(n) = n+1; t_0 = 0 gives x_0 = x.
Schedule canonical_schedule();
// t_n = 1 - 1/(n+2), alpha(n) = n, gamma(n) = n+2; every t_n lies in (0,1).
Schedule shifted_schedule();
// CSV rows "n,t,alpha,gamma" starting at n = 0.
Schedule table_schedule(const std::string& path);
Schedule schedule_preset(const std::string& key);

struct ContractReport {
  std::size_t checked = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// t_m >= 1 - 1/(n+1) for m in [alpha(n), alpha(n)+window] and t_n <= 1 - 1/gamma(n).
ContractReport check_schedule_contracts(const Schedule& s, std::uint64_t from, std::uint64_t to,
                                        std::uint64_t window = 64);

class PointSequence {
 public:
  explicit PointSequence(std::string key) : key_(std::move(key)) {}
  virtual ~PointSequence() = default;
  virtual Point at(const Nat& n) const = 0;
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

using PointSeqPtr = std::shared_ptr<const PointSequence>;

class ResolventSequence final : public PointSequence {
 public:
  ResolventSequence(Space space, MapInstance T, Point x, Schedule schedule, SolverOptions opts);

  Point at(const Nat& n) const override;
  Real residual(const Nat& n) const;
  const Space& space() const { return space_; }
  const MapInstance& map() const { return T_; }
  const Point& anchor() const { return x_; }
  const Schedule& schedule() const { return schedule_; }
  const SolverOptions& options() const { return opts_; }

 private:
  Space space_;
  MapInstance T_;
  Point x_;
  Schedule schedule_;
  SolverOptions opts_;
  mutable std::mutex mu_;
  mutable std::map<Nat, Point> memo_;
};

std::shared_ptr<const ResolventSequence> resolvent_sequence(const Space& space, const MapInstance& T, const Point& x,
                                                            const Schedule& schedule, const SolverOptions& opts = {});

// n if |x_{n+g(n)} - p| <= |x_n - p|, else n + g(n).
Nat s_selector(const Space& space, const Point& p, const NatFn& g, const PointSequence& seq, const Nat& n);

// x^p_n = x_{s_{p,g}(n)}.
PointSeqPtr reindexed_sequence(const Space& space, PointSeqPtr base, const Point& p, NatFnPtr g);

struct HalpernRates {
  std::function<Rat(const Nat&)> lambda;
  std::function<Nat(const Nat&)> beta1;
  std::function<Nat(const Rat&)> beta2;
  std::function<Nat(const Rat&)> beta3;
};

// lambda_n = 1/(n+1), beta1(n) = ceil(e^{n+1}), beta2 = beta3 = ceil(1/eps).
HalpernRates wittmann_rates_harmonic();
ContractReport check_halpern_rates(const HalpernRates& rates, std::uint64_t n_max, const Rat& eps_min,
                                   std::uint64_t tail_window = 20000);

// x_0 = x0, x_{n+1} = lambda_{n+1} u + (1 - lambda_{n+1}) T x_n.
PointSeqPtr halpern(const Space& space, const MapInstance& T, const Point& x0, const Point& u,
                    const HalpernRates& rates);

struct BruckParams {
  std::string name;
  std::function<Rat(const Nat&)> lambda;
  std::function<Rat(const Nat&)> theta;
};

std::vector<std::string> bruck_preset_names();
BruckParams bruck_preset(const std::string& name);
ContractReport check_bruck_feasibility(const BruckParams& params, std::uint64_t from, std::uint64_t to);

// Indexed from 1: x_1 given, x_{n+1} = (1-l_n) x_n + l_n T x_n - l_n th_n (x_n - x_1).
PointSeqPtr bruck(const Space& space, const MapInstance& T, const Point& x1, const BruckParams& params);

}  // namespace metastab

#endif
