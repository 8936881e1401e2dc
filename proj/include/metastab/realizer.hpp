#ifndef METASTAB_REALIZER_HPP
#define METASTAB_REALIZER_HPP

#include "metastab/approx_limsup.hpp"
#include "metastab/schemas.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace metastab {

// (p, y, L, m) -> N; the first two components of a stage tuple.
class StageFn {
 public:
  explicit StageFn(std::string key) : key_(std::move(key)) {}
  virtual ~StageFn() = default;
  virtual Nat apply(const Nat& p, const Point& y, const NatFnPtr& L, const Nat& m) const = 0;
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

using StageFnPtr = std::shared_ptr<const StageFn>;

StageFnPtr zero_stage_fn();
StageFnPtr make_stage_fn(const std::string& structural_key,
                         std::function<Nat(const Nat&, const Point&, const NatFnPtr&, const Nat&)> f);

// (U~, N~, p, y, L).
struct Stage {
  StageFnPtr Ut, Nt;
  Nat p;
  Point y;
  NatFnPtr L;
  std::string key() const;
};

// A stage together with its rank m.
struct StageK {
  Stage w;
  Nat k;
  std::string key() const;
};

// (r, z, L~, m~, u).
struct Dual {
  Nat r;
  Point z;
  NatFnPtr Lt;
  Nat mt;
  Nat u;
};

// The pair (g, f) evaluated at one argument.
struct OmegaValue {
  Dual g;
  Nat f;
};

class Omega {
 public:
  virtual ~Omega() = default;
  virtual OmegaValue apply(const Stage& w, const Nat& m) const = 0;
  // The fifth output component, when it is the same for every argument.
  virtual std::optional<Nat> constant_u() const { return std::nullopt; }
};

using OmegaPtr = std::shared_ptr<const Omega>;

OmegaPtr make_omega(std::function<OmegaValue(const Stage&, const Nat&)> f, std::optional<Nat> constant_u = {});

class PsiContext;

// Owns fuel, distance oracles and every Psi context of one realizer invocation.
class Session {
 public:
  Session(Space space, Fuel* fuel);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const Space& space() const { return space_; }
  const Nat& b() const { return space_.b(); }
  Fuel* fuel() const { return fuel_; }

  // n -> |seq_n - z|^2, bounded by b^2.
  SequenceOracle distance_oracle(const PointSeqPtr& seq, const Point& z);
  Rat dist_sq(const PointSeqPtr& seq, const Nat& n, const Point& z);

  PsiContext* adopt(std::unique_ptr<PsiContext> ctx);

 private:
  Space space_;
  Fuel* fuel_;
  std::map<std::string, SequenceOracle> oracles_;
  std::vector<std::unique_ptr<PsiContext>> contexts_;
};

struct AClause {
  std::string name;
  bool value = false;
  std::string detail;
};

struct AReport {
  bool holds = false;
  bool premise = false;
  std::vector<AClause> clauses;
  std::string summary() const;
};

// A(x, delta, w, q, t) with k = ceil(4/delta); every clause is evaluated and recorded.
AReport evaluate_A(Session& s, const PointSeqPtr& x, const Rat& delta, const Stage& w, const Dual& q, const Nat& t);
// Same predicate with short-circuit evaluation.
bool holds_A(Session& s, const PointSeqPtr& x, const Rat& delta, const Stage& w, const Dual& q, const Nat& t);

struct PsiResult {
  StageK out;
  Nat index;
  Nat I;
  OmegaValue value;
};

// Psi(x, delta, Omega) anchored at z1; verifies its own contract with evaluate_A.
PsiResult psi_realizer(Session& s, const PointSeqPtr& x, const Rat& delta, const OmegaPtr& omega, const Point& z1);

using G2 = std::function<OmegaValue(const StageK&)>;
using G4 = std::function<OmegaValue(const StageK&, const StageK&)>;
using G6 = std::function<OmegaValue(const StageK&, const StageK&, const StageK&)>;

struct PhiInputs {
  Rat u;
  std::function<Rat(const StageK&, const StageK&)> u_prime;
  std::function<Nat(const StageK&, const StageK&)> iota;
  G2 g0;
  G4 g0p;
  G6 g1, g2, g1p, g2p;
  std::function<PointSeqPtr(const Stage&)> phi;
  Point z1;
};

struct ACheck {
  std::string label;
  AReport report;
  bool ok() const { return report.holds; }
};

struct PhiResult {
  StageK w, wp, v, vp;
  Nat l, lp, h, hp, ht, htp, iota;
  std::vector<ACheck> checks;
  bool h_bound = false;
  bool all_ok() const;
};

// Phi(Psi)(u, u', g, g', f, f', iota, phi) together with the eight A-instances.
PhiResult phi_realizer(Session& s, const PointSeqPtr& x, const PhiInputs& in);

}  // namespace metastab

#endif
