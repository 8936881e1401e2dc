#ifndef METASTAB_THETA_HPP
#define METASTAB_THETA_HPP

#include "metastab/bound.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace metastab {

// Constants consumed by the starred cascade at one fixed epsilon.
struct ThetaConstants {
  Nat b = 1;
  Rat u, nu2;
  // nu1*(m, n), already halved.
  std::function<Rat(const Nat&, const Nat&)> nu1_star;
  NatMap alphaM;
};

// Exact constants at the given epsilon (no halving).
ThetaConstants theta_constants(const BoundParams& params, const Rat& eps, Fuel* fuel);

// U*(L, m, p) = max(L(anchor), F(m)); without an anchor the L term is absent.
struct UStar {
  std::optional<Nat> anchor;
  NatFnPtr F;
};

// M*(L, m, p) = max(floor, G(m)).
struct MStar {
  Nat floor = 0;
  NatFnPtr G;
};

struct NTStar {
  NatFnPtr N;
  Nat T;
};

// (N*, T*) U* M* k* with S = b^2 (k*+1) stages, in closed form.
NTStar nt_star(const Nat& b, const UStar& U, const MStar& M, const Nat& k, Fuel* fuel);

using StarU = std::function<Nat(const NatFnPtr&, const Nat&, const Nat&)>;

// Literal W*/J* recursion for arbitrary U*, M*; S must fit in memory.
NTStar nt_star_literal(const Nat& b, const StarU& U, const StarU& M, const Nat& k, Fuel* fuel);

// Level pair (w1*, w2*) of a starred stage; both are functions of m alone.
struct SLevels {
  NatFnPtr M, U;
};

struct SStage {
  SLevels lv;
  Nat p, y;
  NatFnPtr L;
};

struct SK {
  SStage w;
  Nat k;
  std::string key() const;
};

// (r, z, L~, m~, u) together with f.
struct SVal {
  Nat r, z;
  NatFnPtr Lt;
  Nat mt, u, f;
};

SVal max_sval(const SVal& a, const SVal& b);

// Omega* reading only the level pair and m.
class SOmega {
 public:
  virtual ~SOmega() = default;
  virtual SVal apply(const SLevels& w, const Nat& m) const = 0;
  virtual std::optional<Nat> constant_u() const { return std::nullopt; }
};

using SOmegaPtr = std::shared_ptr<const SOmega>;

SOmegaPtr make_somega(std::function<SVal(const SLevels&, const Nat&)> f, std::optional<Nat> constant_u = {});

class StarContext;

// Owns the level tables of every Psi* call; results stay valid while it lives.
class StarArena {
 public:
  StarArena(Nat b, Fuel* fuel);
  ~StarArena();
  StarArena(const StarArena&) = delete;
  StarArena& operator=(const StarArena&) = delete;

  const Nat& b() const { return b_; }
  Fuel* fuel() const { return fuel_; }
  StarContext* open(SOmegaPtr omega);

 private:
  Nat b_;
  Fuel* fuel_;
  std::vector<std::unique_ptr<StarContext>> contexts_;
};

// Psi*(l, Omega*): I* = 2b^2(l+1) levels, stationary once the rank repeats.
SK psi_star(StarArena& arena, const Nat& l, const SOmegaPtr& omega);

struct ThetaResult {
  Nat theta;
  Nat k, kp, f0;
  std::uint64_t applications = 0;
};

// Theta'(eps, g) = k'* + f0*(w'*, k'*) for the given constants.
ThetaResult theta_prime(const ThetaConstants& c, Fuel* fuel);

// Theta(eps, g) = Theta'(eps/2, g).
ThetaResult theta_bound(const BoundParams& params, Fuel* fuel);

}  // namespace metastab

#endif
