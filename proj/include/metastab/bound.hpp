#ifndef METASTAB_BOUND_HPP
#define METASTAB_BOUND_HPP

#include "metastab/functional.hpp"
#include "metastab/modulus.hpp"

#include <functional>

namespace metastab {

using NatMap = std::function<Nat(const Nat&)>;

struct BoundParams {
  Nat b = 1;
  Modulus eta, tau, theta;
  NatMap alpha, gamma;
  // Set when alpha is nondecreasing, so alpha^M = alpha.
  bool alpha_monotone = false;
  Rat epsilon;
  NatFnPtr g;
  // Majorant of g; running_max(g) when empty.
  NatFnPtr gM;
};

// Every family as a function object so that callers can substitute tractable values.
struct ConstantsBundle {
  Nat b = 1;
  std::function<Rat(const Rat&)> nu4, delta, p_const, nu2;
  std::function<Rat(const Nat&, const Rat&)> beta;
  // Second argument is the already selected rank s_{p,g}(d).
  std::function<Rat(const Nat&, const Nat&, const Rat&)> q_const;
  std::function<Rat(const Nat&, const Nat&, const Rat&)> nu1;
  std::function<Rat(const Rat&)> u;
  // (1/2) min_{c <= max(m, n + g^M(n))} psi(theta~(beta(c, eps))).
  std::function<Rat(const Nat&, const Nat&, const Rat&)> nu1_star;
  NatMap alphaM;
};

void check_epsilon(const Rat& eps);

// Exact rational evaluation of nu4, delta, p, nu2, beta, q, nu1 and u = min{2 nu4 delta/3, nu2}.
ConstantsBundle constants(const BoundParams& params, Fuel* fuel = nullptr);

// f^M(n) = max_{i <= n} f(i).
NatFnPtr gM(NatFnPtr g);
NatMap alphaM(NatMap alpha, bool monotone);

// alpha(ceil(max{2b/sqrt(nu), 8b^2/nu})).
Nat iota_value(const Nat& b, const Rat& nu, const NatMap& alpha);

}  // namespace metastab

#endif
