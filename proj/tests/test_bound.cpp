#include "metastab/bound.hpp"
#include "metastab/claim2.hpp"
#include "metastab/moduli.hpp"
#include "metastab/schemas.hpp"

#include <gtest/gtest.h>

using namespace metastab;

namespace {

NatMap identity_map() {
  return [](const Nat& n) { return n; };
}

BoundParams hilbert_params(const Rat& eps) {
  BoundParams p;
  p.b = 1;
  p.eta = hilbert_eta();
  p.tau = identity_modulus("identity-tau");
  p.theta = identity_modulus("identity-theta");
  p.alpha = identity_map();
  p.gamma = [](const Nat& n) { return n + 1; };
  p.alpha_monotone = true;
  p.epsilon = eps;
  p.g = constant_fn(Nat(5));
  return p;
}

}  // namespace

TEST(Bound, EpsilonDomain) {
  EXPECT_THROW(check_epsilon(Rat(0)), DomainError);
  EXPECT_THROW(check_epsilon(rat(5, 2)), DomainError);
  EXPECT_NO_THROW(check_epsilon(Rat(2)));
}

TEST(Bound, IotaHandValue) {
  // max(ceil(2/sqrt(1)), 8) = 8.
  EXPECT_EQ(iota_value(Nat(1), Rat(1), identity_map()), Nat(8));
  // nu = 1/4: max(ceil(2/(1/2)), 32) = 32.
  EXPECT_EQ(iota_value(Nat(1), rat(1, 4), identity_map()), Nat(32));
  EXPECT_THROW(iota_value(Nat(1), Rat(0), identity_map()), DomainError);
}

TEST(Bound, MajorantsAreRunningMaxima) {
  auto g = table_fn("t", {Nat(3), Nat(1), Nat(5), Nat(0)});
  auto m = gM(g);
  EXPECT_EQ(m->apply(Nat(1)), Nat(3));
  EXPECT_EQ(m->apply(Nat(3)), Nat(5));
  NatMap a = alphaM([](const Nat& n) { return n % 2 == 0 ? n : Nat(0); }, false);
  EXPECT_EQ(a(Nat(3)), Nat(2));
}

TEST(Bound, ConstantsRelations) {
  for (const Rat& eps : {Rat(1), rat(1, 2), rat(1, 4)}) {
    ConstantsBundle c = constants(hilbert_params(eps));
    EXPECT_GT(c.u(eps), 0);
    EXPECT_LE(c.u(eps), c.nu2(eps));
    EXPECT_LE(c.u(eps), 2 * c.nu4(eps) * c.delta(eps) / 3);
    EXPECT_LE(c.delta(eps), rat(1, 4));
    EXPECT_LE(c.p_const(eps), eps * eps / 96);
    EXPECT_LE(c.nu4(eps), eps * eps / 16);
    EXPECT_EQ(c.q_const(Nat(2), Nat(5), eps), min_rat(c.beta(Nat(2), eps), c.beta(Nat(5), eps)));
  }
}

TEST(Bound, Nu1StarIsHalfPrefixMinimum) {
  BoundParams p = hilbert_params(Rat(1));
  ConstantsBundle c = constants(p);
  const Rat eps = Rat(1);
  // g^M(n) = 5, so the minimum runs over c <= max(m, n + 5).
  Rat direct = psi(p.b, p.eta, theta_tilde(p.theta, c.beta(Nat(0), eps)));
  for (long i = 1; i <= 7; ++i) direct = min_rat(direct, psi(p.b, p.eta, theta_tilde(p.theta, c.beta(Nat(i), eps))));
  EXPECT_EQ(c.nu1_star(Nat(3), Nat(2), eps), direct / 2);
}

TEST(Bound, ExactConstantsAreTiny) {
  ConstantsBundle c = constants(hilbert_params(Rat(1)));
  EXPECT_LT(c.u(Rat(1)), rat(1, 1000000));
}

TEST(Bound, RealizerRefusesExactConstantsWithinFuel) {
  MapInstance T = map_library("affine-1d", {{"slope", "-2"}, {"intercept", "1"}});
  Space s = default_space(T);
  Claim2Data d;
  d.x = resolvent_sequence(s, T, Point{Rat(0)}, canonical_schedule());
  d.anchor = Point{Rat(0)};
  d.hT = h_map(s, T);
  d.constants = constants(hilbert_params(Rat(1)));
  d.epsilon = Rat(1);
  d.g = constant_fn(Nat(5));
  d.alpha = identity_map();
  Fuel fuel(100000000);
  EXPECT_THROW(run_realizer(s, d, &fuel), FuelExceeded);
}

TEST(Bound, RealizerWithInjectedConstants) {
  MapInstance T = map_library("affine-1d", {{"slope", "-2"}, {"intercept", "1"}});
  Space s = default_space(T);
  Claim2Data d;
  d.x = resolvent_sequence(s, T, Point{Rat(0)}, canonical_schedule());
  d.anchor = Point{Rat(0)};
  d.hT = h_map(s, T);
  ConstantsBundle c;
  c.b = 1;
  c.u = [](const Rat&) -> Rat { return Rat(8); };
  c.nu2 = [](const Rat&) -> Rat { return Rat(8); };
  c.delta = [](const Rat&) -> Rat { return rat(1, 4); };
  c.nu1 = [](const Nat&, const Nat&, const Rat&) -> Rat { return Rat(8); };
  d.constants = c;
  d.epsilon = rat(1, 2);
  d.g = constant_fn(Nat(5));
  d.alpha = identity_map();
  Fuel fuel(100000000);
  RealizerReport r = run_realizer(s, d, &fuel);
  EXPECT_TRUE(r.endpoint_ok);
  EXPECT_EQ(r.phi.checks.size(), 8u);
  for (const auto& ch : r.phi.checks) EXPECT_TRUE(ch.ok()) << ch.label;
  EXPECT_LE(r.gap_sq, rat(1, 4));
}
