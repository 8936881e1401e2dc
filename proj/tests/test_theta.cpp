#include "metastab/theta.hpp"

#include "metastab/modulus.hpp"

#include <gtest/gtest.h>

using namespace metastab;

namespace {

NatFnPtr poly() {
  return make_fn("poly", [](const Nat& n) -> Nat { return (n * n + 3) % 17; });
}

}  // namespace

TEST(Theta, ClosedFormMatchesLiteralRecursion) {
  auto F = poly();
  auto G = make_fn("G", [](const Nat& n) -> Nat { return n < 9 ? n + 2 : Nat(9); });
  for (long b = 1; b <= 2; ++b) {
    for (long k = 0; k <= 3; ++k) {
      for (const std::optional<Nat>& anchor : {std::optional<Nat>{}, std::optional<Nat>{Nat(4)}}) {
        const Nat floor(1);
        StarU U = [F, anchor](const NatFnPtr& L, const Nat& m, const Nat&) -> Nat {
          return anchor ? max_nat(L->apply(*anchor), F->apply(m)) : F->apply(m);
        };
        StarU M = [G, floor](const NatFnPtr&, const Nat& m, const Nat&) -> Nat { return max_nat(floor, G->apply(m)); };
        NTStar lit = nt_star_literal(Nat(b), U, M, Nat(k), nullptr);
        NTStar cf = nt_star(Nat(b), UStar{anchor, F}, MStar{floor, G}, Nat(k), nullptr);
        EXPECT_EQ(cf.T, lit.T) << "b=" << b << " k=" << k;
        for (long y = 0; y <= 12; ++y) EXPECT_EQ(cf.N->apply(Nat(y)), lit.N->apply(Nat(y))) << "y=" << y;
      }
    }
  }
}

TEST(Theta, SingleStageIsTheLevelFunction) {
  auto F = poly();
  NTStar r = nt_star(Nat(1), UStar{Nat(2), F}, MStar{0, constant_fn(Nat(0))}, Nat(0), nullptr);
  for (long y = 0; y < 5; ++y) EXPECT_EQ(r.N->apply(Nat(y)), F->apply(Nat(y)));
  EXPECT_EQ(r.T, Nat(0));
}

TEST(Theta, FixpointStopsTheJRecursion) {
  // M* = max(3, j/2) reaches 3 after one step, for any number of stages.
  auto G = make_fn("half", [](const Nat& n) -> Nat { return n / 2; });
  Fuel fuel(1000);
  NTStar r = nt_star(Nat(1000), UStar{std::nullopt, poly()}, MStar{Nat(3), G}, Nat(1000000), &fuel);
  EXPECT_EQ(r.T, Nat(3));
  EXPECT_LT(fuel.used(), 10u);
}

TEST(Theta, PsiStarConstantOmega) {
  SVal v{Nat(3), Nat(2), constant_fn(Nat(1)), Nat(5), Nat(0), Nat(7)};
  SOmegaPtr omega = make_somega([v](const SLevels&, const Nat&) { return v; }, Nat(0));
  Fuel fuel(100000);
  StarArena arena(Nat(1), &fuel);
  SK r = psi_star(arena, Nat(0), omega);
  // p0 = 4b^2(l+1) = 4 and y0 = b dominate r and z.
  EXPECT_EQ(r.w.p, Nat(4));
  EXPECT_EQ(r.w.y, Nat(2));
  EXPECT_EQ(r.k, Nat(5));
}

TEST(Theta, PsiStarRunsAtMostIStarRounds) {
  // m -> m + 3 never repeats, so all I* = 2b^2(l+1) = 6 rounds run.
  SOmegaPtr omega = make_somega(
      [](const SLevels&, const Nat& m) { return SVal{m % 7, Nat(1), zero_fn(), m + 3, Nat(0), Nat(0)}; }, Nat(0));
  Fuel fuel(1000000);
  StarArena arena(Nat(1), &fuel);
  SK r = psi_star(arena, Nat(2), omega);
  EXPECT_EQ(r.k, Nat(18));
  EXPECT_EQ(r.w.p, Nat(12));
}

TEST(Theta, ConstantMLevelsAreZero) {
  SOmegaPtr omega = make_somega(
      [](const SLevels& lv, const Nat& m) {
        EXPECT_EQ(lv.M->apply(m), Nat(0));
        return SVal{Nat(0), Nat(0), zero_fn(), m, Nat(9), Nat(1)};
      },
      Nat(0));
  Fuel fuel(100000);
  StarArena arena(Nat(1), &fuel);
  psi_star(arena, Nat(1), omega);
}

TEST(Theta, PsiStarChecksFuelUpFront) {
  SOmegaPtr omega = make_somega([](const SLevels&, const Nat&) { return SVal{0, 0, zero_fn(), 0, 0, 0}; });
  Fuel fuel(10);
  StarArena arena(Nat(1), &fuel);
  EXPECT_THROW(psi_star(arena, Nat(1000), omega), FuelExceeded);
}

TEST(Theta, MaxSval) {
  SVal a{Nat(1), Nat(5), constant_fn(Nat(2)), Nat(3), Nat(0), Nat(4)};
  SVal b{Nat(2), Nat(1), constant_fn(Nat(7)), Nat(1), Nat(6), Nat(0)};
  SVal m = max_sval(a, b);
  EXPECT_EQ(m.r, Nat(2));
  EXPECT_EQ(m.z, Nat(5));
  EXPECT_EQ(m.Lt->apply(Nat(0)), Nat(7));
  EXPECT_EQ(m.mt, Nat(3));
  EXPECT_EQ(m.u, Nat(6));
  EXPECT_EQ(m.f, Nat(4));
}

TEST(Theta, ExactConstantsExceedFuel) {
  BoundParams p;
  p.b = 1;
  p.eta = hilbert_eta();
  p.tau = identity_modulus("identity-tau");
  p.theta = identity_modulus("identity-theta");
  p.alpha = [](const Nat& n) { return n; };
  p.gamma = [](const Nat& n) { return n + 1; };
  p.alpha_monotone = true;
  p.epsilon = Rat(1);
  p.g = constant_fn(Nat(5));
  Fuel fuel(100000000);
  try {
    theta_bound(p, &fuel);
    FAIL() << "Theta evaluated at exact constants";
  } catch (const FuelExceeded& e) {
    EXPECT_NE(e.stage.find("Psi*"), std::string::npos);
  }
}

TEST(Theta, RejectsNonpositiveConstants) {
  ThetaConstants c;
  c.u = 0;
  c.nu2 = 1;
  c.nu1_star = [](const Nat&, const Nat&) -> Rat { return Rat(1); };
  c.alphaM = [](const Nat& n) { return n; };
  Fuel fuel(1000);
  EXPECT_THROW(theta_prime(c, &fuel), DomainError);
}
