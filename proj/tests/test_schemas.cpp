#include "metastab/schemas.hpp"

#include <gtest/gtest.h>

using namespace metastab;

namespace {

Nat N(long n) { return Nat(n); }

}  // namespace

TEST(Schemas, CanonicalSchedule) {
  Schedule s = canonical_schedule();
  EXPECT_EQ(s.t(N(0)), Rat(0));
  EXPECT_EQ(s.t(N(3)), rat(3, 4));
  EXPECT_EQ(s.alpha(N(7)), N(7));
  EXPECT_EQ(s.gamma(N(7)), N(8));
  EXPECT_TRUE(check_schedule_contracts(s, 1, 1000).ok());
}

TEST(Schemas, ShiftedScheduleStaysInsideUnitInterval) {
  Schedule s = shifted_schedule();
  EXPECT_EQ(s.t(N(0)), rat(1, 2));
  EXPECT_EQ(s.gamma(N(0)), N(2));
  EXPECT_TRUE(check_schedule_contracts(s, 0, 500).ok());
}

TEST(Schemas, ContractsCatchBadAlpha) {
  Schedule s = canonical_schedule();
  s.alpha = [](const Nat& n) -> Nat { return n / 2; };
  EXPECT_FALSE(check_schedule_contracts(s, 1, 50).ok());
}

TEST(Schemas, UnknownPresetIsConfigError) { EXPECT_THROW(schedule_preset("nope"), ConfigError); }

TEST(Schemas, ResolventSequenceClosedForm) {
  MapInstance T = map_library("affine-1d", {{"slope", "-2"}, {"intercept", "1"}});
  Space s = default_space(T);
  auto x = resolvent_sequence(s, T, Point{Rat(0)}, canonical_schedule());
  for (long n = 0; n <= 30; ++n) EXPECT_EQ(x->at(N(n))[0], rat(n, 3 * n + 1));
}

TEST(Schemas, ResidualLawAlongPath) {
  MapInstance T = map_library("rational-rotation");
  Space s = default_space(T);
  auto x = resolvent_sequence(s, T, Point{rat(1, 2), rat(1, 3)}, canonical_schedule());
  for (long n = 0; n <= 50; ++n) {
    Point p = x->at(N(n));
    Real res = s.norm(sub(p, T(p)));
    Rat bound = (1 - canonical_schedule().t(N(n))) * Rat(s.b()) + 2 * SolverOptions{}.tol;
    EXPECT_LE(res, to_real(bound)) << n;
  }
}

TEST(Schemas, SelectorKeepsNUnlessTheLaterPointIsFarther) {
  MapInstance T = map_library("affine-1d", {{"slope", "-2"}, {"intercept", "1"}});
  Space s = default_space(T);
  auto x = resolvent_sequence(s, T, Point{Rat(0)}, canonical_schedule());
  auto g = constant_fn(N(3));
  for (long n = 0; n <= 10; ++n) {
    for (const Point& p : {Point{Rat(0)}, Point{rat(1, 3)}}) {
      Nat sel = s_selector(s, p, *g, *x, N(n));
      ASSERT_TRUE(sel == N(n) || sel == N(n + 3));
      Rat near = s.norm_sq_exact(sub(x->at(N(n)), p)), later = s.norm_sq_exact(sub(x->at(N(n + 3)), p));
      EXPECT_EQ(sel, later <= near ? N(n) : N(n + 3));
    }
  }
  auto xp = reindexed_sequence(s, x, Point{Rat(0)}, g);
  for (long n = 0; n <= 5; ++n) EXPECT_EQ(xp->at(N(n)), x->at(s_selector(s, Point{Rat(0)}, *g, *x, N(n))));
}

TEST(Schemas, HalpernFirstStep) {
  MapInstance T = map_library("affine-1d", {{"slope", "1/2"}, {"intercept", "0"}});
  Space s = default_space(T);
  auto x = halpern(s, T, Point{Rat(1)}, Point{Rat(1)}, wittmann_rates_harmonic());
  EXPECT_EQ(x->at(N(0)), Point{Rat(1)});
  EXPECT_EQ(x->at(N(1)), Point{rat(3, 4)});
  // x_2 = 1/3 + (2/3)(3/8).
  EXPECT_EQ(x->at(N(2)), Point{rat(7, 12)});
}

TEST(Schemas, HarmonicRateWitnesses) {
  HalpernRates r = wittmann_rates_harmonic();
  EXPECT_EQ(r.lambda(N(10)), rat(1, 11));
  EXPECT_EQ(r.beta2(rat(1, 10)), N(10));
  EXPECT_TRUE(check_halpern_rates(r, 5, rat(1, 20)).ok());
}

TEST(Schemas, BruckPresetsAreFeasible) {
  ASSERT_FALSE(bruck_preset_names().empty());
  for (const auto& name : bruck_preset_names()) EXPECT_TRUE(check_bruck_feasibility(bruck_preset(name), 1, 500).ok()) << name;
}

TEST(Schemas, BruckRejectsInfeasibleParameters) {
  BruckParams p{"bad", [](const Nat&) -> Rat { return rat(3, 4); }, [](const Nat&) -> Rat { return Rat(1); }};
  EXPECT_FALSE(check_bruck_feasibility(p, 1, 10).ok());
}

TEST(Schemas, BruckIteratesFromIndexOne) {
  MapInstance T = map_library("affine-1d", {{"slope", "1/2"}, {"intercept", "0"}});
  Space s = default_space(T);
  const auto name = bruck_preset_names().front();
  auto x = bruck(s, T, Point{Rat(1)}, bruck_preset(name));
  EXPECT_EQ(x->at(N(1)), Point{Rat(1)});
  EXPECT_TRUE(s.contains(x->at(N(5))));
}
