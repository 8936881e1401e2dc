#include "metastab/spaces.hpp"

#include <gtest/gtest.h>

using namespace metastab;

namespace {

MapInstance affine(const char* slope, const char* intercept) {
  return map_library("affine-1d", {{"slope", slope}, {"intercept", intercept}});
}

}  // namespace

TEST(Spaces, AffineMapAndResolventClosedForm) {
  MapInstance T = affine("-2", "1");
  Space s = default_space(T);
  EXPECT_EQ(T(Point{rat(1, 4)}), Point{rat(1, 2)});
  // z = t(1 - 2z) gives z = t/(1+2t).
  for (long n = 1; n <= 6; ++n) {
    Rat t = rat(n, n + 1);
    Point z = resolvent_point(s, T, Point{Rat(0)}, t);
    EXPECT_EQ(z[0], t / (1 + 2 * t));
    EXPECT_LE(resolvent_residual(s, T, Point{Rat(0)}, t, z), to_real(SolverOptions{}.tol));
  }
}

TEST(Spaces, ResolventAtZeroReturnsAnchor) {
  MapInstance T = map_library("rational-rotation");
  Space s = default_space(T);
  Point x{rat(1, 3), rat(-1, 4)};
  EXPECT_EQ(resolvent_point(s, T, x, Rat(0)), x);
}

TEST(Spaces, HilbertDualityMapIsIdentity) {
  Space s(3, Rat(2), Nat(2), FeasibleSet::box(Point(3, Rat(-1)), Point(3, Rat(1))));
  Point x{rat(1, 2), rat(-1, 3), rat(1, 5)};
  EXPECT_EQ(s.duality_map_exact(x), x);
  EXPECT_EQ(s.norm_sq_exact(x), euclid_sq(x));
}

TEST(Spaces, LpDualityMapIdentities) {
  Space s(2, Rat(4), Nat(2), FeasibleSet::box(Point(2, Rat(-1)), Point(2, Rat(1))));
  Point x{rat(1, 2), rat(-3, 4)};
  DualPoint j = s.duality_map(x);
  Real tol("1e-50");
  EXPECT_LE(abs(s.pairing(x, j) - s.norm_sq(x)), tol);
  EXPECT_LE(abs(s.dual_norm(j) - s.norm(x)), tol);
  EXPECT_TRUE(check_duality_identities(s, 300, 4).ok());
}

TEST(Spaces, DualityLemmaOnSamples) {
  Space h(3, Rat(2), Nat(2), FeasibleSet::box(Point(3, Rat(-1)), Point(3, Rat(1))));
  EXPECT_TRUE(check_duality_lemma(h, 1000, 9).ok());
  Space l3(2, Rat(3), Nat(2), FeasibleSet::box(Point(2, Rat(-1)), Point(2, Rat(1))));
  EXPECT_TRUE(check_duality_lemma(l3, 300, 9).ok());
}

TEST(Spaces, LibraryMapsSatisfyTheirClass) {
  for (const auto& T : {map_library("rational-rotation"), map_library("coordinate-projection"), affine("1/2", "0")}) {
    SampleReport r = check_map_class(default_space(T), T, 400, 2);
    EXPECT_TRUE(r.ok()) << T.name;
  }
}

TEST(Spaces, PiecewiseMapInterpolates) {
  nlohmann::json knots = nlohmann::json::array({{"0", "0"}, {"1/2", "1/2"}, {"1", "0"}});
  MapInstance T = map_library("piecewise-linear-1d", {{"knots", knots}});
  EXPECT_EQ(T(Point{rat(1, 4)}), Point{rat(1, 4)});
  EXPECT_EQ(T(Point{rat(3, 4)}), Point{rat(1, 4)});
  // Slope 2 on the first piece is not a pseudocontraction.
  nlohmann::json steep = nlohmann::json::array({{"0", "0"}, {"1/2", "1"}, {"1", "1/2"}});
  EXPECT_THROW(map_library("piecewise-linear-1d", {{"knots", steep}}), ConfigError);
}

TEST(Spaces, ConvexCombinationOfAffineMaps) {
  nlohmann::json first = {{"name", "affine-1d"}, {"params", {{"slope", "0"}, {"intercept", "1"}}}};
  nlohmann::json second = {{"name", "affine-1d"}, {"params", {{"slope", "1"}, {"intercept", "0"}}}};
  MapInstance T = map_library("convex-combination", {{"weight", "1/4"}, {"first", first}, {"second", second}});
  EXPECT_EQ(T(Point{rat(1, 2)}), Point{rat(1, 4) + rat(3, 4) * rat(1, 2)});
}

TEST(Spaces, ConfigErrorsNameTheKey) {
  try {
    map_library("nope");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key, "map.name");
  }
  EXPECT_THROW(map_library("rational-rotation", {{"c", "1/2"}, {"s", "1/2"}}), ConfigError);
  EXPECT_THROW(map_library("affine-1d", {{"slope", "1"}}), ConfigError);
}

TEST(Spaces, PointJsonRoundTrip) {
  Point x{rat(-3, 7), Rat(2), rat(1, 1000)};
  EXPECT_EQ(point_from_json(point_to_json(x)), x);
  EXPECT_THROW(point_from_json(nlohmann::json("x")), ConfigError);
}

TEST(Spaces, FeasibleSetMembership) {
  Space s = default_space(map_library("rational-rotation"));
  EXPECT_TRUE(s.contains(Point{rat(3, 5), rat(4, 5)}));
  EXPECT_FALSE(s.contains(Point{Rat(1), rat(1, 10)}));
}
