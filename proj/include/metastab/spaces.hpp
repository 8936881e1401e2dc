#ifndef METASTAB_SPACES_HPP
#define METASTAB_SPACES_HPP

#include "metastab/errors.hpp"
#include "metastab/modulus.hpp"
#include "metastab/numeric.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace metastab {

using Point = std::vector<Rat>;
using DualPoint = std::vector<Real>;
using Matrix = std::vector<std::vector<Rat>>;

std::string point_key(const Point& x);
nlohmann::json point_to_json(const Point& x);
Point point_from_json(const nlohmann::json& j);
// Accepts "a/b" strings and JSON numbers; errors name `key`.
Rat rat_from_json(const nlohmann::json& j, const std::string& key);

Point add(const Point& a, const Point& b);
Point sub(const Point& a, const Point& b);
Point scale(const Rat& c, const Point& a);
Point midpoint(const Point& a, const Point& b);
Rat dot(const Point& a, const Point& b);
Rat euclid_sq(const Point& a);

struct FeasibleSet {
  enum class Kind { box, ball };
  Kind kind = Kind::box;
  Point lo, hi;
  Point center;
  Rat radius;

  static FeasibleSet box(Point lo, Point hi);
  static FeasibleSet ball(Point center, Rat radius);
};

// l^p on Q^d with a norm and diameter bound b on the feasible set.
class Space {
 public:
  Space(std::size_t dim, Rat p, Nat b, FeasibleSet set);

  std::size_t dim() const { return dim_; }
  const Rat& p() const { return p_; }
  const Nat& b() const { return b_; }
  const FeasibleSet& set() const { return set_; }
  bool hilbert() const { return p_ == 2; }
  // Comparison slack on the high-precision path.
  Real slack() const { return Real("1e-60"); }

  void check(const Point& x) const;

  Rat norm_sq_exact(const Point& x) const;
  Real norm(const Point& x) const;
  Real norm_sq(const Point& x) const;
  Real dual_norm(const DualPoint& f) const;

  // j(x) with <x, j(x)> = |x|^2 and |j(x)|_* = |x|.
  DualPoint duality_map(const Point& x) const;
  Point duality_map_exact(const Point& x) const;
  Real pairing(const Point& y, const DualPoint& f) const;

  bool contains(const Point& x) const;
  Point sample(std::mt19937_64& rng, const Rat& radius, unsigned denominator = 64) const;
  Point sample_in_set(std::mt19937_64& rng, unsigned denominator = 64) const;

 private:
  std::size_t dim_;
  Rat p_;
  Nat b_;
  FeasibleSet set_;
};

enum class MapClass { nonexpansive, pseudocontraction };
std::string to_string(MapClass c);

// T(y) = A y + c.
struct AffineForm {
  Matrix A;
  Point c;
  Point apply(const Point& y) const;
};

// Continuous piecewise-linear map on [xs.front(), xs.back()].
struct PiecewiseLinear {
  std::vector<Rat> xs, ys;
  Rat eval(const Rat& x) const;
};

struct MapInstance {
  std::string name;
  MapClass cls = MapClass::nonexpansive;
  Modulus theta;
  std::optional<Rat> lipschitz;
  FeasibleSet domain;
  Nat suggested_b = 1;
  std::function<Point(const Point&)> fn;
  std::optional<AffineForm> affine;
  std::optional<PiecewiseLinear> pwl;

  Point operator()(const Point& y) const { return fn(y); }
};

struct SolverOptions {
  Rat tol = Rat(1, 1000000000);
  std::uint64_t budget = 200000;
  unsigned bits = 0;  // 0: derived from tol
  std::uint64_t seed = 1;
};

struct SolverError : Error {
  Point best;
  Real residual;
  SolverError(const std::string& what, Point best_iterate, Real res)
      : Error(what), best(std::move(best_iterate)), residual(std::move(res)) {}
};

// Solves z = t T z + (1-t) x with residual <= tol; t = 0 returns x.
Point resolvent_point(const Space& space, const MapInstance& T, const Point& x, const Rat& t,
                      const SolverOptions& opts = {});
Real resolvent_residual(const Space& space, const MapInstance& T, const Point& x, const Rat& t, const Point& z);

Point f_map(const MapInstance& T, const Point& x);
Point g_map(const Space& space, const MapInstance& T, const Point& y, const SolverOptions& opts = {});
MapInstance h_map(const Space& space, const MapInstance& T, const SolverOptions& opts = {});

MapInstance make_affine_map(const std::string& name, Matrix A, Point c, FeasibleSet domain, Nat b);
MapInstance make_piecewise_map(const std::string& name, std::vector<Rat> xs, std::vector<Rat> ys);

// affine-1d, rational-rotation, coordinate-projection, convex-combination,
// piecewise-linear-1d.
MapInstance map_library(const std::string& name, const nlohmann::json& params = nlohmann::json::object());
Space default_space(const MapInstance& T);

Point solve_linear(Matrix A, Point rhs);
bool is_psd(Matrix S);

struct SampleReport {
  std::string property;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::vector<std::string> examples;
  bool ok() const { return violations == 0; }
};

// |x+y|^2 <= |x|^2 + 2<y, j(x+y)> on sampled pairs in the b-ball.
SampleReport check_duality_lemma(const Space& space, std::size_t samples, std::uint64_t seed);
SampleReport check_duality_identities(const Space& space, std::size_t samples, std::uint64_t seed);
SampleReport check_map_class(const Space& space, const MapInstance& T, std::size_t samples, std::uint64_t seed);

}  // namespace metastab

#endif
