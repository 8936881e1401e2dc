#include "metastab/spaces.hpp"

#include <algorithm>
#include <cmath>

namespace metastab {

std::string point_key(const Point& x) {
  std::string out = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ",";
    out += to_string(x[i]);
  }
  return out + ")";
}

nlohmann::json point_to_json(const Point& x) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : x) arr.push_back(to_string(c));
  return arr;
}

Rat rat_from_json(const nlohmann::json& j, const std::string& key) {
  try {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return Rat(Nat(j.dump()));
    if (j.is_number()) return parse_rat(j.dump());
  } catch (const DomainError& e) {
    throw ConfigError(key, e.what());
  }
  throw ConfigError(key, "expected a rational");
}

Point point_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("point", "expected an array of rationals");
  Point p;
  for (std::size_t i = 0; i < j.size(); ++i) p.push_back(rat_from_json(j[i], "point[" + std::to_string(i) + "]"));
  return p;
}

Point add(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw DomainError("dimension mismatch");
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Point sub(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw DomainError("dimension mismatch");
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Point scale(const Rat& c, const Point& a) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

Point midpoint(const Point& a, const Point& b) { return scale(Rat(1, 2), add(a, b)); }

Rat dot(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw DomainError("dimension mismatch");
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rat euclid_sq(const Point& a) { return dot(a, a); }

FeasibleSet FeasibleSet::box(Point lo, Point hi) {
  if (lo.size() != hi.size()) throw DomainError("box bounds of different dimension");
  FeasibleSet s;
  s.kind = Kind::box;
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  return s;
}

FeasibleSet FeasibleSet::ball(Point center, Rat radius) {
  FeasibleSet s;
  s.kind = Kind::ball;
  s.center = std::move(center);
  s.radius = std::move(radius);
  return s;
}

Space::Space(std::size_t dim, Rat p, Nat b, FeasibleSet set)
    : dim_(dim), p_(std::move(p)), b_(std::move(b)), set_(std::move(set)) {
  if (dim_ == 0) throw ConfigError("dim", "dimension must be positive");
  if (p_ < 1) throw ConfigError("p", "exponent must be >= 1");
  if (b_ < 1) throw ConfigError("b", "bound must be a positive integer");
  std::size_t sd = set_.kind == FeasibleSet::Kind::box ? set_.lo.size() : set_.center.size();
  if (sd != dim_) throw ConfigError("set", "feasible set dimension does not match dim");
}

void Space::check(const Point& x) const {
  if (x.size() != dim_)
    throw DomainError("dimension mismatch: expected " + std::to_string(dim_) + ", got " + std::to_string(x.size()));
}

Rat Space::norm_sq_exact(const Point& x) const {
  check(x);
  if (!hilbert()) throw DomainError("exact squared norm needs p = 2");
  return euclid_sq(x);
}

Real Space::norm(const Point& x) const {
  check(x);
  if (hilbert()) return boost::multiprecision::sqrt(to_real(euclid_sq(x)));
  Real pp = to_real(p_);
  Real s = 0;
  for (const auto& c : x) s += boost::multiprecision::pow(boost::multiprecision::abs(to_real(c)), pp);
  if (s == 0) return Real(0);
  return boost::multiprecision::pow(s, 1 / pp);
}

Real Space::norm_sq(const Point& x) const {
  if (hilbert()) return to_real(norm_sq_exact(x));
  Real n = norm(x);
  return n * n;
}

Real Space::dual_norm(const DualPoint& f) const {
  if (f.size() != dim_) throw DomainError("dimension mismatch");
  if (hilbert()) {
    Real s = 0;
    for (const auto& c : f) s += c * c;
    return boost::multiprecision::sqrt(s);
  }
  if (p_ == 1) {
    Real m = 0;
    for (const auto& c : f) m = std::max(m, Real(boost::multiprecision::abs(c)));
    return m;
  }
  Real pp = to_real(p_);
  Real q = pp / (pp - 1);
  Real s = 0;
  for (const auto& c : f) s += boost::multiprecision::pow(boost::multiprecision::abs(c), q);
  if (s == 0) return Real(0);
  return boost::multiprecision::pow(s, 1 / q);
}

DualPoint Space::duality_map(const Point& x) const {
  check(x);
  DualPoint f(dim_, Real(0));
  if (hilbert()) {
    for (std::size_t i = 0; i < dim_; ++i) f[i] = to_real(x[i]);
    return f;
  }
  if (p_ == 1) throw DomainError("duality map of l^1 is set-valued");
  Real n = norm(x);
  if (n == 0) return f;
  Real pp = to_real(p_);
  Real lead = boost::multiprecision::pow(n, 2 - pp);
  for (std::size_t i = 0; i < dim_; ++i) {
    Real c = to_real(x[i]);
    if (c == 0) continue;
    Real mag = lead * boost::multiprecision::pow(boost::multiprecision::abs(c), pp - 1);
    f[i] = c > 0 ? mag : Real(-mag);
  }
  return f;
}

Point Space::duality_map_exact(const Point& x) const {
  check(x);
  if (!hilbert()) throw DomainError("exact duality map needs p = 2");
  return x;
}

Real Space::pairing(const Point& y, const DualPoint& f) const {
  check(y);
  Real s = 0;
  for (std::size_t i = 0; i < dim_; ++i) s += to_real(y[i]) * f[i];
  return s;
}

bool Space::contains(const Point& x) const {
  check(x);
  if (set_.kind == FeasibleSet::Kind::box) {
    for (std::size_t i = 0; i < dim_; ++i)
      if (x[i] < set_.lo[i] || x[i] > set_.hi[i]) return false;
    return true;
  }
  Point d = sub(x, set_.center);
  if (hilbert()) return euclid_sq(d) <= set_.radius * set_.radius;
  return norm(d) <= to_real(set_.radius) + slack();
}

Point Space::sample(std::mt19937_64& rng, const Rat& radius, unsigned denominator) const {
  std::uniform_int_distribution<long> dist(-static_cast<long>(denominator), static_cast<long>(denominator));
  for (;;) {
    Point x(dim_);
    for (auto& c : x) c = radius * Rat(dist(rng), denominator);
    for (auto& c : x) c.canonicalize();
    bool inside = hilbert() ? euclid_sq(x) <= radius * radius : norm(x) <= to_real(radius);
    if (inside) return x;
  }
}

Point Space::sample_in_set(std::mt19937_64& rng, unsigned denominator) const {
  if (set_.kind == FeasibleSet::Kind::ball) return add(set_.center, sample(rng, set_.radius, denominator));
  std::uniform_int_distribution<long> dist(0, static_cast<long>(denominator));
  Point x(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    x[i] = set_.lo[i] + (set_.hi[i] - set_.lo[i]) * Rat(dist(rng), denominator);
    x[i].canonicalize();
  }
  return x;
}

std::string to_string(MapClass c) { return c == MapClass::nonexpansive ? "nonexpansive" : "pseudocontraction"; }

Point AffineForm::apply(const Point& y) const {
  Point r = c;
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) r[i] += A[i][j] * y[j];
  return r;
}

Rat PiecewiseLinear::eval(const Rat& x) const {
  if (x < xs.front() || x > xs.back())
    throw DomainError("piecewise-linear map evaluated outside [" + to_string(xs.front()) + "," + to_string(xs.back()) +
                      "] at " + to_string(x));
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = it == xs.end() ? xs.size() - 2 : static_cast<std::size_t>(it - xs.begin()) - 1;
  if (i + 1 >= xs.size()) i = xs.size() - 2;
  Rat w = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + w * (ys[i + 1] - ys[i]);
}

Point solve_linear(Matrix A, Point rhs) {
  std::size_t n = A.size();
  if (rhs.size() != n) throw DomainError("linear system dimension mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && A[piv][col] == 0) ++piv;
    if (piv == n) throw DomainError("singular linear system");
    std::swap(A[piv], A[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || A[r][col] == 0) continue;
      Rat f = A[r][col] / A[col][col];
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  Point x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / A[i][i];
  return x;
}

bool is_psd(Matrix S) {
  std::size_t n = S.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (S[k][k] < 0) return false;
    if (S[k][k] == 0) {
      for (std::size_t j = k; j < n; ++j)
        if (S[k][j] != 0 || S[j][k] != 0) return false;
      continue;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      Rat f = S[i][k] / S[k][k];
      for (std::size_t j = k; j < n; ++j) S[i][j] -= f * S[k][j];
    }
  }
  return true;
}

namespace {

Matrix identity(std::size_t n) {
  Matrix I(n, std::vector<Rat>(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

Matrix inverse(const Matrix& A) {
  std::size_t n = A.size();
  Matrix inv(n, std::vector<Rat>(n));
  for (std::size_t j = 0; j < n; ++j) {
    Point e(n, Rat(0));
    e[j] = 1;
    Point col = solve_linear(A, e);
    for (std::size_t i = 0; i < n; ++i) inv[i][j] = col[i];
  }
  return inv;
}

unsigned derived_bits(const SolverOptions& opts) {
  if (opts.bits) return opts.bits;
  Nat inv = ceil_rat(1 / opts.tol);
  return static_cast<unsigned>(mpz_sizeinbase(inv.get_mpz_t(), 2)) + 24;
}

Point round_point(const Point& z, unsigned bits) {
  Point r(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) r[i] = round_dyadic(z[i], bits);
  return r;
}

Point resolvent_step(const MapInstance& T, const Point& x, const Rat& t, const Point& z) {
  return add(scale(t, T(z)), scale(1 - t, x));
}

bool residual_ok(const Space& space, const Point& r, const Rat& tol) {
  if (space.hilbert()) return euclid_sq(r) <= tol * tol;
  return space.norm(r) <= to_real(tol);
}

Real residual_norm(const Space& space, const Point& r) { return space.norm(r); }

Point project_box(const FeasibleSet& set, Point z) {
  if (set.kind != FeasibleSet::Kind::box) return z;
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::clamp(z[i], set.lo[i], set.hi[i]);
  return z;
}

Point solve_pwl(const MapInstance& T, const Point& x, const Rat& t) {
  const auto& f = *T.pwl;
  auto phi = [&](std::size_t i) { return Rat(f.xs[i] - t * f.ys[i] - (1 - t) * x[0]); };
  std::size_t n = f.xs.size();
  Rat lo = phi(0), hi = phi(n - 1);
  if (lo > 0 || hi < 0) throw SolverError("resolvent equation has no root on the piecewise domain", x, Real(-1));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Rat a = phi(i), b = phi(i + 1);
    if (a <= 0 && b >= 0) {
      if (a == b) return Point{f.xs[i]};
      return Point{f.xs[i] + (0 - a) * (f.xs[i + 1] - f.xs[i]) / (b - a)};
    }
  }
  throw SolverError("piecewise resolvent root not bracketed", x, Real(-1));
}

}  // namespace

Real resolvent_residual(const Space& space, const MapInstance& T, const Point& x, const Rat& t, const Point& z) {
  return residual_norm(space, sub(z, resolvent_step(T, x, t, z)));
}

Point resolvent_point(const Space& space, const MapInstance& T, const Point& x, const Rat& t,
                      const SolverOptions& opts) {
  space.check(x);
  if (t < 0 || t >= 1) throw DomainError("resolvent parameter must lie in [0,1), got " + to_string(t));
  if (t == 0) return x;
  if (T.affine) {
    const auto& A = T.affine->A;
    Matrix M = identity(A.size());
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t j = 0; j < A.size(); ++j) M[i][j] -= t * A[i][j];
    return solve_linear(M, add(scale(t, T.affine->c), scale(1 - t, x)));
  }
  if (T.pwl && space.dim() == 1) return solve_pwl(T, x, t);

  unsigned bits = derived_bits(opts);
  Point best = x;
  Real best_res = resolvent_residual(space, T, x, t, x);
  auto consider = [&](const Point& z) {
    Point r = sub(z, resolvent_step(T, x, t, z));
    Real rn = residual_norm(space, r);
    if (rn < best_res) {
      best_res = rn;
      best = z;
    }
    return residual_ok(space, r, opts.tol);
  };

  if (T.cls == MapClass::nonexpansive) {
    Real b = to_real(space.b());
    Real tr = to_real(t);
    Real need = boost::multiprecision::log(to_real(opts.tol) * (1 - tr) / b) / boost::multiprecision::log(tr);
    std::uint64_t iters = opts.budget;
    if (need > 0 && need < Real(opts.budget)) iters = static_cast<std::uint64_t>(need.convert_to<double>()) + 2;
    Point z = x;
    for (std::uint64_t k = 0; k < iters; ++k) z = round_point(resolvent_step(T, x, t, z), bits);
    if (consider(z)) return z;
    for (std::uint64_t k = iters; k < opts.budget; ++k) {
      z = round_point(resolvent_step(T, x, t, z), bits);
      if ((k & 15) == 0 && consider(z)) return z;
    }
  } else if (T.lipschitz) {
    Rat lambda = (1 - t) / ((1 + *T.lipschitz) * (1 + *T.lipschitz));
    lambda = round_dyadic(lambda, bits) > 0 ? round_dyadic(lambda, bits) : lambda;
    Point z = x;
    for (std::uint64_t k = 0; k < opts.budget; ++k) {
      Point r = sub(z, resolvent_step(T, x, t, z));
      if (residual_ok(space, r, opts.tol)) return z;
      z = round_point(sub(z, scale(lambda, r)), bits);
      if ((k & 63) == 0) consider(z);
    }
  }

  if (space.dim() == 1) {
    Rat lo, hi;
    if (space.set().kind == FeasibleSet::Kind::box) {
      lo = space.set().lo[0];
      hi = space.set().hi[0];
    } else {
      lo = space.set().center[0] - space.set().radius;
      hi = space.set().center[0] + space.set().radius;
    }
    auto phi = [&](const Rat& z) { return Rat(z - t * T(Point{z})[0] - (1 - t) * x[0]); };
    if (phi(lo) <= 0 && phi(hi) >= 0) {
      for (std::uint64_t k = 0; k < opts.budget && k < 4 * bits; ++k) {
        Rat mid = (lo + hi) / 2;
        if (consider(Point{mid})) return Point{mid};
        if (phi(mid) <= 0)
          lo = mid;
        else
          hi = mid;
      }
    }
  }

  if (space.dim() <= 3) {
    std::mt19937_64 rng(opts.seed);
    const std::uint64_t starts = 8;
    std::uint64_t per_start = std::max<std::uint64_t>(1, opts.budget / starts);
    for (std::uint64_t s = 0; s < starts; ++s) {
      Point z = s == 0 ? best : space.sample_in_set(rng, 256);
      Rat step = (1 - t) / 4;
      for (std::uint64_t k = 0; k < per_start; ++k) {
        Point r = sub(z, resolvent_step(T, x, t, z));
        if (residual_ok(space, r, opts.tol)) return z;
        Point cand = project_box(space.set(), round_point(sub(z, scale(step, r)), bits));
        Point rc = sub(cand, resolvent_step(T, x, t, cand));
        if (residual_norm(space, rc) < residual_norm(space, r)) {
          z = cand;
        } else {
          step /= 2;
          if (step < Rat(1, 1 << 30)) break;
        }
      }
      consider(z);
    }
  }
  throw SolverError("resolvent solver budget exhausted at t=" + to_string(t), best, best_res);
}

Point f_map(const MapInstance& T, const Point& x) { return sub(scale(Rat(2), x), T(x)); }

Point g_map(const Space& space, const MapInstance& T, const Point& y, const SolverOptions& opts) {
  if (T.affine) {
    const auto& A = T.affine->A;
    Matrix M(A.size(), std::vector<Rat>(A.size()));
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t j = 0; j < A.size(); ++j) M[i][j] = (i == j ? Rat(2) : Rat(0)) - A[i][j];
    return solve_linear(M, add(y, T.affine->c));
  }
  SolverOptions half = opts;
  half.tol = opts.tol / 2;
  return resolvent_point(space, T, y, Rat(1, 2), half);
}

MapInstance make_affine_map(const std::string& name, Matrix A, Point c, FeasibleSet domain, Nat b) {
  std::size_t n = A.size();
  if (c.size() != n) throw ConfigError(name, "affine offset dimension mismatch");
  Matrix AtA(n, std::vector<Rat>(n, Rat(0)));
  Matrix sym(n, std::vector<Rat>(n, Rat(0)));
  Rat frob = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) AtA[i][j] += A[k][i] * A[k][j];
      sym[i][j] = (i == j ? Rat(1) : Rat(0)) - (A[i][j] + A[j][i]) / 2;
      frob += A[i][j] * A[i][j];
    }
  Matrix gap = identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gap[i][j] -= AtA[i][j];

  MapInstance T;
  T.name = name;
  T.domain = std::move(domain);
  T.suggested_b = std::move(b);
  if (is_psd(gap)) {
    T.cls = MapClass::nonexpansive;
    T.lipschitz = Rat(1);
    T.theta = identity_modulus("identity-theta");
  } else if (is_psd(sym)) {
    T.cls = MapClass::pseudocontraction;
    Rat L = n == 1 ? Rat(abs(A[0][0])) : sqrt_upper(frob, 32);
    T.lipschitz = L;
    T.theta = linear_modulus(1 / L, "lipschitz-theta");
  } else {
    throw ConfigError(name, "affine map is not a pseudocontraction");
  }
  T.affine = AffineForm{std::move(A), std::move(c)};
  T.fn = [form = *T.affine](const Point& y) { return form.apply(y); };
  return T;
}

MapInstance make_piecewise_map(const std::string& name, std::vector<Rat> xs, std::vector<Rat> ys) {
  if (xs.size() < 2 || xs.size() != ys.size()) throw ConfigError(name, "need at least two knots");
  Rat max_abs = 0;
  bool pseudo = true;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (xs[i + 1] <= xs[i]) throw ConfigError(name, "knots must be strictly increasing");
    Rat s = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    max_abs = max_rat(max_abs, Rat(abs(s)));
    if (s > 1) pseudo = false;
  }
  if (!pseudo) throw ConfigError(name, "a slope exceeds 1, so the map is not a pseudocontraction");
  MapInstance T;
  T.name = name;
  T.domain = FeasibleSet::box({xs.front()}, {xs.back()});
  Rat extent = max_rat(max_rat(Rat(abs(xs.front())), Rat(abs(xs.back()))), xs.back() - xs.front());
  T.suggested_b = max_nat(Nat(1), ceil_rat(extent));
  if (max_abs <= 1) {
    T.cls = MapClass::nonexpansive;
    T.lipschitz = Rat(1);
    T.theta = identity_modulus("identity-theta");
  } else {
    T.cls = MapClass::pseudocontraction;
    T.lipschitz = max_abs;
    T.theta = linear_modulus(1 / max_abs, "lipschitz-theta");
  }
  T.pwl = PiecewiseLinear{std::move(xs), std::move(ys)};
  T.fn = [f = *T.pwl](const Point& y) { return Point{f.eval(y[0])}; };
  return T;
}

MapInstance h_map(const Space& space, const MapInstance& T, const SolverOptions& opts) {
  if (T.cls == MapClass::nonexpansive) return T;
  if (T.affine) {
    const auto& A = T.affine->A;
    std::size_t n = A.size();
    Matrix M(n, std::vector<Rat>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) M[i][j] = (i == j ? Rat(2) : Rat(0)) - A[i][j];
    Matrix inv = inverse(M);
    Point c(n, Rat(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c[i] += inv[i][j] * T.affine->c[j];
    return make_affine_map("h(" + T.name + ")", inv, c, T.domain, T.suggested_b);
  }
  if (T.pwl) {
    std::vector<Rat> xs, ys;
    for (std::size_t i = 0; i < T.pwl->xs.size(); ++i) {
      xs.push_back(2 * T.pwl->xs[i] - T.pwl->ys[i]);
      ys.push_back(T.pwl->xs[i]);
    }
    MapInstance h = make_piecewise_map("h(" + T.name + ")", xs, ys);
    h.domain = T.domain;
    h.suggested_b = T.suggested_b;
    return h;
  }
  MapInstance h;
  h.name = "h(" + T.name + ")";
  h.cls = MapClass::nonexpansive;
  h.theta = identity_modulus("identity-theta");
  h.lipschitz = Rat(1);
  h.domain = T.domain;
  h.suggested_b = T.suggested_b;
  h.fn = [space, T, opts](const Point& y) { return g_map(space, T, y, opts); };
  return h;
}

namespace {

Rat param_rat(const nlohmann::json& params, const std::string& key, const std::string& path, std::optional<Rat> dflt) {
  if (!params.contains(key)) {
    if (dflt) return *dflt;
    throw ConfigError(path + "." + key, "missing parameter");
  }
  return rat_from_json(params.at(key), path + "." + key);
}

}  // namespace

MapInstance map_library(const std::string& name, const nlohmann::json& params) {
  const std::string path = "map.params";
  if (name == "affine-1d") {
    Rat slope = param_rat(params, "slope", path, std::nullopt);
    Rat intercept = param_rat(params, "intercept", path, std::nullopt);
    Rat lo = param_rat(params, "lo", path, Rat(0));
    Rat hi = param_rat(params, "hi", path, Rat(1));
    if (hi <= lo) throw ConfigError(path, "empty interval");
    Rat extent = max_rat(max_rat(Rat(abs(lo)), Rat(abs(hi))), hi - lo);
    std::string label = "affine-1d(" + to_string(slope) + "," + to_string(intercept) + ")";
    return make_affine_map(label, Matrix{{slope}}, Point{intercept}, FeasibleSet::box({lo}, {hi}),
                           max_nat(Nat(1), ceil_rat(extent)));
  }
  if (name == "rational-rotation") {
    Rat c = param_rat(params, "c", path, Rat(3, 5));
    Rat s = param_rat(params, "s", path, Rat(4, 5));
    if (c * c + s * s != 1) throw ConfigError(path, "c^2 + s^2 must equal 1");
    Rat radius = param_rat(params, "radius", path, Rat(1));
    return make_affine_map("rational-rotation(" + to_string(c) + "," + to_string(s) + ")", Matrix{{c, -s}, {s, c}},
                           Point{0, 0}, FeasibleSet::ball({0, 0}, radius), max_nat(Nat(1), ceil_rat(2 * radius)));
  }
  if (name == "coordinate-projection") {
    std::size_t dim = params.value("dim", 2);
    std::vector<std::size_t> keep = params.value("keep", std::vector<std::size_t>{0});
    Matrix A(dim, std::vector<Rat>(dim, Rat(0)));
    for (auto k : keep) {
      if (k >= dim) throw ConfigError(path + ".keep", "coordinate index out of range");
      A[k][k] = 1;
    }
    Point zero(dim, Rat(0)), one(dim, Rat(1));
    Nat b = 1;
    while (Rat(b * b) < Rat(static_cast<long>(dim))) b += 1;
    return make_affine_map("coordinate-projection", A, zero, FeasibleSet::box(zero, one), b);
  }
  if (name == "convex-combination") {
    Rat w = param_rat(params, "weight", path, Rat(1, 2));
    if (w < 0 || w > 1) throw ConfigError(path + ".weight", "weight must lie in [0,1]");
    if (!params.contains("first") || !params.contains("second"))
      throw ConfigError(path, "convex-combination needs 'first' and 'second'");
    auto sub_map = [&](const char* key) {
      const auto& spec = params.at(key);
      return map_library(spec.value("name", ""), spec.value("params", nlohmann::json::object()));
    };
    MapInstance T1 = sub_map("first"), T2 = sub_map("second");
    std::string label = "convex(" + to_string(w) + "," + T1.name + "," + T2.name + ")";
    if (T1.affine && T2.affine) {
      Matrix A = T1.affine->A;
      if (A.size() != T2.affine->A.size()) throw ConfigError(path, "component dimensions differ");
      for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A.size(); ++j) A[i][j] = w * A[i][j] + (1 - w) * T2.affine->A[i][j];
      Point c = add(scale(w, T1.affine->c), scale(1 - w, T2.affine->c));
      return make_affine_map(label, A, c, T1.domain, T1.suggested_b);
    }
    MapInstance T;
    T.name = label;
    T.domain = T1.domain;
    T.suggested_b = T1.suggested_b;
    bool ne = T1.cls == MapClass::nonexpansive && T2.cls == MapClass::nonexpansive;
    T.cls = ne ? MapClass::nonexpansive : MapClass::pseudocontraction;
    Rat L = w * T1.lipschitz.value_or(Rat(1)) + (1 - w) * T2.lipschitz.value_or(Rat(1));
    T.lipschitz = ne ? Rat(1) : L;
    T.theta = ne ? identity_modulus("identity-theta") : linear_modulus(1 / L, "lipschitz-theta");
    T.fn = [w, T1, T2](const Point& y) { return add(scale(w, T1(y)), scale(1 - w, T2(y))); };
    if (T1.pwl && T2.pwl && T1.pwl->xs == T2.pwl->xs) {
      std::vector<Rat> ys;
      for (std::size_t i = 0; i < T1.pwl->xs.size(); ++i) ys.push_back(w * T1.pwl->ys[i] + (1 - w) * T2.pwl->ys[i]);
      MapInstance P = make_piecewise_map(label, T1.pwl->xs, ys);
      P.domain = T.domain;
      return P;
    }
    return T;
  }
  if (name == "piecewise-linear-1d") {
    if (!params.contains("knots") || !params.at("knots").is_array())
      throw ConfigError(path + ".knots", "expected an array of [x, y] pairs");
    std::vector<Rat> xs, ys;
    const auto& knots = params.at("knots");
    for (std::size_t i = 0; i < knots.size(); ++i) {
      std::string key = path + ".knots[" + std::to_string(i) + "]";
      if (!knots[i].is_array() || knots[i].size() != 2) throw ConfigError(key, "expected [x, y]");
      xs.push_back(rat_from_json(knots[i][0], key));
      ys.push_back(rat_from_json(knots[i][1], key));
    }
    return make_piecewise_map("piecewise-linear-1d", xs, ys);
  }
  throw ConfigError("map.name", "unknown map '" + name + "'");
}

Space default_space(const MapInstance& T) {
  std::size_t dim = T.domain.kind == FeasibleSet::Kind::box ? T.domain.lo.size() : T.domain.center.size();
  return Space(dim, Rat(2), T.suggested_b, T.domain);
}

SampleReport check_duality_lemma(const Space& space, std::size_t samples, std::uint64_t seed) {
  SampleReport rep;
  rep.property = "|x+y|^2 <= |x|^2 + 2<y, j(x+y)>";
  std::mt19937_64 rng(seed);
  Rat b(space.b());
  for (std::size_t s = 0; s < samples; ++s) {
    Point x = space.sample(rng, b), y = space.sample(rng, b);
    Point xy = add(x, y);
    bool ok;
    if (space.hilbert()) {
      ok = euclid_sq(xy) <= euclid_sq(x) + 2 * dot(y, space.duality_map_exact(xy));
    } else {
      ok = space.norm_sq(xy) <= space.norm_sq(x) + 2 * space.pairing(y, space.duality_map(xy)) + space.slack();
    }
    ++rep.checked;
    if (!ok) {
      ++rep.violations;
      if (rep.examples.size() < 5) rep.examples.push_back(point_key(x) + " " + point_key(y));
    }
  }
  return rep;
}

SampleReport check_duality_identities(const Space& space, std::size_t samples, std::uint64_t seed) {
  SampleReport rep;
  rep.property = "<x, j(x)> = |x|^2 and |j(x)|_* = |x|";
  std::mt19937_64 rng(seed);
  Rat b(space.b());
  Real tol = space.hilbert() ? Real(0) : Real("1e-40");
  for (std::size_t s = 0; s < samples; ++s) {
    Point x = space.sample(rng, b);
    bool ok;
    if (space.hilbert()) {
      Point j = space.duality_map_exact(x);
      ok = dot(x, j) == euclid_sq(x);
    } else {
      DualPoint j = space.duality_map(x);
      Real n = space.norm(x);
      ok = boost::multiprecision::abs(space.pairing(x, j) - n * n) <= tol &&
           boost::multiprecision::abs(space.dual_norm(j) - n) <= tol;
    }
    ++rep.checked;
    if (!ok) {
      ++rep.violations;
      if (rep.examples.size() < 5) rep.examples.push_back(point_key(x));
    }
  }
  return rep;
}

SampleReport check_map_class(const Space& space, const MapInstance& T, std::size_t samples, std::uint64_t seed) {
  SampleReport rep;
  rep.property = T.cls == MapClass::nonexpansive ? "|Tx-Ty| <= |x-y|" : "<Tx-Ty, j(x-y)> <= |x-y|^2";
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    Point x = space.sample_in_set(rng), y = space.sample_in_set(rng);
    Point d = sub(x, y), e = sub(T(x), T(y));
    bool ok;
    if (space.hilbert()) {
      ok = T.cls == MapClass::nonexpansive ? euclid_sq(e) <= euclid_sq(d) : dot(e, d) <= euclid_sq(d);
    } else if (T.cls == MapClass::nonexpansive) {
      ok = space.norm(e) <= space.norm(d) + space.slack();
    } else {
      ok = space.pairing(e, space.duality_map(d)) <= space.norm_sq(d) + space.slack();
    }
    ++rep.checked;
    if (!ok) {
      ++rep.violations;
      if (rep.examples.size() < 5) rep.examples.push_back(point_key(x) + " " + point_key(y));
    }
  }
  return rep;
}

}  // namespace metastab
