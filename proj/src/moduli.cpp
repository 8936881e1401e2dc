#include "metastab/moduli.hpp"

#include <array>

namespace metastab {

Rat psi(const Nat& b, const Modulus& eta, const Rat& eps) {
  if (eps <= 0 || eps > 2) throw DomainError("psi needs eps in (0,2], got " + to_string(eps));
  if (b < 1) throw DomainError("psi needs b >= 1");
  Rat bq(b);
  Rat e = eta(eps / (2 * bq));
  Rat e2 = e * e;
  Rat inner = min_rat(eps / 2, eps * eps / (72 * bq) * e2);
  return min_rat(inner * inner / 4, eps * eps / 48 * e2);
}

Rat omega(const Nat& b, const Modulus& tau, const Rat& eps) {
  if (eps <= 0) throw DomainError("omega needs eps > 0");
  Rat r1 = min_rat(eps, Rat(2));
  Rat r2 = max_rat(Rat(b), Rat(1));
  return r1 * r1 / (12 * r2) * tau(r1 / (2 * r2));
}

Rat theta_tilde(const Modulus& theta, const Rat& eps) {
  if (eps <= 0) throw DomainError("theta_tilde needs eps > 0");
  return min_rat(eps / 4, theta(eps / 2));
}

Modulus psi_modulus(const Nat& b, const Modulus& eta) {
  return Modulus("psi[" + eta.name() + "]", [b, eta](const Rat& e) { return psi(b, eta, e); }, Rat(2));
}

Modulus omega_modulus(const Nat& b, const Modulus& tau) {
  return Modulus("omega[" + tau.name() + "]", [b, tau](const Rat& e) { return omega(b, tau, e); });
}

Modulus theta_tilde_modulus(const Modulus& theta) {
  return Modulus("theta~[" + theta.name() + "]", [theta](const Rat& e) { return theta_tilde(theta, e); });
}

namespace {

void record(SampleReport& rep, bool ok, const std::string& example) {
  ++rep.checked;
  if (!ok) {
    ++rep.violations;
    if (rep.examples.size() < 5) rep.examples.push_back(example);
  }
}

// Rational lower bound on |d|, exact-squared on the Hilbert path.
Rat distance_lower(const Space& space, const Point& d) {
  if (space.hilbert()) return sqrt_lower(euclid_sq(d), 64);
  Real n = space.norm(d) - space.slack();
  if (n <= 0) return Rat(0);
  Rat q(n.convert_to<double>());
  return q * Rat(999999, 1000000);
}

Real real_norm(const Space& space, const std::vector<Real>& v) {
  Real pp = to_real(space.p());
  Real s = 0;
  for (const auto& c : v) s += boost::multiprecision::pow(boost::multiprecision::abs(c), pp);
  if (s == 0) return Real(0);
  return boost::multiprecision::pow(s, 1 / pp);
}

}  // namespace

SampleReport validate_convexity_modulus(const Space& space, const Modulus& eta, std::size_t samples,
                                        std::uint64_t seed) {
  SampleReport rep;
  rep.property = "|(x+y)/2| <= 1 - eta(eps)";
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    Point x, y;
    // Every fourth pair is antipodal on an axis so that large eps is exercised.
    if (s % 4 == 3) {
      x.assign(space.dim(), Rat(0));
      x[s % space.dim()] = 1;
      y = scale(Rat(-1), x);
    } else {
      x = space.sample(rng, Rat(1));
      y = space.sample(rng, Rat(1));
    }
    Point d = sub(x, y);
    Rat eps = min_rat(distance_lower(space, d), Rat(2));
    if (eps <= 0) continue;
    Rat bound = 1 - eta(eps);
    Point m = midpoint(x, y);
    bool ok;
    if (bound < 0)
      ok = false;
    else if (space.hilbert())
      ok = euclid_sq(m) <= bound * bound;
    else
      ok = space.norm(m) <= to_real(bound) + space.slack();
    record(rep, ok, point_key(x) + " " + point_key(y) + " eps=" + to_string(eps));
  }
  return rep;
}

SampleReport validate_smoothness_modulus(const Space& space, const Modulus& tau, std::size_t samples,
                                         std::uint64_t seed) {
  SampleReport rep;
  rep.property = "|x+y| + |x-y| <= 2 + eps|y|";
  std::mt19937_64 rng(seed);
  const std::array<Rat, 5> grid{Rat(1, 8), Rat(1, 4), Rat(1, 2), Rat(1), Rat(2)};
  std::uniform_int_distribution<long> frac(1, 64);
  for (std::size_t s = 0; s < samples; ++s) {
    Rat eps = grid[s % grid.size()];
    Rat radius = tau(eps);
    Point x;
    if (s % 3 == 0) {
      x.assign(space.dim(), Rat(0));
      x[s % space.dim()] = 1;
    } else {
      do x = space.sample(rng, Rat(1)); while (euclid_sq(x) == 0);
    }
    Point y;
    if (s % 3 == 0 && space.dim() > 1) {
      y.assign(space.dim(), Rat(0));
      y[(s + 1) % space.dim()] = radius * Rat(frac(rng), 64);
    } else {
      y = space.sample(rng, radius);
    }
    Real nx = space.norm(x);
    std::vector<Real> xs(x.size()), ys(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      xs[i] = to_real(x[i]) / nx;
      ys[i] = to_real(y[i]);
    }
    std::vector<Real> plus(xs.size()), minus(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      plus[i] = xs[i] + ys[i];
      minus[i] = xs[i] - ys[i];
    }
    bool ok = real_norm(space, plus) + real_norm(space, minus) <=
              2 + to_real(eps) * real_norm(space, ys) + space.slack();
    record(rep, ok, point_key(x) + " " + point_key(y) + " eps=" + to_string(eps));
  }
  return rep;
}

SampleReport check_psi_inequality(const Space& space, const Modulus& eta, std::size_t samples, std::uint64_t seed) {
  SampleReport rep;
  rep.property = "|(x+y)/2|^2 + psi(eps) <= |x|^2/2 + |y|^2/2";
  std::mt19937_64 rng(seed);
  Rat b(space.b());
  while (rep.checked < samples) {
    Point x = space.sample(rng, b), y = space.sample(rng, b);
    Point d = sub(x, y);
    Rat eps = min_rat(distance_lower(space, d), Rat(2));
    if (eps <= 0) continue;
    Rat ps = psi(space.b(), eta, eps);
    bool ok;
    if (space.hilbert())
      ok = euclid_sq(midpoint(x, y)) + ps <= (euclid_sq(x) + euclid_sq(y)) / 2;
    else
      ok = space.norm_sq(midpoint(x, y)) + to_real(ps) <= (space.norm_sq(x) + space.norm_sq(y)) / 2 + space.slack();
    record(rep, ok, point_key(x) + " " + point_key(y));
  }
  return rep;
}

SampleReport check_omega_contract(const Space& space, const Modulus& tau, std::size_t samples, std::uint64_t seed) {
  SampleReport rep;
  rep.property = "|x-y| <= omega(b,eps) implies |j(x)-j(y)| <= eps";
  std::mt19937_64 rng(seed);
  Rat b(space.b());
  const std::array<Rat, 5> grid{Rat(1, 4), Rat(1, 2), Rat(1), Rat(2), Rat(4)};
  std::size_t s = 0;
  while (rep.checked < samples) {
    Rat eps = grid[s++ % grid.size()];
    Rat w = omega(space.b(), tau, eps);
    Point x = space.sample(rng, b);
    Point dir;
    do dir = space.sample(rng, Rat(1)); while (euclid_sq(dir) == 0);
    Rat len = space.hilbert() ? sqrt_upper(euclid_sq(dir), 64) : Rat(space.norm(dir).convert_to<double>()) * 2;
    std::uniform_int_distribution<long> frac(1, 64);
    Point y = add(x, scale(w * Rat(frac(rng), 64) / len, dir));
    bool inside = space.hilbert() ? euclid_sq(y) <= b * b : space.norm(y) <= to_real(b);
    if (!inside) continue;
    bool ok;
    if (space.hilbert()) {
      Point dj = sub(space.duality_map_exact(x), space.duality_map_exact(y));
      ok = euclid_sq(dj) <= eps * eps;
    } else {
      DualPoint jx = space.duality_map(x), jy = space.duality_map(y);
      DualPoint dj(jx.size());
      for (std::size_t i = 0; i < jx.size(); ++i) dj[i] = jx[i] - jy[i];
      ok = space.dual_norm(dj) <= to_real(eps) + space.slack();
    }
    record(rep, ok, point_key(x) + " " + point_key(y) + " eps=" + to_string(eps));
  }
  return rep;
}

}  // namespace metastab
