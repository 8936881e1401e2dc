#include "metastab/bound.hpp"

#include "metastab/moduli.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace metastab {

void check_epsilon(const Rat& eps) {
  if (eps <= 0 || eps > 2) throw DomainError("epsilon must lie in (0,2], got " + to_string(eps));
}

NatFnPtr gM(NatFnPtr g) {
  if (!g) throw DomainError("missing counterfunction g");
  return running_max(std::move(g));
}

NatMap alphaM(NatMap alpha, bool monotone) {
  if (!alpha) throw DomainError("missing alpha");
  if (monotone) return alpha;
  auto fn = running_max(make_fn("alpha", alpha));
  return [fn](const Nat& n) { return fn->apply(n); };
}

Nat iota_value(const Nat& b, const Rat& nu, const NatMap& alpha) {
  if (nu <= 0) throw DomainError("nu must be positive");
  Nat first = ceil_div_sqrt(Rat(2 * b), nu);
  Nat second = ceil_rat(Rat(8 * b * b) / nu);
  return alpha(max_nat(first, second));
}

namespace {

Rat sq(const Rat& q) { return q * q; }

struct RunningMin {
  std::mutex mu;
  std::vector<Rat> prefix;
};

}  // namespace

ConstantsBundle constants(const BoundParams& params, Fuel* fuel) {
  if (params.b < 1) throw DomainError("b must be a positive integer");
  if (!params.eta.valid() || !params.tau.valid() || !params.theta.valid())
    throw DomainError("moduli eta, tau, theta are required");
  if (!params.gamma) throw DomainError("gamma is required");

  ConstantsBundle c;
  c.b = params.b;
  const Nat b = params.b;
  const Modulus eta = params.eta, tau = params.tau, theta = params.theta;
  const NatMap gamma = params.gamma;

  c.nu4 = [b, tau](const Rat& eps) -> Rat {
    check_epsilon(eps);
    Rat a = sq(sq(eps)) / Rat(9216 * b * b);
    Rat w = omega(b, tau, sq(eps) / Rat(96 * b));
    return min_rat(min_rat(a, sq(w)), sq(eps) / 16);
  };
  auto nu4 = c.nu4;
  c.delta = [b, tau, nu4](const Rat& eps) -> Rat {
    Rat w = omega(b, tau, nu4(eps) / Rat(3 * b));
    return min_rat(w / Rat(b), rat(1, 4));
  };
  c.p_const = [nu4](const Rat& eps) -> Rat { return min_rat(nu4(eps) / 3, sq(eps) / 96); };
  auto p_const = c.p_const;
  c.nu2 = [b, eta, tau, p_const](const Rat& eps) -> Rat {
    return psi(b, eta, omega(b, tau, p_const(eps) / Rat(2 * b))) / 2;
  };
  c.beta = [b, gamma, p_const](const Nat& n, const Rat& eps) -> Rat {
    Nat gm = gamma(n);
    if (gm < 1) throw ContractViolation("gamma(" + n.get_str() + ") must be positive");
    return p_const(eps) / Rat(2 * b * gm);
  };
  auto beta = c.beta;
  c.q_const = [beta](const Nat& cc, const Nat& sd, const Rat& eps) -> Rat { return min_rat(beta(cc, eps), beta(sd, eps)); };
  auto q_const = c.q_const;
  c.nu1 = [b, eta, theta, q_const](const Nat& cc, const Nat& sd, const Rat& eps) -> Rat {
    return psi(b, eta, theta_tilde(theta, q_const(cc, sd, eps))) / 2;
  };
  auto nu2 = c.nu2;
  auto delta = c.delta;
  c.u = [nu4, delta, nu2](const Rat& eps) -> Rat { return min_rat(2 * nu4(eps) * delta(eps) / 3, nu2(eps)); };

  NatFnPtr gm = params.gM ? params.gM : (params.g ? gM(params.g) : nullptr);
  auto mins = std::make_shared<std::map<std::string, std::shared_ptr<RunningMin>>>();
  auto mins_mu = std::make_shared<std::mutex>();
  c.nu1_star = [b, eta, theta, beta, gm, fuel, mins, mins_mu](const Nat& m, const Nat& n, const Rat& eps) -> Rat {
    if (!gm) throw DomainError("nu1* needs the counterfunction g");
    Nat top = max_nat(m, n + gm->apply(n));
    std::shared_ptr<RunningMin> table;
    {
      std::lock_guard<std::mutex> lock(*mins_mu);
      auto& slot = (*mins)[to_string(eps)];
      if (!slot) slot = std::make_shared<RunningMin>();
      table = slot;
    }
    std::lock_guard<std::mutex> lock(table->mu);
    Nat have(std::to_string(table->prefix.size()));
    if (top >= have && fuel) fuel->require(top - have + 1, "min over c <= " + top.get_str() + " in nu1*");
    while (Nat(std::to_string(table->prefix.size())) <= top) {
      Nat cc(std::to_string(table->prefix.size()));
      spend(fuel);
      Rat v = psi(b, eta, theta_tilde(theta, beta(cc, eps)));
      table->prefix.push_back(table->prefix.empty() ? v : min_rat(table->prefix.back(), v));
    }
    return table->prefix[to_u64(top)] / 2;
  };
  c.alphaM = params.alpha ? alphaM(params.alpha, params.alpha_monotone) : NatMap{};
  return c;
}

}  // namespace metastab
