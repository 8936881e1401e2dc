#include "metastab/theta.hpp"

#include <array>
#include <atomic>
#include <map>
#include <tuple>
#include <utility>

namespace metastab {

ThetaConstants theta_constants(const BoundParams& params, const Rat& eps, Fuel* fuel) {
  check_epsilon(eps);
  if (!params.alpha) throw DomainError("alpha is required");
  if (!params.g && !params.gM) throw DomainError("the counterfunction g is required");
  ConstantsBundle C = constants(params, fuel);
  ThetaConstants t;
  t.b = params.b;
  t.u = C.u(eps);
  t.nu2 = C.nu2(eps);
  auto nu1 = C.nu1_star;
  t.nu1_star = [nu1, eps](const Nat& m, const Nat& n) -> Rat { return nu1(m, n, eps); };
  t.alphaM = C.alphaM;
  return t;
}

namespace {

std::atomic<std::uint64_t> fn_counter{0};

// max(F(c), F(y)), or max(A(y), B(y)) when c is absent.
class MaxFn final : public NatFn {
 public:
  MaxFn(NatFnPtr a, NatFnPtr b, std::optional<Nat> c)
      : NatFn("mx" + std::to_string(fn_counter.fetch_add(1))), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {}
  Nat apply(const Nat& y) const override { return max_nat(a_->apply(c_ ? *c_ : y), b_->apply(y)); }

 private:
  NatFnPtr a_, b_;
  std::optional<Nat> c_;
};

NatFnPtr max_fn(NatFnPtr a, NatFnPtr b) { return std::make_shared<MaxFn>(std::move(a), std::move(b), std::nullopt); }

}  // namespace

NTStar nt_star(const Nat& b, const UStar& U, const MStar& M, const Nat& k, Fuel* fuel) {
  if (!U.F || !M.G) throw DomainError("U* and M* need their level functions");
  const Nat S = b * b * (k + 1);
  NTStar out;
  if (S == 0) {
    out.N = zero_fn();
  } else if (!U.anchor || S == 1) {
    out.N = U.F;
  } else {
    out.N = std::make_shared<MaxFn>(U.F, U.F, *U.anchor);
  }
  Nat j = 0;
  for (Nat n = 0; n < S; ++n) {
    spend(fuel);
    Nat next = max_nat(M.floor, M.G->apply(j));
    if (next == j) break;
    j = std::move(next);
  }
  out.T = j;
  return out;
}

NTStar nt_star_literal(const Nat& b, const StarU& U, const StarU& M, const Nat& k, Fuel* fuel) {
  const Nat S = b * b * (k + 1);
  if (fuel) fuel->require(S + 1, "literal W* recursion");
  const std::uint64_t s = to_u64(S);
  std::vector<NatFnPtr> W{zero_fn()};
  for (std::uint64_t n = 0; n < s; ++n) {
    NatFnPtr prev = W.back();
    Nat stage(std::to_string(n));
    auto memo = std::make_shared<std::map<Nat, Nat>>();
    W.push_back(make_fn("W*lit" + std::to_string(n + 1) + "(" + prev->key() + ")",
                        [U, prev, stage, memo, fuel](const Nat& y) {
                          if (auto it = memo->find(y); it != memo->end()) return it->second;
                          spend(fuel);
                          Nat v = U(prev, y, stage);
                          return memo->emplace(y, std::move(v)).first->second;
                        }));
  }
  Nat j = 0;
  for (std::uint64_t n = 0; n < s; ++n) {
    spend(fuel);
    j = M(W.back(), j, S);
  }
  return NTStar{W.back(), j};
}

std::string SK::key() const { return w.lv.M->key() + "/" + w.lv.U->key() + "/" + k.get_str(); }

SVal max_sval(const SVal& a, const SVal& b) {
  return SVal{max_nat(a.r, b.r), max_nat(a.z, b.z), max_fn(a.Lt, b.Lt), max_nat(a.mt, b.mt),
              max_nat(a.u, b.u),  max_nat(a.f, b.f)};
}

namespace {

class LambdaSOmega final : public SOmega {
 public:
  LambdaSOmega(std::function<SVal(const SLevels&, const Nat&)> f, std::optional<Nat> cu)
      : f_(std::move(f)), cu_(std::move(cu)) {}
  SVal apply(const SLevels& w, const Nat& m) const override { return f_(w, m); }
  std::optional<Nat> constant_u() const override { return cu_; }

 private:
  std::function<SVal(const SLevels&, const Nat&)> f_;
  std::optional<Nat> cu_;
};

std::atomic<std::uint64_t> context_counter{0};

}  // namespace

SOmegaPtr make_somega(std::function<SVal(const SLevels&, const Nat&)> f, std::optional<Nat> constant_u) {
  return std::make_shared<LambdaSOmega>(std::move(f), std::move(constant_u));
}

// Level table (M*, U*)(Omega*, x) of one Omega*.
class StarContext {
 public:
  StarContext(SOmegaPtr omega, Fuel* fuel)
      : omega_(std::move(omega)), fuel_(fuel), id_(context_counter.fetch_add(1)) {}

  const SLevels& levels(std::uint64_t x);
  // Omega*(levels(x), m), memoized.
  const SVal& eval(std::uint64_t x, const Nat& m);
  Nat value(std::uint64_t x, bool is_m, const Nat& m);

 private:
  SOmegaPtr omega_;
  Fuel* fuel_;
  std::uint64_t id_;
  std::map<std::uint64_t, SLevels> levels_;
  std::map<std::pair<std::uint64_t, Nat>, SVal> memo_;
};

namespace {

class LevelFn final : public NatFn {
 public:
  LevelFn(StarContext* ctx, std::uint64_t id, std::uint64_t x, bool is_m)
      : NatFn("L" + std::to_string(id) + "." + std::to_string(x) + (is_m ? "M" : "U")), ctx_(ctx), x_(x),
        is_m_(is_m) {}
  Nat apply(const Nat& m) const override { return ctx_->value(x_, is_m_, m); }

 private:
  StarContext* ctx_;
  std::uint64_t x_;
  bool is_m_;
};

}  // namespace

const SLevels& StarContext::levels(std::uint64_t x) {
  if (auto it = levels_.find(x); it != levels_.end()) return it->second;
  SLevels lv{std::make_shared<LevelFn>(this, id_, x, true), std::make_shared<LevelFn>(this, id_, x, false)};
  return levels_.emplace(x, std::move(lv)).first->second;
}

const SVal& StarContext::eval(std::uint64_t x, const Nat& m) {
  auto key = std::make_pair(x, m);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  spend(fuel_);
  SVal v = omega_->apply(levels(x), m);
  return memo_.emplace(std::move(key), std::move(v)).first->second;
}

Nat StarContext::value(std::uint64_t x, bool is_m, const Nat& m) {
  if (x == 0) return 0;
  if (is_m) {
    if (auto cu = omega_->constant_u()) return *cu;
  }
  const SVal& v = eval(x - 1, m);
  return is_m ? v.u : v.f;
}

StarArena::StarArena(Nat b, Fuel* fuel) : b_(std::move(b)), fuel_(fuel) {
  if (b_ < 1) throw DomainError("b must be a positive integer");
}

StarArena::~StarArena() = default;

StarContext* StarArena::open(SOmegaPtr omega) {
  contexts_.push_back(std::make_unique<StarContext>(std::move(omega), fuel_));
  return contexts_.back().get();
}

SK psi_star(StarArena& arena, const Nat& l, const SOmegaPtr& omega) {
  const Nat& b = arena.b();
  Fuel* fuel = arena.fuel();
  const Nat I = 2 * b * b * (l + 1);
  StageGuard guard(fuel, "Psi*(l=" + (mpz_sizeinbase(l.get_mpz_t(), 10) > 30
                                          ? "~10^" + std::to_string(mpz_sizeinbase(l.get_mpz_t(), 10) - 1)
                                          : l.get_str()) + ")");
  if (fuel) fuel->require(I + 1, "level recursion of depth I*+1");
  const std::uint64_t depth = to_u64(I);
  StarContext* ctx = arena.open(omega);

  const SLevels top = ctx->levels(depth + 1);
  NTStar nt0 = nt_star(b, UStar{std::nullopt, top.U}, MStar{0, top.M}, 4 * l + 3, fuel);
  const SLevels lv = ctx->levels(depth);
  const Nat p0 = 4 * b * b * (l + 1);
  SK cur{SStage{lv, p0, b, nt0.N}, nt0.T};
  for (std::uint64_t x = 0; x < depth; ++x) {
    SVal v = ctx->eval(depth, cur.k);
    SK next{SStage{lv, max_nat(p0, v.r), max_nat(b, v.z), max_fn(nt0.N, v.Lt)}, max_nat(nt0.T, v.mt)};
    bool stationary = next.k == cur.k;
    cur = std::move(next);
    if (stationary) break;
  }
  return cur;
}

namespace {

using Id = std::tuple<const NatFn*, const NatFn*, Nat>;

Id id(const SK& a) { return Id{a.w.lv.M.get(), a.w.lv.U.get(), a.k}; }

template <class V, class K>
struct Memo {
  std::map<K, V> values;
  template <class F>
  V get(const K& key, F&& make) {
    if (auto it = values.find(key); it != values.end()) return it->second;
    V v = make();
    return values.emplace(key, std::move(v)).first->second;
  }
};

SK rank_only(const SLevels& lv, const Nat& m) { return SK{SStage{lv, 0, 0, zero_fn()}, m}; }

SK shifted(const SK& c, const Nat& by) { return SK{c.w, c.k + by}; }

SVal plus_f(SVal v, const Nat& extra) {
  v.f += extra;
  return v;
}

class ThetaMachine {
 public:
  ThetaMachine(const ThetaConstants& c, Fuel* fuel) : c_(c), arena_(c.b, fuel), fuel_(fuel) {
    if (c_.u <= 0 || c_.nu2 <= 0) throw DomainError("u and nu2 must be positive");
    if (!c_.nu1_star || !c_.alphaM) throw DomainError("nu1* and alpha^M are required");
    l_u_ = ceil_rat(1 / c_.u);
  }

  ThetaResult run() {
    StageGuard guard(fuel_, "Theta");
    SK w = psi_star(arena_, l_u_, omega1([this](const SK& q) { return gw(q); }));
    SK wp = awp(w);
    ThetaResult r;
    r.k = w.k;
    r.kp = wp.k;
    r.f0 = g0(wp).f;
    r.theta = wp.k + r.f0;
    r.applications = fuel_ ? fuel_->used() : 0;
    return r;
  }

 private:
  template <class F>
  SOmegaPtr omega1(F f) {
    return make_somega([f](const SLevels& lv, const Nat& m) { return f(rank_only(lv, m)); }, Nat(0));
  }

  Nat bsq() const { return c_.b * c_.b; }

  SVal limsup_val(const Nat& K, const UStar& U, const MStar& M, const Nat& m) {
    NTStar nt = nt_star(c_.b, U, M, K, fuel_);
    return SVal{bsq() * (K + 1), c_.b, nt.N, nt.T, 0, nt.N->apply(m)};
  }

  SVal g0(const SK& a) {
    return g0_.get(id(a), [&] {
      return limsup_val(ceil_rat(4 / c_.u), UStar{a.k, a.w.lv.U}, MStar{a.k, a.w.lv.M}, a.k);
    });
  }

  Nat kt(const SK& a) { return a.k + g0(a).f; }

  Rat nu1(const SK& a, const SK& b) {
    return nu1_.get(std::array<Id, 2>{id(a), id(b)}, [&] {
      Rat v = c_.nu1_star(kt(a), kt(b));
      if (v <= 0) throw ContractViolation("nu1* must be positive");
      return v;
    });
  }

  Rat uprime(const SK& a, const SK& b) { return min_rat(nu1(a, b) / 2, c_.nu2); }

  Nat iota(const SK& a, const SK& b) { return iota_value(c_.b, nu1(a, b), c_.alphaM); }

  SVal g1(const SK& a, const SK& b, const SK& c) {
    return g1_.get(std::array<Id, 3>{id(a), id(b), id(c)}, [&] {
      return limsup_val(ceil_rat(4 / uprime(a, b)), UStar{c.k, c.w.lv.U}, MStar{c.k, c.w.lv.M}, c.k);
    });
  }

  SVal g2(const SK& a, const SK& b, const SK& c) {
    return g2_.get(std::array<Id, 3>{id(a), id(b), id(c)}, [&] {
      UStar U{a.k, max_fn(a.w.lv.U, c.w.lv.U)};
      MStar M{a.k, max_fn(a.w.lv.M, c.w.lv.M)};
      return limsup_val(ceil_rat(4 / min_rat(c_.u, uprime(a, b))), U, M, c.k);
    });
  }

  SVal gt1(const SK& a, const SK& b, const SK& c) {
    Nat i = iota(a, b);
    return plus_f(g1(a, b, shifted(c, i)), i);
  }
  SVal gt2(const SK& a, const SK& b, const SK& c) { return plus_f(g2(a, b, shifted(c, a.k)), a.k); }
  SVal gt3(const SK& a, const SK& b, const SK& c) { return plus_f(g2(a, b, shifted(c, a.k)), c.k); }
  SVal gtp2(const SK& a, const SK& b, const SK& c) { return plus_f(g2(a, b, shifted(c, b.k)), b.k); }
  SVal gtp3(const SK& a, const SK& b, const SK& c) { return plus_f(g2(a, b, shifted(c, b.k)), c.k); }

  SK av(const SK& a, const SK& b) {
    return av_.get(std::array<Id, 2>{id(a), id(b)}, [&] {
      return psi_star(arena_, ceil_rat(1 / uprime(a, b)),
                      omega1([this, a, b](const SK& s) { return max_sval(gt1(a, b, s), gt2(a, b, s)); }));
    });
  }

  SK avp(const SK& a, const SK& b) {
    return avp_.get(std::array<Id, 2>{id(a), id(b)}, [&] {
      return psi_star(arena_, ceil_rat(1 / uprime(a, b)),
                      omega1([this, a, b](const SK& s) { return max_sval(gt1(a, b, s), gtp2(a, b, s)); }));
    });
  }

  SVal gwp(const SK& a, const SK& b) { return max_sval(g0(b), gtp3(a, b, avp(a, b))); }

  SK awp(const SK& a) {
    return awp_.get(id(a), [&] { return psi_star(arena_, l_u_, omega1([this, a](const SK& s) { return gwp(a, s); })); });
  }

  SVal gw(const SK& a) {
    SK b = awp(a);
    return max_sval(g0(a), gt3(a, b, av(a, b)));
  }

  ThetaConstants c_;
  StarArena arena_;
  Fuel* fuel_;
  Nat l_u_;
  Memo<SVal, Id> g0_;
  Memo<SVal, std::array<Id, 3>> g1_, g2_;
  Memo<Rat, std::array<Id, 2>> nu1_;
  Memo<SK, std::array<Id, 2>> av_, avp_;
  Memo<SK, Id> awp_;
};

}  // namespace

ThetaResult theta_prime(const ThetaConstants& c, Fuel* fuel) {
  return with_large_stack([&] {
    ThetaMachine m(c, fuel);
    return m.run();
  });
}

ThetaResult theta_bound(const BoundParams& params, Fuel* fuel) {
  check_epsilon(params.epsilon);
  return theta_prime(theta_constants(params, params.epsilon / 2, fuel), fuel);
}

}  // namespace metastab
