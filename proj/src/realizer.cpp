#include "metastab/realizer.hpp"

#include <atomic>
#include <sstream>

namespace metastab {

namespace {

class LambdaStageFn final : public StageFn {
 public:
  using F = std::function<Nat(const Nat&, const Point&, const NatFnPtr&, const Nat&)>;
  LambdaStageFn(std::string key, F f) : StageFn(std::move(key)), f_(std::move(f)) {}
  Nat apply(const Nat& p, const Point& y, const NatFnPtr& L, const Nat& m) const override { return f_(p, y, L, m); }

 private:
  F f_;
};

class LambdaOmega final : public Omega {
 public:
  LambdaOmega(std::function<OmegaValue(const Stage&, const Nat&)> f, std::optional<Nat> u)
      : f_(std::move(f)), u_(std::move(u)) {}
  OmegaValue apply(const Stage& w, const Nat& m) const override { return f_(w, m); }
  std::optional<Nat> constant_u() const override { return u_; }

 private:
  std::function<OmegaValue(const Stage&, const Nat&)> f_;
  std::optional<Nat> u_;
};

std::string short_nat(const Nat& n) {
  std::size_t digits = mpz_sizeinbase(n.get_mpz_t(), 10);
  return digits > 30 ? "~10^" + std::to_string(digits - 1) : n.get_str();
}

}  // namespace

StageFnPtr zero_stage_fn() {
  static const StageFnPtr zero =
      std::make_shared<LambdaStageFn>("O", [](const Nat&, const Point&, const NatFnPtr&, const Nat&) { return Nat(0); });
  return zero;
}

StageFnPtr make_stage_fn(const std::string& structural_key,
                         std::function<Nat(const Nat&, const Point&, const NatFnPtr&, const Nat&)> f) {
  return std::make_shared<LambdaStageFn>(intern_key(structural_key), std::move(f));
}

std::string Stage::key() const {
  return intern_key("st(" + Ut->key() + "," + Nt->key() + "," + p.get_str() + "," + point_key(y) + "," + L->key() + ")");
}

std::string StageK::key() const { return intern_key(w.key() + "/" + k.get_str()); }

OmegaPtr make_omega(std::function<OmegaValue(const Stage&, const Nat&)> f, std::optional<Nat> constant_u) {
  return std::make_shared<LambdaOmega>(std::move(f), std::move(constant_u));
}

// Level functions M(Omega, x), U(Omega, x) of one Psi invocation.
class PsiContext {
 public:
  PsiContext(Session* s, OmegaPtr omega, std::uint64_t id) : s_(s), omega_(std::move(omega)), id_(id) {}

  StageFnPtr level(const Nat& x, bool is_m) {
    auto key = std::make_pair(x, is_m);
    if (auto it = levels_.find(key); it != levels_.end()) return it->second;
    StageFnPtr fn;
    if (x == 0) {
      fn = zero_stage_fn();
    } else {
      std::string name = std::string(is_m ? "M" : "U") + std::to_string(id_) + "@" + x.get_str();
      Nat below = x - 1;
      fn = std::make_shared<LambdaStageFn>(name, [this, below, is_m](const Nat& p, const Point& y, const NatFnPtr& L,
                                                                  const Nat& m) {
        if (is_m) {
          if (auto u = omega_->constant_u()) return *u;
          return value(below, p, y, L, m).g.u;
        }
        return value(below, p, y, L, m).f;
      });
    }
    levels_.emplace(key, fn);
    return fn;
  }

  // Omega applied to (M(Omega,x), U(Omega,x), p, y, L, m).
  const OmegaValue& value(const Nat& x, const Nat& p, const Point& y, const NatFnPtr& L, const Nat& m) {
    std::string key = x.get_str() + "|" + p.get_str() + "|" + point_key(y) + "|" + L->key() + "|" + m.get_str();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    spend(s_->fuel());
    Stage st{level(x, true), level(x, false), p, y, L};
    OmegaValue v = omega_->apply(st, m);
    return memo_.emplace(std::move(key), std::move(v)).first->second;
  }

  const OmegaPtr& omega() const { return omega_; }

 private:
  Session* s_;
  OmegaPtr omega_;
  std::uint64_t id_;
  std::map<std::pair<Nat, bool>, StageFnPtr> levels_;
  std::map<std::string, OmegaValue> memo_;
};

Session::Session(Space space, Fuel* fuel) : space_(std::move(space)), fuel_(fuel) {
  if (!space_.hilbert()) throw DomainError("realizer mode needs the exact p = 2 path; use bound-only mode");
}

Session::~Session() = default;

SequenceOracle Session::distance_oracle(const PointSeqPtr& seq, const Point& z) {
  std::string key = seq->key() + "|" + point_key(z);
  if (auto it = oracles_.find(key); it != oracles_.end()) return it->second;
  Rat bound(b() * b());
  SequenceOracle o(intern_key("d(" + key + ")"),
                   [this, seq, z](const Nat& n) { return space_.norm_sq_exact(sub(seq->at(n), z)); }, bound);
  oracles_.emplace(key, o);
  return o;
}

Rat Session::dist_sq(const PointSeqPtr& seq, const Nat& n, const Point& z) { return distance_oracle(seq, z).at(n); }

PsiContext* Session::adopt(std::unique_ptr<PsiContext> ctx) {
  contexts_.push_back(std::move(ctx));
  return contexts_.back().get();
}

std::string AReport::summary() const {
  std::ostringstream os;
  os << (holds ? "holds" : "fails");
  for (const auto& c : clauses) os << "; " << c.name << "=" << (c.value ? "T" : "F") << " [" << c.detail << "]";
  return os.str();
}

AReport evaluate_A(Session& s, const PointSeqPtr& x, const Rat& delta, const Stage& w, const Dual& q, const Nat& t) {
  if (delta <= 0) throw DomainError("A needs delta > 0");
  AReport rep;
  const Nat k = ceil_rat(4 / delta);
  const Rat K1(k + 1);
  const Nat range_top = s.b() * s.b() * (k + 1);
  auto record = [&](std::string name, bool value, std::string detail) {
    rep.clauses.push_back(AClause{std::move(name), value, std::move(detail)});
    return value;
  };

  bool c1 = record("range_p", w.p >= 0 && w.p <= range_top,
                   "p=" + short_nat(w.p) + " <= " + short_nat(range_top));
  Nat lu = q.u + w.L->apply(q.u);
  Rat d_lower = s.dist_sq(x, lu, w.y);
  bool c2 = record("lower_y", d_lower >= Rat(w.p) / K1 - delta / 4, "|x_" + short_nat(lu) + "-y|^2=" + to_string(d_lower));
  Rat d_upper = s.dist_sq(x, t, w.y);
  bool c3 = record("upper_y", d_upper <= Rat(w.p) / K1 + delta / 4, "|x_" + short_nat(t) + "-y|^2=" + to_string(d_upper));

  bool r_range = record("range_r", q.r >= 0 && q.r <= range_top, "r=" + short_nat(q.r));
  Nat ut = w.Ut->apply(q.r, q.z, q.Lt, q.mt);
  Nat i_lower = ut + q.Lt->apply(ut);
  Rat z_lower = s.dist_sq(x, i_lower, q.z);
  bool p2 = record("lower_z", z_lower >= Rat(q.r) / K1 - delta / 4,
                   "|x_" + short_nat(i_lower) + "-z|^2=" + to_string(z_lower));
  Nat i_upper = q.mt + w.Nt->apply(q.r, q.z, q.Lt, q.mt);
  Rat z_upper = s.dist_sq(x, i_upper, q.z);
  bool p3 = record("upper_z", z_upper <= Rat(q.r) / K1 + delta / 4,
                   "|x_" + short_nat(i_upper) + "-z|^2=" + to_string(z_upper));
  bool concl = record("p_le_r", Rat(w.p) / K1 <= Rat(q.r) / K1 + delta / 2, "k=" + short_nat(k));

  rep.premise = r_range && p2 && p3;
  rep.holds = c1 && c2 && c3 && (!rep.premise || concl);
  return rep;
}

bool holds_A(Session& s, const PointSeqPtr& x, const Rat& delta, const Stage& w, const Dual& q, const Nat& t) {
  const Nat k = ceil_rat(4 / delta);
  const Rat K1(k + 1);
  const Nat top = s.b() * s.b() * (k + 1);
  const Rat pk = Rat(w.p) / K1;
  if (w.p < 0 || w.p > top) return false;
  if (s.dist_sq(x, q.u + w.L->apply(q.u), w.y) < pk - delta / 4) return false;
  if (s.dist_sq(x, t, w.y) > pk + delta / 4) return false;
  const Rat rk = Rat(q.r) / K1;
  if (pk <= rk + delta / 2) return true;
  if (q.r < 0 || q.r > top) return true;
  Nat ut = w.Ut->apply(q.r, q.z, q.Lt, q.mt);
  if (s.dist_sq(x, ut + q.Lt->apply(ut), q.z) < rk - delta / 4) return true;
  return s.dist_sq(x, q.mt + w.Nt->apply(q.r, q.z, q.Lt, q.mt), q.z) > rk + delta / 4;
}

PsiResult psi_realizer(Session& s, const PointSeqPtr& x, const Rat& delta, const OmegaPtr& omega, const Point& z1) {
  if (delta <= 0) throw DomainError("Psi needs delta > 0");
  static std::atomic<std::uint64_t> counter{0};
  const Nat b2 = s.b() * s.b();
  const Nat I = ceil_rat(Rat(2 * b2) / delta);
  const Nat k = ceil_rat(4 / delta);
  StageGuard guard(s.fuel(), "Psi(k=" + short_nat(k) + ")");
  if (s.fuel()) s.fuel()->require(b2 * (k + 1) + 2, "limsup functional inside Psi");

  PsiContext* ctx = s.adopt(std::make_unique<PsiContext>(&s, omega, counter.fetch_add(1)));
  Counterfunction Ubar = [ctx, I, z1](const NatFnPtr& L, const Nat& m, const Nat& p) {
    return ctx->value(I, p, z1, L, m).f;
  };
  Counterfunction Mbar = [ctx, I, z1](const NatFnPtr& L, const Nat& m, const Nat& p) {
    if (auto u = ctx->omega()->constant_u()) return *u;
    return ctx->value(I, p, z1, L, m).g.u;
  };
  SequenceOracle a = s.distance_oracle(x, z1);
  LimsupWitness lw = eps_limsup_witness(b2, k, a, Ubar, Mbar, s.fuel());

  StageK cur{Stage{ctx->level(I, true), ctx->level(I, false), lw.P, z1, lw.N}, lw.T};
  for (Nat i = 0; i < I; ++i) {
    spend(s.fuel());
    OmegaValue v = omega->apply(cur.w, cur.k);
    if (holds_A(s, x, delta, cur.w, v.g, cur.k + v.f)) {
      AReport check = evaluate_A(s, x, delta, cur.w, v.g, cur.k + v.f);
      if (!check.holds) throw ContractViolation("Psi: short-circuit and full evaluation of A disagree: " + check.summary());
      return PsiResult{cur, i, I, v};
    }
    Nat next = I - (i + 1);
    cur = StageK{Stage{ctx->level(next, true), ctx->level(next, false), v.g.r, v.g.z, v.g.Lt}, v.g.mt};
  }
  throw ContractViolation("Psi: no stage i < I = " + short_nat(I) + " satisfies A");
}

bool PhiResult::all_ok() const {
  if (!h_bound) return false;
  for (const auto& c : checks)
    if (!c.ok()) return false;
  return !checks.empty();
}

namespace {

// Xi(xi, xi')(g, f)(x1..x6) = (g(x1..x5, x6 + xi), xi' + f(x1..x5, x6 + xi)).
OmegaValue xi_shuffle(const G6& g, const StageK& a, const StageK& b, const StageK& c, const Nat& xi, const Nat& xip) {
  OmegaValue v = g(a, b, StageK{c.w, c.k + xi});
  v.f = xip + v.f;
  return v;
}

class PhiMachine {
 public:
  PhiMachine(Session& s, PointSeqPtr x, const PhiInputs& in) : s_(s), x_(std::move(x)), in_(in) {}

  Nat iota(const StageK& a, const StageK& b) {
    std::string key = a.key() + "&" + b.key();
    if (auto it = iota_.find(key); it != iota_.end()) return it->second;
    return iota_.emplace(key, in_.iota(a, b)).first->second;
  }

  Rat uprime(const StageK& a, const StageK& b) {
    std::string key = a.key() + "&" + b.key();
    if (auto it = uprime_.find(key); it != uprime_.end()) return it->second;
    return uprime_.emplace(key, in_.u_prime(a, b)).first->second;
  }

  PointSeqPtr phi(const Stage& w) { return in_.phi(w); }

  OmegaValue gt1(const StageK& a, const StageK& b, const StageK& c) {
    Nat i = iota(a, b);
    return xi_shuffle(in_.g1, a, b, c, i, i);
  }
  OmegaValue gt2(const StageK& a, const StageK& b, const StageK& c) { return xi_shuffle(in_.g2, a, b, c, a.k, a.k); }
  OmegaValue gt3(const StageK& a, const StageK& b, const StageK& c) { return xi_shuffle(in_.g2, a, b, c, a.k, c.k); }
  OmegaValue gt1p(const StageK& a, const StageK& b, const StageK& c) {
    Nat i = iota(a, b);
    return xi_shuffle(in_.g1p, a, b, c, i, i);
  }
  OmegaValue gt2p(const StageK& a, const StageK& b, const StageK& c) { return xi_shuffle(in_.g2p, a, b, c, b.k, b.k); }
  OmegaValue gt3p(const StageK& a, const StageK& b, const StageK& c) { return xi_shuffle(in_.g2p, a, b, c, b.k, c.k); }

  OmegaValue gv(const StageK& a, const StageK& b, const StageK& c) {
    OmegaValue v1 = gt1(a, b, c);
    if (!holds_A(s_, x_, uprime(a, b), c.w, v1.g, c.k + v1.f)) return v1;
    return gt2(a, b, c);
  }

  OmegaValue gvp(const StageK& a, const StageK& b, const StageK& c) {
    OmegaValue v1 = gt1p(a, b, c);
    if (!holds_A(s_, phi(a.w), uprime(a, b), c.w, v1.g, c.k + v1.f)) return v1;
    return gt2p(a, b, c);
  }

  OmegaValue gwp(const StageK& a, const StageK& b) {
    OmegaValue v0 = in_.g0p(a, b);
    if (!holds_A(s_, phi(a.w), in_.u, b.w, v0.g, b.k + v0.f)) return v0;
    return gt3p(a, b, av_prime(a, b));
  }

  OmegaValue gw(const StageK& a) {
    OmegaValue v0 = in_.g0(a);
    if (!holds_A(s_, x_, in_.u, a.w, v0.g, a.k + v0.f)) return v0;
    StageK b = aw_prime(a);
    return gt3(a, b, av(a, b));
  }

  StageK av(const StageK& a, const StageK& b) {
    std::string key = a.key() + "&" + b.key();
    if (auto it = av_.find(key); it != av_.end()) return it->second;
    auto om = make_omega([this, a, b](const Stage& w, const Nat& m) { return gv(a, b, StageK{w, m}); });
    StageK r = psi_realizer(s_, x_, uprime(a, b), om, in_.z1).out;
    return av_.emplace(key, r).first->second;
  }

  StageK av_prime(const StageK& a, const StageK& b) {
    std::string key = a.key() + "&" + b.key();
    if (auto it = avp_.find(key); it != avp_.end()) return it->second;
    auto om = make_omega([this, a, b](const Stage& w, const Nat& m) { return gvp(a, b, StageK{w, m}); });
    StageK r = psi_realizer(s_, phi(a.w), uprime(a, b), om, in_.z1).out;
    return avp_.emplace(key, r).first->second;
  }

  StageK aw_prime(const StageK& a) {
    std::string key = a.key();
    if (auto it = awp_.find(key); it != awp_.end()) return it->second;
    auto om = make_omega([this, a](const Stage& w, const Nat& m) { return gwp(a, StageK{w, m}); });
    StageK r = psi_realizer(s_, phi(a.w), in_.u, om, in_.z1).out;
    return awp_.emplace(key, r).first->second;
  }

  StageK top() {
    auto om = make_omega([this](const Stage& w, const Nat& m) { return gw(StageK{w, m}); });
    return psi_realizer(s_, x_, in_.u, om, in_.z1).out;
  }

 private:
  Session& s_;
  PointSeqPtr x_;
  const PhiInputs& in_;
  std::map<std::string, Nat> iota_;
  std::map<std::string, Rat> uprime_;
  std::map<std::string, StageK> av_, avp_, awp_;
};

}  // namespace

PhiResult phi_realizer(Session& s, const PointSeqPtr& x, const PhiInputs& in) {
  StageGuard guard(s.fuel(), "Phi");
  PhiMachine mach(s, x, in);
  PhiResult r;
  r.w = mach.top();
  r.wp = mach.aw_prime(r.w);
  StageK v = mach.av(r.w, r.wp);
  StageK vp = mach.av_prime(r.w, r.wp);
  r.ht = v.k;
  r.htp = vp.k;
  r.iota = mach.iota(r.w, r.wp);
  r.h = r.ht + r.iota;
  r.hp = r.htp + r.iota;
  r.l = r.w.k + r.ht;
  r.lp = r.wp.k + r.htp;
  r.v = StageK{v.w, r.h};
  r.vp = StageK{vp.w, r.hp};
  r.h_bound = r.h >= r.iota && r.hp >= r.iota;

  const Rat up = mach.uprime(r.w, r.wp);
  PointSeqPtr xw = mach.phi(r.w.w);
  const StageK& w = r.w;
  const StageK& wp = r.wp;
  auto add = [&](std::string label, const PointSeqPtr& seq, const Rat& delta, const Stage& st, const OmegaValue& val,
                 const Nat& base) {
    r.checks.push_back(ACheck{std::move(label), evaluate_A(s, seq, delta, st, val.g, base + val.f)});
  };
  OmegaValue g0 = in.g0(w);
  add("(i) A(x,u,w,g0,k+f0)", x, in.u, w.w, g0, w.k);
  OmegaValue g0p = in.g0p(w, wp);
  add("(ii) A(x^w,u,w',g0',k'+f0')", xw, in.u, wp.w, g0p, wp.k);
  OmegaValue g1 = in.g1(w, wp, StageK{v.w, r.h});
  add("(iii) A(x,u',v,g1,h+f1)", x, up, v.w, g1, r.h);
  OmegaValue g2 = in.g2(w, wp, StageK{v.w, r.l});
  add("(iv) A(x,u',v,g2,l+f2)", x, up, v.w, g2, r.l);
  add("(v) A(x,u,w,g2,l+f2)", x, in.u, w.w, g2, r.l);
  OmegaValue g1p = in.g1p(w, wp, StageK{vp.w, r.hp});
  add("(vi) A(x^w,u',v',g1',h'+f1')", xw, up, vp.w, g1p, r.hp);
  OmegaValue g2p = in.g2p(w, wp, StageK{vp.w, r.lp});
  add("(vii) A(x^w,u',v',g2',l'+f2')", xw, up, vp.w, g2p, r.lp);
  add("(viii) A(x^w,u,w',g2',l'+f2')", xw, in.u, wp.w, g2p, r.lp);
  return r;
}

}  // namespace metastab
