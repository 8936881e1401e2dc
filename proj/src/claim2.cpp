#include "metastab/claim2.hpp"

#include <map>
#include <memory>

namespace metastab {

namespace {

struct Decision {
  Nat U, M;
};

class LemmaCounter {
 public:
  LemmaCounter(Session& s, PointSeqPtr seq, Point z, Nat k, Nat m, Stage first, std::optional<Stage> second)
      : s_(s), seq_(std::move(seq)), z_(std::move(z)), k_(std::move(k)), m_(std::move(m)), first_(std::move(first)),
        second_(std::move(second)) {}

  const Decision& decide(const NatFnPtr& v1, const Nat& v2, const Nat& v3) {
    std::string key = v1->key() + "|" + v2.get_str() + "|" + v3.get_str();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const Rat K1(k_ + 1);
    const Nat top = s_.b() * s_.b() * (k_ + 1);
    const Rat lo = Rat(v3 - 1) / K1;
    const Rat hi = Rat(v3 + 1) / K1;
    const bool range = v3 >= 0 && v3 <= top;
    Nat n_at_m = v1->apply(m_);
    Decision d;
    bool c1 = range && s_.dist_sq(seq_, m_ + n_at_m, z_) >= lo && s_.dist_sq(seq_, v2 + n_at_m, z_) <= hi;
    if (!c1) {
      d = Decision{n_at_m, m_};
    } else {
      auto pick = [&](const Stage& st) {
        return Decision{st.Nt->apply(v3, z_, v1, v2), st.Ut->apply(v3, z_, v1, v2)};
      };
      if (!second_) {
        d = pick(first_);
      } else {
        Nat ut = first_.Ut->apply(v3, z_, v1, v2);
        bool c2 = range && s_.dist_sq(seq_, ut + v1->apply(ut), z_) >= lo &&
                  s_.dist_sq(seq_, v2 + first_.Nt->apply(v3, z_, v1, v2), z_) <= hi;
        d = c2 ? pick(*second_) : pick(first_);
      }
    }
    return memo_.emplace(std::move(key), std::move(d)).first->second;
  }

 private:
  Session& s_;
  PointSeqPtr seq_;
  Point z_;
  Nat k_, m_;
  Stage first_;
  std::optional<Stage> second_;
  std::map<std::string, Decision> memo_;
};

template <class V>
struct Cache {
  std::map<std::string, V> values;
  template <class F>
  const V& get(const std::string& key, F&& make) {
    if (auto it = values.find(key); it != values.end()) return it->second;
    V v = make();
    return values.emplace(key, std::move(v)).first->second;
  }
};

}  // namespace

OmegaValue lemma_instance(Session& s, const PointSeqPtr& seq, const Point& z, const Nat& k, const Nat& m,
                          const Stage& first, const Stage* second) {
  auto counter = std::make_shared<LemmaCounter>(s, seq, z, k, m, first,
                                                second ? std::optional<Stage>(*second) : std::nullopt);
  Counterfunction U = [counter](const NatFnPtr& v1, const Nat& v2, const Nat& v3) { return counter->decide(v1, v2, v3).U; };
  Counterfunction M = [counter](const NatFnPtr& v1, const Nat& v2, const Nat& v3) { return counter->decide(v1, v2, v3).M; };
  SequenceOracle a = s.distance_oracle(seq, z);
  const Nat B = s.b() * s.b();
  LimsupWitness w = eps_limsup_witness(B, k, a, U, M, s.fuel());
  LimsupCheck c = check_limsup_postconditions(B, k, a, U, M, w);
  if (!c.ok()) throw ContractViolation("limsup postconditions fail inside a g-instance");
  return OmegaValue{Dual{w.P, z, w.N, w.T, 0}, w.N->apply(m)};
}

PhiInputs claim2_instantiation(Session& s, const Claim2Data& data) {
  const ConstantsBundle& C = data.constants;
  const Rat eps = data.epsilon;
  check_epsilon(eps);
  const Rat u = C.u(eps);
  const Rat nu2 = C.nu2(eps);
  const Rat dlt = C.delta(eps);
  const Nat b = s.b();
  const Point x0 = data.anchor;
  const PointSeqPtr x = data.x;
  const NatFnPtr g = data.g;
  const MapInstance hT = data.hT;
  const ConstantsBundle consts = C;
  const NatMap alpha = data.alpha;
  Session* sp = &s;

  auto rank = [](const Rat& d) { return ceil_rat(4 / d); };
  auto toward_anchor = [x0, dlt](const Point& y) { return add(y, scale(dlt, sub(x0, y))); };

  auto phi_cache = std::make_shared<Cache<PointSeqPtr>>();
  auto phi = [sp, x, g, phi_cache](const Stage& w) {
    return phi_cache->get(point_key(w.y), [&] { return reindexed_sequence(sp->space(), x, w.y, g); });
  };

  PhiInputs in;
  in.u = u;
  in.z1 = x0;
  in.phi = phi;

  auto g0_cache = std::make_shared<Cache<OmegaValue>>();
  in.g0 = [sp, x, u, rank, toward_anchor, g0_cache](const StageK& a) {
    return g0_cache->get(a.key(), [&] {
      return lemma_instance(*sp, x, toward_anchor(a.w.y), rank(u), a.k, a.w, nullptr);
    });
  };

  auto g0p_cache = std::make_shared<Cache<OmegaValue>>();
  in.g0p = [sp, u, rank, toward_anchor, phi, g0p_cache](const StageK& a, const StageK& b) {
    return g0p_cache->get(a.key() + "&" + b.key(), [&] {
      return lemma_instance(*sp, phi(a.w), toward_anchor(b.w.y), rank(u), b.k, b.w, nullptr);
    });
  };

  auto nu1_cache = std::make_shared<Cache<Rat>>();
  auto g0 = in.g0;
  auto g0p = in.g0p;
  auto nu1 = [sp, x, g, eps, consts, g0, g0p, nu1_cache](const StageK& a, const StageK& b) {
    return nu1_cache->get(a.key() + "&" + b.key(), [&] {
      Nat kt = a.k + g0(a).f;
      Nat ktp = b.k + g0p(a, b).f;
      Nat sel = s_selector(sp->space(), a.w.y, *g, *x, ktp);
      return consts.nu1(kt, sel, eps);
    });
  };
  in.u_prime = [nu1, nu2](const StageK& a, const StageK& b) { return min_rat(nu1(a, b) / 2, nu2); };
  in.iota = [nu1, b, alpha](const StageK& a, const StageK& bb) { return iota_value(b, nu1(a, bb), alpha); };
  auto uprime = in.u_prime;

  auto g1_cache = std::make_shared<Cache<OmegaValue>>();
  in.g1 = [sp, x, hT, rank, uprime, g1_cache](const StageK& a, const StageK& b, const StageK& c) {
    return g1_cache->get(a.key() + "&" + b.key() + "&" + c.key(), [&] {
      Point z = midpoint(c.w.y, hT(c.w.y));
      return lemma_instance(*sp, x, z, rank(uprime(a, b)), c.k, c.w, nullptr);
    });
  };
  auto g1p_cache = std::make_shared<Cache<OmegaValue>>();
  in.g1p = [sp, hT, rank, uprime, phi, g1p_cache](const StageK& a, const StageK& b, const StageK& c) {
    return g1p_cache->get(a.key() + "&" + b.key() + "&" + c.key(), [&] {
      Point z = midpoint(c.w.y, hT(c.w.y));
      return lemma_instance(*sp, phi(a.w), z, rank(uprime(a, b)), c.k, c.w, nullptr);
    });
  };
  auto g2_cache = std::make_shared<Cache<OmegaValue>>();
  in.g2 = [sp, x, u, rank, uprime, g2_cache](const StageK& a, const StageK& b, const StageK& c) {
    return g2_cache->get(a.key() + "&" + b.key() + "&" + c.key(), [&] {
      Point z = midpoint(c.w.y, a.w.y);
      return lemma_instance(*sp, x, z, rank(min_rat(u, uprime(a, b))), c.k, a.w, &c.w);
    });
  };
  auto g2p_cache = std::make_shared<Cache<OmegaValue>>();
  in.g2p = [sp, u, rank, uprime, phi, g2p_cache](const StageK& a, const StageK& b, const StageK& c) {
    return g2p_cache->get(a.key() + "&" + b.key() + "&" + c.key(), [&] {
      Point z = midpoint(c.w.y, b.w.y);
      return lemma_instance(*sp, phi(a.w), z, rank(min_rat(u, uprime(a, b))), c.k, b.w, &c.w);
    });
  };
  return in;
}

RealizerReport run_realizer(const Space& space, const Claim2Data& data, Fuel* fuel) {
  return with_large_stack([&] {
    Session s(space, fuel);
    PhiInputs in = claim2_instantiation(s, data);
    RealizerReport rep;
    rep.u = in.u;
    rep.phi = phi_realizer(s, data.x, in);
    rep.u_prime = in.u_prime(rep.phi.w, rep.phi.wp);
    rep.N = rep.phi.wp.k + in.g0p(rep.phi.w, rep.phi.wp).f;
    rep.gN = data.g->apply(rep.N);
    rep.gap_sq = space.norm_sq_exact(sub(data.x->at(rep.N), data.x->at(rep.N + rep.gN)));
    rep.endpoint_ok = rep.gap_sq <= data.epsilon * data.epsilon;
    rep.applications = fuel ? fuel->used() : 0;
    return rep;
  });
}

}  // namespace metastab
