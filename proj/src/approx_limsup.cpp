#include "metastab/approx_limsup.hpp"

#include <atomic>
#include <iostream>
#include <utility>
#include <vector>

namespace metastab {

SequenceOracle::SequenceOracle(std::string key, std::function<Rat(const Nat&)> f, Rat bound)
    : state_(std::make_shared<State>()) {
  if (bound < 0) throw DomainError("sequence bound must be nonnegative");
  state_->key = std::move(key);
  state_->f = std::move(f);
  state_->bound = std::move(bound);
}

Rat SequenceOracle::at(const Nat& n) const {
  if (n < 0) throw DomainError("negative sequence index");
  {
    std::lock_guard<std::mutex> lock(state_->mu);
    auto it = state_->memo.find(n);
    if (it != state_->memo.end()) return it->second;
  }
  Rat v = state_->f(n);
  if (v < 0 || v > state_->bound)
    throw ContractViolation("sequence '" + state_->key + "' left [0," + to_string(state_->bound) + "] at n=" +
                            n.get_str() + ": " + to_string(v));
  std::lock_guard<std::mutex> lock(state_->mu);
  return state_->memo.emplace(n, std::move(v)).first->second;
}

namespace {

std::atomic<std::uint64_t> engine_counter{0};

class Engine : public std::enable_shared_from_this<Engine> {
 public:
  Engine(Nat B, Nat k, SequenceOracle a, Counterfunction U, Counterfunction M, Fuel* fuel)
      : B_(std::move(B)), k_(std::move(k)), a_(std::move(a)), U_(std::move(U)), M_(std::move(M)), fuel_(fuel),
        id_(engine_counter.fetch_add(1)) {
    S_ = B_ * (k_ + 1);
  }

  const Nat& S() const { return S_; }

  Nat W(const Nat& n, const Nat& y) {
    if (n > S_ + 1) throw ContractViolation("W stage beyond B(k+1)+1");
    if (n == 0) return 0;
    auto key = std::make_pair(n, y);
    if (auto it = wmemo_.find(key); it != wmemo_.end()) return it->second;
    spend(fuel_);
    Nat v = U_(Wfn(n - 1), y, n - 1);
    if (v < 0) throw ContractViolation("counterfunction U returned a negative value");
    return wmemo_.emplace(std::move(key), std::move(v)).first->second;
  }

  NatFnPtr Wfn(const Nat& n);

  Nat J(const Nat& n) {
    if (n > S_ + 1) throw ContractViolation("J stage beyond B(k+1)+1");
    std::uint64_t target = to_u64(n);
    if (J_.empty()) J_.push_back(0);
    while (J_.size() <= target) {
      Nat i(std::to_string(J_.size() - 1));
      Nat stage = monus(S_, i);
      spend(fuel_);
      Nat v = M_(Wfn(stage), J_.back(), stage);
      if (v < 0) throw ContractViolation("counterfunction M returned a negative value");
      J_.push_back(std::move(v));
    }
    return J_[target];
  }

  Rat a(const Nat& n) {
    spend(fuel_);
    return a_.at(n);
  }

  Fuel* fuel() const { return fuel_; }
  std::uint64_t id() const { return id_; }

 private:
  Nat B_, k_, S_;
  SequenceOracle a_;
  Counterfunction U_, M_;
  Fuel* fuel_;
  std::uint64_t id_;
  std::map<std::pair<Nat, Nat>, Nat> wmemo_;
  std::vector<Nat> J_;
};

class WStage final : public NatFn {
 public:
  WStage(std::shared_ptr<Engine> e, Nat n)
      : NatFn("W" + std::to_string(e->id()) + "@" + n.get_str()), e_(std::move(e)), n_(std::move(n)) {}
  Nat apply(const Nat& y) const override { return e_->W(n_, y); }

 private:
  std::shared_ptr<Engine> e_;
  Nat n_;
};

NatFnPtr Engine::Wfn(const Nat& n) { return std::make_shared<WStage>(shared_from_this(), n); }

}  // namespace

LimsupWitness eps_limsup_witness(const Nat& B, const Nat& k, const SequenceOracle& a, const Counterfunction& U,
                                 const Counterfunction& M, Fuel* fuel) {
  if (B < 0 || k < 0) throw DomainError("B and k must be natural numbers");
  auto e = std::make_shared<Engine>(B, k, a, U, M, fuel);
  const Nat& S = e->S();
  StageGuard guard(fuel, "limsup(B=" + B.get_str() + ",k=" + (mpz_sizeinbase(k.get_mpz_t(), 10) > 30
                                                                     ? "~10^" + std::to_string(mpz_sizeinbase(k.get_mpz_t(), 10) - 1)
                                                                     : k.get_str()) + ")");
  if (fuel) fuel->require(S + 2, "J recursion of length B(k+1)+1");
  Rat denom(k + 1);
  for (Nat p = 0; p <= S; ++p) {
    Nat j1 = e->J(S + 1 - p);
    if (e->a(j1 + e->W(p, j1)) <= Rat(p - 1) / denom) continue;
    Nat j0 = e->J(S - p);
    if (e->a(j0 + e->W(p + 1, j0)) > Rat(p) / denom) continue;
    return LimsupWitness{p, e->Wfn(p), e->J(S - p), false};
  }
  std::cerr << "metastab: limsup functional took its fallback branch (oracle contract violated?)\n";
  return LimsupWitness{0, e->Wfn(0), e->J(S), true};
}

LimsupCheck check_limsup_postconditions(const Nat& B, const Nat& k, const SequenceOracle& a, const Counterfunction& U,
                                        const Counterfunction& M, const LimsupWitness& w) {
  LimsupCheck c;
  c.range = w.P >= 0 && w.P <= B * (k + 1);
  Rat denom(k + 1);
  Nat m = M(w.N, w.T, w.P);
  c.lower_index = m + w.N->apply(m);
  c.lower_value = a.at(c.lower_index);
  c.lower = c.lower_value >= Rat(w.P - 1) / denom;
  c.upper_index = w.T + U(w.N, w.T, w.P);
  c.upper_value = a.at(c.upper_index);
  c.upper = c.upper_value <= Rat(w.P + 1) / denom;
  return c;
}

Nat combine_ranks(const Nat& j, const Nat& jp, const NatFn& m, const Nat& N) { return j + jp + m(N + j + jp); }

SequenceOracle eventually_periodic_oracle(std::vector<Rat> head, std::vector<Rat> cycle, const Rat& bound) {
  if (cycle.empty()) throw DomainError("cycle must be nonempty");
  std::string key = "periodic(";
  for (const auto& v : head) key += to_string(v) + ",";
  key += "|";
  for (const auto& v : cycle) key += to_string(v) + ",";
  key += ")";
  return SequenceOracle(intern_key(key), [head = std::move(head), cycle = std::move(cycle)](const Nat& n) -> Rat {
    const Nat h(std::to_string(head.size()));
    if (n < h) return head[to_u64(n)];
    Nat r = (n - h) % Nat(std::to_string(cycle.size()));
    return cycle[to_u64(r)];
  }, bound);
}

Rat periodic_limsup(const std::vector<Rat>& cycle) {
  if (cycle.empty()) throw DomainError("cycle must be nonempty");
  Rat m = cycle[0];
  for (const auto& v : cycle) m = max_rat(m, v);
  return m;
}

ExhaustiveCounterfunctions exhaustive_counterfunctions(const SequenceOracle& a, std::size_t head, std::size_t cycle) {
  if (cycle == 0) throw DomainError("cycle must be nonempty");
  ExhaustiveCounterfunctions c;
  const std::uint64_t span = head + cycle;
  c.U = [a, span](const NatFnPtr&, const Nat& T, const Nat&) -> Nat {
    Nat best = 0;
    Rat best_v = a.at(T);
    for (std::uint64_t i = 1; i < span; ++i) {
      Nat idx(std::to_string(i));
      Rat v = a.at(T + idx);
      if (v > best_v) best_v = v, best = idx;
    }
    return best;
  };
  c.M = [a, head, cycle](const NatFnPtr& N, const Nat&, const Nat&) -> Nat {
    Nat best(std::to_string(head));
    Rat best_v = a.at(best + N->apply(best));
    for (std::uint64_t i = head + 1; i < head + cycle; ++i) {
      Nat m(std::to_string(i));
      Rat v = a.at(m + N->apply(m));
      if (v < best_v) best_v = v, best = m;
    }
    return best;
  };
  return c;
}

}  // namespace metastab
