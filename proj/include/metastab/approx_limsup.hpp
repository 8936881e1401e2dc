#ifndef METASTAB_APPROX_LIMSUP_HPP
#define METASTAB_APPROX_LIMSUP_HPP

#include "metastab/functional.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace metastab {

// Memoized bounded rational sequence; values outside [0, bound] are a contract violation.
class SequenceOracle {
 public:
  SequenceOracle(std::string key, std::function<Rat(const Nat&)> f, Rat bound);

  Rat at(const Nat& n) const;
  const Rat& bound() const { return state_->bound; }
  const std::string& key() const { return state_->key; }

 private:
  struct State {
    std::string key;
    std::function<Rat(const Nat&)> f;
    Rat bound;
    std::mutex mu;
    std::map<Nat, Rat> memo;
  };
  std::shared_ptr<State> state_;
};

// (v1, v2, v3) -> N, with v1 a function argument.
using Counterfunction = std::function<Nat(const NatFnPtr&, const Nat&, const Nat&)>;

struct LimsupWitness {
  Nat P;
  NatFnPtr N;
  Nat T;
  bool fallback = false;
};

LimsupWitness eps_limsup_witness(const Nat& B, const Nat& k, const SequenceOracle& a, const Counterfunction& U,
                                 const Counterfunction& M, Fuel* fuel = nullptr);

struct LimsupCheck {
  Nat lower_index, upper_index;
  Rat lower_value, upper_value;
  bool range = false;
  bool lower = false;
  bool upper = false;
  bool ok() const { return range && lower && upper; }
};

// a(M(N,T,P) + N(M(N,T,P))) >= (P-1)/(k+1) and a(T + U(N,T,P)) <= (P+1)/(k+1).
LimsupCheck check_limsup_postconditions(const Nat& B, const Nat& k, const SequenceOracle& a, const Counterfunction& U,
                                        const Counterfunction& M, const LimsupWitness& w);

// a_n = head[n] below head.size(), then cycle[(n - head.size()) mod cycle.size()].
SequenceOracle eventually_periodic_oracle(std::vector<Rat> head, std::vector<Rat> cycle, const Rat& bound);

// max over one cycle of an eventually periodic oracle, which is its limsup.
Rat periodic_limsup(const std::vector<Rat>& cycle);

// U maximizes a(T + i) over i < head + cycle; M minimizes a(m + N(m)) over m in [head, head + cycle).
struct ExhaustiveCounterfunctions {
  Counterfunction U, M;
};
ExhaustiveCounterfunctions exhaustive_counterfunctions(const SequenceOracle& a, std::size_t head, std::size_t cycle);

// j + j' + m(N + j + j').
Nat combine_ranks(const Nat& j, const Nat& jp, const NatFn& m, const Nat& N);

}  // namespace metastab

#endif
