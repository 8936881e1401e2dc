#include "metastab/approx_limsup.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace metastab;

TEST(ApproxLimsup, PeriodicOracleValues) {
  SequenceOracle a = eventually_periodic_oracle({Rat(1), Rat(0)}, {rat(1, 3), rat(2, 3), Rat(0)}, Rat(1));
  EXPECT_EQ(a.at(Nat(0)), Rat(1));
  EXPECT_EQ(a.at(Nat(1)), Rat(0));
  EXPECT_EQ(a.at(Nat(2)), rat(1, 3));
  EXPECT_EQ(a.at(Nat(6)), rat(2, 3));
  EXPECT_EQ(periodic_limsup({rat(1, 3), rat(2, 3), Rat(0)}), rat(2, 3));
}

TEST(ApproxLimsup, OracleBoundIsEnforced) {
  SequenceOracle a("over", [](const Nat&) -> Rat { return Rat(2); }, Rat(1));
  EXPECT_THROW(a.at(Nat(0)), ContractViolation);
  EXPECT_THROW(SequenceOracle("neg", [](const Nat&) -> Rat { return 0; }, Rat(-1)), DomainError);
}

TEST(ApproxLimsup, ConstantCounterfunctionsOnConstantSequence) {
  SequenceOracle a("half", [](const Nat&) -> Rat { return rat(1, 2); }, Rat(1));
  Counterfunction zero = [](const NatFnPtr&, const Nat&, const Nat&) -> Nat { return 0; };
  LimsupWitness w = eps_limsup_witness(Nat(1), Nat(3), a, zero, zero);
  // P/4 within 1/4 of 1/2 and the least such P is 2.
  EXPECT_EQ(w.P, Nat(2));
  EXPECT_FALSE(w.fallback);
  EXPECT_TRUE(check_limsup_postconditions(Nat(1), Nat(3), a, zero, zero, w).ok());
}

TEST(ApproxLimsup, PostconditionsForArbitraryCounterfunctions) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const long B = 1 + rng() % 3, k = rng() % 6;
    std::vector<Rat> head(rng() % 3), cycle(1 + rng() % 4);
    for (auto& v : head) v = make_rat(Nat(std::to_string(rng() % (4 * B + 1))), Nat(4));
    for (auto& v : cycle) v = make_rat(Nat(std::to_string(rng() % (4 * B + 1))), Nat(4));
    SequenceOracle a = eventually_periodic_oracle(head, cycle, Rat(B));
    const unsigned su = rng() % 17, sm = rng() % 13;
    Counterfunction U = [su](const NatFnPtr& L, const Nat& y, const Nat& p) -> Nat {
      return (L->apply(y) * 3 + y * su + p) % 11;
    };
    Counterfunction M = [sm](const NatFnPtr& L, const Nat& y, const Nat& p) -> Nat {
      return (L->apply(p) + y * 5 + sm) % 9;
    };
    LimsupWitness w = eps_limsup_witness(Nat(B), Nat(k), a, U, M);
    LimsupCheck c = check_limsup_postconditions(Nat(B), Nat(k), a, U, M, w);
    EXPECT_TRUE(c.ok()) << "trial " << trial;
    EXPECT_FALSE(w.fallback);
  }
}

TEST(ApproxLimsup, ExhaustiveCounterfunctionsAreSound) {
  std::vector<Rat> head{Rat(1), Rat(1)}, cycle{rat(1, 5), rat(3, 5), rat(2, 5)};
  SequenceOracle a = eventually_periodic_oracle(head, cycle, Rat(1));
  auto cf = exhaustive_counterfunctions(a, head.size(), cycle.size());
  for (long k = 0; k <= 8; ++k) {
    LimsupWitness w = eps_limsup_witness(Nat(1), Nat(k), a, cf.U, cf.M);
    Rat est = Rat(w.P) / Rat(k + 1);
    EXPECT_LE(abs(est - rat(3, 5)), Rat(1) / Rat(k + 1)) << "k=" << k;
  }
}

TEST(ApproxLimsup, FuelIsCharged) {
  SequenceOracle a("zero", [](const Nat&) -> Rat { return 0; }, Rat(1));
  Counterfunction zero = [](const NatFnPtr&, const Nat&, const Nat&) -> Nat { return 0; };
  Fuel small(3);
  EXPECT_THROW(eps_limsup_witness(Nat(1), Nat(8), a, zero, zero, &small), FuelExceeded);
  Fuel big(100000);
  eps_limsup_witness(Nat(1), Nat(8), a, zero, zero, &big);
  EXPECT_GT(big.used(), 0u);
}

TEST(ApproxLimsup, CombineRanks) {
  auto m = affine_fn(Nat(2), Nat(1));
  EXPECT_EQ(combine_ranks(Nat(3), Nat(4), *m, Nat(10)), Nat(3 + 4 + 2 * 17 + 1));
}
