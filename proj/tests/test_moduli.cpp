#include "metastab/moduli.hpp"

#include <gtest/gtest.h>

using namespace metastab;

namespace {

Space cube(std::size_t d, long b) {
  return Space(d, Rat(2), Nat(b), FeasibleSet::box(Point(d, Rat(-1)), Point(d, Rat(1))));
}

}  // namespace

TEST(Moduli, PsiHandValueWithConstantEta) {
  // e = 1/2, inner = min(1/2, 1/288) and psi = min(inner^2/4, 1/192).
  EXPECT_EQ(psi(Nat(1), constant_modulus(rat(1, 2)), Rat(1)), rat(1, 331776));
}

TEST(Moduli, OmegaHandValueWithIdentityTau) {
  EXPECT_EQ(omega(Nat(1), identity_modulus(), Rat(1)), rat(1, 24));
  // eps above 2 is clipped to 2.
  EXPECT_EQ(omega(Nat(1), identity_modulus(), Rat(5)), omega(Nat(1), identity_modulus(), Rat(2)));
}

TEST(Moduli, ThetaTildeTakesTheSmallerTerm) {
  EXPECT_EQ(theta_tilde(identity_modulus(), Rat(1)), rat(1, 4));
  EXPECT_EQ(theta_tilde(linear_modulus(rat(1, 10)), Rat(1)), rat(1, 20));
}

TEST(Moduli, DomainErrors) {
  Modulus eta = hilbert_eta();
  EXPECT_THROW(psi(Nat(1), eta, Rat(0)), DomainError);
  EXPECT_THROW(psi(Nat(1), eta, Rat(3)), DomainError);
  EXPECT_THROW(psi(Nat(0), eta, Rat(1)), DomainError);
  EXPECT_THROW(omega(Nat(1), identity_modulus(), Rat(-1)), DomainError);
  EXPECT_THROW(theta_tilde(identity_modulus(), Rat(0)), DomainError);
}

TEST(Moduli, HilbertEtaBelowTrueModulus) {
  Modulus eta = hilbert_eta();
  for (long k = 1; k <= 20; ++k) {
    Rat e = rat(k, 10);
    Real exact = 1 - boost::multiprecision::sqrt(1 - to_real(e) * to_real(e) / 4);
    EXPECT_GT(eta(e), 0);
    EXPECT_LE(to_real(eta(e)), exact);
  }
}

TEST(Moduli, PsiIsMonotoneInEpsilon) {
  Modulus eta = hilbert_eta();
  Rat prev = 0;
  for (long k = 1; k <= 20; ++k) {
    Rat v = psi(Nat(2), eta, rat(k, 10));
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Moduli, PsiInequalityHoldsOnSamples) {
  for (std::size_t d = 1; d <= 3; ++d) {
    SampleReport r = check_psi_inequality(cube(d, 2), hilbert_eta(), 1500, 7 + d);
    EXPECT_TRUE(r.ok()) << (r.examples.empty() ? "" : r.examples[0]);
    EXPECT_EQ(r.checked, 1500u);
  }
}

TEST(Moduli, OmegaContractHoldsOnSamples) {
  SampleReport r = check_omega_contract(cube(3, 2), identity_modulus(), 1500, 11);
  EXPECT_TRUE(r.ok()) << (r.examples.empty() ? "" : r.examples[0]);
}

TEST(Moduli, ValidatorsAcceptHilbertModuli) {
  EXPECT_TRUE(validate_convexity_modulus(cube(2, 1), hilbert_eta(), 800, 3).ok());
  EXPECT_TRUE(validate_smoothness_modulus(cube(2, 1), identity_modulus(), 800, 3).ok());
}

TEST(Moduli, ValidatorRejectsOversizedEta) {
  SampleReport r = validate_convexity_modulus(cube(2, 1), constant_modulus(Rat(1), Rat(2)), 400, 5);
  EXPECT_FALSE(r.ok());
}

TEST(Moduli, PresetsResolve) {
  EXPECT_EQ(modulus_preset("identity-tau")(rat(1, 3)), rat(1, 3));
  EXPECT_THROW(modulus_preset("no-such"), ConfigError);
}
