#ifndef METASTAB_MODULI_HPP
#define METASTAB_MODULI_HPP

#include "metastab/modulus.hpp"
#include "metastab/spaces.hpp"

#include <cstdint>

namespace metastab {

// min((min(eps/2, eps^2/(72b) eta^2(eps/2b)))^2/4, eps^2/48 eta^2(eps/2b)), eps in (0,2].
Rat psi(const Nat& b, const Modulus& eta, const Rat& eps);
// (r1^2/(12 r2)) tau(r1/(2 r2)) with r1 = min(eps,2), r2 = max(b,1).
Rat omega(const Nat& b, const Modulus& tau, const Rat& eps);
// min(eps/4, theta(eps/2)).
Rat theta_tilde(const Modulus& theta, const Rat& eps);

Modulus psi_modulus(const Nat& b, const Modulus& eta);
Modulus omega_modulus(const Nat& b, const Modulus& tau);
Modulus theta_tilde_modulus(const Modulus& theta);

// |(x+y)/2| <= 1 - eta(eps) for |x|,|y| <= 1 and |x-y| >= eps.
SampleReport validate_convexity_modulus(const Space& space, const Modulus& eta, std::size_t samples,
                                        std::uint64_t seed);
// |x+y| + |x-y| <= 2 + eps|y| for |x| = 1 and |y| <= tau(eps).
SampleReport validate_smoothness_modulus(const Space& space, const Modulus& tau, std::size_t samples,
                                         std::uint64_t seed);

// |(x+y)/2|^2 + psi(eps) <= |x|^2/2 + |y|^2/2 for |x|,|y| <= b, |x-y| >= eps.
SampleReport check_psi_inequality(const Space& space, const Modulus& eta, std::size_t samples, std::uint64_t seed);
// |x-y| <= omega(b,eps) and |x|,|y| <= b imply |j(x)-j(y)|_* <= eps.
SampleReport check_omega_contract(const Space& space, const Modulus& tau, std::size_t samples, std::uint64_t seed);

}  // namespace metastab

#endif
