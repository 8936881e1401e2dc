#ifndef METASTAB_CLAIM2_HPP
#define METASTAB_CLAIM2_HPP

#include "metastab/bound.hpp"
#include "metastab/realizer.hpp"

namespace metastab {

struct Claim2Data {
  PointSeqPtr x;
  Point anchor;
  MapInstance hT;
  ConstantsBundle constants;
  Rat epsilon;
  NatFnPtr g;
  NatMap alpha;
};

// Limsup instance behind every g_i: (P, z, N, T, 0) and f = N(m).
// `second` selects the two-level case distinction.
OmegaValue lemma_instance(Session& s, const PointSeqPtr& seq, const Point& z, const Nat& k, const Nat& m,
                          const Stage& first, const Stage* second);

// u, u', g-vectors, f-vectors, iota and phi for the given path.
PhiInputs claim2_instantiation(Session& s, const Claim2Data& data);

struct RealizerReport {
  PhiResult phi;
  Nat N;
  Nat gN;
  Rat gap_sq;
  bool endpoint_ok = false;
  Rat u, u_prime;
  std::uint64_t applications = 0;
  bool ok() const { return endpoint_ok && phi.all_ok(); }
};

// Runs Phi(Psi) on the instantiation; N = k' + f0'(w,k,w',k').
RealizerReport run_realizer(const Space& space, const Claim2Data& data, Fuel* fuel);

}  // namespace metastab

#endif
