#ifndef METASTAB_NUMERIC_HPP
#define METASTAB_NUMERIC_HPP

#include <gmpxx.h>

#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace metastab {

using Nat = mpz_class;
using Rat = mpq_class;
using Real = boost::multiprecision::mpfr_float_100;

Rat make_rat(const Nat& num, const Nat& den);
Rat rat(long num, long den = 1);

// Accepts "a/b", integers, decimals and scientific notation ("1e-3").
Rat parse_rat(std::string_view text);
Nat parse_nat(std::string_view text);

// Always "num/den", also for integers.
std::string to_string(const Rat& q);
std::string to_string(const Nat& n);

Nat floor_rat(const Rat& q);
Nat ceil_rat(const Rat& q);

Rat min_rat(const Rat& a, const Rat& b);
Rat max_rat(const Rat& a, const Rat& b);
Nat max_nat(const Nat& a, const Nat& b);
Nat monus(const Nat& a, const Nat& b);

// Dyadic bounds with `bits` fractional bits: lower <= sqrt(q) <= upper.
Rat sqrt_upper(const Rat& q, unsigned bits);
Rat sqrt_lower(const Rat& q, unsigned bits);

// Least N >= 0 with N * sqrt(s) >= a, for a >= 0 and s > 0.
Nat ceil_div_sqrt(const Rat& a, const Rat& s);

// Round to the nearest multiple of 2^-bits.
Rat round_dyadic(const Rat& q, unsigned bits);

Real to_real(const Rat& q);
Real to_real(const Nat& n);

bool fits_u64(const Nat& n);
std::uint64_t to_u64(const Nat& n);

}  // namespace metastab

#endif
