#include "metastab/numeric.hpp"

#include "metastab/errors.hpp"

#include <cctype>
#include <limits>

namespace metastab {

Rat make_rat(const Nat& num, const Nat& den) {
  if (den == 0) throw DomainError("zero denominator");
  Rat q(num, den);
  q.canonicalize();
  return q;
}

Rat rat(long num, long den) { return make_rat(Nat(num), Nat(den)); }

namespace {

Nat parse_integer(std::string_view s) {
  std::string t(s);
  if (t.empty()) throw DomainError("empty integer");
  std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
  if (i == t.size()) throw DomainError("bad integer '" + t + "'");
  for (std::size_t j = i; j < t.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(t[j]))) throw DomainError("bad integer '" + t + "'");
  if (t[0] == '+') t.erase(0, 1);
  return Nat(t, 10);
}

Nat pow10(unsigned long e) {
  Nat r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

}  // namespace

Rat parse_rat(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw DomainError("empty rational");
  if (auto slash = s.find('/'); slash != std::string::npos)
    return make_rat(parse_integer(s.substr(0, slash)), parse_integer(s.substr(slash + 1)));
  long exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    exp10 = parse_integer(s.substr(e + 1)).get_si();
    s = s.substr(0, e);
  }
  std::string digits = s;
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string frac = s.substr(dot + 1);
    digits = s.substr(0, dot) + frac;
    exp10 -= static_cast<long>(frac.size());
    if (digits == "-" || digits == "+" || digits.empty()) digits += "0";
  }
  Rat q(parse_integer(digits));
  if (exp10 >= 0)
    q *= Rat(pow10(static_cast<unsigned long>(exp10)));
  else
    q /= Rat(pow10(static_cast<unsigned long>(-exp10)));
  q.canonicalize();
  return q;
}

Nat parse_nat(std::string_view text) {
  Nat n = parse_integer(text);
  if (n < 0) throw DomainError("negative natural '" + std::string(text) + "'");
  return n;
}

std::string to_string(const Rat& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const Nat& n) { return n.get_str(); }

Nat floor_rat(const Rat& q) {
  Nat r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Nat ceil_rat(const Rat& q) {
  Nat r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Rat min_rat(const Rat& a, const Rat& b) { return a < b ? a : b; }
Rat max_rat(const Rat& a, const Rat& b) { return a < b ? b : a; }
Nat max_nat(const Nat& a, const Nat& b) { return a < b ? b : a; }
Nat monus(const Nat& a, const Nat& b) { return a > b ? Nat(a - b) : Nat(0); }

Rat sqrt_upper(const Rat& q, unsigned bits) {
  if (q < 0) throw DomainError("sqrt of negative");
  Nat scaled = q.get_num() << (2 * bits);
  Nat n;
  mpz_cdiv_q(n.get_mpz_t(), scaled.get_mpz_t(), q.get_den_mpz_t());
  Nat r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  if (r * r < n) r += 1;
  return make_rat(r, Nat(1) << bits);
}

Rat sqrt_lower(const Rat& q, unsigned bits) {
  if (q < 0) throw DomainError("sqrt of negative");
  Nat scaled = q.get_num() << (2 * bits);
  Nat n;
  mpz_fdiv_q(n.get_mpz_t(), scaled.get_mpz_t(), q.get_den_mpz_t());
  Nat r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return make_rat(r, Nat(1) << bits);
}

Nat ceil_div_sqrt(const Rat& a, const Rat& s) {
  if (a <= 0) return 0;
  if (s <= 0) throw DomainError("ceil_div_sqrt needs s > 0");
  // Least N with N^2 >= ceil(a^2 / s).
  Nat t = ceil_rat(Rat(a * a / s));
  Nat r;
  mpz_sqrt(r.get_mpz_t(), t.get_mpz_t());
  if (r * r < t) r += 1;
  return r;
}

Rat round_dyadic(const Rat& q, unsigned bits) {
  Nat scaled = q.get_num() << bits;
  Nat r;
  mpz_fdiv_q(r.get_mpz_t(), scaled.get_mpz_t(), q.get_den_mpz_t());
  Rat lo = make_rat(r, Nat(1) << bits);
  Rat hi = make_rat(r + 1, Nat(1) << bits);
  return (q - lo <= hi - q) ? lo : hi;
}

Real to_real(const Rat& q) { return Real(q.get_mpq_t()); }
Real to_real(const Nat& n) { return Real(n.get_mpz_t()); }

bool fits_u64(const Nat& n) {
  return n >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
}

std::uint64_t to_u64(const Nat& n) {
  if (!fits_u64(n)) throw DomainError("natural does not fit in 64 bits");
  std::uint64_t lo = mpz_get_ui(Nat(n & Nat(0xffffffffUL)).get_mpz_t());
  std::uint64_t hi = mpz_get_ui(Nat(n >> 32).get_mpz_t());
  return (hi << 32) | lo;
}

}  // namespace metastab
