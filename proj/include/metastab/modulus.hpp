#ifndef METASTAB_MODULUS_HPP
#define METASTAB_MODULUS_HPP

#include "metastab/numeric.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace metastab {

// Positive rational function on positive rationals, optionally capped at
// `domain_max` (2 for convexity moduli).
class Modulus {
 public:
  using Fn = std::function<Rat(const Rat&)>;

  Modulus() = default;
  Modulus(std::string name, Fn fn, std::optional<Rat> domain_max = std::nullopt)
      : name_(std::move(name)), fn_(std::move(fn)), domain_max_(std::move(domain_max)) {}

  Rat operator()(const Rat& eps) const;

  const std::string& name() const { return name_; }
  const std::optional<Rat>& domain_max() const { return domain_max_; }
  bool valid() const { return static_cast<bool>(fn_); }

 private:
  std::string name_;
  Fn fn_;
  std::optional<Rat> domain_max_;
};

// Rational lower bound of 1 - sqrt(1 - eps^2/4) on (0,2].
Modulus hilbert_eta(unsigned bits = 192);
Modulus identity_modulus(const std::string& name = "identity");
Modulus linear_modulus(const Rat& factor, const std::string& name = "");
Modulus constant_modulus(const Rat& c, std::optional<Rat> domain_max = std::nullopt);

// Step semantics: value at eps is the entry at the largest tabulated point <= eps.
Modulus table_modulus(const std::string& name, std::vector<std::pair<Rat, Rat>> rows,
                      std::optional<Rat> domain_max = std::nullopt);
Modulus load_table_modulus(const std::string& path, std::optional<Rat> domain_max = std::nullopt);

// "hilbert-eta", "identity-tau", "identity-theta", "table:<path>".
Modulus modulus_preset(const std::string& key);

}  // namespace metastab

#endif
