#include "metastab/modulus.hpp"

#include "metastab/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace metastab {

Rat Modulus::operator()(const Rat& eps) const {
  if (!fn_) throw DomainError("modulus '" + name_ + "' is empty");
  if (eps <= 0) throw DomainError("modulus '" + name_ + "' needs eps > 0, got " + to_string(eps));
  if (domain_max_ && eps > *domain_max_)
    throw DomainError("modulus '" + name_ + "' defined on (0," + to_string(*domain_max_) + "], got " +
                      to_string(eps));
  Rat v = fn_(eps);
  if (v <= 0) throw DomainError("modulus '" + name_ + "' returned nonpositive value at " + to_string(eps));
  return v;
}

Modulus hilbert_eta(unsigned bits) {
  return Modulus(
      "hilbert-eta",
      [bits](const Rat& eps) {
        Rat s = eps * eps / 4;
        return Rat(s / (1 + sqrt_upper(1 - s, bits)));
      },
      Rat(2));
}

Modulus identity_modulus(const std::string& name) {
  return Modulus(name, [](const Rat& eps) { return eps; });
}

Modulus linear_modulus(const Rat& factor, const std::string& name) {
  if (factor <= 0) throw DomainError("linear modulus needs a positive factor");
  return Modulus(name.empty() ? "linear:" + to_string(factor) : name,
                 [factor](const Rat& eps) { return Rat(factor * eps); });
}

Modulus constant_modulus(const Rat& c, std::optional<Rat> domain_max) {
  if (c <= 0) throw DomainError("constant modulus needs c > 0");
  return Modulus("const:" + to_string(c), [c](const Rat&) { return c; }, std::move(domain_max));
}

Modulus table_modulus(const std::string& name, std::vector<std::pair<Rat, Rat>> rows,
                      std::optional<Rat> domain_max) {
  if (rows.empty()) throw ConfigError(name, "empty modulus table");
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [e, v] : rows)
    if (e <= 0 || v <= 0) throw ConfigError(name, "modulus table entries must be positive");
  return Modulus(
      name,
      [rows = std::move(rows), name](const Rat& eps) {
        auto it = std::upper_bound(rows.begin(), rows.end(), eps,
                                   [](const Rat& e, const auto& row) { return e < row.first; });
        if (it == rows.begin())
          throw DomainError("table modulus '" + name + "' has no entry at or below " + to_string(eps));
        return std::prev(it)->second;
      },
      std::move(domain_max));
}

Modulus load_table_modulus(const std::string& path, std::optional<Rat> domain_max) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open modulus table");
  std::vector<std::pair<Rat, Rat>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno), "expected 'epsilon,value'");
    try {
      rows.emplace_back(parse_rat(line.substr(0, comma)), parse_rat(line.substr(comma + 1)));
    } catch (const DomainError&) {
      if (rows.empty() && lineno == 1) continue;  // header row
      throw ConfigError(path + ":" + std::to_string(lineno), "bad rational");
    }
  }
  return table_modulus("table:" + path, std::move(rows), std::move(domain_max));
}

Modulus modulus_preset(const std::string& key) {
  if (key == "hilbert-eta") return hilbert_eta();
  if (key == "identity-tau") return identity_modulus("identity-tau");
  if (key == "identity-theta") return identity_modulus("identity-theta");
  if (key.rfind("table:", 0) == 0) return load_table_modulus(key.substr(6));
  throw ConfigError(key, "unknown modulus preset");
}

}  // namespace metastab
