#ifndef METASTAB_FUNCTIONAL_HPP
#define METASTAB_FUNCTIONAL_HPP

#include "metastab/errors.hpp"
#include "metastab/numeric.hpp"

#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace metastab {

// Shared application counter for one realizer or bound invocation.
class Fuel {
 public:
  explicit Fuel(std::uint64_t budget = 1'000'000'000ULL) : budget_(budget) {}

  void spend(std::uint64_t units = 1) {
    used_ += units;
    if (used_ > budget_) throw FuelExceeded(used_, deepest());
  }

  // Fails early when a recursion provably needs more applications than remain.
  void require(const Nat& units, const std::string& what);

  std::uint64_t used() const { return used_; }
  std::uint64_t budget() const { return budget_; }
  std::uint64_t remaining() const { return used_ >= budget_ ? 0 : budget_ - used_; }

  void enter(std::string stage);
  void leave();
  std::string deepest() const;

 private:
  std::uint64_t budget_;
  std::uint64_t used_ = 0;
  std::vector<std::string> stack_;
  std::vector<std::string> deepest_;
};

class StageGuard {
 public:
  StageGuard(Fuel* fuel, std::string stage) : fuel_(fuel) {
    if (fuel_) fuel_->enter(std::move(stage));
  }
  ~StageGuard() {
    if (fuel_) fuel_->leave();
  }
  StageGuard(const StageGuard&) = delete;
  StageGuard& operator=(const StageGuard&) = delete;

 private:
  Fuel* fuel_;
};

inline void spend(Fuel* fuel, std::uint64_t units = 1) {
  if (fuel) fuel->spend(units);
}

// Maps a structural description to a short stable key ("#<n>").
std::string intern_key(const std::string& structural);

class NatFn {
 public:
  explicit NatFn(std::string key) : key_(std::move(key)) {}
  virtual ~NatFn() = default;

  Nat operator()(const Nat& n) const { return apply(n); }
  virtual Nat apply(const Nat& n) const = 0;
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

using NatFnPtr = std::shared_ptr<const NatFn>;

NatFnPtr constant_fn(const Nat& c);
NatFnPtr zero_fn();
NatFnPtr make_fn(const std::string& structural_key, std::function<Nat(const Nat&)> f);
NatFnPtr table_fn(const std::string& name, std::vector<Nat> values);
NatFnPtr affine_fn(const Nat& a, const Nat& c);
NatFnPtr pointwise_max(NatFnPtr a, NatFnPtr b);

// f^M(n) = max_{i <= n} f(i), memoized.
NatFnPtr running_max(NatFnPtr f);

// Runs `body` on a thread with a large stack; rethrows its exception.
void run_on_large_stack(const std::function<void()>& body, std::size_t bytes = std::size_t(1) << 32);

template <class F>
auto with_large_stack(F&& f) -> decltype(f()) {
  std::optional<decltype(f())> out;
  run_on_large_stack([&] { out.emplace(f()); });
  return std::move(*out);
}

}  // namespace metastab

#endif
