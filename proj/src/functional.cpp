#include "metastab/functional.hpp"

#include <pthread.h>

#include <map>
#include <mutex>
#include <unordered_map>

namespace metastab {

void Fuel::require(const Nat& units, const std::string& what) {
  if (units > Nat(std::to_string(remaining()))) {
    std::uint64_t shown = used_;
    throw FuelExceeded(shown, deepest() + " / " + what + " needs " +
                                  (mpz_sizeinbase(units.get_mpz_t(), 10) > 40
                                       ? "~10^" + std::to_string(mpz_sizeinbase(units.get_mpz_t(), 10) - 1)
                                       : units.get_str()) +
                                  " applications");
  }
}

void Fuel::enter(std::string stage) {
  stack_.push_back(std::move(stage));
  if (stack_.size() >= deepest_.size()) deepest_ = stack_;
}

void Fuel::leave() {
  if (!stack_.empty()) stack_.pop_back();
}

std::string Fuel::deepest() const {
  std::string out;
  for (const auto& s : deepest_) {
    if (!out.empty()) out += " > ";
    out += s;
  }
  return out.empty() ? "top" : out;
}

std::string intern_key(const std::string& structural) {
  static std::mutex mu;
  static std::unordered_map<std::string, std::string> table;
  if (structural.size() <= 24) return structural;
  std::lock_guard<std::mutex> lock(mu);
  auto it = table.find(structural);
  if (it != table.end()) return it->second;
  std::string key = "#" + std::to_string(table.size());
  table.emplace(structural, key);
  return key;
}

namespace {

class LambdaFn final : public NatFn {
 public:
  LambdaFn(std::string key, std::function<Nat(const Nat&)> f) : NatFn(std::move(key)), f_(std::move(f)) {}
  Nat apply(const Nat& n) const override { return f_(n); }

 private:
  std::function<Nat(const Nat&)> f_;
};

class RunningMaxFn final : public NatFn {
 public:
  explicit RunningMaxFn(NatFnPtr f) : NatFn(intern_key("maxM(" + f->key() + ")")), f_(std::move(f)) {}

  Nat apply(const Nat& n) const override {
    if (n < 0) throw DomainError("negative argument");
    std::lock_guard<std::mutex> lock(mu_);
    if (prefix_.empty()) prefix_.push_back(f_->apply(0));
    std::uint64_t target = to_u64(n);
    while (prefix_.size() <= target) {
      Nat v = f_->apply(Nat(std::to_string(prefix_.size())));
      prefix_.push_back(max_nat(prefix_.back(), v));
    }
    return prefix_[target];
  }

 private:
  NatFnPtr f_;
  mutable std::mutex mu_;
  mutable std::vector<Nat> prefix_;
};

}  // namespace

NatFnPtr constant_fn(const Nat& c) {
  return std::make_shared<LambdaFn>("K" + c.get_str(), [c](const Nat&) { return c; });
}

NatFnPtr zero_fn() {
  static const NatFnPtr zero = constant_fn(0);
  return zero;
}

NatFnPtr make_fn(const std::string& structural_key, std::function<Nat(const Nat&)> f) {
  return std::make_shared<LambdaFn>(intern_key(structural_key), std::move(f));
}

NatFnPtr table_fn(const std::string& name, std::vector<Nat> values) {
  if (values.empty()) throw DomainError("empty table function");
  std::string key = "tab:" + name;
  for (const auto& v : values) key += "," + v.get_str();
  return make_fn(key, [values = std::move(values)](const Nat& n) {
    if (n < 0) throw DomainError("negative argument");
    if (n >= Nat(std::to_string(values.size()))) return values.back();
    return values[to_u64(n)];
  });
}

NatFnPtr affine_fn(const Nat& a, const Nat& c) {
  return make_fn("aff:" + a.get_str() + "," + c.get_str(), [a, c](const Nat& n) { return Nat(a * n + c); });
}

NatFnPtr pointwise_max(NatFnPtr a, NatFnPtr b) {
  std::string key = "max(" + a->key() + "," + b->key() + ")";
  return make_fn(key, [a = std::move(a), b = std::move(b)](const Nat& n) { return max_nat(a->apply(n), b->apply(n)); });
}

NatFnPtr running_max(NatFnPtr f) { return std::make_shared<RunningMaxFn>(std::move(f)); }

namespace {

struct StackJob {
  const std::function<void()>* body;
  std::exception_ptr error;
};

void* stack_trampoline(void* arg) {
  auto* job = static_cast<StackJob*>(arg);
  try {
    (*job->body)();
  } catch (...) {
    job->error = std::current_exception();
  }
  return nullptr;
}

}  // namespace

void run_on_large_stack(const std::function<void()>& body, std::size_t bytes) {
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, bytes);
  StackJob job{&body, nullptr};
  pthread_t thread;
  if (pthread_create(&thread, &attr, stack_trampoline, &job) != 0) {
    pthread_attr_destroy(&attr);
    body();
    return;
  }
  pthread_attr_destroy(&attr);
  pthread_join(thread, nullptr);
  if (job.error) std::rethrow_exception(job.error);
}

}  // namespace metastab
