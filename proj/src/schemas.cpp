#include "metastab/schemas.hpp"

#include <fstream>

namespace metastab {

namespace {

Nat nat_of(std::uint64_t v) { return Nat(std::to_string(v)); }

}  // namespace

Schedule canonical_schedule() {
  return Schedule{"canonical", [](const Nat& n) -> Rat { return Rat(1) - make_rat(1, n + 1); },
                  [](const Nat& n) { return n; }, [](const Nat& n) { return Nat(n + 1); }};
}

Schedule shifted_schedule() {
  return Schedule{"shifted", [](const Nat& n) -> Rat { return Rat(1) - make_rat(1, n + 2); },
                  [](const Nat& n) { return n; }, [](const Nat& n) { return Nat(n + 2); }};
}

Schedule table_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("schedule", "cannot open schedule table '" + path + "'");
  struct Row {
    Rat t;
    Nat alpha, gamma;
  };
  auto rows = std::make_shared<std::vector<Row>>();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1)
      cells.push_back(line.substr(start, pos - start));
    cells.push_back(line.substr(start));
    if (cells.size() != 4) throw ConfigError("schedule:" + std::to_string(lineno), "expected n,t,alpha,gamma");
    try {
      if (parse_nat(cells[0]) != nat_of(rows->size()))
        throw ConfigError("schedule:" + std::to_string(lineno), "rows must be consecutive from n = 0");
      rows->push_back(Row{parse_rat(cells[1]), parse_nat(cells[2]), parse_nat(cells[3])});
    } catch (const DomainError&) {
      if (lineno == 1 && rows->empty()) continue;
      throw ConfigError("schedule:" + std::to_string(lineno), "bad number");
    }
  }
  if (rows->empty()) throw ConfigError("schedule", "empty schedule table");
  auto row = [rows, path](const Nat& n) -> const Row& {
    if (n < 0 || n >= nat_of(rows->size()))
      throw DomainError("schedule table '" + path + "' has no row " + n.get_str());
    return (*rows)[to_u64(n)];
  };
  return Schedule{"table:" + path, [row](const Nat& n) { return row(n).t; },
                  [row](const Nat& n) { return row(n).alpha; }, [row](const Nat& n) { return row(n).gamma; }};
}

Schedule schedule_preset(const std::string& key) {
  if (key == "canonical") return canonical_schedule();
  if (key == "shifted") return shifted_schedule();
  if (key.rfind("table:", 0) == 0) return table_schedule(key.substr(6));
  throw ConfigError("schedule", "unknown schedule '" + key + "'");
}

ContractReport check_schedule_contracts(const Schedule& s, std::uint64_t from, std::uint64_t to,
                                        std::uint64_t window) {
  ContractReport rep;
  for (std::uint64_t i = from; i <= to; ++i) {
    Nat n = nat_of(i);
    Rat tn = s.t(n);
    if (tn < 0 || tn >= 1) rep.failures.push_back("t(" + n.get_str() + ") outside [0,1)");
    Nat g = s.gamma(n);
    if (g < 1 || tn > 1 - make_rat(1, g)) rep.failures.push_back("gamma contract fails at n=" + n.get_str());
    Rat floor_t = 1 - make_rat(1, n + 1);
    Nat a = s.alpha(n);
    for (std::uint64_t k = 0; k <= window; ++k) {
      Nat m = a + nat_of(k);
      if (s.t(m) < floor_t) {
        rep.failures.push_back("alpha contract fails at n=" + n.get_str() + ", m=" + m.get_str());
        break;
      }
    }
    ++rep.checked;
  }
  return rep;
}

ResolventSequence::ResolventSequence(Space space, MapInstance T, Point x, Schedule schedule, SolverOptions opts)
    : PointSequence(intern_key("res(" + T.name + "," + point_key(x) + "," + schedule.name + "," +
                               to_string(opts.tol) + ")")),
      space_(std::move(space)),
      T_(std::move(T)),
      x_(std::move(x)),
      schedule_(std::move(schedule)),
      opts_(std::move(opts)) {
  space_.check(x_);
}

Point ResolventSequence::at(const Nat& n) const {
  if (n < 0) throw DomainError("negative sequence index");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(n);
    if (it != memo_.end()) return it->second;
  }
  Point z;
  try {
    z = resolvent_point(space_, T_, x_, schedule_.t(n), opts_);
  } catch (const SolverError& e) {
    throw SolverError(std::string(e.what()) + " (sequence index " + n.get_str() + ")", e.best, e.residual);
  }
  std::lock_guard<std::mutex> lock(mu_);
  return memo_.emplace(n, std::move(z)).first->second;
}

Real ResolventSequence::residual(const Nat& n) const {
  return resolvent_residual(space_, T_, x_, schedule_.t(n), at(n));
}

std::shared_ptr<const ResolventSequence> resolvent_sequence(const Space& space, const MapInstance& T, const Point& x,
                                                            const Schedule& schedule, const SolverOptions& opts) {
  return std::make_shared<ResolventSequence>(space, T, x, schedule, opts);
}

Nat s_selector(const Space& space, const Point& p, const NatFn& g, const PointSequence& seq, const Nat& n) {
  Nat gn = g(n);
  if (gn == 0) return n;
  Nat later = n + gn;
  Point a = sub(seq.at(later), p), b = sub(seq.at(n), p);
  if (space.hilbert()) return euclid_sq(a) <= euclid_sq(b) ? n : later;
  Real na = space.norm(a), nb = space.norm(b);
  if (boost::multiprecision::abs(na - nb) <= space.slack())
    throw IndeterminateComparison("s_selector comparison within slack at n=" + n.get_str());
  return na <= nb ? n : later;
}

namespace {

class Reindexed final : public PointSequence {
 public:
  Reindexed(const Space& space, PointSeqPtr base, Point p, NatFnPtr g)
      : PointSequence(intern_key("re(" + base->key() + "," + point_key(p) + "," + g->key() + ")")),
        space_(space), base_(std::move(base)), p_(std::move(p)), g_(std::move(g)) {}

  Point at(const Nat& n) const override { return base_->at(s_selector(space_, p_, *g_, *base_, n)); }

 private:
  Space space_;
  PointSeqPtr base_;
  Point p_;
  NatFnPtr g_;
};

// Sequential recursion with a growing prefix cache.
class IteratedSequence final : public PointSequence {
 public:
  using Step = std::function<Point(const Point& prev, std::uint64_t next_index)>;

  IteratedSequence(std::string key, std::uint64_t first, Point start, Step step)
      : PointSequence(intern_key(key)), first_(first), step_(std::move(step)) {
    cache_.push_back(std::move(start));
  }

  Point at(const Nat& n) const override {
    if (n < nat_of(first_)) throw DomainError("sequence starts at index " + std::to_string(first_));
    std::uint64_t idx = to_u64(n) - first_;
    std::lock_guard<std::mutex> lock(mu_);
    while (cache_.size() <= idx) cache_.push_back(step_(cache_.back(), first_ + cache_.size()));
    return cache_[idx];
  }

 private:
  std::uint64_t first_;
  Step step_;
  mutable std::mutex mu_;
  mutable std::vector<Point> cache_;
};

}  // namespace

PointSeqPtr reindexed_sequence(const Space& space, PointSeqPtr base, const Point& p, NatFnPtr g) {
  return std::make_shared<Reindexed>(space, std::move(base), p, std::move(g));
}

HalpernRates wittmann_rates_harmonic() {
  HalpernRates r;
  r.lambda = [](const Nat& n) { return make_rat(1, n + 1); };
  r.beta1 = [](const Nat& n) {
    Real e = boost::multiprecision::exp(to_real(Nat(n + 1)));
    Nat c;
    mpfr_get_z(c.get_mpz_t(), e.backend().data(), MPFR_RNDU);
    return c;
  };
  r.beta2 = [](const Rat& eps) { return ceil_rat(1 / eps); };
  r.beta3 = [](const Rat& eps) { return ceil_rat(1 / eps); };
  return r;
}

ContractReport check_halpern_rates(const HalpernRates& rates, std::uint64_t n_max, const Rat& eps_min,
                                   std::uint64_t tail_window) {
  ContractReport rep;
  for (std::uint64_t n = 0; n <= n_max; ++n) {
    Nat top = rates.beta1(nat_of(n));
    Rat sum = 0;
    for (Nat i = 0; i <= top; ++i) sum += rates.lambda(i);
    if (sum < Rat(nat_of(n))) rep.failures.push_back("beta1 contract fails at n=" + std::to_string(n));
    ++rep.checked;
  }
  // eps ranges over 1/k for k = 1 .. 1/eps_min.
  Nat kmax = floor_rat(1 / eps_min);
  for (Nat k = 1; k <= kmax; ++k) {
    Rat eps = make_rat(1, k);
    Nat b2 = rates.beta2(eps);
    for (std::uint64_t j = 0; j <= 64; ++j)
      if (rates.lambda(b2 + nat_of(j)) > eps) {
        rep.failures.push_back("beta2 contract fails at eps=" + to_string(eps));
        break;
      }
    Nat b3 = rates.beta3(eps);
    Rat tail = 0;
    for (std::uint64_t j = 0; j < tail_window; ++j) {
      Nat i = b3 + nat_of(j);
      tail += abs(rates.lambda(i + 1) - rates.lambda(i));
    }
    if (tail > eps) rep.failures.push_back("beta3 contract fails at eps=" + to_string(eps));
    rep.checked += 2;
  }
  return rep;
}

PointSeqPtr halpern(const Space& space, const MapInstance& T, const Point& x0, const Point& u,
                    const HalpernRates& rates) {
  space.check(x0);
  space.check(u);
  auto lambda = rates.lambda;
  return std::make_shared<IteratedSequence>(
      "halpern(" + T.name + "," + point_key(x0) + "," + point_key(u) + ")", 0, x0,
      [T, u, lambda](const Point& prev, std::uint64_t next) {
        Rat l = lambda(nat_of(next));
        return add(scale(l, u), scale(1 - l, T(prev)));
      });
}

std::vector<std::string> bruck_preset_names() { return {"harmonic", "half-harmonic"}; }

BruckParams bruck_preset(const std::string& name) {
  if (name == "harmonic")
    return BruckParams{name, [](const Nat& n) { return make_rat(1, n + 2); },
                       [](const Nat& n) { return make_rat(1, n + 2); }};
  if (name == "half-harmonic")
    return BruckParams{name, [](const Nat&) { return Rat(1, 2); }, [](const Nat& n) { return make_rat(1, n + 1); }};
  throw ConfigError("bruck", "unknown Bruck preset '" + name + "'");
}

ContractReport check_bruck_feasibility(const BruckParams& params, std::uint64_t from, std::uint64_t to) {
  ContractReport rep;
  for (std::uint64_t i = from; i <= to; ++i) {
    Nat n = nat_of(i);
    Rat l = params.lambda(n), th = params.theta(n);
    if (l <= 0 || l >= 1 || th <= 0 || th >= 1 || l * (1 + th) > 1)
      rep.failures.push_back("lambda_n(1+theta_n) <= 1 fails at n=" + n.get_str());
    ++rep.checked;
  }
  return rep;
}

PointSeqPtr bruck(const Space& space, const MapInstance& T, const Point& x1, const BruckParams& params) {
  space.check(x1);
  return std::make_shared<IteratedSequence>(
      "bruck(" + T.name + "," + point_key(x1) + "," + params.name + ")", 1, x1,
      [T, x1, params](const Point& prev, std::uint64_t next) {
        Nat n = nat_of(next - 1);
        Rat l = params.lambda(n), th = params.theta(n);
        if (l * (1 + th) > 1)
          throw ConfigError("bruck", "lambda_n(1+theta_n) > 1 at n=" + n.get_str());
        return sub(add(scale(1 - l, prev), scale(l, T(prev))), scale(l * th, sub(prev, x1)));
      });
}

}  // namespace metastab
