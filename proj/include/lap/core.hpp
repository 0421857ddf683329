#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lap/error.hpp"
#include "lap/number.hpp"

namespace lap {

template <class T>
class BasicValueVector {
 public:
  BasicValueVector() = default;

  static BasicValueVector zero(std::size_t k) {
    if (k == 0) throw InvalidInput("dimension must be positive");
    BasicValueVector v;
    v.e_.assign(k, T(0));
    return v;
  }
  static BasicValueVector unit(std::size_t k, std::size_t dim, const T& value) {
    auto v = zero(k);
    if (dim >= k) throw InvalidInput("unit vector dimension out of range");
    if (!Scalar<T>::is_finite(value) || value < T(0)) throw InvalidInput("entries must be finite and non-negative");
    v.e_[dim] = value;
    return v;
  }

  explicit BasicValueVector(std::vector<T> entries) : e_(std::move(entries)) { validate(); }
  BasicValueVector(std::initializer_list<T> entries) : e_(entries) { validate(); }

  std::size_t k() const { return e_.size(); }
  const T& operator[](std::size_t i) const { return e_[i]; }
  const std::vector<T>& entries() const { return e_; }

  T norm() const {
    T s(0);
    for (const auto& x : e_) s += x;
    return s;
  }
  bool is_zero() const {
    return std::all_of(e_.begin(), e_.end(), [](const T& x) { return x == T(0); });
  }

  // Coordinatewise maximum.
  BasicValueVector join(const BasicValueVector& o) const {
    check_dim(o);
    BasicValueVector r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i)
      if (r.e_[i] < o.e_[i]) r.e_[i] = o.e_[i];
    return r;
  }
  bool coordinatewise_geq(const BasicValueVector& o) const {
    check_dim(o);
    for (std::size_t i = 0; i < e_.size(); ++i)
      if (e_[i] < o.e_[i]) return false;
    return true;
  }
  void check_dim(const BasicValueVector& o) const {
    if (o.k() != k()) throw InvalidInput("dimension mismatch: " + std::to_string(k()) + " vs " + std::to_string(o.k()));
  }

  friend bool operator==(const BasicValueVector& a, const BasicValueVector& b) { return a.e_ == b.e_; }
  friend bool operator!=(const BasicValueVector& a, const BasicValueVector& b) { return !(a == b); }
  friend bool operator<(const BasicValueVector& a, const BasicValueVector& b) {
    return std::lexicographical_compare(a.e_.begin(), a.e_.end(), b.e_.begin(), b.e_.end());
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < e_.size(); ++i) {
      if (i) s += ",";
      s += Scalar<T>::str(e_[i]);
    }
    return s + ")";
  }

 private:
  void validate() const {
    if (e_.empty()) throw InvalidInput("dimension must be positive");
    for (const auto& x : e_)
      if (!Scalar<T>::is_finite(x) || x < T(0)) throw InvalidInput("entries must be finite and non-negative");
  }

  std::vector<T> e_;
};

// Ordered candidates sharing one dimension. Only representation() may
// produce an empty sequence, so the dimension is kept separately.
template <class T>
class BasicSequence {
 public:
  using Vector = BasicValueVector<T>;

  BasicSequence() = default;
  explicit BasicSequence(std::vector<Vector> candidates) : c_(std::move(candidates)) {
    if (c_.empty()) throw InvalidInput("sequence must contain at least one candidate");
    k_ = c_.front().k();
    for (const auto& v : c_) c_.front().check_dim(v);
  }
  BasicSequence(std::initializer_list<Vector> candidates)
      : BasicSequence(std::vector<Vector>(candidates)) {}

  static BasicSequence empty(std::size_t k) {
    BasicSequence s;
    s.k_ = k;
    return s;
  }

  std::size_t n() const { return c_.size(); }
  std::size_t k() const { return k_; }
  bool is_empty() const { return c_.empty(); }
  // 1-based, as in the model.
  const Vector& at(std::size_t t) const {
    if (t < 1 || t > c_.size()) throw InvalidInput("index " + std::to_string(t) + " outside [1, " + std::to_string(c_.size()) + "]");
    return c_[t - 1];
  }
  const std::vector<Vector>& candidates() const { return c_; }

  BasicSequence prefix(std::size_t len) const {
    if (len < 1 || len > c_.size()) throw InvalidInput("prefix length out of range");
    return BasicSequence(std::vector<Vector>(c_.begin(), c_.begin() + len));
  }
  BasicSequence suffix(std::size_t len) const {
    if (len < 1 || len > c_.size()) throw InvalidInput("suffix length out of range");
    return BasicSequence(std::vector<Vector>(c_.end() - len, c_.end()));
  }
  void push_back(Vector v) {
    if (c_.empty() && k_ == 0) k_ = v.k();
    if (v.k() != k_) throw InvalidInput("dimension mismatch in sequence");
    c_.push_back(std::move(v));
  }

  friend bool operator==(const BasicSequence& a, const BasicSequence& b) { return a.k_ == b.k_ && a.c_ == b.c_; }

  std::string str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (i) s += ",";
      s += c_[i].str();
    }
    return s + "]";
  }

 private:
  std::vector<Vector> c_;
  std::size_t k_ = 0;
};

template <class T>
struct AgentParams {
  T lambda;
  std::size_t k;

  AgentParams(T lambda_, std::size_t k_) : lambda(std::move(lambda_)), k(k_) {
    if (!Scalar<T>::is_finite(lambda) || lambda < T(0)) throw InvalidInput("lambda must be finite and non-negative");
    if (k == 0) throw InvalidInput("dimension must be positive");
  }
  // Feature-amplified bias.
  T bias() const { return lambda * T(static_cast<long>(k) - 1); }
};

template <class T>
class FiniteDistribution {
 public:
  using Vector = BasicValueVector<T>;
  using Atom = std::pair<Vector, T>;

  FiniteDistribution() = default;
  explicit FiniteDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw InvalidInput("distribution needs at least one atom");
    T total(0);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      atoms_.front().first.check_dim(atoms_[i].first);
      if (!Scalar<T>::is_finite(atoms_[i].second) || !(atoms_[i].second > T(0)))
        throw InvalidInput("atom probabilities must be strictly positive");
      total += atoms_[i].second;
      for (std::size_t j = 0; j < i; ++j)
        if (atoms_[j].first == atoms_[i].first) throw InvalidInput("duplicate support point " + atoms_[i].first.str());
    }
    bool ok;
    if constexpr (Scalar<T>::exact)
      ok = total == T(1);
    else
      ok = std::abs(Scalar<T>::to_double(total) - 1.0) <= 1e-12;
    if (!ok) throw InvalidInput("atom probabilities sum to " + Scalar<T>::str(total) + ", not 1");
  }

  static FiniteDistribution point(Vector v) { return FiniteDistribution({{std::move(v), T(1)}}); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  std::size_t k() const { return atoms_.front().first.k(); }

  friend bool operator==(const FiniteDistribution& a, const FiniteDistribution& b) { return a.atoms_ == b.atoms_; }

 private:
  std::vector<Atom> atoms_;
};

template <class T>
class ProductPrior {
 public:
  using Vector = BasicValueVector<T>;
  using Sequence = BasicSequence<T>;
  using Dist = FiniteDistribution<T>;

  ProductPrior() = default;
  explicit ProductPrior(std::vector<Dist> steps) : steps_(std::move(steps)) {
    if (steps_.empty()) throw InvalidInput("prior needs at least one step");
    for (const auto& d : steps_)
      if (d.k() != steps_.front().k()) throw InvalidInput("dimension mismatch across prior steps");
    iid_ = std::all_of(steps_.begin(), steps_.end(), [&](const Dist& d) { return d == steps_.front(); });
  }

  static ProductPrior deterministic(const Sequence& s) {
    std::vector<Dist> steps;
    for (const auto& v : s.candidates()) steps.push_back(Dist::point(v));
    return ProductPrior(std::move(steps));
  }
  static ProductPrior iid(const Dist& d, std::size_t n) {
    if (n == 0) throw InvalidInput("prior needs at least one step");
    return ProductPrior(std::vector<Dist>(n, d));
  }

  std::size_t n() const { return steps_.size(); }
  std::size_t k() const { return steps_.front().k(); }
  bool iid() const { return iid_; }
  const std::vector<Dist>& steps() const { return steps_; }
  const Dist& step(std::size_t t) const { return steps_.at(t - 1); }
  bool is_deterministic() const {
    return std::all_of(steps_.begin(), steps_.end(), [](const Dist& d) { return d.size() == 1; });
  }

  // Number of realizations, saturating at `cap + 1`.
  std::size_t support_size(std::size_t cap) const {
    std::size_t total = 1;
    for (const auto& d : steps_) {
      if (total > cap / d.size() + 1) return cap + 1;
      total *= d.size();
      if (total > cap) return cap + 1;
    }
    return total;
  }

  ProductPrior truncated(std::size_t len) const {
    if (len < 1 || len > steps_.size()) throw InvalidInput("truncation length out of range");
    return ProductPrior(std::vector<Dist>(steps_.begin(), steps_.begin() + len));
  }

 private:
  std::vector<Dist> steps_;
  bool iid_ = true;
};

template <class T>
struct StoppingOutcome {
  std::optional<std::size_t> selection;  // empty means NoSelection
  T utility;
  T value;
};

std::size_t default_state_budget();

// Visits every realization of the prior with its probability.
template <class T, class Fn>
void for_each_realization(const ProductPrior<T>& prior, std::size_t budget, Fn&& fn) {
  if (prior.support_size(budget) > budget)
    throw ResourceLimit("prior support exceeds the enumeration budget of " + std::to_string(budget), prior.support_size(budget));
  const std::size_t n = prior.n();
  std::vector<std::size_t> idx(n, 0);
  std::vector<BasicValueVector<T>> cur(n);
  while (true) {
    T prob(1);
    for (std::size_t t = 0; t < n; ++t) {
      const auto& atom = prior.steps()[t].atoms()[idx[t]];
      cur[t] = atom.first;
      prob *= atom.second;
    }
    fn(BasicSequence<T>(cur), prob);
    std::size_t t = n;
    while (t > 0) {
      --t;
      if (++idx[t] < prior.steps()[t].size()) break;
      idx[t] = 0;
      if (t == 0) return;
    }
    if (n == 0) return;
  }
}

template <class T>
BasicValueVector<T> super_candidate(const BasicSequence<T>& prefix) {
  if (prefix.is_empty()) throw InvalidInput("super candidate of an empty prefix");
  auto s = prefix.at(1);
  for (std::size_t t = 2; t <= prefix.n(); ++t) s = s.join(prefix.at(t));
  return s;
}

template <class T>
BasicValueVector<T> super_candidate(const BasicSequence<T>& sigma, std::size_t t) {
  sigma.at(t);
  auto s = sigma.at(1);
  for (std::size_t w = 2; w <= t; ++w) s = s.join(sigma.at(w));
  return s;
}

namespace detail {
template <class T>
void check_params(const BasicSequence<T>& sigma, const AgentParams<T>& params) {
  if (!sigma.is_empty() && sigma.k() != params.k)
    throw InvalidInput("agent dimension " + std::to_string(params.k) + " does not match sequence dimension " + std::to_string(sigma.k()));
}
}  // namespace detail

// value minus lambda times the shortfall to the reference point
template <class T>
T loss_averse_utility(const T& value, const T& reference_norm, const T& lambda) {
  return value - lambda * (reference_norm - value);
}

template <class T>
T biased_gambler_utility(const BasicSequence<T>& sigma, std::size_t t, const AgentParams<T>& params) {
  detail::check_params(sigma, params);
  return loss_averse_utility(sigma.at(t).norm(), super_candidate(sigma, t).norm(), params.lambda);
}

template <class T>
T biased_prophet_utility(const BasicSequence<T>& sigma, std::size_t t, const AgentParams<T>& params) {
  detail::check_params(sigma, params);
  return loss_averse_utility(sigma.at(t).norm(), super_candidate(sigma).norm(), params.lambda);
}

template <class T>
T rational_utility(const BasicSequence<T>& sigma, std::size_t t) {
  return sigma.at(t).norm();
}

template <class T>
T no_selection_utility(const BasicSequence<T>& sigma, const AgentParams<T>& params) {
  detail::check_params(sigma, params);
  if (sigma.is_empty()) return T(0);
  return T(0) - params.lambda * super_candidate(sigma).norm();
}

template <class T>
T v_star(const BasicSequence<T>& sigma) {
  T best(0);
  for (const auto& v : sigma.candidates()) best = std::max(best, v.norm());
  return best;
}

// sum over dimensions of the per-dimension maximum
template <class T>
T dimension_max_sum(const BasicSequence<T>& sigma) {
  return super_candidate(sigma).norm();
}

template <class T>
StoppingOutcome<T> offline_optimal_biased(const BasicSequence<T>& sigma, const AgentParams<T>& params,
                                          bool allow_no_selection = true) {
  detail::check_params(sigma, params);
  if (sigma.is_empty()) throw InvalidInput("empty sequence");
  StoppingOutcome<T> best{std::nullopt, T(0), T(0)};
  bool have = false;
  auto s = sigma.at(1);
  for (std::size_t t = 1; t <= sigma.n(); ++t) {
    s = s.join(sigma.at(t));
    T value = sigma.at(t).norm();
    T u = loss_averse_utility(value, s.norm(), params.lambda);
    if (!have || u > best.utility) {
      best = {t, u, value};
      have = true;
    }
  }
  if (allow_no_selection) {
    T u = no_selection_utility(sigma, params);
    if (u > best.utility) best = {std::nullopt, u, T(0)};
  }
  return best;
}

template <class T>
StoppingOutcome<T> offline_optimal_prophet(const BasicSequence<T>& sigma, const AgentParams<T>& params) {
  detail::check_params(sigma, params);
  if (sigma.is_empty()) throw InvalidInput("empty sequence");
  StoppingOutcome<T> best{std::nullopt, T(0), T(0)};
  for (std::size_t t = 1; t <= sigma.n(); ++t) {
    T u = biased_prophet_utility(sigma, t, params);
    if (t == 1 || u > best.utility) best = {t, u, sigma.at(t).norm()};
  }
  return best;
}

template <class T>
BasicSequence<T> representation(const BasicSequence<T>& sigma) {
  auto out = BasicSequence<T>::empty(sigma.k());
  for (const auto& v : sigma.candidates()) {
    if (v.is_zero()) continue;
    const auto& seen = out.candidates();
    if (std::find(seen.begin(), seen.end(), v) == seen.end()) out.push_back(v);
  }
  return out;
}

template <class T>
bool is_succinct(const BasicSequence<T>& sigma) {
  return representation(sigma) == sigma;
}

// a point-wise dominates b
template <class T>
bool pointwise_dominates(const BasicSequence<T>& a, const BasicSequence<T>& b) {
  if (a.n() != b.n()) throw InvalidInput("point-wise dominance needs equal lengths");
  for (std::size_t i = 1; i <= a.n(); ++i)
    if (a.at(i).norm() < b.at(i).norm()) return false;
  return true;
}

// every option in a is worth more than the best option in b
template <class T>
bool higher_quality(const BasicSequence<T>& a, const BasicSequence<T>& b) {
  if (a.is_empty() || b.is_empty()) return false;
  T lo = a.at(1).norm();
  for (const auto& v : a.candidates()) lo = std::min(lo, v.norm());
  return lo > v_star(b);
}

template <class To, class From>
BasicValueVector<To> convert(const BasicValueVector<From>& v) {
  std::vector<To> e;
  for (const auto& x : v.entries()) e.push_back(convert_scalar<To>(x));
  return BasicValueVector<To>(std::move(e));
}

template <class To, class From>
BasicSequence<To> convert(const BasicSequence<From>& s) {
  std::vector<BasicValueVector<To>> c;
  for (const auto& v : s.candidates()) c.push_back(convert<To>(v));
  if (c.empty()) return BasicSequence<To>::empty(s.k());
  return BasicSequence<To>(std::move(c));
}

template <class To, class From>
ProductPrior<To> convert(const ProductPrior<From>& p) {
  std::vector<FiniteDistribution<To>> steps;
  for (const auto& d : p.steps()) {
    std::vector<typename FiniteDistribution<To>::Atom> atoms;
    for (const auto& [v, q] : d.atoms()) atoms.emplace_back(convert<To>(v), convert_scalar<To>(q));
    if constexpr (!Scalar<To>::exact) {
      // renormalize so rounding cannot break the unit-sum invariant
      To total(0);
      for (const auto& a : atoms) total += a.second;
      for (auto& a : atoms) a.second /= total;
    }
    steps.emplace_back(std::move(atoms));
  }
  return ProductPrior<To>(std::move(steps));
}

template <class To, class From>
AgentParams<To> convert(const AgentParams<From>& p) {
  return AgentParams<To>(convert_scalar<To>(p.lambda), p.k);
}

using ValueVector = BasicValueVector<Rational>;
using Sequence = BasicSequence<Rational>;
using Prior = ProductPrior<Rational>;
using Params = AgentParams<Rational>;

}  // namespace lap
