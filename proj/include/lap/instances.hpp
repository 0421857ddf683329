#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lap/core.hpp"

namespace lap {

namespace detail {
// 1-based step t lands on dimension (t-1) mod k and row ceil(t/k).
inline std::size_t dim_of(std::size_t t, std::size_t k) { return (t - 1) % k; }
inline std::size_t row_of(std::size_t t, std::size_t k) { return (t + k - 1) / k; }

inline void check_nk(std::size_t n, std::size_t k) {
  if (n < 1) throw InvalidInput("n must be at least 1");
  if (k < 1) throw InvalidInput("k must be at least 1");
}
}  // namespace detail

template <class T>
BasicSequence<T> gen_alternating_geometric(std::size_t n, std::size_t k, const T& beta) {
  detail::check_nk(n, k);
  if (!(beta > T(0))) throw InvalidInput("beta must be positive");
  std::vector<BasicValueVector<T>> c;
  for (std::size_t t = 1; t <= n; ++t)
    c.push_back(BasicValueVector<T>::unit(k, detail::dim_of(t, k), pow_int(beta, static_cast<unsigned>(detail::row_of(t, k) - 1))));
  return BasicSequence<T>(std::move(c));
}

template <class T>
BasicSequence<T> gen_alternating_linear(std::size_t n, std::size_t k) {
  detail::check_nk(n, k);
  std::vector<BasicValueVector<T>> c;
  for (std::size_t t = 1; t <= n; ++t)
    c.push_back(BasicValueVector<T>::unit(k, detail::dim_of(t, k), T(static_cast<long>(detail::row_of(t, k)))));
  return BasicSequence<T>(std::move(c));
}

// w rows of k rotating unit vectors; row i (from 0) carries 1 + beta + ... + beta^i.
template <class T>
BasicSequence<T> gen_partial_sums(std::size_t w, std::size_t k, const T& beta) {
  detail::check_nk(w, k);
  if (beta < T(0)) throw InvalidInput("beta must be non-negative");
  std::vector<BasicValueVector<T>> c;
  T sum(0), power(1);
  for (std::size_t i = 0; i < w; ++i) {
    sum += power;
    power *= beta;
    for (std::size_t j = 0; j < k; ++j) c.push_back(BasicValueVector<T>::unit(k, j, sum));
  }
  return BasicSequence<T>(std::move(c));
}

// Smallest w with beta^w <= eps, for 0 <= beta < 1.
template <class T>
std::size_t worstcase_rows(const T& beta, const T& eps) {
  if (!(eps > T(0)) || eps > T(1)) throw InvalidInput("epsilon must lie in (0, 1]");
  if (beta < T(0) || !(beta < T(1))) throw InvalidInput("row count is only defined for 0 <= lambda*(k-1) < 1");
  std::size_t w = 1;
  T p = beta;
  while (p > eps) {
    p *= beta;
    ++w;
  }
  return w;
}

template <class T>
ProductPrior<T> gen_worstcase_mixed(std::size_t w, std::size_t k, const T& lambda, const T& eps,
                                    bool allow_supercritical = false) {
  AgentParams<T> params(lambda, k);
  if (!(eps > T(0)) || eps > T(1)) throw InvalidInput("epsilon must lie in (0, 1]");
  T beta = params.bias();
  if (!allow_supercritical && !(beta < T(1))) throw InvalidInput("worst-case construction needs lambda*(k-1) < 1");
  auto rows = gen_partial_sums(w, k, beta);
  T geometric(0), power(1);
  for (std::size_t i = 0; i < w; ++i) {
    geometric += power;
    power *= beta;
  }
  T big = (T(1) - eps) * (T(1) + lambda) * geometric / eps;
  std::vector<FiniteDistribution<T>> steps;
  for (const auto& v : rows.candidates()) steps.push_back(FiniteDistribution<T>::point(v));
  std::vector<typename FiniteDistribution<T>::Atom> last;
  last.emplace_back(BasicValueVector<T>::unit(k, 0, big), eps);
  if (eps < T(1)) last.emplace_back(BasicValueVector<T>::zero(k), T(1) - eps);
  steps.emplace_back(std::move(last));
  return ProductPrior<T>(std::move(steps));
}

template <class T>
BasicSequence<T> gen_identical_value(std::size_t k, const T& q) {
  detail::check_nk(1, k);
  if (!(q > T(0))) throw InvalidInput("q must be positive");
  std::vector<BasicValueVector<T>> c;
  for (std::size_t i = 0; i < k; ++i) c.push_back(BasicValueVector<T>::unit(k, i, q));
  return BasicSequence<T>(std::move(c));
}

template <class T>
BasicSequence<T> gen_salient_feature(std::size_t k, const T& a, const T& q) {
  detail::check_nk(1, k);
  if (!(a > T(0))) throw InvalidInput("a must be positive");
  if (!(q > T(1))) throw InvalidInput("q must exceed 1");
  std::vector<BasicValueVector<T>> c;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<T> e(k, a);
    e[i] = a + q;
    c.emplace_back(std::move(e));
  }
  return BasicSequence<T>(std::move(c));
}

template <class T>
std::pair<BasicSequence<T>, BasicSequence<T>> gen_quality_pair(std::size_t k, const T& q) {
  if (!(q > T(1))) throw InvalidInput("q must exceed 1");
  if (k < 2) throw InvalidInput("k must be at least 2");
  return {gen_identical_value(k, q), gen_identical_value(k, q * T(static_cast<long>(k)))};
}

// (sigma, sigma_prime) where sigma_prime point-wise dominates sigma.
template <class T>
std::pair<BasicSequence<T>, BasicSequence<T>> gen_dominance_pair(std::size_t k, std::size_t n, const T& lambda,
                                                                 const T& eps) {
  AgentParams<T> params(lambda, k);
  T beta = params.bias();
  if (!(eps > T(0)) || !(eps < beta)) throw InvalidInput("dominance pair needs 0 < epsilon < lambda*(k-1)");
  if (n < k + 1) throw InvalidInput("dominance pair needs n >= k + 1");
  std::vector<BasicValueVector<T>> a, b;
  for (std::size_t t = 1; t < n; ++t) {
    a.push_back(BasicValueVector<T>::unit(k, 0, T(1)));
    b.push_back(BasicValueVector<T>::unit(k, detail::dim_of(t, k), T(1)));
  }
  a.push_back(BasicValueVector<T>::unit(k, 0, T(1) + eps));
  b.push_back(BasicValueVector<T>::unit(k, 0, T(1) + beta));
  return {BasicSequence<T>(std::move(a)), BasicSequence<T>(std::move(b))};
}

enum class LogBase { Natural, Two };

struct ReductionScalars {
  double alpha_exp = 0;
  BigInt nominal_n;
};

// alpha = -log_m(x); nominal n = ceil(m^(alpha (m-1)) * (log m)^alpha).
ReductionScalars reduction_scalars(std::size_t m, const Rational& x, LogBase base);

template <class T>
struct ReductionMeta {
  std::size_t m = 0;
  T x{0};
  double alpha_exp = 0;
  BigInt nominal_n;
  T epsilon{0};
  LogBase log_base = LogBase::Natural;
  std::size_t n = 0;  // length actually used
  bool x_overridden = false;
};

template <class T>
struct ReductionOptions {
  std::optional<std::size_t> n_override;
  std::optional<T> x_override;
  LogBase log_base = LogBase::Natural;
  std::size_t budget = default_state_budget();
};

// Geometric weights x^(i-1)(1-x)/(1-x^m), i = 1..m.
template <class T>
std::vector<T> reduction_weights(std::size_t m, const T& x) {
  if (!(x > T(0)) || !(x < T(1))) throw InvalidInput("x must lie strictly between 0 and 1");
  T norm = (T(1) - x) / (T(1) - pow_int(x, static_cast<unsigned>(m)));
  std::vector<T> p;
  T power(1);
  for (std::size_t i = 0; i < m; ++i) {
    p.push_back(power * norm);
    power *= x;
  }
  if constexpr (Scalar<T>::exact) {
    T total(0);
    for (const auto& q : p) total += q;
    if (total != T(1)) throw std::logic_error("reduction weights do not sum to one");
  }
  return p;
}

namespace detail {
template <class T>
std::pair<ProductPrior<T>, ReductionMeta<T>> build_reduction(const BasicSequence<T>& sigma, const T& eps, const T& x,
                                                             const ReductionOptions<T>& opts) {
  const std::size_t m = sigma.n();
  ReductionMeta<T> meta;
  meta.m = m;
  meta.x = x;
  meta.epsilon = eps;
  meta.log_base = opts.log_base;
  meta.x_overridden = opts.x_override.has_value();
  auto w = reduction_weights(m, x);
  auto sc = reduction_scalars(m, convert_scalar<Rational>(x), opts.log_base);
  meta.alpha_exp = sc.alpha_exp;
  meta.nominal_n = sc.nominal_n;
  if (opts.n_override) {
    if (*opts.n_override < 1) throw InvalidInput("n_override must be positive");
    meta.n = *opts.n_override;
  } else {
    if (meta.nominal_n > BigInt(opts.budget))
      throw ResourceLimit("nominal reduction length exceeds the budget; pass an n override", meta.nominal_n.str());
    meta.n = meta.nominal_n.template convert_to<std::size_t>();
  }
  std::vector<typename FiniteDistribution<T>::Atom> atoms;
  for (std::size_t i = 0; i < m; ++i) atoms.emplace_back(sigma.at(i + 1), w[i]);
  return {ProductPrior<T>::iid(FiniteDistribution<T>(std::move(atoms)), meta.n), meta};
}
}  // namespace detail

// x = m^(-alpha) with alpha = log_m(U_pr / (eps * U_gb)) + 2, which is
// exactly eps * U_gb / (U_pr * m^2).
template <class T>
std::pair<ProductPrior<T>, ReductionMeta<T>> det_to_iid(const BasicSequence<T>& sigma, const T& eps,
                                                        const AgentParams<T>& params,
                                                        const ReductionOptions<T>& opts = {}) {
  if (!is_succinct(sigma)) throw InvalidInput("reduction needs a succinct sequence");
  if (sigma.n() < 2) throw InvalidInput("reduction needs at least two candidates");
  if (!(eps > T(0)) || !(eps < T(1))) throw InvalidInput("epsilon must lie strictly between 0 and 1");
  if (opts.x_override) return detail::build_reduction(sigma, eps, *opts.x_override, opts);
  T ugb = offline_optimal_biased(sigma, params).utility;
  if (!(ugb > T(0))) throw InvalidInput("reduction needs positive biased utility on the source sequence");
  T m(static_cast<long>(sigma.n()));
  return detail::build_reduction(sigma, eps, eps * ugb / (v_star(sigma) * m * m), opts);
}

// Probability that n i.i.d. draws over atoms 1..m have first occurrences in
// the order 1, 2, ..., m with every atom present.
template <class T>
T representation_match_probability(const std::vector<T>& weights, std::size_t n) {
  const std::size_t m = weights.size();
  std::vector<T> state(m + 1, T(0)), cum(m + 1, T(0));
  for (std::size_t j = 0; j < m; ++j) cum[j + 1] = cum[j] + weights[j];
  state[0] = T(1);
  for (std::size_t step = 0; step < n; ++step) {
    std::vector<T> next(m + 1, T(0));
    for (std::size_t j = 0; j <= m; ++j) {
      if (state[j] == T(0)) continue;
      next[j] += state[j] * cum[j];
      if (j < m) next[j + 1] += state[j] * weights[j];
    }
    state = std::move(next);
  }
  return state[m];
}

template <class T>
T inversion_probability(const T& x) {
  return x / (T(1) + x);
}

// Union bound on the mismatch probability: some atom never drawn, or some
// adjacent pair drawn out of order. The rarest atom has weight
// x^(m-1)(1-x)/(1-x^m), which is below x^(m-1), so (1 - x^(m-1))^n alone
// does not bound the miss probability.
template <class T>
T reduction_union_bound(std::size_t m, const T& x, std::size_t n) {
  T rarest = reduction_weights(m, x).back();
  T miss = pow_int(T(1) - rarest, static_cast<unsigned>(n));
  return T(static_cast<long>(m)) * miss + T(static_cast<long>(m - 1)) * inversion_probability(x);
}

struct RandomPriorOptions {
  std::size_t max_n = 4;
  std::size_t max_atoms = 3;
  std::vector<std::size_t> k_choices{1, 2, 3};
  std::optional<Rational> lambda = std::nullopt;  // fixed instead of drawn from the grid
  std::optional<std::size_t> k = std::nullopt;
  bool subcritical = true;        // keep lambda*(k-1) < 1
  long max_entry = 4;
};

struct RandomInstance {
  Prior prior;
  Params params;
};

// Reproducible small prior with integer entries and integer-weighted atoms.
RandomInstance random_small_prior(std::uint64_t seed, const RandomPriorOptions& opts = {});

}  // namespace lap
