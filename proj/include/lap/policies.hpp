#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "lap/core.hpp"

namespace lap {

enum class PolicyKind { Threshold, FixedIndex, OptimalBiased, OptimalRational, AcceptLast };

const char* to_string(PolicyKind kind);

// Backward-induction table. For the biased DP, continuation[t] maps the super
// candidate after step t to the optimal value of continuing past t. The
// rational DP needs one number per step.
template <class T>
struct DPTable {
  bool rational = false;
  bool allow_no_selection = true;
  T lambda{0};
  std::size_t k = 1;
  std::vector<FiniteDistribution<T>> steps;
  std::vector<std::map<BasicValueVector<T>, T>> continuation;  // index 1..horizon
  std::vector<T> rational_continuation;                       // index 0..horizon

  std::size_t horizon() const { return steps.size(); }
};

template <class T>
struct BasicPolicy {
  PolicyKind kind = PolicyKind::AcceptLast;
  T threshold{0};
  T atom_accept_prob{0};
  std::size_t index = 0;
  std::optional<std::uint64_t> seed;
  std::shared_ptr<const DPTable<T>> table;

  bool randomized() const {
    return kind == PolicyKind::Threshold && atom_accept_prob > T(0) && atom_accept_prob < T(1);
  }
};

template <class T>
struct DPResult {
  T expected_utility;
  std::shared_ptr<const DPTable<T>> table;
  std::size_t state_count = 0;
  BasicPolicy<T> policy;
};

template <class T>
BasicPolicy<T> threshold_policy(T threshold, T atom_accept_prob, std::optional<std::uint64_t> seed = std::nullopt) {
  if (threshold < T(0)) throw InvalidInput("threshold must be non-negative");
  if (atom_accept_prob < T(0) || atom_accept_prob > T(1)) throw InvalidInput("atom acceptance probability must lie in [0,1]");
  BasicPolicy<T> p;
  p.kind = PolicyKind::Threshold;
  p.threshold = std::move(threshold);
  p.atom_accept_prob = std::move(atom_accept_prob);
  p.seed = seed;
  return p;
}

template <class T>
BasicPolicy<T> fixed_index_policy(std::size_t t) {
  if (t < 1) throw InvalidInput("fixed index must be at least 1");
  BasicPolicy<T> p;
  p.kind = PolicyKind::FixedIndex;
  p.index = t;
  return p;
}

template <class T>
BasicPolicy<T> accept_last_policy() {
  return BasicPolicy<T>{};
}

// Exact distribution of the largest candidate value, ascending by value.
template <class T>
std::vector<std::pair<T, T>> vstar_distribution(const ProductPrior<T>& prior) {
  std::vector<T> values;
  for (const auto& d : prior.steps())
    for (const auto& [v, p] : d.atoms()) values.push_back(v.norm());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<std::pair<T, T>> out;
  T prev_cdf(0);
  for (const auto& x : values) {
    T cdf(1);
    for (const auto& d : prior.steps()) {
      T below(0);
      for (const auto& [v, p] : d.atoms())
        if (v.norm() <= x) below += p;
      cdf *= below;
    }
    T mass = cdf - prev_cdf;
    if (mass > T(0)) out.emplace_back(x, mass);
    prev_cdf = cdf;
  }
  return out;
}

// A^alpha: picks the smallest atom T of V* with Pr[V* > T] <= alpha and
// splits the atom so that the overall selection probability is alpha.
template <class T>
BasicPolicy<T> threshold_from_alpha(const ProductPrior<T>& prior, const T& alpha,
                                    std::optional<std::uint64_t> seed = std::nullopt) {
  if (!(alpha > T(0)) || !(alpha < T(1))) throw InvalidInput("alpha must lie strictly between 0 and 1");
  auto dist = vstar_distribution(prior);
  T above(1);
  for (const auto& [x, mass] : dist) {
    above -= mass;
    if constexpr (!Scalar<T>::exact)
      if (above < T(0)) above = T(0);
    if (above <= alpha) {
      T p = (alpha - above) / mass;
      if (p > T(1)) p = T(1);
      return threshold_policy(x, p, seed);
    }
  }
  return threshold_policy(dist.back().first, T(1), seed);
}

template <class T>
std::pair<T, T> guarantee_alphas(const AgentParams<T>& params) {
  if (!(params.bias() < T(1))) throw InvalidInput("guarantee thresholds need lambda*(k-1) < 1");
  T k(static_cast<long>(params.k));
  const T& l = params.lambda;
  return {(l * k + T(1)) / (T(2) + l), k * (T(1) + l) / (T(1) + l + k)};
}

// Deterministic components of a policy with their mixing weights. A split
// threshold is "accept at >= T" with weight p and "accept at > T" otherwise.
template <class T>
std::vector<std::pair<T, bool>> policy_branches(const BasicPolicy<T>& policy) {
  if (policy.kind != PolicyKind::Threshold) return {{T(1), true}};
  std::vector<std::pair<T, bool>> out;
  if (policy.atom_accept_prob > T(0)) out.emplace_back(policy.atom_accept_prob, true);
  if (policy.atom_accept_prob < T(1)) out.emplace_back(T(1) - policy.atom_accept_prob, false);
  return out;
}

template <class T>
std::size_t policy_horizon(const BasicPolicy<T>& policy, std::size_t n) {
  return policy.table ? policy.table->horizon() : n;
}

namespace detail {

template <class T>
const T& lookup_continuation(const DPTable<T>& table, std::size_t t, const BasicValueVector<T>& s) {
  auto it = table.continuation[t].find(s);
  if (it == table.continuation[t].end())
    throw InvalidInput("state " + s.str() + " at step " + std::to_string(t) + " is outside the support the policy was solved for");
  return it->second;
}

template <class T>
bool optimal_accepts(const DPTable<T>& table, std::size_t t, const BasicValueVector<T>& candidate,
                     const BasicValueVector<T>& s_after) {
  if (table.rational) return candidate.norm() >= table.rational_continuation[t];
  if (t == table.horizon() && !table.allow_no_selection) return true;
  T u = loss_averse_utility(candidate.norm(), s_after.norm(), table.lambda);
  return u >= lookup_continuation(table, t, s_after);
}

}  // namespace detail

// Runs one deterministic branch online.
template <class T>
StoppingOutcome<T> run_policy_branch(const BasicPolicy<T>& policy, bool inclusive, const BasicSequence<T>& sigma,
                                     const AgentParams<T>& params) {
  detail::check_params(sigma, params);
  if (sigma.is_empty()) throw InvalidInput("empty sequence");
  const std::size_t n = sigma.n();
  if (policy.kind == PolicyKind::FixedIndex && policy.index > n)
    throw InvalidInput("fixed index " + std::to_string(policy.index) + " beyond sequence length " + std::to_string(n));
  if (policy.table && policy.table->k != sigma.k()) throw InvalidInput("policy dimension does not match sequence");
  const std::size_t last = std::min(n, policy_horizon(policy, n));
  auto s = BasicValueVector<T>::zero(sigma.k());
  for (std::size_t t = 1; t <= last; ++t) {
    const auto& c = sigma.at(t);
    s = s.join(c);
    bool accept = false;
    switch (policy.kind) {
      case PolicyKind::Threshold:
        accept = inclusive ? c.norm() >= policy.threshold : c.norm() > policy.threshold;
        break;
      case PolicyKind::FixedIndex:
        accept = t == policy.index;
        break;
      case PolicyKind::AcceptLast:
        accept = t == n;
        break;
      case PolicyKind::OptimalBiased:
      case PolicyKind::OptimalRational:
        accept = detail::optimal_accepts(*policy.table, t, c, s);
        break;
    }
    if (accept) {
      T value = c.norm();
      return {t, loss_averse_utility(value, s.norm(), params.lambda), value};
    }
  }
  return {std::nullopt, no_selection_utility(sigma, params), T(0)};
}

template <class T, class Rng>
StoppingOutcome<T> run_policy(const BasicPolicy<T>& policy, const BasicSequence<T>& sigma, const AgentParams<T>& params,
                              Rng& rng) {
  bool inclusive = true;
  if (policy.kind == PolicyKind::Threshold) {
    if (policy.randomized()) {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      inclusive = coin(rng) < Scalar<T>::to_double(policy.atom_accept_prob);
    } else {
      inclusive = policy.atom_accept_prob == T(1);
    }
  }
  return run_policy_branch(policy, inclusive, sigma, params);
}

template <class T>
StoppingOutcome<T> run_policy(const BasicPolicy<T>& policy, const BasicSequence<T>& sigma, const AgentParams<T>& params) {
  std::mt19937_64 rng(policy.seed.value_or(0));
  return run_policy(policy, sigma, params, rng);
}

template <class T>
DPResult<T> optimal_biased_policy(const ProductPrior<T>& prior, const AgentParams<T>& params,
                                  bool allow_no_selection = true, std::size_t budget = default_state_budget()) {
  if (prior.k() != params.k) throw InvalidInput("agent dimension does not match prior dimension");
  const std::size_t n = prior.n();
  auto table = std::make_shared<DPTable<T>>();
  table->rational = false;
  table->allow_no_selection = allow_no_selection;
  table->lambda = params.lambda;
  table->k = prior.k();
  table->steps = prior.steps();
  table->continuation.resize(n + 1);

  // forward pass: reachable super candidates after each step
  std::vector<std::vector<BasicValueVector<T>>> reach(n + 1);
  reach[0].push_back(BasicValueVector<T>::zero(prior.k()));
  std::size_t count = 1;
  for (std::size_t t = 1; t <= n; ++t) {
    std::map<BasicValueVector<T>, bool> seen;
    for (const auto& s : reach[t - 1])
      for (const auto& [v, p] : prior.step(t).atoms()) seen.emplace(s.join(v), true);
    count += seen.size();
    if (count > budget)
      throw ResourceLimit("dynamic program exceeds the state budget of " + std::to_string(budget), count);
    for (auto& [s, unused] : seen) reach[t].push_back(s);
  }

  auto& cont = table->continuation;
  for (const auto& s : reach[n]) cont[n].emplace(s, T(0) - params.lambda * s.norm());
  // value of entering step t+1 from state s; for t = n-1 with forced
  // selection the last candidate is always taken
  auto value_before = [&](std::size_t t, const BasicValueVector<T>& s) {
    T total(0);
    for (const auto& [v, p] : prior.step(t + 1).atoms()) {
      auto s2 = s.join(v);
      T u = loss_averse_utility(v.norm(), s2.norm(), params.lambda);
      if (t + 1 == n && !allow_no_selection) {
        total += p * u;
      } else {
        const T& g = cont[t + 1].at(s2);
        total += p * (u >= g ? u : g);
      }
    }
    return total;
  };
  for (std::size_t t = n; t-- > 1;)
    for (const auto& s : reach[t]) cont[t].emplace(s, value_before(t, s));
  T expected = value_before(0, reach[0].front());

  DPResult<T> r{expected, table, count, {}};
  r.policy.kind = PolicyKind::OptimalBiased;
  r.policy.table = table;
  return r;
}

template <class T>
DPResult<T> optimal_rational_policy(const ProductPrior<T>& prior) {
  const std::size_t n = prior.n();
  auto table = std::make_shared<DPTable<T>>();
  table->rational = true;
  table->allow_no_selection = false;
  table->k = prior.k();
  table->steps = prior.steps();
  table->continuation.resize(n + 1);
  table->rational_continuation.assign(n + 1, T(0));
  auto& c = table->rational_continuation;
  for (std::size_t t = n; t >= 1; --t) {
    T total(0);
    for (const auto& [v, p] : prior.step(t).atoms()) {
      T x = v.norm();
      total += p * (x >= c[t] ? x : c[t]);
    }
    c[t - 1] = total;
  }
  DPResult<T> r{c[0], table, n + 1, {}};
  r.policy.kind = PolicyKind::OptimalRational;
  r.policy.table = table;
  return r;
}

enum class PatienceVerdict { MorePatient, Incomparable };

template <class T>
struct PatienceResult {
  PatienceVerdict verdict = PatienceVerdict::MorePatient;
  std::optional<BasicSequence<T>> witness;
  std::size_t stop_a = 0;
  std::size_t stop_b = 0;
  std::size_t realizations = 0;
};

// Stop index where NoSelection counts as one past the policy's horizon.
template <class T>
std::size_t stop_index(const BasicPolicy<T>& policy, const StoppingOutcome<T>& o, std::size_t n) {
  return o.selection ? *o.selection : policy_horizon(policy, n) + 1;
}

// Is `a` at least as patient as `b` on every realization (and every coin
// outcome of either policy)?
template <class T>
PatienceResult<T> patience_compare(const BasicPolicy<T>& a, const BasicPolicy<T>& b, const ProductPrior<T>& prior,
                                   const AgentParams<T>& params, std::size_t budget = default_state_budget()) {
  PatienceResult<T> result;
  auto ba = policy_branches(a);
  auto bb = policy_branches(b);
  for_each_realization(prior, budget, [&](const BasicSequence<T>& sigma, const T&) {
    ++result.realizations;
    if (result.verdict == PatienceVerdict::Incomparable) return;
    for (const auto& [wa, ia] : ba)
      for (const auto& [wb, ib] : bb) {
        std::size_t sa = stop_index(a, run_policy_branch(a, ia, sigma, params), sigma.n());
        std::size_t sb = stop_index(b, run_policy_branch(b, ib, sigma, params), sigma.n());
        if (sa < sb) {
          result.verdict = PatienceVerdict::Incomparable;
          result.witness = sigma;
          result.stop_a = sa;
          result.stop_b = sb;
          return;
        }
      }
  });
  return result;
}

using Policy = BasicPolicy<Rational>;

}  // namespace lap
