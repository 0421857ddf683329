#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lap/core.hpp"
#include "lap/instances.hpp"
#include "lap/policies.hpp"

namespace lap {

template <class T>
struct PolicyStats {
  T utility{0};
  T value{0};             // expected norm of the selected candidate, 0 on NoSelection
  T select_probability{0};
};

template <class T>
PolicyStats<T> exact_policy_stats(const ProductPrior<T>& prior, const BasicPolicy<T>& policy,
                                  const AgentParams<T>& params, std::size_t budget = default_state_budget()) {
  PolicyStats<T> s;
  auto branches = policy_branches(policy);
  for_each_realization(prior, budget, [&](const BasicSequence<T>& sigma, const T& prob) {
    for (const auto& [w, inclusive] : branches) {
      auto o = run_policy_branch(policy, inclusive, sigma, params);
      T q = prob * w;
      s.utility += q * o.utility;
      s.value += q * o.value;
      if (o.selection) s.select_probability += q;
    }
  });
  return s;
}

template <class T>
T exact_expectation(const ProductPrior<T>& prior, const BasicPolicy<T>& policy, const AgentParams<T>& params,
                    std::size_t budget = default_state_budget()) {
  return exact_policy_stats(prior, policy, params, budget).utility;
}

// E[V*], the rational prophet's expected utility.
template <class T>
T expected_vstar(const ProductPrior<T>& prior) {
  T e(0);
  for (const auto& [x, p] : vstar_distribution(prior)) e += x * p;
  return e;
}

// E[sum_j S_j*] using the per-dimension maxima.
template <class T>
T expected_dimension_max_sum(const ProductPrior<T>& prior) {
  T total(0);
  for (std::size_t j = 0; j < prior.k(); ++j) {
    std::vector<T> values;
    for (const auto& d : prior.steps())
      for (const auto& [v, p] : d.atoms()) values.push_back(v[j]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    T prev(0);
    for (const auto& x : values) {
      T cdf(1);
      for (const auto& d : prior.steps()) {
        T below(0);
        for (const auto& [v, p] : d.atoms())
          if (v[j] <= x) below += p;
        cdf *= below;
      }
      total += x * (cdf - prev);
      prev = cdf;
    }
  }
  return total;
}

template <class T>
T gamma_of(const ProductPrior<T>& prior) {
  T ev = expected_vstar(prior);
  if (!(ev > T(0))) throw InvalidInput("gamma is undefined when E[V*] = 0");
  return expected_dimension_max_sum(prior) / ev;
}

enum class Regime { Subcritical, Critical, Supercritical };
const char* to_string(Regime r);

template <class T>
Regime regime_of(const T& bias) {
  if (bias < T(1)) return Regime::Subcritical;
  if (bias == T(1)) return Regime::Critical;
  return Regime::Supercritical;
}

template <class T>
struct RatioReport {
  T e_prophet_rational{0};
  T e_gambler_rational_opt{0};
  T e_gambler_biased_opt{0};
  std::optional<T> prophet_ratio;  // empty: NonPositiveDenominator
  std::optional<T> online_ratio;
  T lambda{0};
  std::size_t k = 1;
  std::size_t n = 0;
  T bias{0};
  Regime regime = Regime::Subcritical;
};

template <class T>
RatioReport<T> ratio_report(const ProductPrior<T>& prior, const AgentParams<T>& params,
                            std::size_t budget = default_state_budget()) {
  RatioReport<T> r;
  r.e_prophet_rational = expected_vstar(prior);
  r.e_gambler_rational_opt = optimal_rational_policy(prior).expected_utility;
  r.e_gambler_biased_opt = optimal_biased_policy(prior, params, true, budget).expected_utility;
  if (r.e_gambler_biased_opt > T(0)) {
    r.prophet_ratio = r.e_prophet_rational / r.e_gambler_biased_opt;
    r.online_ratio = r.e_gambler_rational_opt / r.e_gambler_biased_opt;
  }
  r.lambda = params.lambda;
  r.k = params.k;
  r.n = prior.n();
  r.bias = params.bias();
  r.regime = regime_of(r.bias);
  return r;
}

template <class T>
struct ProphetBoundCheck {
  bool passed = false;
  T gamma{0};
  T alpha1{0}, alpha2{0};
  T threshold1{0}, threshold2{0};
  T e_threshold1{0}, e_threshold2{0};
  T e_vstar{0};
  T e_ugb{0};
  T factor{0};  // (1 - bias) * max{gamma/(1+lambda+k), 1/(2+lambda)}
};

template <class T>
ProphetBoundCheck<T> verify_prophet_bound(const ProductPrior<T>& prior, const AgentParams<T>& params,
                                          std::size_t budget = default_state_budget()) {
  ProphetBoundCheck<T> c;
  auto [a1, a2] = guarantee_alphas(params);
  c.alpha1 = a1;
  c.alpha2 = a2;
  c.e_vstar = expected_vstar(prior);
  c.gamma = gamma_of(prior);
  auto p1 = threshold_from_alpha(prior, a1);
  auto p2 = threshold_from_alpha(prior, a2);
  c.threshold1 = p1.threshold;
  c.threshold2 = p2.threshold;
  c.e_threshold1 = exact_expectation(prior, p1, params, budget);
  c.e_threshold2 = exact_expectation(prior, p2, params, budget);
  c.e_ugb = optimal_biased_policy(prior, params, true, budget).expected_utility;
  T lam = params.lambda;
  T k(static_cast<long>(params.k));
  T g = c.gamma / (T(1) + lam + k);
  T h = T(1) / (T(2) + lam);
  c.factor = (T(1) - params.bias()) * (g > h ? g : h);
  T best = c.e_threshold1 > c.e_threshold2 ? c.e_threshold1 : c.e_threshold2;
  T rhs = c.factor * c.e_vstar;
  c.passed = Scalar<T>::le(rhs, best) && Scalar<T>::le(best, c.e_ugb);
  return c;
}

template <class T>
struct OnlineBoundCheck {
  bool passed = false;
  T e_ugr{0};
  T e_ugb{0};
  T bound{0};  // (1 + lambda) / (1 - bias)
};

template <class T>
OnlineBoundCheck<T> verify_online_bound(const ProductPrior<T>& prior, const AgentParams<T>& params,
                                        std::size_t budget = default_state_budget()) {
  if (!(params.bias() < T(1))) throw InvalidInput("online bound needs lambda*(k-1) < 1");
  OnlineBoundCheck<T> c;
  c.e_ugr = optimal_rational_policy(prior).expected_utility;
  c.e_ugb = optimal_biased_policy(prior, params, true, budget).expected_utility;
  c.bound = (T(1) + params.lambda) / (T(1) - params.bias());
  // ratio <= bound, multiplied out so a zero denominator cannot divide
  c.passed = Scalar<T>::le(c.e_ugr * (T(1) - params.bias()), (T(1) + params.lambda) * c.e_ugb);
  return c;
}

template <class T>
struct ClassicalCheck {
  bool passed = false;
  T e_ugr{0};
  T e_vstar{0};
};

template <class T>
ClassicalCheck<T> verify_classical(const ProductPrior<T>& prior) {
  ClassicalCheck<T> c;
  c.e_ugr = optimal_rational_policy(prior).expected_utility;
  c.e_vstar = expected_vstar(prior);
  c.passed = Scalar<T>::le(c.e_vstar, T(2) * c.e_ugr);
  return c;
}

template <class T>
struct SurplusCheck {
  bool passed = false;
  T per_step{0};    // sum_t E[(|sigma_t| - T)^+]
  T vstar{0};       // E[(V* - T)^+]
  T dimensions{0};  // sum_j E[(S_j* - T)^+]
};

template <class T>
SurplusCheck<T> check_surplus_inequalities(const ProductPrior<T>& prior, const T& threshold,
                                           std::size_t budget = default_state_budget()) {
  SurplusCheck<T> c;
  auto plus = [&](const T& x) { return x > threshold ? T(x - threshold) : T(0); };
  for (const auto& d : prior.steps())
    for (const auto& [v, p] : d.atoms()) c.per_step += p * plus(v.norm());
  for_each_realization(prior, budget, [&](const BasicSequence<T>& sigma, const T& prob) {
    c.vstar += prob * plus(v_star(sigma));
    auto s = super_candidate(sigma);
    for (std::size_t j = 0; j < s.k(); ++j) c.dimensions += prob * plus(s[j]);
  });
  c.passed = Scalar<T>::le(c.vstar, c.per_step) && Scalar<T>::le(c.dimensions, c.per_step);
  return c;
}

// Lower bound on a threshold policy's expected utility in terms of its
// selection probability alpha and threshold T:
// ((1+lambda) alpha - k lambda) T + (1 - alpha) sum_t E[(|sigma_t| - T)^+].
template <class T>
T threshold_utility_lower_bound(const ProductPrior<T>& prior, const AgentParams<T>& params, const T& alpha,
                                const T& threshold) {
  T surplus(0);
  for (const auto& d : prior.steps())
    for (const auto& [v, p] : d.atoms())
      if (v.norm() > threshold) surplus += p * (v.norm() - threshold);
  T k(static_cast<long>(params.k));
  return ((T(1) + params.lambda) * alpha - k * params.lambda) * threshold + (T(1) - alpha) * surplus;
}

enum class Agent { Gambler, Prophet };

template <class T>
T best_offline_utility(const BasicSequence<T>& sigma, const AgentParams<T>& params, Agent agent) {
  return agent == Agent::Gambler ? offline_optimal_biased(sigma, params).utility
                                 : offline_optimal_prophet(sigma, params).utility;
}

// True iff the agent's best achievable utility strictly drops when `base`
// grows to `extended` by appending or prepending candidates.
template <class T>
bool detect_paradox_of_choice(const BasicSequence<T>& base, const BasicSequence<T>& extended,
                              const AgentParams<T>& params, Agent agent = Agent::Gambler) {
  if (base.is_empty() || base.n() > extended.n()) throw InvalidInput("base must be a non-empty part of the extension");
  if (base.k() != extended.k()) throw InvalidInput("dimension mismatch");
  bool is_prefix = extended.prefix(base.n()) == base;
  bool is_suffix = extended.suffix(base.n()) == base;
  if (!is_prefix && !is_suffix) throw InvalidInput("base is neither a prefix nor a suffix of the extension");
  return best_offline_utility(extended, params, agent) < best_offline_utility(base, params, agent);
}

template <class T>
struct QualityParadoxReport {
  bool prophet_worse = false;
  bool gambler_better = false;
  T prophet_low{0}, prophet_high{0};
  T gambler_low{0}, gambler_high{0};
};

// `high` must be of higher quality than `low`.
template <class T>
QualityParadoxReport<T> detect_quality_paradox(const BasicSequence<T>& low, const BasicSequence<T>& high,
                                               const AgentParams<T>& params) {
  if (!higher_quality(high, low)) throw InvalidInput("second sequence is not of higher quality than the first");
  QualityParadoxReport<T> r;
  r.prophet_low = offline_optimal_prophet(low, params).utility;
  r.prophet_high = offline_optimal_prophet(high, params).utility;
  r.gambler_low = offline_optimal_biased(low, params).utility;
  r.gambler_high = offline_optimal_biased(high, params).utility;
  r.prophet_worse = r.prophet_high < r.prophet_low;
  r.gambler_better = r.gambler_high >= r.gambler_low;
  if (!r.gambler_better) throw std::logic_error("gambler did worse on the higher-quality sequence");
  return r;
}

template <class T>
struct MonotonicityReport {
  bool lambda_patience = true;   // optimal at the lower lambda is more patient
  bool patience_value = true;    // ... and selects at least as much expected value
  bool suffix_append = true;     // longer horizons never lower the optimal utility
  bool subset_patience = true;   // longer horizons are at least as patient
  bool prepend = true;           // offline utility after prepending >= before / (1 + lambda)
  std::string detail;

  bool passed() const { return lambda_patience && patience_value && suffix_append && subset_patience && prepend; }
};

template <class T>
MonotonicityReport<T> check_monotonicity(const ProductPrior<T>& prior, const AgentParams<T>& params,
                                         const T& lambda_low, const T& lambda_high,
                                         std::size_t budget = default_state_budget()) {
  MonotonicityReport<T> r;
  auto fail = [&](bool& flag, const std::string& why) {
    if (flag) r.detail += (r.detail.empty() ? "" : "; ") + why;
    flag = false;
  };

  AgentParams<T> low(lambda_low, params.k), high(lambda_high, params.k);
  auto pi_low = optimal_biased_policy(prior, low, true, budget);
  auto pi_high = optimal_biased_policy(prior, high, true, budget);
  auto pc = patience_compare(pi_low.policy, pi_high.policy, prior, low, budget);
  if (pc.verdict != PatienceVerdict::MorePatient) {
    fail(r.lambda_patience, "lower-lambda policy stops at " + std::to_string(pc.stop_a) + " before " +
                                std::to_string(pc.stop_b) + " on " + pc.witness->str());
  } else {
    T v_low = exact_policy_stats(prior, pi_low.policy, low, budget).value;
    T v_high = exact_policy_stats(prior, pi_high.policy, high, budget).value;
    if (Scalar<T>::lt(v_low, v_high))
      fail(r.patience_value, "more patient policy selects less value: " + Scalar<T>::str(v_low) + " < " + Scalar<T>::str(v_high));
  }

  auto full = optimal_biased_policy(prior, params, true, budget);
  for (std::size_t len = 1; len < prior.n(); ++len) {
    auto part = optimal_biased_policy(prior.truncated(len), params, true, budget);
    if (Scalar<T>::lt(full.expected_utility, part.expected_utility))
      fail(r.suffix_append, "utility drops from " + Scalar<T>::str(part.expected_utility) + " at horizon " +
                                std::to_string(len) + " to " + Scalar<T>::str(full.expected_utility));
    auto sp = patience_compare(full.policy, part.policy, prior, params, budget);
    if (sp.verdict != PatienceVerdict::MorePatient)
      fail(r.subset_patience, "horizon " + std::to_string(prior.n()) + " policy stops before horizon " +
                                  std::to_string(len) + " policy on " + sp.witness->str());
  }

  if (prior.n() >= 2) {
    for_each_realization(prior, budget, [&](const BasicSequence<T>& sigma, const T&) {
      T before = offline_optimal_biased(sigma.suffix(sigma.n() - 1), params).utility;
      T after = offline_optimal_biased(sigma, params).utility;
      if (Scalar<T>::lt(after * (T(1) + params.lambda), before))
        fail(r.prepend, "prepending to " + sigma.suffix(sigma.n() - 1).str() + " drops utility from " +
                            Scalar<T>::str(before) + " to " + Scalar<T>::str(after));
    });
  }
  return r;
}

// ---- Monte Carlo ----

struct EstimateWithCI {
  double mean = 0;
  double half_width = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Runs `trials` trials split into fixed-size blocks, each with its own
// generator seeded from (seed, block). `trial` writes one value per
// statistic. Block results are combined in block order, so the output does
// not depend on `workers`.
using TrialFn = std::function<void(std::mt19937_64&, std::vector<double>&)>;
std::vector<EstimateWithCI> run_trials(std::uint64_t trials, std::uint64_t seed, std::size_t stats,
                                       const TrialFn& trial, unsigned workers = 0);

template <class T>
class PriorSampler {
 public:
  explicit PriorSampler(const ProductPrior<T>& prior) : prior_(prior) {
    for (const auto& d : prior.steps()) {
      std::vector<double> cum;
      double c = 0;
      for (const auto& a : d.atoms()) cum.push_back(c += Scalar<T>::to_double(a.second));
      cum.back() = 1.0;
      cdf_.push_back(std::move(cum));
    }
  }

  std::size_t draw_index(std::size_t step, std::mt19937_64& rng) const {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto& c = cdf_[step];
    return static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), u) - c.begin());
  }

  BasicSequence<T> draw(std::mt19937_64& rng) const {
    std::vector<BasicValueVector<T>> c;
    for (std::size_t t = 0; t < cdf_.size(); ++t) c.push_back(prior_.steps()[t].atoms()[draw_index(t, rng)].first);
    return BasicSequence<T>(std::move(c));
  }

 private:
  const ProductPrior<T>& prior_;
  std::vector<std::vector<double>> cdf_;
};

template <class T>
EstimateWithCI monte_carlo(const ProductPrior<T>& prior, const BasicPolicy<T>& policy, const AgentParams<T>& params,
                           std::uint64_t trials, std::uint64_t seed, unsigned workers = 0) {
  if (trials < 1) throw InvalidInput("trials must be at least 1");
  PriorSampler<T> sampler(prior);
  auto r = run_trials(trials, seed, 1,
                      [&](std::mt19937_64& rng, std::vector<double>& out) {
                        auto sigma = sampler.draw(rng);
                        out[0] = Scalar<T>::to_double(run_policy(policy, sigma, params, rng).utility);
                      },
                      workers);
  return r[0];
}

struct ReductionSimulation {
  EstimateWithCI match;      // r(sampled) equals the source sequence
  EstimateWithCI inversion;  // atom 2 shows up before atom 1
  double match_probability = 0;
  double inversion_probability = 0;
  double union_bound = 0;
};

// Simulates only atom indices, which is all the representation depends on.
ReductionSimulation simulate_reduction(const std::vector<double>& weights, double x, std::size_t n,
                                       std::uint64_t trials, std::uint64_t seed, unsigned workers = 0);

// Two readings of the exponent in the i.i.d. gap: the function as written,
// f(lambda,k) * sqrt(log n) with f = c - 1, and c * sqrt(log n) - 1 as the
// derivation produces, where c = min(1/sqrt(log bias), 1/(2 sqrt k)) / sqrt(2k).
struct IidGapExponents {
  double as_written = 0;
  double as_derived = 0;
};
IidGapExponents iid_gap_exponents(double lambda, std::size_t k, double n);

}  // namespace lap
