#include "lap/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace lap {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
  }
  return "?";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

constexpr std::uint64_t kBlock = 1024;

struct BlockSums {
  std::vector<double> sum, sumsq, lo, hi;
};

}  // namespace

std::vector<EstimateWithCI> run_trials(std::uint64_t trials, std::uint64_t seed, std::size_t stats,
                                       const TrialFn& trial, unsigned workers) {
  if (trials < 1) throw InvalidInput("trials must be at least 1");
  const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<BlockSums> results(blocks);
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    std::vector<double> values(stats);
    for (std::uint64_t b; (b = next.fetch_add(1)) < blocks;) {
      std::mt19937_64 rng(splitmix64(seed ^ splitmix64(b)));
      BlockSums s{std::vector<double>(stats, 0.0), std::vector<double>(stats, 0.0),
                  std::vector<double>(stats, INFINITY), std::vector<double>(stats, -INFINITY)};
      std::uint64_t count = std::min(kBlock, trials - b * kBlock);
      for (std::uint64_t i = 0; i < count; ++i) {
        trial(rng, values);
        for (std::size_t j = 0; j < stats; ++j) {
          s.sum[j] += values[j];
          s.sumsq[j] += values[j] * values[j];
          s.lo[j] = std::min(s.lo[j], values[j]);
          s.hi[j] = std::max(s.hi[j], values[j]);
        }
      }
      results[b] = std::move(s);
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, blocks));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  std::vector<EstimateWithCI> out(stats);
  const double n = static_cast<double>(trials);
  for (std::size_t j = 0; j < stats; ++j) {
    double sum = 0, sumsq = 0, lo = INFINITY, hi = -INFINITY;
    for (const auto& r : results) {
      sum += r.sum[j];
      sumsq += r.sumsq[j];
      lo = std::min(lo, r.lo[j]);
      hi = std::max(hi, r.hi[j]);
    }
    double mean = sum / n;
    double hw = 0;
    if (lo != hi && trials > 1) {
      double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1));
      hw = 1.96 * std::sqrt(var / n);
    }
    out[j] = {mean, hw, trials, seed};
  }
  return out;
}

ReductionSimulation simulate_reduction(const std::vector<double>& weights, double x, std::size_t n,
                                       std::uint64_t trials, std::uint64_t seed, unsigned workers) {
  const std::size_t m = weights.size();
  if (m < 2) throw InvalidInput("reduction needs at least two atoms");
  std::vector<double> cum;
  double c = 0;
  for (double w : weights) cum.push_back(c += w);
  cum.back() = 1.0;
  auto draw = [&](std::mt19937_64& rng) {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
  };
  auto est = run_trials(trials, seed, 2,
                        [&](std::mt19937_64& rng, std::vector<double>& out) {
                          std::size_t seen = 0;  // atoms 0..seen-1 have appeared, in order
                          bool ok = true;
                          int first_of_pair = -1;
                          for (std::size_t i = 0; i < n; ++i) {
                            std::size_t a = draw(rng);
                            if (first_of_pair < 0 && a <= 1) first_of_pair = static_cast<int>(a);
                            if (a == seen) ++seen;
                            else if (a > seen) ok = false;
                          }
                          // neither of the first two atoms appeared: keep drawing
                          while (first_of_pair < 0) {
                            std::size_t a = draw(rng);
                            if (a <= 1) first_of_pair = static_cast<int>(a);
                          }
                          out[0] = ok && seen == m ? 1.0 : 0.0;
                          out[1] = first_of_pair == 1 ? 1.0 : 0.0;
                        },
                        workers);
  ReductionSimulation r;
  r.match = est[0];
  r.inversion = est[1];
  r.match_probability = representation_match_probability(weights, n);
  r.inversion_probability = inversion_probability(x);
  r.union_bound = reduction_union_bound(m, x, n);
  return r;
}

IidGapExponents iid_gap_exponents(double lambda, std::size_t k, double n) {
  double bias = lambda * static_cast<double>(k - 1);
  if (!(bias > 1)) throw InvalidInput("the i.i.d. gap exponent needs lambda*(k-1) > 1");
  double kk = static_cast<double>(k);
  double c = std::min(1.0 / std::sqrt(std::log(bias)), 1.0 / (2.0 * std::sqrt(kk))) / std::sqrt(2.0 * kk);
  double root = std::sqrt(std::log(n));
  return {(c - 1.0) * root, c * root - 1.0};
}

}  // namespace lap
