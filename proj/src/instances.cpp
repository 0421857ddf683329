#include "lap/instances.hpp"

#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace lap {

using Float50 = boost::multiprecision::cpp_bin_float_50;

ReductionScalars reduction_scalars(std::size_t m, const Rational& x, LogBase base) {
  if (m < 2) throw InvalidInput("reduction needs m >= 2");
  if (!(x > 0) || !(x < 1)) throw InvalidInput("x must lie strictly between 0 and 1");
  Float50 xf = Float50(numerator(x).str()) / Float50(denominator(x).str());
  Float50 lm = log(Float50(m));
  Float50 alpha = -log(xf) / lm;
  Float50 base_log = base == LogBase::Natural ? lm : lm / log(Float50(2));
  // log of the nominal length, natural base
  Float50 ln_n = alpha * Float50(m - 1) * lm + alpha * log(base_log);
  if (ln_n > Float50(200000))
    throw ResourceLimit("nominal reduction length is too large to represent", "e^" + ln_n.str(6));
  Float50 nominal = ceil(exp(ln_n));
  if (nominal < 1) nominal = 1;
  ReductionScalars out;
  out.alpha_exp = alpha.convert_to<double>();
  out.nominal_n = BigInt(nominal.convert_to<boost::multiprecision::cpp_int>().str());
  return out;
}

RandomInstance random_small_prior(std::uint64_t seed, const RandomPriorOptions& opts) {
  std::mt19937_64 rng(seed);
  auto draw = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };

  std::size_t k = opts.k ? *opts.k : opts.k_choices.at(static_cast<std::size_t>(draw(0, static_cast<long>(opts.k_choices.size()) - 1)));
  Rational lambda;
  if (opts.lambda) {
    lambda = *opts.lambda;
  } else {
    std::vector<Rational> grid;
    for (long j = 0; j <= 20; ++j) {
      Rational l(j, 10);
      if (!opts.subcritical || l * Rational(static_cast<long>(k) - 1) < 1) grid.push_back(l);
    }
    lambda = grid.at(static_cast<std::size_t>(draw(0, static_cast<long>(grid.size()) - 1)));
  }
  Params params(lambda, k);

  while (true) {
    std::size_t n = static_cast<std::size_t>(draw(1, static_cast<long>(opts.max_n)));
    std::vector<FiniteDistribution<Rational>> steps;
    bool any_positive = false;
    for (std::size_t t = 0; t < n; ++t) {
      std::size_t atoms = static_cast<std::size_t>(draw(1, static_cast<long>(opts.max_atoms)));
      std::vector<ValueVector> support;
      while (support.size() < atoms) {
        std::vector<Rational> e;
        for (std::size_t j = 0; j < k; ++j) e.emplace_back(draw(0, opts.max_entry));
        ValueVector v(std::move(e));
        if (std::find(support.begin(), support.end(), v) == support.end()) support.push_back(v);
      }
      std::vector<long> weights;
      long total = 0;
      for (std::size_t i = 0; i < atoms; ++i) {
        weights.push_back(draw(1, 4));
        total += weights.back();
      }
      std::vector<FiniteDistribution<Rational>::Atom> a;
      for (std::size_t i = 0; i < atoms; ++i) {
        if (!support[i].is_zero()) any_positive = true;
        a.emplace_back(support[i], Rational(weights[i], total));
      }
      steps.emplace_back(std::move(a));
    }
    if (any_positive) return {Prior(std::move(steps)), params};
  }
}

}  // namespace lap
