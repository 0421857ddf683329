#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lap/core.hpp"
#include "lap/instances.hpp"
#include "oracles.hpp"

using lap::Params;
using lap::Rational;
using lap::Sequence;
using lap::ValueVector;

namespace {
Rational R(const char* s) { return lap::parse_rational(s); }

Sequence motivating() { return {{1, 0}, {0, 1}, {2, 0}, {0, 2}, {4, 0}, {0, 4}}; }
}  // namespace

TEST_CASE("value vectors validate their entries") {
  CHECK_THROWS_AS(ValueVector(std::vector<Rational>{}), lap::InvalidInput);
  CHECK_THROWS_AS(ValueVector({1, -1}), lap::InvalidInput);
  CHECK_THROWS_AS(lap::BasicValueVector<double>({1.0, NAN}), lap::InvalidInput);
  CHECK_THROWS_AS((Sequence{{1, 0}, {1, 0, 0}}), lap::InvalidInput);
  CHECK(ValueVector({4, 3}).norm() == 7);
}

TEST_CASE("super candidate") {
  CHECK(lap::super_candidate(Sequence{{1, 0}, {0, 1}, {2, 0}}) == ValueVector({2, 1}));
  CHECK(lap::super_candidate(Sequence{{5, 3}}) == ValueVector({5, 3}));
  CHECK(lap::super_candidate(Sequence{{1, 0}, {0, 1}, {2, 0}, {0, 2}}) == ValueVector({2, 2}));
  CHECK_THROWS_AS(lap::super_candidate(Sequence::empty(2)), lap::InvalidInput);

  // nondecreasing in prefix length
  auto s = motivating();
  for (std::size_t t = 2; t <= s.n(); ++t)
    CHECK(lap::super_candidate(s, t).coordinatewise_geq(lap::super_candidate(s, t - 1)));
}

TEST_CASE("biased gambler utility") {
  CHECK(lap::biased_gambler_utility(motivating(), 5, Params(2, 2)) == 0);
  Sequence s{{3, 0}, {0, 2}, {4, 3}};
  CHECK(lap::biased_gambler_utility(s, 3, Params(R("0.5"), 2)) == 7);
  for (const char* l : {"0", "0.3", "5"}) CHECK(lap::biased_gambler_utility(s, 1, Params(R(l), 2)) == 3);
  CHECK_THROWS_AS(lap::biased_gambler_utility(s, 0, Params(1, 2)), lap::InvalidInput);
  CHECK_THROWS_AS(lap::biased_gambler_utility(s, 4, Params(1, 2)), lap::InvalidInput);
  CHECK_THROWS_AS(lap::biased_gambler_utility(s, 1, Params(1, 3)), lap::InvalidInput);
}

TEST_CASE("biased prophet utility") {
  auto s = lap::gen_identical_value<Rational>(3, 2);
  for (std::size_t t = 1; t <= 3; ++t) CHECK(lap::biased_prophet_utility(s, t, Params(1, 3)) == -2);
  Sequence two{{1, 0}, {0, 1}};
  CHECK(lap::biased_prophet_utility(two, 1, Params(1, 2)) == 0);
  CHECK(lap::biased_prophet_utility(motivating(), 3, Params(0, 2)) == 2);
}

TEST_CASE("rational and no-selection utilities") {
  CHECK(lap::rational_utility(Sequence{{4, 3}}, 1) == 7);
  CHECK(lap::rational_utility(Sequence{{0, 0}}, 1) == 0);
  CHECK(lap::rational_utility(motivating(), 6) == 4);
  CHECK(lap::no_selection_utility(Sequence{{1, 0}, {0, 1}}, Params(2, 2)) == -4);
  CHECK(lap::no_selection_utility(motivating(), Params(0, 2)) == 0);
}

TEST_CASE("no-selection bound on partial-sum rows below the threshold") {
  // all rows have value < T = 2, so declining costs at most lambda * k * T
  Params p(R("0.5"), 2);
  auto s = lap::gen_partial_sums<Rational>(2, 2, p.bias());
  CHECK(lap::no_selection_utility(s, p) >= -p.lambda * 2 * 2);
}

TEST_CASE("offline optimum") {
  auto o = lap::offline_optimal_biased(motivating(), Params(2, 2));
  CHECK(o.selection == std::optional<std::size_t>(1));
  CHECK(o.utility == 1);
  CHECK(lap::offline_optimal_biased(Sequence{{0, 0}}, Params(1, 2)).selection == std::optional<std::size_t>(1));
  auto lin = lap::gen_alternating_linear<Rational>(8, 2);
  CHECK(lap::offline_optimal_biased(lin, Params(1, 2)).utility == 1);

  // ties go to the smallest index
  Sequence tie{{1, 0}, {1, 0}};
  CHECK(lap::offline_optimal_biased(tie, Params(1, 2)).selection == std::optional<std::size_t>(1));
}

TEST_CASE("utility never exceeds value, with equality exactly at the reference point") {
  auto s = motivating();
  Params p(R("0.7"), 2);
  for (std::size_t t = 1; t <= s.n(); ++t) {
    Rational u = lap::biased_gambler_utility(s, t, p);
    CHECK(u <= s.at(t).norm());
    CHECK((u == s.at(t).norm()) == (s.at(t) == lap::super_candidate(s, t)));
  }
}

TEST_CASE("utility is monotone in lambda and in the reference point") {
  auto s = motivating();
  for (std::size_t t = 1; t <= s.n(); ++t) {
    CHECK(lap::biased_gambler_utility(s, t, Params(R("0.5"), 2)) >= lap::biased_gambler_utility(s, t, Params(1, 2)));
    CHECK(lap::loss_averse_utility<Rational>(3, 4, 1) >= lap::loss_averse_utility<Rational>(3, 5, 1));
  }
  // without loss aversion every agent agrees
  for (std::size_t t = 1; t <= s.n(); ++t) {
    CHECK(lap::biased_gambler_utility(s, t, Params(0, 2)) == lap::rational_utility(s, t));
    CHECK(lap::biased_prophet_utility(s, t, Params(0, 2)) == lap::rational_utility(s, t));
  }
}

TEST_CASE("one dimension reduces to the running maximum") {
  Sequence s{{3}, {1}, {5}, {2}};
  CHECK(lap::super_candidate(s, 2) == ValueVector({3}));
  CHECK(lap::biased_gambler_utility(s, 4, Params(1, 1)) == 2 - (5 - 2));
}

TEST_CASE("representation") {
  Sequence s{{1, 0}, {0, 0}, {1, 0}, {0, 1}};
  Sequence r{{1, 0}, {0, 1}};
  CHECK(lap::representation(s) == r);
  CHECK(lap::representation(r) == r);
  // r(1,2,1,2,3) = 1,2,3
  Sequence sym{{1}, {2}, {1}, {2}, {3}};
  CHECK(lap::representation(sym) == Sequence{{1}, {2}, {3}});
  CHECK(lap::is_succinct(r));
  CHECK_FALSE(lap::is_succinct(Sequence{{1, 0}, {1, 0}}));
  CHECK_FALSE(lap::is_succinct(Sequence{{0, 0}, {1, 0}}));
}

TEST_CASE("representation keeps the offline optima") {
  Sequence s{{1, 0}, {0, 3}, {1, 0}, {0, 0}, {2, 2}, {0, 3}};
  auto r = lap::representation(s);
  for (const char* l : {"0", "0.5", "1", "2"}) {
    Params p(R(l), 2);
    CHECK(lap::offline_optimal_biased(s, p).utility == lap::offline_optimal_biased(r, p).utility);
  }
  CHECK(lap::v_star(s) == lap::v_star(r));
}

TEST_CASE("dominance and quality predicates") {
  auto [a, b] = lap::gen_dominance_pair<Rational>(3, 4, 1, R("0.5"));
  CHECK(lap::pointwise_dominates(b, a));
  CHECK_THROWS_AS(lap::pointwise_dominates(a, Sequence{{1, 0, 0}}), lap::InvalidInput);
  auto [low, high] = lap::gen_quality_pair<Rational>(3, 2);
  CHECK(lap::higher_quality(high, low));
  CHECK_FALSE(lap::higher_quality(low, high));
}

TEST_CASE("distributions and priors validate") {
  using D = lap::FiniteDistribution<Rational>;
  CHECK_THROWS_AS(D({{ValueVector({1}), Rational(1, 2)}}), lap::InvalidInput);
  CHECK_THROWS_AS(D({{ValueVector({1}), Rational(1, 2)}, {ValueVector({1}), Rational(1, 2)}}), lap::InvalidInput);
  CHECK_THROWS_AS(D({{ValueVector({1}), Rational(0)}, {ValueVector({2}), Rational(1)}}), lap::InvalidInput);
  using DD = lap::FiniteDistribution<double>;
  CHECK_NOTHROW(DD({{lap::BasicValueVector<double>({1.0}), 0.1}, {lap::BasicValueVector<double>({2.0}), 0.9 + 1e-13}}));
  CHECK_THROWS_AS(DD({{lap::BasicValueVector<double>({1.0}), 0.1}, {lap::BasicValueVector<double>({2.0}), 0.91}}),
                  lap::InvalidInput);

  D d({{ValueVector({1}), Rational(1, 2)}, {ValueVector({3}), Rational(1, 2)}});
  CHECK(lap::Prior::iid(d, 3).iid());
  CHECK_FALSE(lap::Prior({d, D::point(ValueVector({1}))}).iid());
  CHECK(lap::Prior::iid(d, 3).support_size(100) == 8);
  CHECK(lap::Prior::iid(d, 30).support_size(1000) == 1001);
}

TEST_CASE("realization enumeration matches the oracle") {
  using D = lap::FiniteDistribution<Rational>;
  lap::Prior p({D({{ValueVector({1, 0}), Rational(1, 3)}, {ValueVector({0, 2}), Rational(2, 3)}}),
                D({{ValueVector({2, 2}), Rational(1, 4)}, {ValueVector({0, 0}), Rational(3, 4)}})});
  Rational total = 0, vstar = 0;
  std::size_t count = 0;
  lap::for_each_realization(p, 100, [&](const Sequence& s, const Rational& q) {
    total += q;
    vstar += q * lap::v_star(s);
    ++count;
  });
  CHECK(count == 4);
  CHECK(total == 1);
  CHECK(vstar == oracle::expected_vstar(oracle::from(p)));
  CHECK_THROWS_AS(lap::for_each_realization(p, 3, [](const Sequence&, const Rational&) {}), lap::ResourceLimit);
}

TEST_CASE("float mode agrees with exact mode") {
  auto s = lap::convert<double>(motivating());
  lap::AgentParams<double> p(2.0, 2);
  CHECK(lap::biased_gambler_utility(s, 5, p) == doctest::Approx(0.0));
  CHECK(lap::offline_optimal_biased(s, p).utility == doctest::Approx(1.0));
}
