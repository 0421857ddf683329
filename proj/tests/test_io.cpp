#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lap/io.hpp"

using lap::json;
using lap::Params;
using lap::Prior;
using lap::Rational;
using lap::Sequence;

namespace {
Rational R(const char* s) { return lap::parse_rational(s); }
}

TEST_CASE("sequence round trip") {
  Sequence s{{R("1/3"), 0}, {2, R("0.25")}};
  auto j = lap::to_json(s);
  CHECK(j["candidates"][0][0] == "1/3");
  auto back = lap::sequence_from_json<Rational>(lap::parse_json_text(j.dump()));
  CHECK(back.n() == 2);
  CHECK(back.at(1).entries()[0] == R("1/3"));
  CHECK(back.at(2).entries()[1] == R("1/4"));

  auto fj = lap::to_json(lap::convert<double>(s));
  CHECK(fj["candidates"][1][1].get<double>() == 0.25);
}

TEST_CASE("prior round trip") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto inst = lap::random_small_prior(seed);
    auto back = lap::prior_from_json<Rational>(lap::parse_json_text(lap::to_json(inst.prior).dump(2)));
    CHECK(back.n() == inst.prior.n());
    CHECK(back.iid() == inst.prior.iid());
    CHECK(lap::expected_vstar(back) == lap::expected_vstar(inst.prior));
    CHECK(lap::to_json(back) == lap::to_json(inst.prior));
  }
  // plain JSON numbers are read exactly
  auto p = lap::prior_from_json<Rational>(
      lap::parse_json_text(R"({"k":1,"steps":[{"atoms":[{"v":[1],"p":0.1},{"v":[2],"p":0.9}]}]})"));
  CHECK(p.step(1).atoms()[0].second == R("1/10"));
}

TEST_CASE("malformed and inconsistent input") {
  CHECK_THROWS_AS(lap::parse_json_text("{\"k\": 2,"), lap::MalformedJson);
  CHECK_THROWS_AS(lap::sequence_from_json<Rational>(json{{"k", 2}}), lap::MalformedJson);
  CHECK_THROWS_AS(lap::sequence_from_json<Rational>(json{{"k", 2}, {"candidates", {{1, 2, 3}}}}), lap::InvalidInput);
  CHECK_THROWS_AS(lap::sequence_from_json<Rational>(json{{"k", 0}, {"candidates", json::array()}}), lap::InvalidInput);
  CHECK_THROWS_AS(lap::sequence_from_json<Rational>(json{{"k", 1}, {"candidates", {{"x"}}}}), lap::InvalidInput);

  json bad_sum = lap::parse_json_text(R"({"k":1,"steps":[{"atoms":[{"v":[1],"p":"1/2"},{"v":[2],"p":"1/3"}]}]})");
  CHECK_THROWS_AS(lap::prior_from_json<Rational>(bad_sum), lap::InvalidInput);
  json bad_n = lap::parse_json_text(R"({"k":1,"n":2,"steps":[{"atoms":[{"v":[1],"p":1}]}]})");
  CHECK_THROWS_AS(lap::prior_from_json<Rational>(bad_n), lap::InvalidInput);
  json bad_iid = lap::parse_json_text(R"({"k":1,"iid":true,"steps":[{"atoms":[{"v":[1],"p":1}]},{"atoms":[{"v":[2],"p":1}]}]})");
  CHECK_THROWS_AS(lap::prior_from_json<Rational>(bad_iid), lap::InvalidInput);
  CHECK_THROWS_AS(lap::read_json_file("/nonexistent/prior.json"), lap::InvalidInput);
}

TEST_CASE("policy specs") {
  auto spec = lap::policy_spec_from_json(lap::parse_json_text(R"({"kind":"threshold","alpha":"1/2","seed":9})"));
  CHECK(spec.kind == lap::PolicyKind::Threshold);
  CHECK(*spec.alpha == "1/2");
  CHECK(*spec.seed == 9);
  auto again = lap::policy_spec_from_json(lap::to_json(spec));
  CHECK(*again.alpha == "1/2");

  auto prior = lap::gen_worstcase_mixed<Rational>(2, 2, R("0.5"), R("0.2"));
  Params params(R("0.5"), 2);
  auto pol = lap::materialize_policy(spec, prior, params);
  CHECK(pol.threshold == lap::threshold_from_alpha(prior, R("1/2")).threshold);
  CHECK(pol.seed == std::uint64_t{9});

  auto fixed = lap::policy_spec_from_json(json{{"kind", "fixed"}, {"t", 2}});
  CHECK(lap::materialize_policy(fixed, prior, params).index == 2);
  auto opt = lap::policy_spec_from_json(json{{"kind", "optimal-biased"}, {"allow_no_selection", false}});
  CHECK(lap::exact_expectation(prior, lap::materialize_policy(opt, prior, params), params) ==
        lap::optimal_biased_policy(prior, params, false).expected_utility);

  CHECK_THROWS_AS(lap::policy_spec_from_json(json{{"kind", "magic"}}), lap::InvalidInput);
  CHECK_THROWS_AS(lap::policy_spec_from_json(json{{"kind", "threshold"}}), lap::InvalidInput);
  CHECK_THROWS_AS(lap::policy_spec_from_json(json{{"kind", "fixed"}}), lap::InvalidInput);
  CHECK_THROWS_AS(lap::policy_spec_from_json(json{{"alpha", 1}}), lap::MalformedJson);
}

TEST_CASE("dp table json") {
  auto prior = lap::gen_worstcase_mixed<Rational>(2, 2, R("0.5"), R("0.2"));
  auto r = lap::optimal_biased_policy(prior, Params(R("0.5"), 2));
  auto j = lap::to_json(r);
  CHECK(j["expected_utility"] == "1");
  CHECK(j["steps"].size() == prior.n());
  CHECK(j["steps"][0]["states"].size() == 1);
  auto rat = lap::to_json(lap::optimal_rational_policy(prior));
  CHECK(rat["kind"] == "optimal-rational");
  CHECK(rat["steps"].back()["accept_at_or_above"] == "0");
}

TEST_CASE("ratio report json and csv") {
  auto geo = Prior::deterministic(lap::gen_alternating_geometric<Rational>(4, 2, 2));
  auto rep = lap::ratio_report(geo, Params(2, 2));
  auto j = lap::to_json(rep);
  CHECK(j["prophet_ratio"] == "2");
  CHECK(j["regime"] == "supercritical");

  auto row = lap::make_ratio_row(rep, "geo", "0");
  CHECK(row.prophet_bound == "unbounded");
  auto line = lap::to_csv(row);
  auto back = lap::ratio_row_from_csv(line);
  CHECK(lap::to_csv(back) == line);
  CHECK(lap::validate_ratio_row(back, true));

  auto tampered = back;
  tampered.prophet_ratio = "5";
  CHECK_FALSE(lap::validate_ratio_row(tampered, true));
  tampered = back;
  tampered.bias = "3";
  CHECK_FALSE(lap::validate_ratio_row(tampered, true));
  tampered = back;
  tampered.regime = "subcritical";
  CHECK_FALSE(lap::validate_ratio_row(tampered, true));
  CHECK_THROWS_AS(lap::ratio_row_from_csv("1,2,3"), lap::InvalidInput);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto inst = lap::random_small_prior(seed);
    auto r = lap::ratio_report(inst.prior, inst.params);
    auto rr = lap::make_ratio_row(r, "random", std::to_string(seed));
    CHECK(rr.regime == "subcritical");
    CHECK(lap::validate_ratio_row(lap::ratio_row_from_csv(lap::to_csv(rr)), true));
    auto rf = lap::make_ratio_row(lap::ratio_report(lap::convert<double>(inst.prior), lap::convert<double>(inst.params)),
                                  "random", std::to_string(seed));
    CHECK(lap::validate_ratio_row(lap::ratio_row_from_csv(lap::to_csv(rf)), false));
  }
  auto header = lap::ratio_csv_header();
  CHECK(std::count(header.begin(), header.end(), ',') == 13);
}
