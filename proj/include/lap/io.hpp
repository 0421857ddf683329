#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lap/analysis.hpp"
#include "lap/core.hpp"
#include "lap/policies.hpp"

namespace lap {

using json = nlohmann::json;

class MalformedJson : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

json parse_json_text(const std::string& text);
json read_json_file(const std::string& path);

// Exact mode writes "num/den" strings; float mode writes JSON numbers.
template <class T>
json scalar_to_json(const T& v);
template <class T>
T scalar_from_json(const json& j);

template <class T>
json to_json(const BasicSequence<T>& s);
template <class T>
BasicSequence<T> sequence_from_json(const json& j);

template <class T>
json to_json(const ProductPrior<T>& p);
template <class T>
ProductPrior<T> prior_from_json(const json& j);

// Policy description before it is bound to a prior.
struct PolicySpec {
  PolicyKind kind = PolicyKind::OptimalBiased;
  std::optional<std::string> alpha;
  std::optional<std::string> threshold;
  std::optional<std::string> atom_accept_prob;
  std::size_t index = 0;
  std::optional<std::uint64_t> seed;
  bool allow_no_selection = true;
};

PolicySpec policy_spec_from_json(const json& j);
json to_json(const PolicySpec& spec);

template <class T>
BasicPolicy<T> materialize_policy(const PolicySpec& spec, const ProductPrior<T>& prior, const AgentParams<T>& params,
                                  std::size_t budget = default_state_budget());

template <class T>
json to_json(const DPResult<T>& r);

template <class T>
json to_json(const RatioReport<T>& r);

// One CSV row per (prior, params) cell.
struct RatioRow {
  std::string lambda, k, bias, n, e_upr, e_ugr, e_ugb, prophet_ratio, online_ratio, regime, instance_id, seed;
  std::string prophet_bound, online_bound;
};

std::string ratio_csv_header();
std::string to_csv(const RatioRow& row);
RatioRow ratio_row_from_csv(const std::string& line);

template <class T>
RatioRow make_ratio_row(const RatioReport<T>& r, const std::string& instance_id, const std::string& seed);

// Re-checks a parsed row: ratios equal the expectation quotients, bias is
// lambda*(k-1) and the regime matches the bias.
bool validate_ratio_row(const RatioRow& row, bool exact);

}  // namespace lap
