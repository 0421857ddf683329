#include "lap/io.hpp"

#include <fstream>
#include <sstream>

namespace lap {

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedJson(e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

namespace {

std::string number_text(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number_unsigned()) return std::to_string(j.get<unsigned long long>());
  if (j.is_number_float()) return format_double(j.get<double>());
  throw MalformedJson("expected a number or numeric string, got " + j.dump());
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw MalformedJson(std::string("missing field '") + name + "'");
  return j.at(name);
}

}  // namespace

template <>
json scalar_to_json<Rational>(const Rational& v) {
  return format_rational(v);
}
template <>
json scalar_to_json<double>(const double& v) {
  return v;
}
template <>
Rational scalar_from_json<Rational>(const json& j) {
  return parse_rational(number_text(j));
}
template <>
double scalar_from_json<double>(const json& j) {
  if (j.is_number()) return j.get<double>();
  return parse_rational(number_text(j)).convert_to<double>();
}

namespace {
template <class T>
json vector_json(const BasicValueVector<T>& v) {
  json a = json::array();
  for (const auto& x : v.entries()) a.push_back(scalar_to_json(x));
  return a;
}
template <class T>
BasicValueVector<T> vector_from(const json& j, std::size_t k) {
  if (!j.is_array()) throw MalformedJson("candidate must be an array");
  std::vector<T> e;
  for (const auto& x : j) e.push_back(scalar_from_json<T>(x));
  if (e.size() != k) throw InvalidInput("candidate " + j.dump() + " does not have dimension " + std::to_string(k));
  return BasicValueVector<T>(std::move(e));
}
std::size_t read_k(const json& j) {
  const auto& k = field(j, "k");
  if (!k.is_number_integer() || k.get<long long>() < 1) throw InvalidInput("k must be a positive integer");
  return static_cast<std::size_t>(k.get<long long>());
}
}  // namespace

template <class T>
json to_json(const BasicSequence<T>& s) {
  json c = json::array();
  for (const auto& v : s.candidates()) c.push_back(vector_json(v));
  return {{"k", s.k()}, {"candidates", c}};
}

template <class T>
BasicSequence<T> sequence_from_json(const json& j) {
  std::size_t k = read_k(j);
  const auto& c = field(j, "candidates");
  if (!c.is_array()) throw MalformedJson("'candidates' must be an array");
  std::vector<BasicValueVector<T>> out;
  for (const auto& v : c) out.push_back(vector_from<T>(v, k));
  return BasicSequence<T>(std::move(out));
}

template <class T>
json to_json(const ProductPrior<T>& p) {
  json steps = json::array();
  for (const auto& d : p.steps()) {
    json atoms = json::array();
    for (const auto& [v, q] : d.atoms()) atoms.push_back({{"v", vector_json(v)}, {"p", scalar_to_json(q)}});
    steps.push_back({{"atoms", atoms}});
  }
  return {{"k", p.k()}, {"n", p.n()}, {"iid", p.iid()}, {"steps", steps}};
}

template <class T>
ProductPrior<T> prior_from_json(const json& j) {
  std::size_t k = read_k(j);
  const auto& steps = field(j, "steps");
  if (!steps.is_array()) throw MalformedJson("'steps' must be an array");
  std::vector<FiniteDistribution<T>> out;
  for (const auto& s : steps) {
    const auto& atoms = field(s, "atoms");
    if (!atoms.is_array()) throw MalformedJson("'atoms' must be an array");
    std::vector<typename FiniteDistribution<T>::Atom> a;
    for (const auto& atom : atoms) a.emplace_back(vector_from<T>(field(atom, "v"), k), scalar_from_json<T>(field(atom, "p")));
    out.emplace_back(std::move(a));
  }
  ProductPrior<T> prior(std::move(out));
  if (j.contains("n") && j.at("n").get<long long>() != static_cast<long long>(prior.n()))
    throw InvalidInput("'n' does not match the number of steps");
  if (j.contains("iid") && j.at("iid").get<bool>() != prior.iid())
    throw InvalidInput("'iid' flag does not match the step distributions");
  return prior;
}

PolicySpec policy_spec_from_json(const json& j) {
  if (!j.is_object()) throw MalformedJson("policy must be an object");
  PolicySpec s;
  std::string kind = field(j, "kind").get<std::string>();
  if (kind == "threshold") s.kind = PolicyKind::Threshold;
  else if (kind == "fixed") s.kind = PolicyKind::FixedIndex;
  else if (kind == "optimal-biased") s.kind = PolicyKind::OptimalBiased;
  else if (kind == "optimal-rational") s.kind = PolicyKind::OptimalRational;
  else if (kind == "accept-last") s.kind = PolicyKind::AcceptLast;
  else throw InvalidInput("unknown policy kind '" + kind + "'");
  if (j.contains("alpha")) s.alpha = number_text(j.at("alpha"));
  if (j.contains("T")) s.threshold = number_text(j.at("T"));
  if (j.contains("p")) s.atom_accept_prob = number_text(j.at("p"));
  if (j.contains("t")) s.index = j.at("t").get<std::size_t>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("allow_no_selection")) s.allow_no_selection = j.at("allow_no_selection").get<bool>();
  if (s.kind == PolicyKind::Threshold && !s.alpha && !s.threshold)
    throw InvalidInput("threshold policy needs 'alpha' or 'T'");
  if (s.kind == PolicyKind::FixedIndex && s.index < 1) throw InvalidInput("fixed policy needs 't' >= 1");
  return s;
}

json to_json(const PolicySpec& s) {
  json j = {{"kind", to_string(s.kind)}};
  if (s.alpha) j["alpha"] = *s.alpha;
  if (s.threshold) j["T"] = *s.threshold;
  if (s.atom_accept_prob) j["p"] = *s.atom_accept_prob;
  if (s.kind == PolicyKind::FixedIndex) j["t"] = s.index;
  if (s.seed) j["seed"] = *s.seed;
  if (s.kind == PolicyKind::OptimalBiased) j["allow_no_selection"] = s.allow_no_selection;
  return j;
}

template <class T>
BasicPolicy<T> materialize_policy(const PolicySpec& spec, const ProductPrior<T>& prior, const AgentParams<T>& params,
                                  std::size_t budget) {
  switch (spec.kind) {
    case PolicyKind::Threshold:
      if (spec.alpha) return threshold_from_alpha(prior, Scalar<T>::parse(*spec.alpha), spec.seed);
      return threshold_policy(Scalar<T>::parse(*spec.threshold),
                              spec.atom_accept_prob ? Scalar<T>::parse(*spec.atom_accept_prob) : T(1), spec.seed);
    case PolicyKind::FixedIndex:
      return fixed_index_policy<T>(spec.index);
    case PolicyKind::AcceptLast:
      return accept_last_policy<T>();
    case PolicyKind::OptimalBiased:
      return optimal_biased_policy(prior, params, spec.allow_no_selection, budget).policy;
    case PolicyKind::OptimalRational:
      return optimal_rational_policy(prior).policy;
  }
  throw InvalidInput("unknown policy kind");
}

template <class T>
json to_json(const DPResult<T>& r) {
  const auto& tab = *r.table;
  json steps = json::array();
  for (std::size_t t = 1; t <= tab.horizon(); ++t) {
    json step = {{"t", t}};
    if (tab.rational) {
      step["accept_at_or_above"] = scalar_to_json(tab.rational_continuation[t]);
    } else {
      // states are the super candidates before step t
      std::vector<BasicValueVector<T>> before;
      if (t == 1) {
        before.push_back(BasicValueVector<T>::zero(tab.k));
      } else {
        for (const auto& [s, g] : tab.continuation[t - 1]) before.push_back(s);
      }
      json states = json::array();
      for (const auto& s : before) {
        json accept = json::array();
        for (const auto& [v, p] : tab.steps[t - 1].atoms())
          if (detail::optimal_accepts(tab, t, v, s.join(v))) accept.push_back(vector_json(v));
        states.push_back({{"s", vector_json(s)}, {"accept", accept}});
      }
      step["states"] = states;
    }
    steps.push_back(step);
  }
  return {{"expected_utility", scalar_to_json(r.expected_utility)},
          {"state_count", r.state_count},
          {"kind", tab.rational ? "optimal-rational" : "optimal-biased"},
          {"allow_no_selection", tab.allow_no_selection},
          {"steps", steps}};
}

template <class T>
json to_json(const RatioReport<T>& r) {
  auto opt = [](const std::optional<T>& v) -> json {
    return v ? scalar_to_json(*v) : json("NonPositiveDenominator");
  };
  return {{"lambda", scalar_to_json(r.lambda)},
          {"k", r.k},
          {"n", r.n},
          {"bias", scalar_to_json(r.bias)},
          {"regime", to_string(r.regime)},
          {"e_upr", scalar_to_json(r.e_prophet_rational)},
          {"e_ugr", scalar_to_json(r.e_gambler_rational_opt)},
          {"e_ugb", scalar_to_json(r.e_gambler_biased_opt)},
          {"prophet_ratio", opt(r.prophet_ratio)},
          {"online_ratio", opt(r.online_ratio)}};
}

std::string ratio_csv_header() {
  return "lambda,k,bias,n,e_upr,e_ugr,e_ugb,prophet_ratio,online_ratio,regime,instance_id,seed,prophet_bound,online_bound";
}

std::string to_csv(const RatioRow& r) {
  std::string out;
  for (const auto* f : {&r.lambda, &r.k, &r.bias, &r.n, &r.e_upr, &r.e_ugr, &r.e_ugb, &r.prophet_ratio, &r.online_ratio,
                        &r.regime, &r.instance_id, &r.seed, &r.prophet_bound, &r.online_bound}) {
    if (!out.empty()) out += ",";
    out += *f;
  }
  return out;
}

RatioRow ratio_row_from_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  if (cells.size() != 14) throw InvalidInput("ratio row needs 14 cells, got " + std::to_string(cells.size()));
  RatioRow r;
  std::string* fields[] = {&r.lambda, &r.k, &r.bias, &r.n, &r.e_upr, &r.e_ugr, &r.e_ugb, &r.prophet_ratio,
                           &r.online_ratio, &r.regime, &r.instance_id, &r.seed, &r.prophet_bound, &r.online_bound};
  for (std::size_t i = 0; i < 14; ++i) *fields[i] = cells[i];
  return r;
}

template <class T>
RatioRow make_ratio_row(const RatioReport<T>& r, const std::string& instance_id, const std::string& seed) {
  auto opt = [](const std::optional<T>& v) { return v ? Scalar<T>::str(*v) : std::string("NonPositiveDenominator"); };
  RatioRow row;
  row.lambda = Scalar<T>::str(r.lambda);
  row.k = std::to_string(r.k);
  row.bias = Scalar<T>::str(r.bias);
  row.n = std::to_string(r.n);
  row.e_upr = Scalar<T>::str(r.e_prophet_rational);
  row.e_ugr = Scalar<T>::str(r.e_gambler_rational_opt);
  row.e_ugb = Scalar<T>::str(r.e_gambler_biased_opt);
  row.prophet_ratio = opt(r.prophet_ratio);
  row.online_ratio = opt(r.online_ratio);
  row.regime = to_string(r.regime);
  row.instance_id = instance_id;
  row.seed = seed;
  if (r.regime == Regime::Subcritical) {
    T one(1);
    row.prophet_bound = Scalar<T>::str((T(2) + r.lambda) / (one - r.bias));
    row.online_bound = Scalar<T>::str((one + r.lambda) / (one - r.bias));
  } else {
    row.prophet_bound = "unbounded";
    row.online_bound = "unbounded";
  }
  return row;
}

bool validate_ratio_row(const RatioRow& row, bool exact) {
  auto same = [&](const Rational& a, const Rational& b) {
    return exact ? a == b : Scalar<double>::eq(a.convert_to<double>(), b.convert_to<double>());
  };
  Rational lambda = parse_rational(row.lambda);
  Rational k = parse_rational(row.k);
  Rational bias = parse_rational(row.bias);
  if (!same(bias, lambda * (k - 1))) return false;
  if (std::string(to_string(regime_of(bias))) != row.regime) {
    // float rows near the critical point can round either way
    if (exact || !Scalar<double>::eq(bias.convert_to<double>(), 1.0)) return false;
  }
  Rational upr = parse_rational(row.e_upr), ugr = parse_rational(row.e_ugr), ugb = parse_rational(row.e_ugb);
  if (ugb > 0) {
    if (row.prophet_ratio == "NonPositiveDenominator" || row.online_ratio == "NonPositiveDenominator") return false;
    if (!same(parse_rational(row.prophet_ratio), upr / ugb)) return false;
    if (!same(parse_rational(row.online_ratio), ugr / ugb)) return false;
  } else if (row.prophet_ratio != "NonPositiveDenominator" || row.online_ratio != "NonPositiveDenominator") {
    return false;
  }
  return true;
}

#define LAP_IO_INSTANTIATE(T)                                                                                  \
  template json to_json<T>(const BasicSequence<T>&);                                                          \
  template BasicSequence<T> sequence_from_json<T>(const json&);                                               \
  template json to_json<T>(const ProductPrior<T>&);                                                           \
  template ProductPrior<T> prior_from_json<T>(const json&);                                                   \
  template BasicPolicy<T> materialize_policy<T>(const PolicySpec&, const ProductPrior<T>&, const AgentParams<T>&, \
                                                std::size_t);                                                 \
  template json to_json<T>(const DPResult<T>&);                                                               \
  template json to_json<T>(const RatioReport<T>&);                                                            \
  template RatioRow make_ratio_row<T>(const RatioReport<T>&, const std::string&, const std::string&);

LAP_IO_INSTANTIATE(Rational)
LAP_IO_INSTANTIATE(double)

}  // namespace lap
