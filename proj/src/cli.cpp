#include "lap/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "lap/analysis.hpp"
#include "lap/instances.hpp"
#include "lap/io.hpp"

namespace lap {
namespace {

struct RunConfig {
  std::string command;
  std::string gen;
  std::string input;
  std::optional<std::size_t> n, k, w;
  std::optional<std::string> lambda, beta, alpha, eps, q, a, x;
  std::optional<std::uint64_t> trials, seed;
  std::optional<std::size_t> n_override;
  std::string policy;
  std::string suite = "all";
  std::size_t count = 0;
  std::string lambda_grid, k_grid;
  bool exact = true;
  bool force_select = false;
  bool dp_table = false;
  std::string log_base = "e";
  std::optional<std::size_t> budget;
  std::string out;
  std::string format = "json";
  unsigned workers = 0;
};

class UnknownGenerator : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Raised when a verification run finds a counterexample.
struct Counterexample {
  json report;
};

std::size_t budget_of(const RunConfig& c) { return c.budget ? *c.budget : default_state_budget(); }

template <class T>
T need(const std::optional<std::string>& v, const char* flag) {
  if (!v) throw InvalidInput(std::string("missing required flag --") + flag);
  return Scalar<T>::parse(*v);
}

std::size_t need(const std::optional<std::size_t>& v, const char* flag) {
  if (!v) throw InvalidInput(std::string("missing required flag --") + flag);
  return *v;
}

template <class T>
struct Instance {
  std::optional<BasicSequence<T>> sequence;
  std::optional<ProductPrior<T>> prior;
  std::optional<std::pair<BasicSequence<T>, BasicSequence<T>>> pair;
  std::optional<T> lambda;  // carried by random priors
  std::size_t k = 1;
  json extra;

  json to_json_value() const {
    json j;
    if (pair) {
      j = {{"first", to_json(pair->first)}, {"second", to_json(pair->second)}};
    } else if (sequence) {
      j = to_json(*sequence);
    } else {
      j = to_json(*prior);
    }
    if (lambda) j["lambda"] = scalar_to_json(*lambda);
    if (!extra.is_null()) j["meta"] = extra;
    return j;
  }

  ProductPrior<T> as_prior() const {
    if (prior) return *prior;
    if (sequence) return ProductPrior<T>::deterministic(*sequence);
    throw InvalidInput("this generator produces a pair of sequences, not a single instance");
  }
};

template <class T>
Instance<T> build_instance(const RunConfig& c) {
  Instance<T> inst;
  if (!c.input.empty()) {
    if (!c.gen.empty()) throw InvalidInput("use either --gen or --input, not both");
    json j = read_json_file(c.input);
    if (j.contains("steps"))
      inst.prior = prior_from_json<T>(j);
    else
      inst.sequence = sequence_from_json<T>(j);
    if (j.contains("lambda")) inst.lambda = scalar_from_json<T>(j.at("lambda"));
    inst.k = inst.prior ? inst.prior->k() : inst.sequence->k();
    return inst;
  }
  if (c.gen.empty()) throw InvalidInput("an instance is required: pass --gen NAME or --input FILE");

  auto beta = [&](std::size_t k) {
    if (c.beta) return Scalar<T>::parse(*c.beta);
    if (c.lambda) return AgentParams<T>(Scalar<T>::parse(*c.lambda), k).bias();
    throw InvalidInput("missing required flag --beta (or --lambda to derive it)");
  };
  const std::string& g = c.gen;
  if (g == "alternating-geometric") {
    std::size_t k = need(c.k, "k");
    inst.sequence = gen_alternating_geometric<T>(need(c.n, "n"), k, beta(k));
  } else if (g == "alternating-linear") {
    inst.sequence = gen_alternating_linear<T>(need(c.n, "n"), need(c.k, "k"));
  } else if (g == "partial-sums") {
    std::size_t k = need(c.k, "k");
    inst.sequence = gen_partial_sums<T>(need(c.w, "w"), k, beta(k));
  } else if (g == "worstcase-mixed") {
    std::size_t k = need(c.k, "k");
    T lambda = need<T>(c.lambda, "lambda");
    T eps = need<T>(c.eps, "eps");
    std::size_t w = c.w ? *c.w : worstcase_rows(AgentParams<T>(lambda, k).bias(), eps);
    inst.prior = gen_worstcase_mixed<T>(w, k, lambda, eps);
    inst.extra = {{"w", w}};
  } else if (g == "identical-value") {
    inst.sequence = gen_identical_value<T>(need(c.k, "k"), need<T>(c.q, "q"));
  } else if (g == "salient-feature") {
    inst.sequence = gen_salient_feature<T>(need(c.k, "k"), need<T>(c.a, "a"), need<T>(c.q, "q"));
  } else if (g == "quality-pair") {
    inst.pair = gen_quality_pair<T>(need(c.k, "k"), need<T>(c.q, "q"));
  } else if (g == "dominance-pair") {
    inst.pair = gen_dominance_pair<T>(need(c.k, "k"), need(c.n, "n"), need<T>(c.lambda, "lambda"), need<T>(c.eps, "eps"));
  } else if (g == "random-prior") {
    if (!c.seed) throw InvalidInput("random-prior needs --seed");
    RandomPriorOptions opts;
    if (c.k) opts.k = *c.k;
    if (c.lambda) opts.lambda = parse_rational(*c.lambda);
    if (c.n) opts.max_n = *c.n;
    auto r = random_small_prior(*c.seed, opts);
    inst.prior = convert<T>(r.prior);
    inst.lambda = convert_scalar<T>(r.params.lambda);
  } else {
    throw UnknownGenerator("'" + g +
                           "' (expected alternating-geometric, alternating-linear, partial-sums, worstcase-mixed, "
                           "identical-value, salient-feature, quality-pair, dominance-pair or random-prior)");
  }
  if (inst.pair) inst.k = inst.pair->first.k();
  else inst.k = inst.prior ? inst.prior->k() : inst.sequence->k();
  return inst;
}

template <class T>
AgentParams<T> params_for(const RunConfig& c, const Instance<T>& inst) {
  if (c.lambda) return AgentParams<T>(Scalar<T>::parse(*c.lambda), inst.k);
  if (inst.lambda) return AgentParams<T>(*inst.lambda, inst.k);
  throw InvalidInput("missing required flag --lambda");
}

PolicySpec policy_of(const RunConfig& c) {
  if (c.policy.empty()) {
    PolicySpec s;
    s.allow_no_selection = !c.force_select;
    if (c.alpha) {
      s.kind = PolicyKind::Threshold;
      s.alpha = *c.alpha;
      s.seed = c.seed;
    }
    return s;
  }
  json j;
  if (c.policy.front() == '{') j = parse_json_text(c.policy);
  else if (std::filesystem::is_regular_file(c.policy)) j = read_json_file(c.policy);
  else j = json{{"kind", c.policy}};  // bare kind name
  auto s = policy_spec_from_json(j);
  if (!s.seed && c.seed) s.seed = c.seed;
  if (c.force_select) s.allow_no_selection = false;
  return s;
}

template <class T>
json outcome_json(const StoppingOutcome<T>& o) {
  return {{"selection", o.selection ? json(*o.selection) : json("NoSelection")},
          {"utility", scalar_to_json(o.utility)},
          {"value", scalar_to_json(o.value)}};
}

template <class T>
json cmd_generate(const RunConfig& c) {
  return build_instance<T>(c).to_json_value();
}

template <class T>
json cmd_evaluate(const RunConfig& c) {
  auto inst = build_instance<T>(c);
  auto prior = inst.as_prior();
  auto params = params_for(c, inst);
  auto spec = policy_of(c);
  auto policy = materialize_policy(spec, prior, params, budget_of(c));
  auto stats = exact_policy_stats(prior, policy, params, budget_of(c));
  json j = {{"policy", to_json(spec)},
            {"lambda", scalar_to_json(params.lambda)},
            {"k", params.k},
            {"n", prior.n()},
            {"expected_utility", scalar_to_json(stats.utility)},
            {"expected_value", scalar_to_json(stats.value)},
            {"select_probability", scalar_to_json(stats.select_probability)}};
  if (policy.kind == PolicyKind::Threshold) {
    j["threshold"] = scalar_to_json(policy.threshold);
    j["atom_accept_prob"] = scalar_to_json(policy.atom_accept_prob);
  }
  if (inst.sequence) {
    j["outcome"] = outcome_json(run_policy(policy, *inst.sequence, params));
    j["offline_optimal"] = outcome_json(offline_optimal_biased(*inst.sequence, params, spec.allow_no_selection));
  }
  if (c.dp_table && policy.table) {
    DPResult<T> r{stats.utility, policy.table, 0, policy};
    j["table"] = to_json(r);
  }
  return j;
}

template <class T>
RatioReport<T> report_for(const RunConfig& c, Instance<T>& inst) {
  return ratio_report(inst.as_prior(), params_for(c, inst), budget_of(c));
}

template <class T>
std::string instance_id(const RunConfig& c) {
  std::ostringstream s;
  s << (c.gen.empty() ? std::string("input") : c.gen);
  return s.str();
}

template <class T>
json cmd_ratio(const RunConfig& c, std::string& csv) {
  auto inst = build_instance<T>(c);
  auto r = report_for(c, inst);
  if (c.format == "csv") {
    csv = ratio_csv_header() + "\n" +
          to_csv(make_ratio_row(r, instance_id<T>(c), c.seed ? std::to_string(*c.seed) : std::string(""))) + "\n";
    return nullptr;
  }
  return to_json(r);
}

template <class T>
json cmd_montecarlo(const RunConfig& c) {
  auto inst = build_instance<T>(c);
  auto prior = inst.as_prior();
  auto params = params_for(c, inst);
  if (!c.seed) throw InvalidInput("montecarlo needs --seed");
  std::uint64_t trials = c.trials ? *c.trials : 100000;
  auto spec = policy_of(c);
  auto policy = materialize_policy(spec, prior, params, budget_of(c));
  auto est = monte_carlo(prior, policy, params, trials, *c.seed, c.workers);
  json j = {{"policy", to_json(spec)},
            {"mean", est.mean},
            {"half_width", est.half_width},
            {"trials", est.trials},
            {"seed", est.seed}};
  if (prior.support_size(budget_of(c)) <= budget_of(c)) {
    T exact = exact_expectation(prior, policy, params, budget_of(c));
    j["exact"] = scalar_to_json(exact);
    j["within_ci"] = std::abs(est.mean - Scalar<T>::to_double(exact)) <= 4 * est.half_width + 1e-9;
  }
  return j;
}

template <class T>
json reduction_meta_json(const ReductionMeta<T>& m) {
  return {{"m", m.m},
          {"x", scalar_to_json(m.x)},
          {"alpha_exp", m.alpha_exp},
          {"nominal_n", m.nominal_n.str()},
          {"epsilon", scalar_to_json(m.epsilon)},
          {"log_base", m.log_base == LogBase::Natural ? "e" : "2"},
          {"n", m.n},
          {"x_overridden", m.x_overridden}};
}

template <class T>
json cmd_reduce(const RunConfig& c) {
  auto inst = build_instance<T>(c);
  if (!inst.sequence) throw InvalidInput("reduce needs a deterministic sequence instance");
  auto params = params_for(c, inst);
  ReductionOptions<T> opts;
  opts.n_override = c.n_override;
  if (c.x) opts.x_override = Scalar<T>::parse(*c.x);
  if (c.log_base == "2") opts.log_base = LogBase::Two;
  else if (c.log_base != "e") throw InvalidInput("--log-base must be 'e' or '2'");
  opts.budget = budget_of(c);
  T eps = c.eps ? Scalar<T>::parse(*c.eps) : T(1) / T(2);
  auto [prior, meta] = det_to_iid(*inst.sequence, eps, params, opts);
  auto weights = reduction_weights(meta.m, meta.x);
  json w = json::array();
  for (const auto& p : weights) w.push_back(scalar_to_json(p));
  json j = {{"meta", reduction_meta_json(meta)},
            {"atoms", to_json(prior)["steps"][0]["atoms"]},
            {"weights", w},
            {"match_probability", scalar_to_json(representation_match_probability(weights, meta.n))},
            {"inversion_probability", scalar_to_json(inversion_probability(meta.x))},
            {"union_bound", scalar_to_json(reduction_union_bound(meta.m, meta.x, meta.n))}};
  if (c.trials) {
    if (!c.seed) throw InvalidInput("simulation needs --seed");
    std::vector<double> wd;
    for (const auto& p : weights) wd.push_back(Scalar<T>::to_double(p));
    auto sim = simulate_reduction(wd, Scalar<T>::to_double(meta.x), meta.n, *c.trials, *c.seed, c.workers);
    j["simulation"] = {{"match_mean", sim.match.mean},
                       {"match_half_width", sim.match.half_width},
                       {"inversion_mean", sim.inversion.mean},
                       {"inversion_half_width", sim.inversion.half_width},
                       {"trials", *c.trials},
                       {"seed", *c.seed}};
  }
  return j;
}

std::vector<std::string> parse_grid(const std::string& text, const char* flag) {
  // start:stop[:step], inclusive; values are kept as exact decimal strings
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ':')) parts.push_back(p);
  if (parts.size() == 1) return parts;
  if (parts.size() < 2 || parts.size() > 3) throw InvalidInput(std::string("--") + flag + " must be start:stop[:step]");
  Rational start = parse_rational(parts[0]), stop = parse_rational(parts[1]);
  Rational step = parts.size() == 3 ? parse_rational(parts[2]) : Rational(1);
  if (!(step > 0)) throw InvalidInput(std::string("--") + flag + " step must be positive");
  std::vector<std::string> out;
  for (Rational v = start; v <= stop; v += step) {
    if (out.size() > 100000) throw InvalidInput(std::string("--") + flag + " has too many points");
    out.push_back(format_rational(v));
  }
  return out;
}

template <class T>
std::string cmd_sweep(const RunConfig& c, std::ostream& err) {
  if (c.lambda_grid.empty() || c.k_grid.empty()) throw InvalidInput("sweep needs --lambda-grid and --k-grid");
  if (c.gen.empty()) throw InvalidInput("sweep needs --gen");
  auto lambdas = parse_grid(c.lambda_grid, "lambda-grid");
  auto ks = parse_grid(c.k_grid, "k-grid");
  struct Cell {
    std::string lambda;
    std::size_t k;
  };
  std::vector<Cell> cells;
  for (const auto& kk : ks) {
    Rational kr = parse_rational(kk);
    if (denominator(kr) != 1 || kr < 1) throw InvalidInput("--k-grid values must be positive integers");
    for (const auto& l : lambdas) cells.push_back({l, kr.convert_to<std::size_t>()});
  }
  if (c.gen != "worstcase-mixed" && c.gen != "alternating-geometric" && c.gen != "alternating-linear" &&
      c.gen != "random-prior")
    throw UnknownGenerator("sweep supports worstcase-mixed, alternating-geometric, alternating-linear and random-prior, not '" +
                           c.gen + "'");

  auto run_cell = [&](const Cell& cell) -> std::optional<RatioRow> {
    RunConfig cc = c;
    cc.lambda = cell.lambda;
    cc.k = cell.k;
    AgentParams<T> params(Scalar<T>::parse(cell.lambda), cell.k);
    ProductPrior<T> prior;
    if (c.gen == "worstcase-mixed") {
      T eps = need<T>(c.eps, "eps");
      std::size_t w;
      if (c.w) w = *c.w;
      else if (params.bias() < T(1)) w = worstcase_rows(params.bias(), eps);
      else throw InvalidInput("supercritical cells need an explicit --w");
      prior = gen_worstcase_mixed<T>(w, cell.k, params.lambda, eps, true);
    } else {
      auto inst = build_instance<T>(cc);
      prior = inst.as_prior();
    }
    auto r = ratio_report(prior, params, budget_of(c));
    return make_ratio_row(r, c.gen + "/k=" + std::to_string(cell.k) + "/lambda=" + cell.lambda,
                          c.seed ? std::to_string(*c.seed) : std::string(""));
  };

  std::vector<std::future<std::optional<RatioRow>>> futures;
  std::vector<std::string> errors(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i)
    futures.push_back(std::async(std::launch::async, [&, i]() -> std::optional<RatioRow> {
      try {
        return run_cell(cells[i]);
      } catch (const ResourceLimit&) {
        throw;
      } catch (const InvalidInput& e) {
        errors[i] = e.what();
        return std::nullopt;
      }
    }));
  std::string out = ratio_csv_header() + "\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto row = futures[i].get();
    if (row) out += to_csv(*row) + "\n";
    else err << "skipped cell lambda=" << cells[i].lambda << " k=" << cells[i].k << ": " << errors[i] << "\n";
  }
  return out;
}

// ---- verification suites ----

template <class T>
struct SuiteTally {
  std::size_t checked = 0;
  std::size_t failed = 0;
  json failures = json::array();

  void record(bool ok, const std::string& what, json detail) {
    ++checked;
    if (!ok) {
      ++failed;
      if (failures.size() < 20) failures.push_back({{"check", what}, {"detail", std::move(detail)}});
    }
  }
  json summary() const { return {{"checked", checked}, {"passed", checked - failed}, {"failures", failures}}; }
};

template <class T>
json suite_bounds(const RunConfig& c) {
  SuiteTally<T> tally;
  std::uint64_t seed = c.seed ? *c.seed : 0;
  std::size_t count = c.count ? c.count : 200;
  RandomPriorOptions opts;
  if (c.k) opts.k = *c.k;
  if (c.lambda) opts.lambda = parse_rational(*c.lambda);
  for (std::size_t i = 0; i < count; ++i) {
    auto r = random_small_prior(splitmix64(seed + i), opts);
    if (!(r.params.bias() < 1)) throw InvalidInput("bounds suite needs lambda*(k-1) < 1");
    auto prior = convert<T>(r.prior);
    auto params = convert<T>(r.params);
    json inst = {{"prior", to_json(prior)}, {"lambda", scalar_to_json(params.lambda)}};
    auto pb = verify_prophet_bound(prior, params, budget_of(c));
    tally.record(pb.passed, "prophet-bound",
                 {{"instance", inst}, {"e_threshold1", scalar_to_json(pb.e_threshold1)},
                  {"e_threshold2", scalar_to_json(pb.e_threshold2)}, {"e_vstar", scalar_to_json(pb.e_vstar)},
                  {"factor", scalar_to_json(pb.factor)}});
    auto ob = verify_online_bound(prior, params, budget_of(c));
    tally.record(ob.passed, "online-bound",
                 {{"instance", inst}, {"e_ugr", scalar_to_json(ob.e_ugr)}, {"e_ugb", scalar_to_json(ob.e_ugb)}});
    auto cl = verify_classical(prior);
    tally.record(cl.passed, "classical",
                 {{"instance", inst}, {"e_ugr", scalar_to_json(cl.e_ugr)}, {"e_vstar", scalar_to_json(cl.e_vstar)}});
    for (const auto& th : {pb.threshold1, pb.threshold2}) {
      auto sc = check_surplus_inequalities(prior, th, budget_of(c));
      tally.record(sc.passed, "surplus", {{"instance", inst}, {"threshold", scalar_to_json(th)}});
    }
  }
  return tally.summary();
}

template <class T>
json suite_monotonicity(const RunConfig& c) {
  SuiteTally<T> tally;
  std::uint64_t seed = c.seed ? *c.seed : 0;
  std::size_t count = c.count ? c.count : 100;
  RandomPriorOptions opts;
  opts.subcritical = false;
  if (c.k) opts.k = *c.k;
  if (c.lambda) opts.lambda = parse_rational(*c.lambda);
  for (std::size_t i = 0; i < count; ++i) {
    auto r = random_small_prior(splitmix64(seed + i), opts);
    auto prior = convert<T>(r.prior);
    auto params = convert<T>(r.params);
    auto m = check_monotonicity(prior, params, Scalar<T>::parse("0.2"), Scalar<T>::parse("0.8"), budget_of(c));
    tally.record(m.passed(), "monotonicity",
                 {{"prior", to_json(prior)}, {"lambda", scalar_to_json(params.lambda)}, {"why", m.detail}});
  }
  return tally.summary();
}

template <class T>
json suite_behavioral(const RunConfig&) {
  SuiteTally<T> tally;
  for (std::size_t k : {2, 3, 4})
    for (const char* qs : {"2", "3", "7/2"})
      for (const char* ls : {"0", "1/4", "1/2", "1", "3/2", "2"}) {
        T q = Scalar<T>::parse(qs), lambda = Scalar<T>::parse(ls);
        AgentParams<T> params(lambda, k);
        T kk(static_cast<long>(k));
        auto sigma = gen_identical_value(k, q);
        for (std::size_t t = 1; t <= k; ++t) {
          T tt(static_cast<long>(t));
          tally.record(Scalar<T>::eq(biased_prophet_utility(sigma, t, params), q * (T(1) - lambda * (kk - T(1)))),
                       "identical-value prophet", {{"k", k}, {"q", qs}, {"lambda", ls}, {"t", t}});
          tally.record(Scalar<T>::eq(biased_gambler_utility(sigma, t, params), q * (T(1) - lambda * (tt - T(1)))),
                       "identical-value gambler", {{"k", k}, {"q", qs}, {"lambda", ls}, {"t", t}});
        }
        auto [low, high] = gen_quality_pair(k, q);
        auto rep = detect_quality_paradox(low, high, params);
        bool expect = lambda * (kk - T(1)) > T(1);
        tally.record(rep.gambler_better && rep.prophet_worse == expect, "quality paradox",
                     {{"k", k}, {"q", qs}, {"lambda", ls}});
      }
  return tally.summary();
}

template <class T>
json cmd_verify(const RunConfig& c) {
  json j = {{"suite", c.suite}};
  bool all = c.suite == "all";
  if (!all && c.suite != "bounds" && c.suite != "monotonicity" && c.suite != "behavioral")
    throw InvalidInput("unknown suite '" + c.suite + "' (expected bounds, monotonicity, behavioral or all)");
  std::size_t failed = 0;
  auto add = [&](const char* name, json r) {
    failed += r["checked"].get<std::size_t>() - r["passed"].get<std::size_t>();
    j[name] = std::move(r);
  };
  if (all || c.suite == "bounds") add("bounds", suite_bounds<T>(c));
  if (all || c.suite == "monotonicity") add("monotonicity", suite_monotonicity<T>(c));
  if (all || c.suite == "behavioral") add("behavioral", suite_behavioral<T>(c));
  j["seed"] = c.seed ? json(*c.seed) : json(0);
  j["ok"] = failed == 0;
  if (failed) throw Counterexample{j};
  return j;
}

template <class T>
int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
  json result;
  std::string text;
  const std::string& cmd = c.command;
  int code = kExitOk;
  try {
    if (cmd == "generate") result = cmd_generate<T>(c);
    else if (cmd == "evaluate") result = cmd_evaluate<T>(c);
    else if (cmd == "ratio") result = cmd_ratio<T>(c, text);
    else if (cmd == "verify") result = cmd_verify<T>(c);
    else if (cmd == "sweep") text = cmd_sweep<T>(c, err);
    else if (cmd == "montecarlo") result = cmd_montecarlo<T>(c);
    else if (cmd == "reduce") result = cmd_reduce<T>(c);
  } catch (const Counterexample& ce) {
    result = ce.report;
    code = kExitCounterexample;
    err << "counterexample found\n";
  }
  if (text.empty()) text = result.dump(2) + "\n";
  if (c.out.empty()) {
    out << text;
  } else {
    std::ofstream f(c.out);
    if (!f) throw InvalidInput("cannot write '" + c.out + "'");
    f << text;
  }
  return code;
}

void add_instance_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--gen", c.gen, "generator name");
  sub->add_option("--input", c.input, "sequence or prior JSON file");
  sub->add_option("--n", c.n, "number of candidates");
  sub->add_option("--k", c.k, "dimension");
  sub->add_option("--w", c.w, "rows of the worst-case construction");
  sub->add_option("--lambda", c.lambda, "loss aversion");
  sub->add_option("--beta", c.beta, "geometric ratio (defaults to lambda*(k-1))");
  sub->add_option("--eps", c.eps, "epsilon");
  sub->add_option("--q", c.q, "bonus value");
  sub->add_option("--a", c.a, "base value");
  sub->add_option("--seed", c.seed, "random seed");
}

void add_common_flags(CLI::App* sub, RunConfig& c) {
  sub->add_flag("--exact,!--float", c.exact, "exact rational arithmetic (default) or floating point");
  sub->add_option("--budget-states", c.budget, "state/enumeration budget (default 1e6 or LAP_BUDGET_STATES)");
  sub->add_option("--out", c.out, "write output to a file");
  sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Loss-averse prophet inequality toolkit"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "emit a generated instance as JSON");
  add_instance_flags(gen, c);
  add_common_flags(gen, c);

  auto* eval = app.add_subcommand("evaluate", "exact expected utility of a policy");
  add_instance_flags(eval, c);
  add_common_flags(eval, c);
  eval->add_option("--policy", c.policy, "policy JSON or kind name");
  eval->add_option("--alpha", c.alpha, "threshold policy selection probability");
  eval->add_flag("--force-select", c.force_select, "optimal policy must take the last candidate");
  eval->add_flag("--table", c.dp_table, "include the optimal policy table");

  auto* ratio = app.add_subcommand("ratio", "prophet and online utility ratios");
  add_instance_flags(ratio, c);
  add_common_flags(ratio, c);

  auto* verify = app.add_subcommand("verify", "run seeded verification suites");
  verify->add_option("--suite", c.suite, "bounds, monotonicity, behavioral or all");
  verify->add_option("--count", c.count, "number of random priors");
  verify->add_option("--lambda", c.lambda, "fix lambda instead of drawing it");
  verify->add_option("--k", c.k, "fix the dimension");
  verify->add_option("--seed", c.seed, "random seed");
  add_common_flags(verify, c);

  auto* sweep = app.add_subcommand("sweep", "ratio table over a lambda x k grid");
  sweep->add_option("--lambda-grid", c.lambda_grid, "start:stop:step (inclusive)");
  sweep->add_option("--k-grid", c.k_grid, "start:stop[:step] (inclusive)");
  add_instance_flags(sweep, c);
  add_common_flags(sweep, c);
  sweep->add_option("--workers", c.workers, "unused; cells run concurrently");

  auto* mc = app.add_subcommand("montecarlo", "seeded Monte Carlo estimate of a policy's utility");
  add_instance_flags(mc, c);
  add_common_flags(mc, c);
  mc->add_option("--policy", c.policy, "policy JSON or kind name");
  mc->add_option("--alpha", c.alpha, "threshold policy selection probability");
  mc->add_option("--trials", c.trials, "number of trials");
  mc->add_option("--workers", c.workers, "worker threads (results do not depend on this)");

  auto* red = app.add_subcommand("reduce", "deterministic-to-i.i.d. reduction");
  add_instance_flags(red, c);
  add_common_flags(red, c);
  red->add_option("--n-override", c.n_override, "simulated number of candidates");
  red->add_option("--x", c.x, "atom decay parameter instead of the derived one");
  red->add_option("--log-base", c.log_base, "e or 2");
  red->add_option("--trials", c.trials, "Monte Carlo trials");
  red->add_option("--workers", c.workers, "worker threads");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  for (auto* sub : app.get_subcommands()) c.command = sub->get_name();

  try {
    return c.exact ? dispatch<Rational>(c, out, err) : dispatch<double>(c, out, err);
  } catch (const UnknownGenerator& e) {
    err << "unknown generator: " << e.what() << "\n";
  } catch (const MalformedJson& e) {
    err << "malformed JSON: " << e.what() << "\n";
  } catch (const ResourceLimit& e) {
    err << "budget exceeded: " << e.what() << " (requested " << e.count() << ")\n";
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
  } catch (const json::exception& e) {
    err << "malformed JSON: " << e.what() << "\n";
  }
  return kExitUsage;
}

}  // namespace lap
