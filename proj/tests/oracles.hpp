#pragma once

// Brute-force reference computations for the tests. They work on plain
// vectors and share nothing with the library beyond the Rational type.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "lap/core.hpp"

namespace oracle {

using lap::Rational;
using Vec = std::vector<Rational>;
using Seq = std::vector<Vec>;

struct Step {
  std::vector<std::pair<Vec, Rational>> atoms;
};
using Prior = std::vector<Step>;

inline Prior from(const lap::Prior& p) {
  Prior out;
  for (const auto& d : p.steps()) {
    Step s;
    for (const auto& [v, q] : d.atoms()) s.atoms.emplace_back(v.entries(), q);
    out.push_back(s);
  }
  return out;
}

inline Seq from(const lap::Sequence& s) {
  Seq out;
  for (const auto& v : s.candidates()) out.push_back(v.entries());
  return out;
}

inline Rational l1(const Vec& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

// reference point after the first `t` candidates
inline Vec running_max(const Seq& s, std::size_t t) {
  Vec m(s[0].size(), Rational(0));
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (s[i][j] > m[j]) m[j] = s[i][j];
  return m;
}

// t is 1-based
inline Rational gambler(const Seq& s, std::size_t t, const Rational& lambda) {
  Rational v = l1(s[t - 1]);
  return v - lambda * (l1(running_max(s, t)) - v);
}

inline Rational prophet(const Seq& s, std::size_t t, const Rational& lambda) {
  Rational v = l1(s[t - 1]);
  return v - lambda * (l1(running_max(s, s.size())) - v);
}

inline Rational decline(const Seq& s, const Rational& lambda) { return -lambda * l1(running_max(s, s.size())); }

inline void realizations(const Prior& p, const std::function<void(const Seq&, const Rational&)>& fn) {
  Seq cur;
  std::function<void(std::size_t, Rational)> rec = [&](std::size_t t, Rational prob) {
    if (t == p.size()) {
      fn(cur, prob);
      return;
    }
    for (const auto& [v, q] : p[t].atoms) {
      cur.push_back(v);
      rec(t + 1, prob * q);
      cur.pop_back();
    }
  };
  rec(0, Rational(1));
}

inline Rational expected_vstar(const Prior& p) {
  Rational e = 0;
  realizations(p, [&](const Seq& s, const Rational& q) {
    Rational best = 0;
    for (const auto& v : s) best = std::max(best, l1(v));
    e += q * best;
  });
  return e;
}

inline Rational expected_dim_max_sum(const Prior& p) {
  Rational e = 0;
  realizations(p, [&](const Seq& s, const Rational& q) { e += q * l1(running_max(s, s.size())); });
  return e;
}

// Expectimax over full histories: the best any history-dependent rule can do.
// `utility(history, t)` scores stopping at t; `stop_none(history)` scores
// reaching the end without stopping (empty = not allowed).
inline Rational history_expectimax(const Prior& p, const std::function<Rational(const Seq&, std::size_t)>& utility,
                                   const std::function<std::optional<Rational>(const Seq&)>& stop_none) {
  Seq h;
  std::function<Rational()> value_after;  // value once h has been observed, before deciding
  std::function<Rational()> value_next = [&]() {
    Rational e = 0;
    for (const auto& [v, q] : p[h.size()].atoms) {
      h.push_back(v);
      e += q * value_after();
      h.pop_back();
    }
    return e;
  };
  value_after = [&]() -> Rational {
    Rational stop = utility(h, h.size());
    if (h.size() == p.size()) {
      auto none = stop_none(h);
      return none && *none > stop ? *none : stop;
    }
    Rational go = value_next();
    return go > stop ? go : stop;
  };
  return value_next();
}

inline Rational best_biased(const Prior& p, const Rational& lambda, bool allow_decline = true) {
  return history_expectimax(
      p, [&](const Seq& h, std::size_t t) { return gambler(h, t, lambda); },
      [&](const Seq& h) -> std::optional<Rational> {
        if (!allow_decline) return std::nullopt;
        return decline(h, lambda);
      });
}

inline Rational best_rational(const Prior& p) {
  return history_expectimax(
      p, [](const Seq& h, std::size_t t) { return l1(h[t - 1]); },
      [](const Seq&) -> std::optional<Rational> { return Rational(0); });
}

// Every deterministic rule written out as a stop/continue bit per history
// node. Only usable when the history tree has few nodes.
struct HistoryNode {
  Seq history;
  Rational prob;
};

inline std::vector<HistoryNode> history_nodes(const Prior& p) {
  std::vector<HistoryNode> nodes;
  std::function<void(Seq&, Rational)> rec = [&](Seq& h, Rational prob) {
    if (h.size() == p.size()) return;
    for (const auto& [v, q] : p[h.size()].atoms) {
      h.push_back(v);
      nodes.push_back({h, prob * q});
      rec(h, prob * q);
      h.pop_back();
    }
  };
  Seq h;
  rec(h, Rational(1));
  return nodes;
}

inline std::optional<Rational> best_biased_by_rule_enumeration(const Prior& p, const Rational& lambda,
                                                               bool allow_decline, std::size_t max_nodes = 20) {
  auto nodes = history_nodes(p);
  if (nodes.size() > max_nodes) return std::nullopt;
  std::map<Seq, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i].history] = i;

  // Every realization's path through the tree and the weighted payoff of
  // stopping at each step (slot 0 is declining).
  std::vector<std::vector<std::size_t>> paths;
  std::vector<std::vector<Rational>> terms;
  realizations(p, [&](const Seq& s, const Rational& q) {
    std::vector<std::size_t> path;
    std::vector<Rational> pay{q * decline(s, lambda)};
    for (std::size_t t = 1; t <= s.size(); ++t) {
      path.push_back(index.at(Seq(s.begin(), s.begin() + static_cast<long>(t))));
      pay.push_back(q * gambler(s, t, lambda));
    }
    paths.push_back(std::move(path));
    terms.push_back(std::move(pay));
  });

  // Scale to integers so the 2^nodes sweep runs on machine words.
  lap::BigInt denom = 1;
  for (const auto& row : terms)
    for (const auto& x : row) denom = boost::multiprecision::lcm(denom, lap::BigInt(boost::multiprecision::denominator(x)));
  std::vector<std::vector<long long>> scaled;
  lap::BigInt limit = lap::BigInt(1) << 50;
  for (const auto& row : terms) {
    std::vector<long long> r;
    for (const auto& x : row) {
      lap::BigInt v = boost::multiprecision::numerator(x) * (denom / boost::multiprecision::denominator(x));
      if (abs(v) > limit) return std::nullopt;
      r.push_back(v.convert_to<long long>());
    }
    scaled.push_back(std::move(r));
  }

  std::optional<long long> best;
  const std::size_t rules = std::size_t(1) << nodes.size();
  for (std::size_t mask = 0; mask < rules; ++mask) {
    long long e = 0;
    bool valid = true;
    for (std::size_t r = 0; r < paths.size() && valid; ++r) {
      std::size_t slot = 0;
      for (std::size_t t = 0; t < paths[r].size(); ++t)
        if ((mask >> paths[r][t]) & 1) {
          slot = t + 1;
          break;
        }
      if (slot == 0 && !allow_decline) valid = false;
      e += scaled[r][slot];
    }
    if (valid && (!best || e > *best)) best = e;
  }
  if (!best) return std::nullopt;
  return Rational(lap::BigInt(*best), denom);
}

// Threshold rule: first candidate with value >= T (inclusive) or > T.
inline std::optional<std::size_t> threshold_stop(const Seq& s, const Rational& T, bool inclusive) {
  for (std::size_t t = 1; t <= s.size(); ++t) {
    Rational v = l1(s[t - 1]);
    if (inclusive ? v >= T : v > T) return t;
  }
  return std::nullopt;
}

inline Rational threshold_expectation(const Prior& p, const Rational& lambda, const Rational& T,
                                      const Rational& atom_prob) {
  Rational e = 0;
  realizations(p, [&](const Seq& s, const Rational& q) {
    for (bool inclusive : {true, false}) {
      Rational w = inclusive ? atom_prob : Rational(1) - atom_prob;
      if (w == 0) continue;
      auto t = threshold_stop(s, T, inclusive);
      e += q * w * (t ? gambler(s, *t, lambda) : decline(s, lambda));
    }
  });
  return e;
}

// Pr[V* > T] + p Pr[V* = T] computed by enumeration.
inline Rational selection_probability(const Prior& p, const Rational& T, const Rational& atom_prob) {
  Rational above = 0, at = 0;
  realizations(p, [&](const Seq& s, const Rational& q) {
    Rational best = 0;
    for (const auto& v : s) best = std::max(best, l1(v));
    if (best > T) above += q;
    if (best == T) at += q;
  });
  return above + atom_prob * at;
}

}  // namespace oracle
