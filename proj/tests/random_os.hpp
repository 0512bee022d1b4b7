#pragma once

// Small random OS instances that stay inside the brute-force oracle guard.

#include <random>

#include "samp/model.hpp"

namespace samp::testgen {

inline TimingExpr random_timing(std::mt19937_64& rng, std::size_t n_acts) {
  std::uniform_int_distribution<std::size_t> act(0, n_acts - 1);
  std::uniform_int_distribution<int> coin(0, 5);
  int c = coin(rng);
  if (c == 0) return TimingExpr::origin(std::uniform_int_distribution<Tick>(0, 4)(rng));
  Tick k = coin(rng) == 0 ? 1 : 0;
  return c % 2 ? TimingExpr::start(act(rng), k) : TimingExpr::end(act(rng), k);
}

inline Formula random_formula(std::mt19937_64& rng, std::size_t n_acts, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 6 : 2);
  int k = pick(rng);
  if (k == 0) return Formula::present(std::uniform_int_distribution<std::size_t>(0, n_acts - 1)(rng));
  if (k <= 2)
    return Formula::diff(random_timing(rng, n_acts), random_timing(rng, n_acts),
                         std::uniform_int_distribution<Tick>(-3, 3)(rng));
  if (k == 3) return Formula::negate(random_formula(rng, n_acts, depth - 1));
  if (k == 6)
    return Formula::implies(random_formula(rng, n_acts, depth - 1), random_formula(rng, n_acts, depth - 1));
  std::vector<Formula> kids;
  int m = std::uniform_int_distribution<int>(2, 3)(rng);
  for (int i = 0; i < m; ++i) kids.push_back(random_formula(rng, n_acts, depth - 1));
  return k == 4 ? Formula::all(std::move(kids)) : Formula::any(std::move(kids));
}

/// Random instance with at most `max_acts` activities and a horizon of at most `max_h`.
inline OsProblem random_os(std::mt19937_64& rng, std::size_t max_acts = 4, Tick max_h = 9) {
  for (;;) {
    OsProblem os;
    std::uniform_int_distribution<int> coin(0, 1);
    std::size_t n = std::uniform_int_distribution<std::size_t>(2, max_acts)(rng);
    int n_res = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int r = 0; r < n_res; ++r)
      os.resources.push_back({"r" + std::to_string(r), std::uniform_int_distribution<int>(1, 2)(rng)});
    int n_fl = std::uniform_int_distribution<int>(0, 1)(rng);
    for (int f = 0; f < n_fl; ++f) {
      FluentDef fd;
      fd.name = "f" + std::to_string(f);
      int dom = std::uniform_int_distribution<int>(2, 3)(rng);
      for (int v = 0; v < dom; ++v) fd.domain.push_back("v" + std::to_string(v));
      fd.initial = std::uniform_int_distribution<std::size_t>(0, dom - 1)(rng);
      os.fluents.push_back(fd);
    }
    for (std::size_t i = 0; i < n; ++i) {
      Activity a;
      a.name = "a" + std::to_string(i);
      a.optional = coin(rng);
      a.duration_lb = std::uniform_int_distribution<Tick>(1, 2)(rng);
      a.duration_ub = a.duration_lb + std::uniform_int_distribution<Tick>(0, 1)(rng);
      for (ResourceId r = 0; r < os.resources.size(); ++r)
        if (coin(rng))
          a.resource_usage.push_back({r, std::uniform_int_distribution<int>(1, os.resources[r].capacity)(rng)});
      for (FluentId f = 0; f < os.fluents.size(); ++f) {
        std::uniform_int_distribution<std::size_t> val(0, os.fluents[f].domain.size() - 1);
        std::uniform_int_distribution<int> five(0, 4);
        if (five(rng) < 2) {
          Tick k = five(rng) == 0 ? 1 : 0;
          a.effects.push_back({coin(rng) ? TimingExpr::start(i, k) : TimingExpr::end(i, k), f, val(rng)});
        }
        if (five(rng) < 2) {
          FluentCondition c;
          c.from = TimingExpr::start(i);
          c.to = coin(rng) ? TimingExpr::start(i) : TimingExpr::end(i);
          c.fluent = f;
          c.value = val(rng);
          a.conditions.push_back(c);
        }
      }
      os.activities.push_back(a);
    }
    int n_c = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int c = 0; c < n_c; ++c) os.temporal_constraints.push_back(random_formula(rng, n, 2));
    if (horizon(os) <= max_h) return os;
  }
}

}  // namespace samp::testgen
