// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// The desk grid is solved once per mode (fluents on and off, seed 1, 120 s each);
// those runs feed the soundness, progression, layering, door-scenario and
// encoding checks.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "random_os.hpp"
#include "reference_plans.hpp"
#include "samp/samp.hpp"

using namespace samp;

namespace {

constexpr double kInstanceBudget = 120.0;   // seconds per instance
constexpr std::uint64_t kSeed = 1;
constexpr int kRandomOsInstances = 200;
constexpr double kParallelRatio = 0.8;      // parallel makespan <= ratio x sequential
constexpr double kLayeringRatio = 0.7;      // planner time with Layer 1 <= ratio x without
constexpr int kTrapezoidTriples = 20;
constexpr double kTrapezoidRelTol = 1e-9;

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << "  " << detail << std::endl;
  if (!ok) ++failures;
}

struct Run {
  std::string name;
  SampProblem problem;
  SolveResult result;
};

EngineConfig config(bool layering = true) {
  EngineConfig c;
  c.timeout = kInstanceBudget;
  c.seed = kSeed;
  c.layering = layering;
  return c;
}

std::vector<SampProblem> desk_grid() {
  std::vector<SampProblem> out;
  for (const auto& q : logistics_desk_grid()) out.push_back(gen_logistics(q));
  for (const auto& q : jsp_desk_grid()) out.push_back(gen_jsp(q));
  return out;
}

std::vector<Run> solve_grid(bool fluents) {
  std::vector<Run> runs;
  for (auto p : desk_grid()) {
    p.os.use_fluents = fluents;
    auto r = solve(p, config());
    std::cerr << "  " << p.name << " fluents=" << fluents << " " << outcome_name(r.outcome)
              << (r.plan ? " makespan=" + std::to_string(makespan(r.plan->schedule)) : "")
              << " " << r.stats.total_seconds << "s" << std::endl;
    runs.push_back({p.name, p, std::move(r)});
  }
  return runs;
}

void soundness(const std::vector<Run>& a, const std::vector<Run>& b) {
  int plans = 0, bad = 0;
  std::string first;
  for (const auto* runs : {&a, &b})
    for (const auto& r : *runs) {
      if (r.result.outcome != Outcome::Plan) continue;
      ++plans;
      if (!validate_samp_schedule(*r.result.plan, r.problem).empty()) {
        ++bad;
        if (first.empty()) first = " first=" + r.name;
      }
    }
  report(1, plans > 0 && bad == 0,
         std::to_string(plans) + " plans over " + std::to_string(a.size() + b.size()) + " runs, " +
             std::to_string(bad) + " with violations" + first);
}

void scheduler_oracle() {
  std::mt19937_64 rng(2024);
  int mismatches = 0;
  std::map<std::string, int> by_status;
  for (int i = 0; i < kRandomOsInstances; ++i) {
    auto os = testgen::random_os(rng);
    const auto opt = i % 2 ? Objective::Satisfy : Objective::MinMakespan;
    auto got = get_schedule(os, opt);
    auto want = brute_force_schedule(os, opt);
    ++by_status[status_name(want.status)];
    const bool got_sat = got.schedule.has_value(), want_sat = want.schedule.has_value();
    bool ok = got_sat == want_sat;
    if (ok && got_sat) {
      ok = validate_schedule(*got.schedule, os).empty();
      if (opt == Objective::MinMakespan)
        ok = ok && got.status == SchedulerStatus::Optimal && makespan(*got.schedule) == makespan(*want.schedule);
    }
    if (!ok) ++mismatches;
  }
  std::ostringstream d;
  d << kRandomOsInstances << " instances, " << mismatches << " mismatches (oracle:";
  for (const auto& [s, n] : by_status) d << " " << s << "=" << n;
  d << ")";
  report(2, mismatches == 0, d.str());
}

void progression(const std::vector<Run>& a, const std::vector<Run>& b) {
  int checked = 0, bad = 0;
  for (const auto* runs : {&a, &b})
    for (const auto& r : *runs)
      for (const auto& rec : r.result.refinements) {
        if (rec.refinement.generalized) continue;
        ++checked;
        if (holds(rec.refinement, rec.candidate, r.problem)) ++bad;
      }
  report(3, checked > 0 && bad == 0,
         std::to_string(checked) + " refinements, " + std::to_string(bad) + " still true on their candidate");
}

void pruning() {
  int cases = 0, checked = 0, bad = 0, invalid = 0;
  std::string first;
  for (const auto& c : reference::reference_cases()) {
    ++cases;
    if (!validate_samp_schedule(c.plan, c.problem).empty()) ++invalid;
    for (bool fluents : {true, false}) {
      SampProblem p = c.problem;
      p.os.use_fluents = fluents;
      auto r = solve(p, config());
      for (const auto& rec : r.refinements) {
        ++checked;
        if (!holds(rec.refinement, c.plan.schedule, p)) {
          ++bad;
          if (first.empty()) first = " first=" + p.name + ": " + rec.text;
        }
      }
    }
  }
  report(4, cases >= 10 && invalid == 0 && bad == 0,
         std::to_string(cases) + " reference plans (" + std::to_string(invalid) + " invalid), " +
             std::to_string(checked) + " refinements, " + std::to_string(bad) + " prune a reference plan" + first);
}

void parallel_benefit() {
  auto p = gen_logistics({2, 1, 2, Door::Open, Pick::CorridorOnly});
  auto par = solve(p, config());
  EngineConfig c = config();
  c.forced_sequential = true;
  auto seq = solve(p, c);
  if (!par.plan || !seq.plan) {
    report(5, false, p.name + ": parallel " + outcome_name(par.outcome) + ", sequential " + outcome_name(seq.outcome));
    return;
  }
  const Tick mp = makespan(par.plan->schedule), ms = makespan(seq.plan->schedule);
  report(5, mp <= kParallelRatio * ms,
         p.name + ": makespan " + std::to_string(mp) + " vs sequential " + std::to_string(ms) + " (ratio " +
             std::to_string(static_cast<double>(mp) / ms) + ")");
}

void layering(const std::vector<Run>& fluent_runs) {
  double on = 0, off = 0;
  int instances = 0, differ = 0;
  for (const auto& r : fluent_runs) {
    if (r.name.rfind("log-", 0) != 0 || r.name.find("-DC-") == std::string::npos) continue;
    ++instances;
    auto without = solve(r.problem, config(false));
    on += r.result.stats.planner_seconds;
    off += without.stats.planner_seconds;
    const bool valid_on = r.result.outcome == Outcome::Plan && r.result.violations.empty();
    const bool valid_off = without.outcome == Outcome::Plan && without.violations.empty();
    if (valid_on != valid_off) ++differ;
  }
  std::ostringstream d;
  d << instances << " DC instances, planner " << on << "s with Layer 1 vs " << off << "s without, " << differ
    << " differ in validity";
  report(6, instances > 0 && on <= kLayeringRatio * off && differ == 0, d.str());
}

void door_scenario(const std::vector<Run>& fluent_runs) {
  const std::string name = logistics_name({2, 1, 1, Door::Closed, Pick::CorridorOnly});
  const Run* run = nullptr;
  for (const auto& r : fluent_runs)
    if (r.name == name) run = &r;
  if (!run) {
    report(7, false, name + " not in the grid");
    return;
  }
  // 0: waiting for a door refinement, 1: for a temporal one, 2: for the outcome.
  int stage = 0;
  std::string outcome;
  for (const auto& line : run->result.log) {
    auto j = nlohmann::json::parse(line);
    const std::string ev = j.at("event");
    if (ev == "refinement") {
      if (stage == 0 && j.at("kind") == "GEOMETRIC" && j.at("objects").get<std::vector<std::string>>() ==
                                                            std::vector<std::string>{"door"})
        stage = 1;
      else if (stage == 1 && j.at("kind") == "TEMPORAL")
        stage = 2;
    } else if (ev == "outcome") {
      outcome = j.at("outcome");
    }
  }
  report(7, stage == 2 && outcome == "PLAN",
         name + ": " + (stage >= 1 ? "door refinement" : "no door refinement") + ", " +
             (stage >= 2 ? "then temporal" : "no temporal after it") + ", outcome " + outcome);
}

void trapezoid() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.01, 12.0), speed(0.1, 2.0), accel(0.1, 3.0);
  int bad = 0;
  double worst = 0;
  for (int i = 0; i < kTrapezoidTriples; ++i) {
    const double d = dist(rng), v = speed(rng), a = accel(rng);
    const double want = reference::rest_to_rest_time(d, v, a);
    const double got = estimate_duration(d, ControlModel{v, a});
    const double rel = std::abs(got - want) / want;
    worst = std::max(worst, rel);
    if (rel > kTrapezoidRelTol) ++bad;
  }
  std::ostringstream s;
  s << kTrapezoidTriples << " triples, worst relative error " << worst;
  report(8, bad == 0, s.str());
}

void encoding(const std::vector<Run>& fl, const std::vector<Run>& ff) {
  int status_diff = 0, makespan_diff = 0, both_optimal = 0;
  std::string first;
  for (std::size_t i = 0; i < fl.size(); ++i) {
    const auto& a = fl[i].result;
    const auto& b = ff[i].result;
    const bool pa = a.outcome == Outcome::Plan, pb = b.outcome == Outcome::Plan;
    if (pa != pb) {
      ++status_diff;
      if (first.empty()) first = " first=" + fl[i].name;
      continue;
    }
    if (pa && a.optimal && b.optimal) {
      ++both_optimal;
      const Tick ma = makespan(a.plan->schedule), mb = makespan(b.plan->schedule);
      if (ma != mb) {
        ++makespan_diff;
        if (first.empty()) first = " first=" + fl[i].name + " (" + std::to_string(ma) + " vs " + std::to_string(mb) + ")";
      }
    }
  }
  report(9, status_diff == 0 && makespan_diff == 0,
         std::to_string(fl.size()) + " instances, " + std::to_string(status_diff) + " status differences, " +
             std::to_string(makespan_diff) + " of " + std::to_string(both_optimal) +
             " optimal pairs differ in makespan" + first);
}

}  // namespace

int main() {
  std::cerr << "solving the desk grid with fluents" << std::endl;
  const auto fluent_runs = solve_grid(true);
  std::cerr << "solving the desk grid without fluents" << std::endl;
  const auto free_runs = solve_grid(false);

  soundness(fluent_runs, free_runs);
  scheduler_oracle();
  progression(fluent_runs, free_runs);
  pruning();
  parallel_benefit();
  layering(fluent_runs);
  door_scenario(fluent_runs);
  trapezoid();
  encoding(fluent_runs, free_runs);
  return failures == 0 ? 0 : 1;
}
