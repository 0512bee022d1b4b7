#pragma once

// The solve loop: schedule, check motion groups, refine, repeat.

#include <chrono>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "samp/motion.hpp"
#include "samp/refine.hpp"
#include "samp/scheduler.hpp"
#include "samp/semantics.hpp"

namespace samp {

enum class Outcome { Plan, Unsolvable, Incomplete };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Plan: return "PLAN";
    case Outcome::Unsolvable: return "UNSOLVABLE";
    case Outcome::Incomplete: return "INCOMPLETE";
  }
  return "?";
}

struct RefinementRecord {
  std::size_t iteration = 0;
  Refinement refinement;
  Schedule candidate;      // original activities only
  bool progression = true; // false on the candidate (generalized ones are not checked)
  std::string text;
};

struct EngineConfig {
  double t_p = 10.0;
  double t_p_max = 160.0;
  double timeout = 600.0;
  Objective opt = Objective::MinMakespan;
  std::uint64_t seed = 0;
  bool layering = true;
  bool forced_sequential = false;  // no two motion activities may overlap
  PlannerConfig planner;
  std::function<void(const RefinementRecord&)> on_refinement;
};

struct RunStats {
  std::size_t iterations = 0;
  std::size_t resets = 0;
  std::size_t path_calls = 0;    // Layer 1 path searches run
  std::size_t single_calls = 0;  // Layer 1 timing checks run
  std::size_t group_calls = 0;   // Layer 2 group plans run
  std::size_t cache_hits = 0;
  std::size_t repeated_candidates = 0;
  std::size_t progression_failures = 0;
  std::size_t geometric_single = 0, geometric_group = 0;
  std::size_t temporal_single = 0, temporal_group = 0;
  std::size_t generalized = 0;
  double scheduler_seconds = 0.0;
  double planner_seconds = 0.0;
  double total_seconds = 0.0;
  double final_t_p = 0.0;
};

struct IterationRecord {
  std::size_t index = 0;
  SchedulerStatus status = SchedulerStatus::Unsat;
  Tick makespan = 0;
  std::size_t refinements = 0;
};

struct SolveResult {
  Outcome outcome = Outcome::Incomplete;
  std::optional<SampSchedule> plan;
  bool optimal = false;  // the accepted candidate was proved makespan-optimal by the scheduler
  std::vector<Violation> violations;  // validator output on the plan; empty when sound
  RunStats stats;
  std::vector<IterationRecord> iterations;
  std::vector<RefinementRecord> refinements;
  std::vector<std::string> log;  // one JSON record per line
};

namespace engine_detail {

using Clock = std::chrono::steady_clock;

inline double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// No two motion activities on different objects overlap.
inline void add_sequential_constraints(EncodedProblem& e, const SampProblem& p) {
  for (ActivityId a = 0; a < p.os.activities.size(); ++a)
    for (ActivityId b = a + 1; b < p.os.activities.size(); ++b) {
      const auto& ma = p.os.activities[a].motion;
      const auto& mb = p.os.activities[b].motion;
      if (!ma || !mb || ma->object == mb->object) continue;
      e.os.temporal_constraints.push_back(Formula::implies(
          Formula::all({Formula::present(a), Formula::present(b)}),
          Formula::any({Formula::before(TimingExpr::end(a), TimingExpr::start(b)),
                        Formula::before(TimingExpr::end(b), TimingExpr::start(a))})));
    }
}

class Run {
 public:
  Run(const SampProblem& p, const EngineConfig& cfg, MotionCache& cache)
      : p_(p), cfg_(cfg), cache_(cache), targets_(relevant_configurations(p)), t0_(Clock::now()) {}

  SolveResult go() {
    EncodedProblem base = encode_continuity(p_);
    if (cfg_.forced_sequential) add_sequential_constraints(base, p_);
    EncodedProblem work = base;
    double t_p = cfg_.t_p;
    std::set<std::vector<Tick>> seen;
    const std::size_t hits_before = cache_.hits();
    // Refinements only add constraints, so an optimum proved earlier (since the last
    // reset) bounds every later one from below. Auxiliary activities copy the timing
    // of an original one and add no effects, so they cannot lower it either.
    Tick lower = 0, base_lower = 0;

    for (std::size_t iter = 0;; ++iter) {
      res_.stats.iterations = iter;
      const double left = cfg_.timeout - since(t0_);
      if (left <= 0) return finish(Outcome::Incomplete, t_p, hits_before);
      auto ts = Clock::now();
      ScheduleResult sr = get_schedule(work.os, cfg_.opt, left, cfg_.seed, lower);
      if (sr.status == SchedulerStatus::Optimal) {
        lower = makespan(*sr.schedule);
        if (iter == 0) base_lower = lower;
      }
      res_.stats.scheduler_seconds += since(ts);
      IterationRecord rec{iter, sr.status, sr.schedule ? makespan(*sr.schedule) : 0, 0};

      if (sr.status == SchedulerStatus::Timeout || (!sr.schedule && since(t0_) >= cfg_.timeout)) {
        res_.iterations.push_back(rec);
        return finish(Outcome::Incomplete, t_p, hits_before);
      }
      if (!sr.schedule) {
        res_.iterations.push_back(rec);
        log({{"event", "candidate"}, {"iteration", iter}, {"status", status_name(sr.status)}});
        if (iter == 0) return finish(Outcome::Unsolvable, t_p, hits_before);
        t_p = std::min(2 * t_p, cfg_.t_p_max);
        work = base;
        lower = base_lower;
        seen.clear();
        ++res_.stats.resets;
        log({{"event", "reset"}, {"iteration", iter}, {"t_p", t_p}});
        continue;
      }

      const Schedule rho = original_part(*sr.schedule, p_.os.activities.size());
      std::vector<Tick> fingerprint;
      for (std::size_t a = 0; a < rho.size(); ++a) {
        fingerprint.push_back(rho.present[a] ? 1 : 0);
        fingerprint.push_back(rho.present[a] ? rho.start[a] : 0);
        fingerprint.push_back(rho.present[a] ? rho.end[a] : 0);
      }
      if (!seen.insert(fingerprint).second) ++res_.stats.repeated_candidates;
      log({{"event", "candidate"},
           {"iteration", iter},
           {"status", status_name(sr.status)},
           {"makespan", rec.makespan}});

      const std::size_t before = res_.refinements.size();
      auto traj = check_candidate(rho, work, iter, t_p);
      rec.refinements = res_.refinements.size() - before;
      res_.iterations.push_back(rec);
      if (timed_out_) return finish(Outcome::Incomplete, t_p, hits_before);
      if (traj) {
        SampSchedule pi{rho, std::move(*traj)};
        res_.violations = validate_samp_schedule(pi, p_);
        res_.optimal = sr.status == SchedulerStatus::Optimal;
        res_.plan = std::move(pi);
        return finish(Outcome::Plan, t_p, hits_before);
      }
    }
  }

 private:
  // -- cached planner calls ------------------------------------------------

  PathResult path(const MotionEntry& e, const std::map<ObjectId, Configuration>& frozen, double t_p) {
    GroupQuery q;
    q.entries.push_back(e);
    q.entries.back().delay = q.entries.back().duration = 0;
    q.conf = frozen;
    q.conf[e.object] = e.start;
    auto cq = canonicalize(p_, q, "path", targets_);
    PathResult r;
    if (auto hit = cache_.find_path(cq.key, t_p)) {
      r = hit->result;
    } else {
      const ObjectId mover = cq.query.entries.front().object;
      std::map<ObjectId, Configuration> fz;
      for (const auto& [o, c] : cq.query.conf)
        if (o != mover) fz[o] = c;
      const auto& ce = cq.query.entries.front();
      PathQuery pq{cq.world.objects[mover].geometry, ce.start, ce.goal, cq.targets};
      auto ts = Clock::now();
      r = plan_path(pq, make_scene(cq.world, fz), iterations(t_p), cfg_.planner, key_seed(cq.key, cfg_.seed));
      res_.stats.planner_seconds += since(ts);
      ++res_.stats.path_calls;
      cache_.store_path(cq.key, {r, t_p});
    }
    std::set<ObjectId> real;
    for (ObjectId o : r.blockers) real.insert(cq.object_of[o]);
    r.blockers = real;
    return r;
  }

  MotionResult motion(const GroupQuery& q, double t_p, bool group) {
    auto cq = canonicalize(p_, q, "motion", targets_);
    MotionResult m;
    if (auto hit = cache_.find_motion(cq.key, t_p)) {
      m = hit->result;
    } else {
      auto ts = Clock::now();
      m = get_motion(cq.world, cq.query, t_p, cfg_.planner, key_seed(cq.key, cfg_.seed), &cq.targets);
      res_.stats.planner_seconds += since(ts);
      ++(group ? res_.stats.group_calls : res_.stats.single_calls);
      cache_.store_motion(cq.key, {m, t_p});
    }
    MotionResult out = m;
    auto act = [&](ActivityId k) { return cq.activity_of.at(k); };
    out.planned.clear();
    for (ActivityId k : m.planned) out.planned.push_back(act(k));
    out.trajectories.clear();
    for (const auto& [k, tr] : m.trajectories) out.trajectories[act(k)] = tr;
    out.delay.clear();
    for (const auto& [k, v] : m.delay) out.delay[act(k)] = v;
    out.duration.clear();
    for (const auto& [k, v] : m.duration) out.duration[act(k)] = v;
    out.failed = m.failed == kNone ? kNone : act(m.failed);
    out.report = {};
    for (const auto& [k, s] : m.report.sigma) out.report.sigma[act(k)] = s;
    for (const auto& [k, w] : m.report.omega) {
      auto& dst = out.report.omega[act(k)];
      for (ObjectId o : w) dst.insert(cq.object_of[o]);
    }
    return out;
  }

  std::size_t iterations(double t_p) const {
    return static_cast<std::size_t>(std::max(1.0, t_p * cfg_.planner.iterations_per_second));
  }

  // -- candidate checking --------------------------------------------------

  MotionEntry entry(ActivityId a, const Schedule& rho, Tick s_min) const {
    const auto& act = p_.os.activities[a];
    const double tick = p_.tick_seconds;
    return {a,
            act.name,
            act.motion->object,
            act.motion->start,
            act.motion->goal,
            static_cast<double>(rho.start[a] - s_min) * tick,
            static_cast<double>(rho.end[a] - rho.start[a]) * tick};
  }

  void emit(Refinement r, const Schedule& rho, EncodedProblem& work, std::size_t iter) {
    RefinementRecord rec{iter, std::move(r), rho, true, ""};
    if (!rec.refinement.generalized) {
      rec.progression = !holds(rec.refinement, rho, p_);
      if (!rec.progression) ++res_.stats.progression_failures;
    } else {
      ++res_.stats.generalized;
    }
    const bool geo = rec.refinement.kind == RefinementKind::Geometric;
    const bool single = rec.refinement.layer == Layer::Single;
    ++(geo ? (single ? res_.stats.geometric_single : res_.stats.geometric_group)
           : (single ? res_.stats.temporal_single : res_.stats.temporal_group));
    apply_refinement(work, rec.refinement, p_);
    rec.text = describe(rec.refinement, p_);
    nlohmann::json j{{"event", "refinement"},
                     {"iteration", iter},
                     {"kind", kind_name(rec.refinement.kind)},
                     {"layer", layer_name(rec.refinement.layer)},
                     {"generalized", rec.refinement.generalized},
                     {"progression", rec.progression},
                     {"formula", rec.text}};
    nlohmann::json g = nlohmann::json::array();
    for (ActivityId a : rec.refinement.group) g.push_back(p_.os.activities[a].name);
    j["group"] = g;
    std::set<std::string> objects;
    for (const auto& t : rec.refinement.chconf) objects.insert(p_.objects[t.object].name);
    j["objects"] = objects;
    log(j);
    if (cfg_.on_refinement) cfg_.on_refinement(rec);
    res_.refinements.push_back(std::move(rec));
  }

  bool out_of_time() {
    if (since(t0_) >= cfg_.timeout) timed_out_ = true;
    return timed_out_;
  }

  /// Geometric refinement for `g` from a failed path or group plan; falls back to
  /// excluding the group when only walls are in the way.
  void geometric(const std::vector<ActivityId>& g, const Formula& guard, const ConflictReport& report,
                 const std::map<ObjectId, Configuration>& conf, Layer layer, const Schedule& rho,
                 EncodedProblem& work, std::size_t iter, const PathResult* generalize_from) {
    const auto moved = moved_objects(g, p_);
    bool any = false;
    for (const auto& [a, w] : report.omega)
      for (ObjectId o : w) any |= !moved.count(o);
    if (!any) {
      emit(exclusion_refinement(g, guard, layer), rho, work, iter);
      return;
    }
    Refinement r = geometric_refinement(g, guard, report, conf, p_, layer);
    std::vector<Refinement> extra;
    if (generalize_from && g.size() == 1) extra = generalize(r, *generalize_from, rho, p_);
    emit(std::move(r), rho, work, iter);
    for (auto& x : extra) emit(std::move(x), rho, work, iter);
  }

  std::optional<std::map<ActivityId, Trajectory>> check_candidate(const Schedule& rho, EncodedProblem& work,
                                                                   std::size_t iter, double t_p) {
    std::map<ObjectId, Configuration> conf;
    for (ObjectId o = 0; o < p_.objects.size(); ++o) conf[o] = p_.objects[o].initial;
    std::map<ActivityId, Trajectory> out;
    const double tick = p_.tick_seconds;

    for (const auto& grp : compute_groups(rho, p_)) {
      const auto& g = grp.activities;
      const auto moved = moved_objects(g, p_);
      const Formula guard = rcond(g, rho, p_);
      std::map<ObjectId, Configuration> others;
      for (const auto& [o, q] : conf)
        if (!moved.count(o)) others[o] = q;
      std::vector<ActivityId> by_delay = g;
      std::sort(by_delay.begin(), by_delay.end(), [&](ActivityId a, ActivityId b) {
        return std::tie(rho.start[a], p_.os.activities[a].name) < std::tie(rho.start[b], p_.os.activities[b].name);
      });

      if (cfg_.layering) {
        bool refined = false;
        for (ActivityId a : by_delay) {
          auto pr = path(entry(a, rho, grp.s_min), others, t_p);
          if (out_of_time()) return std::nullopt;
          if (pr.found) continue;
          ConflictReport rep;
          rep.sigma[a] = pr.unreachable;
          rep.omega[a] = pr.blockers;
          geometric(g, guard, rep, conf, Layer::Single, rho, work, iter, &pr);
          refined = true;
        }
        if (refined) return std::nullopt;
        for (ActivityId a : by_delay) {
          GroupQuery q;
          q.conf = others;
          MotionEntry e = entry(a, rho, grp.s_min);
          e.delay = 0;
          q.conf[e.object] = e.start;
          q.entries.push_back(e);
          auto m = motion(q, t_p, false);
          if (out_of_time()) return std::nullopt;
          if (m.status == MotionResult::Status::Solved) continue;
          if (m.status == MotionResult::Status::Blocked) {
            geometric(g, guard, m.report, conf, Layer::Single, rho, work, iter, nullptr);
          } else {
            const double shift = static_cast<double>(rho.start[a] - grp.s_min) * tick;
            std::map<ActivityId, double> arrival{{a, shift + m.delay.at(a) + m.duration.at(a)}};
            emit(temporal_refinement(g, guard, {a}, arrival, rho, others, p_, Layer::Single, cfg_.planner), rho,
                 work, iter);
          }
          refined = true;
        }
        if (refined) return std::nullopt;
      }

      GroupQuery q;
      q.conf = conf;
      for (ActivityId a : g) q.entries.push_back(entry(a, rho, grp.s_min));
      auto m = motion(q, t_p, true);
      if (out_of_time()) return std::nullopt;
      if (m.status == MotionResult::Status::TimingViolation) {
        std::map<ActivityId, double> arrival;
        for (ActivityId a : m.planned) arrival[a] = m.delay.at(a) + m.duration.at(a);
        emit(temporal_refinement(g, guard, m.planned, arrival, rho, others, p_, Layer::Group, cfg_.planner), rho,
             work, iter);
        return std::nullopt;
      }
      if (m.status == MotionResult::Status::Blocked) {
        bool outside = false;
        for (const auto& [a, w] : m.report.omega)
          for (ObjectId o : w) outside |= !moved.count(o);
        if (!m.parked && outside) {
          geometric(g, guard, m.report, conf, Layer::Group, rho, work, iter, nullptr);
        } else {
          // Only group members are in the way: some start has to move.
          std::vector<ActivityId> involved = m.planned;
          if (m.failed != kNone) involved.push_back(m.failed);
          if (involved.empty()) involved = g;
          Refinement r = temporal_refinement(g, guard, involved, {}, rho, others, p_, Layer::Group, cfg_.planner);
          // Nothing to change but the start order itself: rule out that order.
          if (r.timing.empty() && r.chconf.empty())
            r = exclusion_refinement(g, Formula::all({r.guard, same_start_order(g, rho)}), Layer::Group);
          emit(std::move(r), rho, work, iter);
        }
        return std::nullopt;
      }

      const double offset = static_cast<double>(grp.s_min) * tick;
      for (auto& [a, tr] : m.trajectories) {
        for (auto& s : tr.samples) s.t += offset;
        out[a] = std::move(tr);
      }
      // Each moved object ends at the goal of its last move in the group.
      std::map<ObjectId, ActivityId> last;
      for (ActivityId a : g) {
        ObjectId o = p_.os.activities[a].motion->object;
        auto it = last.find(o);
        if (it == last.end() || rho.start[a] > rho.start[it->second]) last[o] = a;
      }
      for (const auto& [o, a] : last) conf[o] = p_.os.activities[a].motion->goal;
    }
    return out;
  }

  SolveResult finish(Outcome o, double t_p, std::size_t hits_before) {
    res_.outcome = o;
    res_.stats.final_t_p = t_p;
    res_.stats.cache_hits = cache_.hits() - hits_before;
    res_.stats.total_seconds = since(t0_);
    nlohmann::json j{{"event", "outcome"},
                     {"outcome", outcome_name(o)},
                     {"iterations", res_.stats.iterations + 1},
                     {"refinements",
                      {{"geometric", {res_.stats.geometric_single, res_.stats.geometric_group}},
                       {"temporal", {res_.stats.temporal_single, res_.stats.temporal_group}}}},
                     {"cache_hits", res_.stats.cache_hits},
                     {"scheduler_seconds", res_.stats.scheduler_seconds},
                     {"planner_seconds", res_.stats.planner_seconds},
                     {"total_seconds", res_.stats.total_seconds}};
    if (res_.plan) {
      j["makespan"] = makespan(res_.plan->schedule);
      j["violations"] = res_.violations.size();
    }
    log(j);
    return std::move(res_);
  }

  void log(const nlohmann::json& j) { res_.log.push_back(j.dump()); }

  const SampProblem& p_;
  const EngineConfig& cfg_;
  MotionCache& cache_;
  std::vector<Configuration> targets_;
  Clock::time_point t0_;
  bool timed_out_ = false;
  SolveResult res_;
};

}  // namespace engine_detail

/// Alternates scheduling and motion checking until a candidate survives every
/// motion group. The cache may be shared across calls on the same problem.
inline SolveResult solve(const SampProblem& p, const EngineConfig& cfg, MotionCache* cache = nullptr) {
  MotionCache local;
  engine_detail::Run run(p, cfg, cache ? *cache : local);
  return run.go();
}

}  // namespace samp
