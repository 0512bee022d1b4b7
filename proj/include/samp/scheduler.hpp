#pragma once

// Optional-activity scheduler: tree search over presence and difference atoms
// with an incrementally closed distance matrix, plus a brute-force oracle.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "samp/model.hpp"
#include "samp/semantics.hpp"

namespace samp {

enum class Objective { Satisfy, MinMakespan };
enum class SchedulerStatus { Valid, Optimal, Unsat, Timeout };

inline const char* status_name(SchedulerStatus s) {
  switch (s) {
    case SchedulerStatus::Valid: return "VALID";
    case SchedulerStatus::Optimal: return "OPTIMAL";
    case SchedulerStatus::Unsat: return "UNSAT";
    case SchedulerStatus::Timeout: return "TIMEOUT";
  }
  return "?";
}

struct ScheduleResult {
  std::optional<Schedule> schedule;
  SchedulerStatus status = SchedulerStatus::Unsat;
  std::uint64_t nodes = 0;
};

/// Fluent conditions and the non-conflict rule rewritten as temporal formulas.
inline std::vector<Formula> compile_fluents(const OsProblem& os) {
  std::vector<Formula> out;
  struct Eff {
    ActivityId a;
    TimingExpr at;
    std::size_t value;
  };
  std::vector<std::vector<Eff>> effects(os.fluents.size());
  for (ActivityId a = 0; a < os.activities.size(); ++a)
    for (const auto& e : os.activities[a].effects) effects[e.fluent].push_back({a, e.at, e.value});

  const TimingExpr zero = TimingExpr::origin(0);
  auto both_present = [](ActivityId a, ActivityId b) {
    return a == b ? Formula::present(a) : Formula::all({Formula::present(a), Formula::present(b)});
  };

  for (const auto& list : effects)
    for (std::size_t i = 0; i < list.size(); ++i)
      for (std::size_t j = i + 1; j < list.size(); ++j)
        out.push_back(Formula::implies(
            both_present(list[i].a, list[j].a),
            Formula::any({Formula::before(list[i].at, list[j].at), Formula::before(list[j].at, list[i].at)})));

  for (ActivityId a = 0; a < os.activities.size(); ++a) {
    for (const auto& c : os.activities[a].conditions) {
      const auto& list = effects[c.fluent];
      std::vector<Formula> options;
      options.push_back(Formula::negate(Formula::not_after(c.from, c.to)));  // empty window
      // Every effect writing another value must stay outside [lo, c.to].
      auto others_clear = [&](std::size_t skip, const std::function<Formula(const TimingExpr&)>& below) {
        std::vector<Formula> conj;
        for (std::size_t k = 0; k < list.size(); ++k) {
          if (k == skip || list[k].value == c.value) continue;
          conj.push_back(Formula::implies(
              Formula::present(list[k].a),
              Formula::any({below(list[k].at), Formula::negate(Formula::not_after(list[k].at, c.to))})));
        }
        return Formula::all(std::move(conj));
      };
      if (os.fluents[c.fluent].initial == c.value)
        options.push_back(others_clear(kNone, [&](const TimingExpr& k) { return Formula::not_after(k, zero); }));
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (list[k].value != c.value) continue;
        const TimingExpr at = list[k].at;
        options.push_back(Formula::all({Formula::present(list[k].a),
                                        Formula::negate(Formula::not_after(at, zero)),
                                        Formula::not_after(at, c.from),
                                        others_clear(k, [&](const TimingExpr& o) { return Formula::before(o, at); })}));
      }
      out.push_back(Formula::implies(Formula::present(a), Formula::any(std::move(options))));
    }
  }
  return out;
}

namespace sched_detail {

enum class Truth : std::int8_t { False = 0, True = 1, Unknown = 2 };

inline Truth negate(Truth t) {
  return t == Truth::Unknown ? t : (t == Truth::True ? Truth::False : Truth::True);
}

struct Node {
  Formula::Kind kind;
  std::int32_t activity = -1;
  std::int32_t u = 0, v = 0;  // Diff: x_u - x_v <= c
  std::int64_t c = 0;
  std::uint32_t first = 0, count = 0;
};

class Solver {
 public:
  using Clock = std::chrono::steady_clock;
  static constexpr std::int32_t kInf = 1 << 29;

  Solver(const OsProblem& os, Objective opt, double deadline_seconds, std::uint64_t seed, Tick lower_bound = 0)
      : os_(os), opt_(opt), n_(os.activities.size()), vars_(1 + 2 * n_), lower_bound_(lower_bound) {
    horizon_ = schedule_bound(os);
    using namespace std::chrono;
    deadline_ = std::isfinite(deadline_seconds)
                    ? Clock::now() + duration_cast<Clock::duration>(duration<double>(std::max(0.0, deadline_seconds)))
                    : Clock::time_point::max();
    std::vector<Formula> all = os.temporal_constraints;
    for (auto& f : compile_fluents(os)) all.push_back(std::move(f));
    if (seed != 0) std::shuffle(all.begin(), all.end(), std::mt19937_64(seed));
    for (const auto& f : all) roots_.push_back(compile(f));
    for (ResourceId r = 0; r < os.resources.size(); ++r) {
      std::vector<std::size_t> users;
      for (std::size_t a = 0; a < n_; ++a)
        if (os.activities[a].usage_of(r) > 0) users.push_back(a);
      for (std::size_t i = 0; i < users.size(); ++i)
        for (std::size_t j = i + 1; j < users.size(); ++j)
          if (os.activities[users[i]].usage_of(r) + os.activities[users[j]].usage_of(r) > os.resources[r].capacity)
            clashes_.push_back({users[i], users[j]});
      if (os.resources[r].capacity == 1) unary_.push_back(std::move(users));
    }
  }

  ScheduleResult run() {
    ScheduleResult res;
    std::optional<Tick> bound;
    for (;;) {
      auto st = root_state(bound);
      std::optional<Schedule> sol;
      bool found = st && search(*st, sol);
      res.nodes = nodes_;
      if (timed_out_) {
        if (res.schedule) res.status = SchedulerStatus::Valid;
        else res.status = SchedulerStatus::Timeout;
        return res;
      }
      if (!found) {
        res.status = res.schedule ? SchedulerStatus::Optimal : SchedulerStatus::Unsat;
        if (res.schedule && opt_ == Objective::Satisfy) res.status = SchedulerStatus::Valid;
        return res;
      }
      auto violations = validate_schedule(*sol, os_);
      if (!violations.empty())
        throw std::logic_error("scheduler produced an invalid schedule: " + format_violation(violations.front()));
      res.schedule = sol;
      if (opt_ == Objective::Satisfy) {
        res.status = SchedulerStatus::Valid;
        return res;
      }
      Tick m = makespan(*sol);
      if (m <= lower_bound_) {
        res.status = SchedulerStatus::Optimal;
        return res;
      }
      bound = m - 1;
    }
  }

 private:
  struct State {
    std::vector<std::int32_t> d;   // d[i * vars + j]: bound on x_j - x_i
    std::vector<std::int8_t> pres;  // Truth
    std::vector<char> sat;
  };

  std::uint32_t compile(const Formula& f) {
    Node node;
    node.kind = f.kind;
    if (f.kind == Formula::Kind::Present) node.activity = static_cast<std::int32_t>(f.activity);
    if (f.kind == Formula::Kind::Diff) {
      auto [vl, ol] = var_of(f.lhs);
      auto [vr, or_] = var_of(f.rhs);
      node.u = vl;
      node.v = vr;
      node.c = f.bound - ol + or_;
    }
    std::vector<std::uint32_t> kids;
    for (const auto& c : f.children) kids.push_back(compile(c));
    node.first = static_cast<std::uint32_t>(child_index_.size());
    node.count = static_cast<std::uint32_t>(kids.size());
    child_index_.insert(child_index_.end(), kids.begin(), kids.end());
    nodes_list_.push_back(node);
    return static_cast<std::uint32_t>(nodes_list_.size() - 1);
  }

  static std::pair<std::int32_t, std::int64_t> var_of(const TimingExpr& k) {
    switch (k.anchor) {
      case Anchor::Start: return {static_cast<std::int32_t>(1 + 2 * k.activity), k.offset};
      case Anchor::End: return {static_cast<std::int32_t>(2 + 2 * k.activity), -k.offset};
      case Anchor::Origin: return {0, k.offset};
    }
    return {0, 0};
  }
  std::int32_t sv(std::size_t a) const { return static_cast<std::int32_t>(1 + 2 * a); }
  std::int32_t ev(std::size_t a) const { return static_cast<std::int32_t>(2 + 2 * a); }

  std::int32_t& D(State& s, std::int32_t i, std::int32_t j) const { return s.d[i * vars_ + j]; }
  std::int32_t D(const State& s, std::int32_t i, std::int32_t j) const { return s.d[i * vars_ + j]; }

  static std::int32_t clamp_bound(std::int64_t c) {
    return static_cast<std::int32_t>(std::clamp<std::int64_t>(c, -kInf, kInf));
  }

  /// Adds x_u - x_v <= c. Returns false on a negative cycle.
  bool add_edge(State& s, std::int32_t u, std::int32_t v, std::int64_t c64) {
    if (u == v) return c64 >= 0;
    std::int32_t c = clamp_bound(c64);
    if (D(s, v, u) <= c) return true;
    if (static_cast<std::int64_t>(D(s, u, v)) + c < 0) return false;
    changed_ = true;
    // Entries stay within [-kInf, kInf], so three of them sum without overflow.
    const std::size_t N = vars_;
    std::int32_t* d = s.d.data();
    const std::int32_t* row_u = d + u * N;
    row_buf_.assign(row_u, row_u + N);
    const std::int32_t* ru = row_buf_.data();
    for (std::size_t i = 0; i < N; ++i) {
      const std::int32_t div = d[i * N + v];
      if (div >= kInf) continue;
      const std::int32_t via = div + c;
      if (via >= d[i * N + u]) continue;
      std::int32_t* row = d + i * N;
      for (std::size_t j = 0; j < N; ++j) {
        const std::int32_t cand = ru[j] >= kInf ? kInf : via + ru[j];
        row[j] = std::min(row[j], cand);
      }
    }
    return true;
  }

  bool set_presence(State& s, std::size_t a, bool val) {
    auto cur = static_cast<Truth>(s.pres[a]);
    if (cur != Truth::Unknown) return (cur == Truth::True) == val;
    s.pres[a] = static_cast<std::int8_t>(val ? Truth::True : Truth::False);
    changed_ = true;
    if (!val) return true;
    const auto& act = os_.activities[a];
    if (!add_edge(s, ev(a), sv(a), act.duration_ub)) return false;
    if (!add_edge(s, sv(a), ev(a), -act.duration_lb)) return false;
    if (bound_ && !add_edge(s, ev(a), 0, *bound_)) return false;
    return true;
  }

  std::optional<State> root_state(std::optional<Tick> bound) {
    bound_ = bound;
    State s;
    s.d.assign(vars_ * vars_, kInf);
    for (std::size_t i = 0; i < vars_; ++i) s.d[i * vars_ + i] = 0;
    s.pres.assign(n_, static_cast<std::int8_t>(Truth::Unknown));
    s.sat.assign(roots_.size(), 0);
    for (std::size_t a = 0; a < n_; ++a) {
      if (!add_edge(s, 0, sv(a), 0) || !add_edge(s, ev(a), 0, horizon_) || !add_edge(s, sv(a), ev(a), 0))
        return std::nullopt;
    }
    for (std::size_t a = 0; a < n_; ++a)
      if (!os_.activities[a].optional && !set_presence(s, a, true)) return std::nullopt;
    return s;
  }

  Truth eval(const State& s, std::uint32_t id) const {
    const Node& n = nodes_list_[id];
    using K = Formula::Kind;
    switch (n.kind) {
      case K::True: return Truth::True;
      case K::False: return Truth::False;
      case K::Present: return static_cast<Truth>(s.pres[n.activity]);
      case K::Diff:
        if (n.u == n.v) return n.c >= 0 ? Truth::True : Truth::False;
        if (D(s, n.v, n.u) <= n.c) return Truth::True;
        if (static_cast<std::int64_t>(D(s, n.u, n.v)) <= -n.c - 1) return Truth::False;
        return Truth::Unknown;
      case K::Not: return negate(eval(s, child_index_[n.first]));
      case K::And: {
        Truth r = Truth::True;
        for (std::uint32_t k = 0; k < n.count; ++k) {
          Truth t = eval(s, child_index_[n.first + k]);
          if (t == Truth::False) return Truth::False;
          if (t == Truth::Unknown) r = Truth::Unknown;
        }
        return r;
      }
      case K::Or: {
        Truth r = Truth::False;
        for (std::uint32_t k = 0; k < n.count; ++k) {
          Truth t = eval(s, child_index_[n.first + k]);
          if (t == Truth::True) return Truth::True;
          if (t == Truth::Unknown) r = Truth::Unknown;
        }
        return r;
      }
      case K::Implies: {
        Truth a = eval(s, child_index_[n.first]);
        if (a == Truth::False) return Truth::True;
        Truth b = eval(s, child_index_[n.first + 1]);
        if (b == Truth::True) return Truth::True;
        if (a == Truth::True && b == Truth::False) return Truth::False;
        return Truth::Unknown;
      }
    }
    return Truth::Unknown;
  }

  /// Makes node `id` take value `val`, propagating through the tree where that is forced.
  bool force(State& s, std::uint32_t id, bool val) {
    Truth cur = eval(s, id);
    if (cur != Truth::Unknown) return (cur == Truth::True) == val;
    const Node& n = nodes_list_[id];
    using K = Formula::Kind;
    switch (n.kind) {
      case K::True:
      case K::False: return true;
      case K::Present: return set_presence(s, static_cast<std::size_t>(n.activity), val);
      case K::Diff:
        return val ? add_edge(s, n.u, n.v, n.c) : add_edge(s, n.v, n.u, -n.c - 1);
      case K::Not: return force(s, child_index_[n.first], !val);
      case K::And:
      case K::Or: {
        bool conj = n.kind == K::And;
        if (val == conj) {
          for (std::uint32_t k = 0; k < n.count; ++k)
            if (!force(s, child_index_[n.first + k], val)) return false;
          return true;
        }
        // One child must take `val`; act only when a single candidate remains.
        std::int64_t open = -1;
        for (std::uint32_t k = 0; k < n.count; ++k) {
          Truth t = eval(s, child_index_[n.first + k]);
          if (t == Truth::Unknown) {
            if (open >= 0) return true;
            open = k;
          } else if ((t == Truth::True) == val) {
            return true;
          }
        }
        if (open < 0) return false;
        return force(s, child_index_[n.first + static_cast<std::uint32_t>(open)], val);
      }
      case K::Implies: {
        std::uint32_t a = child_index_[n.first], b = child_index_[n.first + 1];
        if (!val) return force(s, a, true) && force(s, b, false);
        Truth ta = eval(s, a), tb = eval(s, b);
        if (ta == Truth::True) return force(s, b, true);
        if (tb == Truth::False) return force(s, a, false);
        return true;
      }
    }
    return true;
  }

  /// Two present activities that cannot share a resource at any tick: when one
  /// order is impossible the other is forced.
  bool propagate_clashes(State& s) {
    for (auto [x, y] : clashes_) {
      if (static_cast<Truth>(s.pres[x]) != Truth::True || static_cast<Truth>(s.pres[y]) != Truth::True) continue;
      const bool xy = D(s, ev(x), sv(y)) >= 1;  // x.end - y.start <= -1 still possible
      const bool yx = D(s, ev(y), sv(x)) >= 1;
      if (!xy && !yx) return false;
      if (!xy && !add_edge(s, ev(y), sv(x), -1)) return false;
      if (!yx && !add_edge(s, ev(x), sv(y), -1)) return false;
    }
    return true;
  }

  /// Overload check on unary resources: the present users need their minimum
  /// durations plus one separating tick each between earliest start and latest end.
  bool check_unary(const State& s) const {
    for (const auto& users : unary_) {
      std::int64_t lo = kInf, hi = -kInf, need = -1;
      for (std::size_t a : users) {
        if (static_cast<Truth>(s.pres[a]) != Truth::True) continue;
        lo = std::min<std::int64_t>(lo, earliest(s, sv(a)));
        hi = std::max<std::int64_t>(hi, D(s, 0, ev(a)));
        need += os_.activities[a].duration_lb + 1;
      }
      if (need > 0 && hi - lo < need) return false;
    }
    return true;
  }

  bool propagate(State& s) {
    do {
      changed_ = false;
      if (!propagate_clashes(s) || !check_unary(s)) return false;
      for (std::size_t i = 0; i < roots_.size(); ++i) {
        if (s.sat[i]) continue;
        Truth t = eval(s, roots_[i]);
        if (t == Truth::True) {
          s.sat[i] = 1;
          continue;
        }
        if (t == Truth::False) return false;
        if (!force(s, roots_[i], true)) return false;
        if (eval(s, roots_[i]) == Truth::True) s.sat[i] = 1;
      }
    } while (changed_);
    return true;
  }

  // Earliest solution of the current distance graph.
  Tick earliest(const State& s, std::int32_t var) const { return -D(s, var, 0); }

  /// Truth of a node under the earliest solution, reading undecided presences as false.
  bool guess(const State& s, std::uint32_t id) const {
    const Node& n = nodes_list_[id];
    using K = Formula::Kind;
    switch (n.kind) {
      case K::True: return true;
      case K::False: return false;
      case K::Present: return static_cast<Truth>(s.pres[n.activity]) == Truth::True;
      case K::Diff: return earliest(s, n.u) - earliest(s, n.v) <= n.c;
      case K::Not: return !guess(s, child_index_[n.first]);
      case K::And:
        for (std::uint32_t k = 0; k < n.count; ++k)
          if (!guess(s, child_index_[n.first + k])) return false;
        return true;
      case K::Or:
        for (std::uint32_t k = 0; k < n.count; ++k)
          if (guess(s, child_index_[n.first + k])) return true;
        return false;
      case K::Implies:
        return !guess(s, child_index_[n.first]) || guess(s, child_index_[n.first + 1]);
    }
    return false;
  }

  struct Decision {
    enum class Type { Node, Presence, Edge, Dead } type = Type::Node;
    std::uint32_t node = 0;
    bool val = true;
    std::int32_t u = 0, v = 0;
    std::int64_t c = 0;
  };

  /// Picks an undecided atom under `id` whose value `want` helps satisfy it.
  Decision pick(const State& s, std::uint32_t id, bool want) const {
    const Node& n = nodes_list_[id];
    using K = Formula::Kind;
    auto open_child = [&](bool prefer_guess) -> std::uint32_t {
      std::int64_t first = -1;
      for (std::uint32_t k = 0; k < n.count; ++k) {
        std::uint32_t c = child_index_[n.first + k];
        if (eval(s, c) != Truth::Unknown) continue;
        if (first < 0) first = c;
        if (!prefer_guess) break;
        if (guess(s, c) == want) return c;
      }
      return static_cast<std::uint32_t>(first);
    };
    switch (n.kind) {
      case K::Present:
      case K::Diff: {
        Decision d;
        d.node = id;
        d.val = want;
        return d;
      }
      case K::Not: return pick(s, child_index_[n.first], !want);
      case K::And: return pick(s, open_child(!want), want);
      case K::Or: return pick(s, open_child(want), want);
      case K::Implies: {
        std::uint32_t a = child_index_[n.first], b = child_index_[n.first + 1];
        Truth ta = eval(s, a), tb = eval(s, b);
        if (!want) return ta == Truth::Unknown ? pick(s, a, true) : pick(s, b, false);
        if (ta == Truth::True) return pick(s, b, true);
        if (tb == Truth::False) return pick(s, a, false);
        if (tb == Truth::Unknown && (!guess(s, a) || guess(s, b))) {
          if (!guess(s, a)) return pick(s, a, false);
          return pick(s, b, true);
        }
        return pick(s, a, false);
      }
      default: break;
    }
    throw std::logic_error("no open atom under an undecided formula");
  }

  std::optional<Decision> choose(const State& s) {
    for (std::size_t i = 0; i < roots_.size(); ++i)
      if (!s.sat[i] && eval(s, roots_[i]) == Truth::Unknown) return pick(s, roots_[i], true);
    for (std::size_t a = 0; a < n_; ++a) {
      if (static_cast<Truth>(s.pres[a]) != Truth::Unknown) continue;
      Decision d;
      d.type = Decision::Type::Presence;
      d.node = static_cast<std::uint32_t>(a);
      d.val = false;
      return d;
    }
    // Resource overloads in the earliest solution are split by ordering two users.
    for (ResourceId r = 0; r < os_.resources.size(); ++r) {
      std::vector<std::size_t> users;
      for (std::size_t a = 0; a < n_; ++a)
        if (static_cast<Truth>(s.pres[a]) == Truth::True && os_.activities[a].usage_of(r) > 0) users.push_back(a);
      if (users.size() < 2) continue;
      for (std::size_t ai : users) {
        Tick t = earliest(s, sv(ai));
        int load = 0;
        std::vector<std::size_t> at;
        for (std::size_t b : users)
          if (earliest(s, sv(b)) <= t && t <= earliest(s, ev(b))) {
            load += os_.activities[b].usage_of(r);
            at.push_back(b);
          }
        if (load <= os_.resources[r].capacity) continue;
        std::sort(at.begin(), at.end(), [&](std::size_t x, std::size_t y) {
          return std::pair(earliest(s, sv(x)), x) < std::pair(earliest(s, sv(y)), y);
        });
        for (std::size_t i = 0; i < at.size(); ++i)
          for (std::size_t j = i + 1; j < at.size(); ++j)
            for (auto [x, y] : {std::pair{at[i], at[j]}, std::pair{at[j], at[i]}}) {
              // x.end - y.start <= -1, i.e. x strictly before y
              if (static_cast<std::int64_t>(D(s, ev(x), sv(y))) <= 0) continue;  // already impossible
              Decision d;
              d.type = Decision::Type::Edge;
              d.u = ev(x);
              d.v = sv(y);
              d.c = -1;
              d.val = true;
              return d;
            }
        Decision dead;  // overload that no ordering can remove
        dead.type = Decision::Type::Dead;
        return dead;
      }
    }
    return std::nullopt;
  }

  bool apply(State& s, const Decision& d, bool val) {
    if (d.type == Decision::Type::Node) return force(s, d.node, val);
    if (d.type == Decision::Type::Presence) return set_presence(s, d.node, val);
    return val ? add_edge(s, d.u, d.v, d.c) : add_edge(s, d.v, d.u, -d.c - 1);
  }

  bool search(State& s, std::optional<Schedule>& sol) {
    for (;;) {
      ++nodes_;
      if ((nodes_ & 63) == 0 && Clock::now() > deadline_) timed_out_ = true;
      if (timed_out_) return false;
      if (!propagate(s)) return false;
      auto d = choose(s);
      if (!d) {
        Schedule out(n_);
        for (std::size_t a = 0; a < n_; ++a) {
          out.present[a] = static_cast<Truth>(s.pres[a]) == Truth::True;
          out.start[a] = earliest(s, sv(a));
          out.end[a] = earliest(s, ev(a));
        }
        sol = out;
        return true;
      }
      if (d->type == Decision::Type::Dead) return false;
      State child = s;
      changed_ = false;
      bool ok = apply(child, *d, d->val);
      if (ok && !changed_) throw std::logic_error("scheduler decision did not change the state");
      if (ok && search(child, sol)) return true;
      if (timed_out_) return false;
      if (!apply(s, *d, !d->val)) return false;
    }
  }

  const OsProblem& os_;
  Objective opt_;
  std::size_t n_, vars_;
  Tick lower_bound_ = 0;
  Tick horizon_ = 0;
  Clock::time_point deadline_;
  std::vector<Node> nodes_list_;
  std::vector<std::uint32_t> child_index_;
  std::vector<std::uint32_t> roots_;
  std::vector<std::pair<std::size_t, std::size_t>> clashes_;  // pairs that overload a resource together
  std::vector<std::vector<std::size_t>> unary_;              // users of each capacity-1 resource
  std::optional<Tick> bound_;
  bool changed_ = false;
  bool timed_out_ = false;
  std::uint64_t nodes_ = 0;
  std::vector<std::int32_t> row_buf_;
};

}  // namespace sched_detail

/// Solves an OS problem. OPTIMAL is reported only after the search is exhausted, or
/// when the makespan reaches `lower_bound`, which the caller guarantees no valid
/// schedule beats.
inline ScheduleResult get_schedule(const OsProblem& os, Objective opt,
                                   double deadline_seconds = std::numeric_limits<double>::infinity(),
                                   std::uint64_t seed = 0, Tick lower_bound = 0) {
  sched_detail::Solver solver(os, opt, deadline_seconds, seed, lower_bound);
  return solver.run();
}

inline constexpr Tick kBruteForceMaxHorizon = 30;
inline constexpr std::size_t kBruteForceMaxActivities = 6;

/// Exhaustive enumeration of presence x start x end, filtered by validate_schedule.
///
/// Activities that are absent and never mentioned by a difference atom are only tried at
/// (0, 0): no validity condition reads their times.
inline ScheduleResult brute_force_schedule(const OsProblem& os, Objective opt) {
  const Tick H = schedule_bound(os);
  const std::size_t n = os.activities.size();
  if (horizon(os) > kBruteForceMaxHorizon || n > kBruteForceMaxActivities)
    throw std::invalid_argument("instance too large for the brute-force oracle");

  std::vector<bool> timed(n, false);
  std::vector<std::size_t> ready_at(os.temporal_constraints.size(), 0);
  for (std::size_t i = 0; i < os.temporal_constraints.size(); ++i) {
    std::function<void(const Formula&)> walk = [&](const Formula& f) {
      if (f.kind == Formula::Kind::Diff)
        for (const auto* k : {&f.lhs, &f.rhs})
          if (k->anchor != Anchor::Origin) timed[k->activity] = true;
      for (const auto& c : f.children) walk(c);
    };
    walk(os.temporal_constraints[i]);
    std::set<ActivityId> acts;
    collect_activities(os.temporal_constraints[i], acts);
    ready_at[i] = acts.empty() ? 0 : *acts.rbegin() + 1;
  }

  ScheduleResult res;
  Schedule cur(n);
  std::optional<Tick> best;
  bool done = false;

  auto partial_ok = [&](std::size_t assigned) {
    for (std::size_t i = 0; i < os.temporal_constraints.size(); ++i)
      if (ready_at[i] == assigned && !eval_formula(os.temporal_constraints[i], cur)) return false;
    for (ResourceId r = 0; r < os.resources.size(); ++r) {
      for (std::size_t a = 0; a < assigned; ++a) {
        if (!cur.present[a] || os.activities[a].usage_of(r) == 0) continue;
        int load = 0;
        for (std::size_t b = 0; b < assigned; ++b)
          if (cur.present[b] && cur.start[b] <= cur.start[a] && cur.start[a] <= cur.end[b])
            load += os.activities[b].usage_of(r);
        if (load > os.resources[r].capacity) return false;
      }
    }
    return true;
  };

  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (done) return;
    if (i == n) {
      ++res.nodes;
      if (!validate_schedule(cur, os).empty()) return;
      Tick m = makespan(cur);
      if (!best || m < *best) {
        best = m;
        res.schedule = cur;
      }
      if (opt == Objective::Satisfy) done = true;
      return;
    }
    const auto& a = os.activities[i];
    for (bool p : {false, true}) {
      if (!p && !a.optional) continue;
      cur.present[i] = p;
      if (!p && !timed[i]) {
        cur.start[i] = cur.end[i] = 0;
        if (partial_ok(i + 1)) rec(i + 1);
        continue;
      }
      for (Tick s = 0; s <= H; ++s) {
        Tick e_lo = p ? s + a.duration_lb : s;
        Tick e_hi = p ? std::min(H, s + a.duration_ub) : H;
        for (Tick e = e_lo; e <= e_hi; ++e) {
          if (p && best && e >= *best) break;
          cur.start[i] = s;
          cur.end[i] = e;
          if (partial_ok(i + 1)) rec(i + 1);
          if (done) return;
        }
      }
    }
    cur.present[i] = false;
    cur.start[i] = cur.end[i] = 0;
  };
  rec(0);

  if (!res.schedule) res.status = SchedulerStatus::Unsat;
  else res.status = opt == Objective::MinMakespan ? SchedulerStatus::Optimal : SchedulerStatus::Valid;
  return res;
}

}  // namespace samp
