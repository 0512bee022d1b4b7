// Two robots, one shelf behind a closed door: solve it, print what the engine
// learned on the way, and write the plan and a drawing next to the binary's cwd.

#include <iostream>

#include "samp/samp.hpp"

using namespace samp;

int main(int argc, char** argv) {
  const std::string stem = argc > 1 ? argv[1] : "logistics_demo";
  SampProblem p = gen_logistics({2, 1, 1, Door::Closed, Pick::CorridorOnly});

  EngineConfig cfg;
  cfg.timeout = 60;
  cfg.seed = 1;
  cfg.on_refinement = [](const RefinementRecord& r) { std::cout << "  iter " << r.iteration << ": " << r.text << "\n"; };
  std::cout << p.name << ": " << p.objects.size() << " objects, " << p.os.activities.size() << " activities\n";
  auto r = solve(p, cfg);

  std::cout << outcome_name(r.outcome) << " after " << r.stats.iterations << " iterations, "
            << r.stats.total_seconds << "s\n";
  if (!r.plan) return 1;
  for (ActivityId a = 0; a < p.os.activities.size(); ++a)
    if (r.plan->schedule.present[a])
      std::cout << "  " << p.os.activities[a].name << " [" << r.plan->schedule.start[a] << ", "
                << r.plan->schedule.end[a] << "]\n";
  std::cout << "makespan " << makespan(r.plan->schedule) << (r.optimal ? " (optimal)" : "") << ", "
            << r.violations.size() << " violations\n";

  write_file(stem + ".problem.json", serialize_problem(p));
  write_file(stem + ".plan.json", serialize_plan(*r.plan, p));
  write_file(stem + ".svg", render_svg(p, *r.plan));
  std::cout << "wrote " << stem << ".{problem.json,plan.json,svg}\n";
  return r.violations.empty() ? 0 : 1;
}
