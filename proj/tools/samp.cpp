// samp: generate, solve, validate and render scheduling-and-motion-planning instances.
//
// Exit codes: 0 plan found / plan valid, 1 plan has violations, 2 I/O or parse
// error, 10 unsolvable, 11 incomplete (budget exhausted).

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "samp/samp.hpp"

using namespace samp;

namespace {

constexpr int kExitViolations = 1;
constexpr int kExitIo = 2;
constexpr int kExitUnsolvable = 10;
constexpr int kExitIncomplete = 11;

SampProblem load_problem(const std::string& path) {
  auto p = parse_problem(read_file(path));
  auto errors = validate_problem(p);
  if (!errors.empty()) throw ParseError(path + ": " + errors.front());
  return p;
}

struct SolveArgs {
  std::string problem, out, log;
  double tp = 10, tp_max = 160, timeout = 600;
  std::string opt = "makespan", fluents = "on";
  std::uint64_t seed = 0;
  bool no_layering = false, sequential = false, quiet = false;
};

int cmd_solve(const SolveArgs& a) {
  SampProblem p = load_problem(a.problem);
  if (a.fluents == "off") {
    if (!p.os.fluents.empty()) throw ParseError("--fluents off: the problem declares its own fluents");
    p.os.use_fluents = false;
  } else {
    p.os.use_fluents = true;
  }
  EngineConfig cfg;
  cfg.t_p = a.tp;
  cfg.t_p_max = std::max(a.tp, a.tp_max);
  cfg.timeout = a.timeout;
  cfg.opt = a.opt == "satisfy" ? Objective::Satisfy : Objective::MinMakespan;
  cfg.seed = a.seed;
  cfg.layering = !a.no_layering;
  cfg.forced_sequential = a.sequential;
  auto r = solve(p, cfg);

  if (!a.log.empty()) {
    std::ofstream log(a.log);
    if (!log) throw std::runtime_error("cannot write " + a.log);
    for (const auto& line : r.log) log << line << "\n";
  }
  if (!a.quiet) {
    std::cout << outcome_name(r.outcome);
    if (r.plan) std::cout << " makespan=" << makespan(r.plan->schedule) << (r.optimal ? " optimal" : "");
    std::cout << " iterations=" << r.stats.iterations << " refinements=" << r.refinements.size()
              << " time=" << r.stats.total_seconds << "s\n";
  }
  switch (r.outcome) {
    case Outcome::Plan: {
      const std::string out = a.out.empty() ? a.problem + ".plan.json" : a.out;
      write_file(out, serialize_plan(*r.plan, p));
      for (const auto& v : r.violations) std::cerr << format_violation(v) << "\n";
      return r.violations.empty() ? 0 : kExitViolations;
    }
    case Outcome::Unsolvable: return kExitUnsolvable;
    case Outcome::Incomplete: return kExitIncomplete;
  }
  return kExitIncomplete;
}

int cmd_validate(const std::string& problem, const std::string& plan) {
  SampProblem p = load_problem(problem);
  SampSchedule pi = parse_plan(read_file(plan), p);
  auto vs = validate_samp_schedule(pi, p);
  for (const auto& v : vs) std::cout << format_violation(v) << "\n";
  return vs.empty() ? 0 : kExitViolations;
}

int cmd_render(const std::string& problem, const std::string& plan, const std::string& out, bool force) {
  SampProblem p = load_problem(problem);
  SampSchedule pi = parse_plan(read_file(plan), p);
  auto vs = validate_samp_schedule(pi, p);
  for (const auto& v : vs) std::cerr << format_violation(v) << "\n";
  if (!vs.empty() && !force) {
    std::cerr << "invalid plan; pass --force to render anyway\n";
    return kExitIo;
  }
  write_file(out, render_svg(p, pi));
  return 0;
}

struct GenArgs {
  std::string domain = "logistics", door = "open", pick = "corridor", out, dir = ".";
  int robots = 1, shelves = 2, items = 1, machines = 1;
};

int cmd_gen(const GenArgs& a) {
  SampProblem p;
  if (a.domain == "logistics") {
    p = gen_logistics({a.robots, a.shelves, a.items, a.door == "closed" ? Door::Closed : Door::Open,
                       a.pick == "all" ? Pick::AllSides : Pick::CorridorOnly});
  } else {
    p = gen_jsp({a.robots, a.items, a.machines});
  }
  const std::string out = a.out.empty() ? (std::filesystem::path(a.dir) / (p.name + ".json")).string() : a.out;
  write_file(out, serialize_problem(p));
  std::cout << out << "\n";
  return 0;
}

int cmd_grid(const std::string& dir, bool desk) {
  std::filesystem::create_directories(dir);
  std::vector<SampProblem> all;
  for (const auto& q : desk ? logistics_desk_grid() : logistics_grid()) all.push_back(gen_logistics(q));
  for (const auto& q : desk ? jsp_desk_grid() : jsp_grid()) all.push_back(gen_jsp(q));
  for (const auto& p : all) {
    const auto path = (std::filesystem::path(dir) / (p.name + ".json")).string();
    write_file(path, serialize_problem(p));
    std::cout << path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduling and motion planning: generate, solve, validate and render instances"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file; writes the plan on success");
  solve_cmd->add_option("problem", sa.problem, "Problem file")->required();
  solve_cmd->add_option("-o,--out", sa.out, "Plan file (default: <problem>.plan.json)");
  solve_cmd->add_option("--log", sa.log, "Write the run log (one JSON record per line)");
  solve_cmd->add_option("--tp", sa.tp, "Initial motion-planner budget in seconds")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--tp-max", sa.tp_max, "Largest planner budget before giving up")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--timeout", sa.timeout, "Overall wall-clock budget in seconds")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--opt", sa.opt, "Objective")->check(CLI::IsMember({"makespan", "satisfy"}));
  solve_cmd->add_option("--seed", sa.seed, "Random seed");
  solve_cmd->add_flag("--no-layering", sa.no_layering, "Skip the per-activity pre-checks");
  solve_cmd->add_option("--fluents", sa.fluents, "Track object configurations with fluents")
      ->check(CLI::IsMember({"on", "off"}));
  solve_cmd->add_flag("--sequential", sa.sequential, "Forbid overlapping motion activities");
  solve_cmd->add_flag("-q,--quiet", sa.quiet, "No summary line");

  std::string problem, plan, out;
  bool force = false;
  auto* validate_cmd = app.add_subcommand("validate", "Check a plan; prints one line per violation");
  validate_cmd->add_option("problem", problem, "Problem file")->required();
  validate_cmd->add_option("plan", plan, "Plan file")->required();

  auto* render_cmd = app.add_subcommand("render", "Draw a plan as SVG (workspace and Gantt chart)");
  render_cmd->add_option("problem", problem, "Problem file")->required();
  render_cmd->add_option("plan", plan, "Plan file")->required();
  render_cmd->add_option("-o,--out", out, "SVG file")->required();
  render_cmd->add_flag("--force", force, "Render even if the plan has violations");

  GenArgs ga;
  std::string grid_dir = ".";
  bool desk = false;
  auto* bench = app.add_subcommand("bench", "Benchmark instance generators");
  bench->require_subcommand(1);
  auto* gen = bench->add_subcommand("gen", "Write one instance");
  gen->add_option("--domain", ga.domain, "Domain")->check(CLI::IsMember({"logistics", "jsp"}));
  gen->add_option("--robots", ga.robots, "Robots")->check(CLI::PositiveNumber);
  gen->add_option("--shelves", ga.shelves, "Shelves holding items (logistics)")->check(CLI::Range(1, 2));
  gen->add_option("--items", ga.items, "Items (per shelf for logistics)")->check(CLI::PositiveNumber);
  gen->add_option("--machines", ga.machines, "Machines (jsp)")->check(CLI::Range(1, 6));
  gen->add_option("--door", ga.door, "Corridor door (logistics)")->check(CLI::IsMember({"open", "closed"}));
  gen->add_option("--pick", ga.pick, "Pick sides (logistics)")->check(CLI::IsMember({"corridor", "all"}));
  gen->add_option("-o,--out", ga.out, "Output file (default: <dir>/<name>.json)");
  gen->add_option("--dir", ga.dir, "Output directory");
  auto* grid = bench->add_subcommand("grid", "Write the full instance grid (24 logistics, 36 jsp)");
  grid->add_option("--dir", grid_dir, "Output directory");
  grid->add_flag("--desk", desk, "Write the smaller desk-scale grid instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitIo;
  }

  try {
    if (*solve_cmd) return cmd_solve(sa);
    if (*validate_cmd) return cmd_validate(problem, plan);
    if (*render_cmd) return cmd_render(problem, plan, out, force);
    if (*gen) return cmd_gen(ga);
    if (*grid) return cmd_grid(grid_dir, desk);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitIo;
}
