#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parcell/engine.hpp"
#include "parcell/harness.hpp"
#include "parcell/sched.hpp"

namespace {

using namespace parcell;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out = "results";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "base seed");
  app->add_option("--config", c.config, "JSON configuration file");
  app->add_option("--out", c.out, "output directory");
}

SweepConfig configure(const Common& c) {
  SweepConfig cfg = c.config.empty() ? SweepConfig{} : load_config(c.config);
  if (c.seed) cfg.base_seed = *c.seed;
  return cfg;
}

int run_sched(const std::string& variant, int n, int m, const std::string& mode_name, const std::string& baseline,
              const std::string& format) {
  const auto v = sched::parse_variant(variant);
  const auto b = sched::parse_variant(baseline);
  if (!v || !b) {
    std::cerr << "unknown variant\n";
    return 1;
  }
  const sched::Mode mode = mode_name == "greedy" ? sched::Mode::Greedy : sched::Mode::Exhaustive;
  const sched::SystemSpec spec{*v, n, m};
  const sched::SystemSpec base{*b, 1, 1};
  const sched::Problem problem = sched::generate_subproblems(spec);
  const sched::ScheduleResult res = sched::min_makespan(problem, mode);
  const std::size_t seq = sched::sequential_makespan(base);
  const sched::Rational speedup =
      sched::Rational::make(static_cast<std::int64_t>(seq), static_cast<std::int64_t>(res.makespan));
  std::vector<std::string> steps;
  for (const auto& step : res.schedule.steps) steps.push_back(sched::format_step(problem, step));
  std::string note;
  if (*v == sched::Variant::Pipelined) {
    note = "pipelined speedup is relative to a " + std::to_string(seq) + "-step " +
           std::string(sched::variant_name(*b)) + " baseline; a 10-step baseline would give " +
           sched::Rational::make(10, static_cast<std::int64_t>(res.makespan)).str();
  }
  if (format == "json") {
    nlohmann::json j{{"makespan", res.makespan}, {"speedup", speedup.str()}, {"steps", steps}};
    if (!note.empty()) j["note"] = note;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "makespan " << res.makespan << '\n' << "speedup " << speedup.str() << '\n';
    for (std::size_t i = 0; i < steps.size(); ++i) std::cout << "step " << i + 1 << ": " << steps[i] << '\n';
    if (!note.empty()) std::cout << "note: " << note << '\n';
  }
  return 0;
}

void print_row(const Row& r) {
  std::cerr << "n=" << r.n << " trial=" << r.trial << " time=" << r.replication_time << " ops=" << r.replication_ops
            << (r.censored ? " censored" : "") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parallel artificial cell simulator"};
  app.require_subcommand(1);

  Common common;

  std::string variant = "split", mode = "exhaustive", baseline = "split", format = "text";
  int n = 1, m = 1;
  auto* sched_cmd = app.add_subcommand("sched", "minimum-makespan schedules");
  add_common(sched_cmd, common);
  sched_cmd->add_option("--variant", variant, "monolithic|split|redundant|pipelined|tco|organism")->required();
  sched_cmd->add_option("--n", n, "redundancy");
  sched_cmd->add_option("--m", m, "organism export copies");
  sched_cmd->add_option("--mode", mode, "exhaustive|greedy")->check(CLI::IsMember({"exhaustive", "greedy"}));
  sched_cmd->add_option("--baseline", baseline, "sequential reference variant");
  sched_cmd->add_option("--format", format, "text|json")->check(CLI::IsMember({"text", "json"}));

  int trials = -1;
  int baseline_trials = 10;
  std::optional<double> t_max;
  bool quiet = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "replication time against n");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--trials", trials, "trials per n");
  sweep_cmd->add_option("--baseline-trials", baseline_trials, "sequential trials for the reference line (0 skips)");
  sweep_cmd->add_option("--t-max", t_max, "per-trial time horizon");
  sweep_cmd->add_flag("--quiet", quiet, "no progress output");

  auto* base_cmd = app.add_subcommand("baseline", "sequential cell trials");
  add_common(base_cmd, common);
  base_cmd->add_option("--trials", trials, "number of trials");
  base_cmd->add_option("--t-max", t_max, "per-trial time horizon");
  base_cmd->add_flag("--quiet", quiet, "no progress output");

  int sim_n = 1;
  bool sequential = false;
  std::string trace;
  std::uint64_t max_events = UINT64_MAX;
  auto* sim_cmd = app.add_subcommand("simulate", "one trial with an event trace");
  add_common(sim_cmd, common);
  sim_cmd->add_option("--n", sim_n, "copies of B and E");
  sim_cmd->add_flag("--sequential", sequential, "run the sequential cell");
  sim_cmd->add_option("--t-max", t_max, "time horizon");
  sim_cmd->add_option("--max-events", max_events, "event budget");
  sim_cmd->add_option("--trace", trace, "NDJSON trace file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sched_cmd) return run_sched(variant, n, m, mode, baseline, format);

    SweepConfig cfg = configure(common);
    if (*sweep_cmd) {
      if (trials > 0) cfg.trials = trials;
      if (t_max) cfg.t_max = t_max;
      const Progress progress = quiet ? Progress{} : Progress{print_row};
      const auto rows = run_sweep(cfg, progress);
      std::optional<double> base_mean;
      if (baseline_trials > 0) {
        const auto base_rows = run_baseline(cfg, baseline_trials, cfg.t_max.value_or(cfg.initial_t_max), progress);
        const auto bs = summarize(base_rows);
        if (!bs.empty() && !bs.front().empty) base_mean = bs.front().mean_time;
        std::filesystem::create_directories(common.out);
        write_file(std::filesystem::path(common.out) / "baseline.csv", rows_csv(base_rows));
      }
      const auto stats = summarize(rows);
      emit_outputs(stats, rows, common.out, base_mean);
      std::cout << stats_csv(stats);
      if (base_mean) std::cout << "sequential mean_time " << *base_mean << '\n';
      return 0;
    }
    if (*base_cmd) {
      const int k = trials > 0 ? trials : cfg.trials;
      const auto rows = run_baseline(cfg, k, t_max.value_or(cfg.initial_t_max), quiet ? Progress{} : Progress{print_row});
      const auto stats = summarize(rows);
      std::filesystem::create_directories(common.out);
      write_file(std::filesystem::path(common.out) / "rows.csv", rows_csv(rows));
      write_file(std::filesystem::path(common.out) / "stats.csv", stats_csv(stats));
      std::cout << stats_csv(stats);
      return 0;
    }
    if (*sim_cmd) {
      GenomeConfig g = cfg.genome;
      g.n_B = g.n_E = sim_n;
      World w(cfg.world, g, cfg.rates, cfg.base_seed);
      const int p = sequential ? w.build_sequential_cell(cfg.world.width / 2, cfg.world.height / 2)
                               : w.init_mother(cfg.world.width / 2, cfg.world.height / 2);
      Engine e(w);
      std::ofstream trace_file;
      if (!trace.empty()) {
        trace_file.open(trace);
        if (!trace_file) throw std::runtime_error("cannot write " + trace);
        e.set_trace(&trace_file);
      }
      const auto summary = e.run_until([](const World& ww) { return !ww.records.empty(); },
                                       t_max.value_or(cfg.initial_t_max), max_events);
      nlohmann::json out{{"pile", p},
                         {"t", w.t},
                         {"events", summary.events},
                         {"ops", w.total_ops},
                         {"lifecycle", lifecycle_name(w.lifecycle(p))},
                         {"fissioned", !w.records.empty()}};
      if (!w.records.empty()) out["record"] = to_json(w.records.front());
      std::cout << out.dump(2) << '\n';
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
