// Benchmark driver: regenerate the simulation study, aggregate the metric
// tables, or just dump datasets.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pathsel/bench/config.hpp"
#include "pathsel/bench/run.hpp"
#include "pathsel/simgen/generate.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sparse-regression benchmark harness"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand("run", "execute the configured study");
  std::string config_path, out_dir, designs_csv, methods_csv, cutoff_mode;
  bool quick = false, resume = false;
  int replicates = -1;
  std::uint64_t seed = 0;
  bool have_seed = false;
  run->add_option("--config", config_path, "JSON config file");
  run->add_flag("--quick", quick, "CI profile: n=60, p=40, 8 replicates");
  run->add_option("--designs", designs_csv, "comma-separated design names");
  run->add_option("--methods", methods_csv, "comma-separated method descriptors");
  run->add_option("--replicates", replicates, "replicates per design");
  auto* seed_opt = run->add_option("--seed", seed, "master seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--cutoff-mode", cutoff_mode, "min-max-x or truth-size");
  run->add_flag("--resume", resume, "skip (design, replicate) cells already on disk");

  // --- report ---
  auto* report = app.add_subcommand("report", "aggregate persisted rows");
  std::string in_dir, format = "csv";
  report->add_option("--in", in_dir, "directory of a previous run")->required();
  report->add_option("--format", format, "csv | json | md")
      ->check(CLI::IsMember({"csv", "json", "md"}));

  // --- simulate ---
  auto* simulate = app.add_subcommand("simulate", "generate datasets only");
  std::string sim_design, sim_out;
  std::uint64_t sim_seed = 1;
  int sim_n = 150, sim_p = 200, sim_reps = 1;
  simulate->add_option("--design", sim_design, "design name")->required();
  simulate->add_option("--seed", sim_seed, "master seed");
  simulate->add_option("--out", sim_out, "output directory")->required();
  simulate->add_option("--n", sim_n, "sample size per half");
  simulate->add_option("--p", sim_p, "variable count");
  simulate->add_option("--replicates", sim_reps, "dataset count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      have_seed = seed_opt->count() > 0;
      pathsel::BenchConfig cfg;
      if (!config_path.empty()) cfg = pathsel::load_config(config_path);
      if (quick) pathsel::apply_quick_profile(cfg);
      auto split_csv = [](const std::string& s) {
        std::vector<std::string> out;
        std::size_t pos = 0;
        while (pos <= s.size()) {
          std::size_t c = s.find(',', pos);
          if (c == std::string::npos) c = s.size();
          if (c > pos) out.push_back(s.substr(pos, c - pos));
          pos = c + 1;
        }
        return out;
      };
      if (!designs_csv.empty()) {
        const int n = quick ? 60 : 150, p = quick ? 40 : 200;
        cfg.designs.clear();
        for (const auto& name : split_csv(designs_csv)) {
          pathsel::DesignSpec d;
          d.design = pathsel::design_from_name(name);
          d.n = n;
          d.p = p;
          cfg.designs.push_back(d);
        }
      }
      if (!methods_csv.empty()) cfg.methods = split_csv(methods_csv);
      if (replicates > 0) cfg.replicates = replicates;
      if (have_seed) cfg.master_seed = seed;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (!cutoff_mode.empty()) cfg.cutoff_mode = cutoff_mode;
      cfg.resume = resume;
      pathsel::BenchReport rep = pathsel::run_benchmark(cfg);
      std::cerr << "rows: " << rep.rows.size() << ", output: " << cfg.output_dir << "\n";
      return rep.partial_failure ? 2 : 0;
    }
    if (*report) {
      pathsel::BenchReport rep = pathsel::report_from_rows(in_dir);
      if (format == "md") {
        std::cout << pathsel::markdown_tables(rep);
      } else if (format == "json") {
        std::ofstream jf(std::filesystem::path(in_dir) / "report.json");
        jf << pathsel::report_to_json(rep).dump(2) << '\n';
        std::cerr << "wrote report.json\n";
      } else {
        pathsel::emit(rep, in_dir);
        std::cerr << "wrote table_*.csv and report.json\n";
      }
      return rep.partial_failure ? 2 : 0;
    }
    if (*simulate) {
      pathsel::DesignSpec d;
      d.design = pathsel::design_from_name(sim_design);
      d.n = sim_n;
      d.p = sim_p;
      for (int r = 0; r < sim_reps; ++r) {
        pathsel::RngStream rng(sim_seed, std::uint64_t(r));
        pathsel::Dataset ds = pathsel::generate_design(d, rng);
        char name[64];
        std::snprintf(name, sizeof(name), "r%03d", r);
        pathsel::save_dataset(ds, std::filesystem::path(sim_out) / name);
      }
      std::cerr << "wrote " << sim_reps << " dataset(s) to " << sim_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
