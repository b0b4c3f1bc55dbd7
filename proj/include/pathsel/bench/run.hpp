#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pathsel/bench/config.hpp"
#include "pathsel/identify/escv.hpp"
#include "pathsel/identify/knockoff.hpp"
#include "pathsel/identify/resample.hpp"
#include "pathsel/metrics/metrics.hpp"
#include "pathsel/modelselect/criteria.hpp"
#include "pathsel/numcore/special.hpp"
#include "pathsel/regpath/coord_descent.hpp"
#include "pathsel/regpath/lars.hpp"
#include "pathsel/simgen/generate.hpp"

namespace pathsel {

struct MetricRow {
  std::string design;
  std::string method;
  int replicate = 0;
  double mse = std::numeric_limits<double>::quiet_NaN();
  double recall = std::numeric_limits<double>::quiet_NaN();
  double specificity = std::numeric_limits<double>::quiet_NaN();
  double fdp = std::numeric_limits<double>::quiet_NaN();
  double proc_auc = std::numeric_limits<double>::quiet_NaN();
  double ppr_auc = std::numeric_limits<double>::quiet_NaN();
  std::string cutoff_mode;
  double cutoff = std::numeric_limits<double>::quiet_NaN();
  double proc_auc_norm = std::numeric_limits<double>::quiet_NaN();
  double reference_pauc = std::numeric_limits<double>::quiet_NaN();
  bool ok = true;
  std::string error;
};

struct AggregateCell {
  std::string design;
  std::string method;
  std::string metric;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();
  int count = 0;
  bool best = false;
  bool significant = false;   // Welch test vs the best cell, p < 0.05
  bool insufficient = false;  // fewer than 2 usable replicates
};

struct BenchReport {
  BenchConfig config;
  std::vector<MetricRow> rows;
  std::vector<AggregateCell> aggregate;
  bool partial_failure = false;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline VariableRanking ranking_from_path(const RegularizationPath& path, int p,
                                         const std::string& method) {
  VariableRanking r;
  r.method = method;
  r.scores = Eigen::VectorXd::Zero(p);
  for (std::size_t i = 0; i < path.size(); ++i)
    for (int j : path.supports[i]) r.scores(j) = std::max(r.scores(j), path.lambdas[i]);
  return r;
}

inline std::vector<double> geometric_grid(double lmax, int size, double eps_ratio) {
  std::vector<double> grid(size);
  const double ratio = std::pow(eps_ratio, 1.0 / double(size - 1));
  double lam = lmax;
  for (int g = 0; g < size; ++g) {
    grid[g] = lam;
    lam *= ratio;
  }
  return grid;
}

}  // namespace detail

struct MethodOutcome {
  std::string method;
  bool ok = false;
  std::string error;
  std::vector<int> support;
  Eigen::VectorXd beta_hat;
  VariableRanking ranking;  // zero-length scores when the method yields none
};

// Run one method descriptor on a standardized training half.
inline MethodOutcome run_method(const MethodSpec& spec, const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& y, const BenchConfig& cfg,
                                RngStream rng) {
  MethodOutcome out;
  out.method = spec.id;
  const int p = int(X.cols());
  try {
    PenaltySpec penalty = spec.penalty == PenaltyKind::elastic_net
                              ? PenaltySpec::enet_spec(cfg.enet_alpha)
                              : PenaltySpec::lasso_spec();
    using Rule = MethodSpec::Rule;
    switch (spec.rule) {
      case Rule::ebic:
      case Rule::linselect:
      case Rule::slope:
      case Rule::dimjump:
      case Rule::path_only: {
        if (spec.randomized) {
          Eigen::VectorXd w(p);
          for (int j = 0; j < p; ++j) w(j) = rng.uniform(0.5, 1.0);
          penalty.weights = w;
        }
        RegularizationPath path =
            spec.algorithm == PathAlgorithm::lars
                ? lars_path(X, y, penalty, cfg.lars_max_steps)
                : cd_path(X, y, penalty, cfg.cd_grid, cfg.cd_eps_ratio);
        out.ranking = detail::ranking_from_path(path, p, spec.id);
        if (spec.rule != Rule::path_only) {
          std::vector<RefitModel> models = collect_models(X, y, path);
          const int n = int(X.rows());
          SelectionResult sel;
          if (spec.rule == Rule::ebic) sel = ebic_select(models, n, p);
          else if (spec.rule == Rule::linselect) sel = linselect_select(models, n, p);
          else if (spec.rule == Rule::slope) sel = slope_heuristic_select(models, p);
          else sel = dimension_jump_select(models, p);
          out.support = sel.support;
          out.beta_hat = sel.beta_hat;
        }
        break;
      }
      case Rule::escv: {
        SelectionResult sel = escv_select(X, y, cfg.escv_folds, penalty, rng,
                                          cfg.cd_grid, cfg.cd_eps_ratio);
        out.support = sel.support;
        out.beta_hat = sel.beta_hat;
        RegularizationPath path = cd_path(X, y, penalty, cfg.cd_grid, cfg.cd_eps_ratio);
        out.ranking = detail::ranking_from_path(path, p, spec.id);
        break;
      }
      case Rule::bolasso:
      case Rule::stabsel: {
        ResamplePlan plan;
        plan.scheme = spec.rule == Rule::bolasso ? ResampleScheme::bootstrap_n
                                                 : ResampleScheme::half_subsample;
        plan.count = cfg.resamples;
        plan.grid_mode = spec.grid_mode;
        plan.randomized = spec.randomized;
        plan.algorithm = spec.algorithm;
        plan.lars_max_steps = cfg.lars_max_steps;
        const double lmax = lambda_max(X, y, penalty);
        const auto grid = detail::geometric_grid(lmax, cfg.resample_grid, cfg.cd_eps_ratio);
        FrequencyProfile prof = resample_frequencies(X, y, plan, penalty, grid, rng);
        SelectionResult sel = threshold_select(prof, cfg.select_threshold, X, y);
        out.support = sel.support;
        out.beta_hat = sel.beta_hat;
        out.ranking.method = spec.id;
        out.ranking.scores.resize(p);
        for (int j = 0; j < p; ++j) out.ranking.scores(j) = prof.freq.row(j).maxCoeff();
        break;
      }
      case Rule::tigress: {
        FrequencyProfile prof = tigress_score(X, y, cfg.resamples, cfg.tigress_steps, rng);
        SelectionResult sel = threshold_select(prof, cfg.select_threshold, X, y);
        out.support = sel.support;
        out.beta_hat = sel.beta_hat;
        out.ranking.method = spec.id;
        out.ranking.scores = prof.freq.col(0);
        break;
      }
      case Rule::knockoff: {
        KnockoffResult kr = knockoff_filter(X, y, cfg.knockoff_q, penalty, rng,
                                            cfg.cd_grid, cfg.cd_eps_ratio);
        out.support = kr.selection.support;
        out.beta_hat = kr.selection.beta_hat;
        out.ranking.method = spec.id;
        out.ranking.scores = kr.stats.W.cwiseMax(0.0);
        break;
      }
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

inline Dataset generate_design(const DesignSpec& d, RngStream& rng) {
  switch (d.design) {
    case Design::independent: return gen_independent(d.n, d.p, rng);
    case Design::cluster: return gen_cluster_ggm(d.n, d.p, d.blocks, d.connect_prob, rng);
    case Design::scalefree_max:
      return gen_scalefree_ggm(d.n, d.p, ResponseMode::max_degree, rng);
    case Design::scalefree_min:
      return gen_scalefree_ggm(d.n, d.p, ResponseMode::min_degree, rng);
    case Design::frank_max:
      return gen_frank_like(d.n, d.p + 1, ResponseMode::max_degree, rng);
    case Design::frank_min:
      return gen_frank_like(d.n, d.p + 1, ResponseMode::min_degree, rng);
  }
  throw std::logic_error("unknown design");
}

// One (design, replicate) cell: generate once, run every method on the same
// split, evaluate everything on the shared test half.
inline std::vector<MetricRow> run_replicate(const DesignSpec& dspec, int design_index,
                                            int replicate,
                                            const std::vector<MethodSpec>& methods,
                                            const BenchConfig& cfg) {
  const std::string dname = design_name(dspec.design);
  std::vector<MetricRow> rows;
  RngStream base(cfg.master_seed,
                 std::uint64_t(design_index + 1) * 1000003ULL + std::uint64_t(replicate));

  SplitPair sp;
  try {
    RngStream gen_rng = base.child(0);
    Dataset full = generate_design(dspec, gen_rng);
    RngStream split_rng = base.child(1);
    sp = split(full, split_rng, replicate);
  } catch (const std::exception& e) {
    for (const auto& m : methods) {
      MetricRow r;
      r.design = dname;
      r.method = m.id;
      r.replicate = replicate;
      r.cutoff_mode = cfg.cutoff_mode;
      r.ok = false;
      r.error = std::string("generator: ") + e.what();
      rows.push_back(std::move(r));
    }
    return rows;
  }

  std::vector<MethodOutcome> outcomes;
  for (const auto& m : methods)
    outcomes.push_back(run_method(m, sp.train.X, sp.train.y, cfg,
                                  base.child(detail::fnv1a(m.id) | (1ULL << 63))));

  const std::vector<int>& truth = sp.train.truth_support;
  const int p = sp.train.p();
  std::vector<VariableRanking> rankings;
  for (const auto& o : outcomes)
    if (o.ok && o.ranking.scores.size() == p && o.ranking.scores.maxCoeff() > 0.0)
      rankings.push_back(o.ranking);
  const CutoffMode mode =
      cfg.cutoff_mode == "truth-size" ? CutoffMode::truth_size : CutoffMode::min_max_x;
  double cutoff = 0.0;
  if (!rankings.empty() && !truth.empty() && int(truth.size()) < p)
    cutoff = common_cutoff(rankings, truth, mode);
  const double ref = cutoff > 0.0
                         ? reference_pauc(truth, p, cutoff, false)
                         : std::numeric_limits<double>::quiet_NaN();

  for (const auto& o : outcomes) {
    MetricRow r;
    r.design = dname;
    r.method = o.method;
    r.replicate = replicate;
    r.cutoff_mode = cfg.cutoff_mode;
    r.cutoff = cutoff;
    r.reference_pauc = ref;
    r.ok = o.ok;
    r.error = o.error;
    if (o.ok) {
      r.mse = test_mse(sp.test, o.support, o.beta_hat);
      ConfusionSummary c = confusion(o.support, truth, p);
      r.recall = c.recall;
      r.specificity = c.specificity;
      r.fdp = c.fdp;
      if (cutoff > 0.0 && o.ranking.scores.size() == p && o.ranking.scores.maxCoeff() > 0.0) {
        r.proc_auc = p_roc_auc(o.ranking, truth, cutoff, false);
        r.proc_auc_norm = p_roc_auc(o.ranking, truth, cutoff, true);
        r.ppr_auc = p_pr_auc(o.ranking, truth, cutoff);
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace detail {

inline std::string csv_escape(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

inline const char* kRowHeader =
    "design,method,replicate,mse,recall,specificity,fdp,proc_auc,ppr_auc,"
    "cutoff_mode,cutoff,proc_auc_norm,reference_pauc,ok,error";

inline void write_rows_csv(const std::filesystem::path& path,
                           const std::vector<MetricRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << kRowHeader << '\n';
  for (const auto& r : rows) {
    f << r.design << ',' << r.method << ',' << r.replicate << ',' << fmt17(r.mse) << ','
      << fmt17(r.recall) << ',' << fmt17(r.specificity) << ',' << fmt17(r.fdp) << ','
      << fmt17(r.proc_auc) << ',' << fmt17(r.ppr_auc) << ',' << r.cutoff_mode << ','
      << fmt17(r.cutoff) << ',' << fmt17(r.proc_auc_norm) << ',' << fmt17(r.reference_pauc)
      << ',' << (r.ok ? 1 : 0) << ',' << csv_escape(r.error) << '\n';
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t c = line.find(',', pos);
    if (c == std::string::npos) c = line.size();
    out.push_back(line.substr(pos, c - pos));
    pos = c + 1;
  }
  return out;
}

inline double parse_num(const std::string& s) {
  if (s.empty() || s == "nan" || s == "-nan")
    return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

inline std::vector<MetricRow> read_rows_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::vector<MetricRow> rows;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto t = split_csv_line(line);
    if (t.size() < 15) throw std::runtime_error("malformed row in " + path.string());
    MetricRow r;
    r.design = t[0];
    r.method = t[1];
    r.replicate = std::stoi(t[2]);
    r.mse = parse_num(t[3]);
    r.recall = parse_num(t[4]);
    r.specificity = parse_num(t[5]);
    r.fdp = parse_num(t[6]);
    r.proc_auc = parse_num(t[7]);
    r.ppr_auc = parse_num(t[8]);
    r.cutoff_mode = t[9];
    r.cutoff = parse_num(t[10]);
    r.proc_auc_norm = parse_num(t[11]);
    r.reference_pauc = parse_num(t[12]);
    r.ok = t[13] == "1";
    r.error = t[14];
    rows.push_back(std::move(r));
  }
  return rows;
}

inline double metric_value(const MetricRow& r, const std::string& metric) {
  if (metric == "mse") return r.mse;
  if (metric == "recall") return r.recall;
  if (metric == "specificity") return r.specificity;
  if (metric == "fdr") return r.fdp;
  if (metric == "proc_auc") return r.proc_auc;
  if (metric == "ppr_auc") return r.ppr_auc;
  throw std::invalid_argument("unknown metric: " + metric);
}

}  // namespace detail

inline const std::vector<std::string>& bench_metrics() {
  static const std::vector<std::string> m = {"mse",  "recall",   "specificity",
                                             "fdr",  "proc_auc", "ppr_auc"};
  return m;
}

// Per design x method x metric mean/sd, best-cell markers and Welch-test
// significance flags against the best cell (0.05 level, two-sided).
inline std::vector<AggregateCell> aggregate(const std::vector<MetricRow>& rows) {
  // keep first-appearance order of designs and methods
  std::vector<std::string> designs, methods;
  for (const auto& r : rows) {
    if (std::find(designs.begin(), designs.end(), r.design) == designs.end())
      designs.push_back(r.design);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
  }
  std::vector<AggregateCell> out;
  for (const std::string& metric : bench_metrics()) {
    const bool lower_better = metric == "mse" || metric == "fdr";
    for (const auto& d : designs) {
      std::vector<AggregateCell> cells;
      std::vector<std::vector<double>> samples;
      for (const auto& m : methods) {
        std::vector<double> v;
        for (const auto& r : rows) {
          if (r.design != d || r.method != m || !r.ok) continue;
          const double x = detail::metric_value(r, metric);
          if (std::isfinite(x)) v.push_back(x);
        }
        AggregateCell c;
        c.design = d;
        c.method = m;
        c.metric = metric;
        c.count = int(v.size());
        if (!v.empty()) {
          double s = 0.0;
          for (double x : v) s += x;
          c.mean = s / double(v.size());
          double ss = 0.0;
          for (double x : v) ss += (x - c.mean) * (x - c.mean);
          c.sd = v.size() > 1 ? std::sqrt(ss / double(v.size() - 1)) : 0.0;
        }
        c.insufficient = v.size() < 2;
        cells.push_back(c);
        samples.push_back(std::move(v));
      }
      int best = -1;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].count == 0) continue;
        if (best < 0 || (lower_better ? cells[i].mean < cells[best].mean
                                      : cells[i].mean > cells[best].mean))
          best = int(i);
      }
      if (best >= 0) {
        cells[best].best = true;
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (int(i) == best || cells[i].count < 2 || cells[best].count < 2) continue;
          const double pval = welch_t_test(samples[i], samples[best]);
          cells[i].significant = pval < 0.05;
        }
      }
      for (auto& c : cells) out.push_back(std::move(c));
    }
  }
  return out;
}

namespace detail {

inline void write_table_csv(const std::filesystem::path& path,
                            const std::vector<AggregateCell>& agg,
                            const std::string& metric) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "design,method,mean,sd,count,best,significant\n";
  for (const auto& c : agg) {
    if (c.metric != metric) continue;
    f << c.design << ',' << c.method << ',' << fmt17(c.mean) << ',' << fmt17(c.sd) << ','
      << c.count << ',' << (c.best ? 1 : 0) << ',' << (c.significant ? 1 : 0) << '\n';
  }
}

}  // namespace detail

inline nlohmann::json report_to_json(const BenchReport& rep) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["config"] = config_to_json(rep.config);
  j["partial_failure"] = rep.partial_failure;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    nlohmann::json jr;
    jr["design"] = r.design;
    jr["method"] = r.method;
    jr["replicate"] = r.replicate;
    jr["mse"] = r.mse;
    jr["recall"] = r.recall;
    jr["specificity"] = r.specificity;
    jr["fdp"] = r.fdp;
    jr["proc_auc"] = r.proc_auc;
    jr["ppr_auc"] = r.ppr_auc;
    jr["cutoff_mode"] = r.cutoff_mode;
    jr["cutoff"] = r.cutoff;
    jr["proc_auc_norm"] = r.proc_auc_norm;
    jr["reference_pauc"] = r.reference_pauc;
    jr["ok"] = r.ok;
    jr["error"] = r.error;
    j["rows"].push_back(std::move(jr));
  }
  j["aggregate"] = nlohmann::json::array();
  for (const auto& c : rep.aggregate) {
    nlohmann::json jc;
    jc["design"] = c.design;
    jc["method"] = c.method;
    jc["metric"] = c.metric;
    jc["mean"] = c.mean;
    jc["sd"] = c.sd;
    jc["count"] = c.count;
    jc["best"] = c.best;
    jc["significant"] = c.significant;
    jc["insufficient"] = c.insufficient;
    j["aggregate"].push_back(std::move(jc));
  }
  return j;
}

// table_*.csv + report.json into `dir`. Empty reports produce headers-only
// CSVs and a rows-empty JSON.
inline void emit(const BenchReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  detail::write_table_csv(dir / "table_mse.csv", rep.aggregate, "mse");
  detail::write_table_csv(dir / "table_proc_auc.csv", rep.aggregate, "proc_auc");
  detail::write_table_csv(dir / "table_recall.csv", rep.aggregate, "recall");
  detail::write_table_csv(dir / "table_specificity.csv", rep.aggregate, "specificity");
  detail::write_table_csv(dir / "table_fdr.csv", rep.aggregate, "fdr");
  std::ofstream jf(dir / "report.json");
  jf << report_to_json(rep).dump(2) << '\n';
}

inline std::string markdown_tables(const BenchReport& rep) {
  std::ostringstream os;
  std::vector<std::string> designs, methods;
  for (const auto& c : rep.aggregate) {
    if (std::find(designs.begin(), designs.end(), c.design) == designs.end())
      designs.push_back(c.design);
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
      methods.push_back(c.method);
  }
  for (const std::string& metric : bench_metrics()) {
    os << "## " << metric << "\n\n| method |";
    for (const auto& d : designs) os << ' ' << d << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < designs.size(); ++i) os << "---|";
    os << '\n';
    for (const auto& m : methods) {
      os << "| " << m << " |";
      for (const auto& d : designs) {
        const AggregateCell* cell = nullptr;
        for (const auto& c : rep.aggregate)
          if (c.metric == metric && c.design == d && c.method == m) cell = &c;
        if (!cell || cell->count == 0) {
          os << " - |";
          continue;
        }
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%.3f (%.3f)", cell->mean, cell->sd);
        std::string text = buf;
        if (cell->best) text = "**" + text + "**";
        else if (cell->significant) text = "*" + text + "*";
        os << ' ' << text << " |";
      }
      os << '\n';
    }
    os << '\n';
  }
  return os.str();
}

// Full study: bounded worker pool over (design, replicate) cells; each cell's
// rows are persisted under rows/ so interrupted runs can resume.
inline BenchReport run_benchmark(BenchConfig cfg) {
  if (cfg.designs.empty()) cfg.designs = default_designs();
  if (cfg.methods.empty()) cfg.methods = default_methods();
  if (cfg.replicates < 2)
    throw std::invalid_argument("run_benchmark: need replicates >= 2 for the t-tests");

  std::vector<MethodSpec> specs;
  for (const auto& m : cfg.methods) specs.push_back(parse_method(m));

  const std::filesystem::path out(cfg.output_dir);
  std::filesystem::create_directories(out / "rows");

  struct Task {
    int design_index;
    int replicate;
  };
  std::vector<Task> tasks;
  for (int di = 0; di < int(cfg.designs.size()); ++di)
    for (int r = 0; r < cfg.replicates; ++r) tasks.push_back({di, r});

  std::vector<std::vector<MetricRow>> slot(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const Task& task = tasks[t];
      const DesignSpec& d = cfg.designs[task.design_index];
      char name[128];
      std::snprintf(name, sizeof(name), "%s-r%03d.csv", design_name(d.design),
                    task.replicate);
      const std::filesystem::path rows_file = out / "rows" / name;
      if (cfg.resume && std::filesystem::exists(rows_file)) {
        try {
          std::vector<MetricRow> cached = detail::read_rows_csv(rows_file);
          std::vector<std::string> have;
          for (const auto& r : cached) have.push_back(r.method);
          if (have == cfg.methods) {
            slot[t] = std::move(cached);
            continue;
          }
        } catch (const std::exception&) {
          // fall through and recompute
        }
      }
      slot[t] = run_replicate(d, task.design_index, task.replicate, specs, cfg);
      detail::write_rows_csv(rows_file, slot[t]);
    }
  };

  unsigned n_workers = cfg.workers > 0 ? unsigned(cfg.workers)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<unsigned>(n_workers, unsigned(tasks.size()));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  BenchReport rep;
  rep.config = cfg;
  for (auto& rows : slot)
    for (auto& r : rows) {
      if (!r.ok) rep.partial_failure = true;
      rep.rows.push_back(std::move(r));
    }
  rep.aggregate = aggregate(rep.rows);
  emit(rep, out);
  return rep;
}

// Rebuild a report from the persisted per-replicate rows of a previous run.
inline BenchReport report_from_rows(const std::filesystem::path& dir) {
  BenchReport rep;
  const std::filesystem::path rows_dir = dir / "rows";
  if (!std::filesystem::is_directory(rows_dir))
    throw std::runtime_error("no rows/ directory under " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(rows_dir))
    if (e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files)
    for (auto& r : detail::read_rows_csv(f)) {
      if (!r.ok) rep.partial_failure = true;
      rep.rows.push_back(std::move(r));
    }
  rep.aggregate = aggregate(rep.rows);
  return rep;
}

}  // namespace pathsel
