#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathsel/identify/resample.hpp"
#include "pathsel/regpath/path.hpp"
#include "pathsel/simgen/dataset.hpp"

namespace pathsel {

struct DesignSpec {
  Design design = Design::independent;
  int n = 150;
  int p = 200;
  int blocks = 5;             // cluster design only
  double connect_prob = 0.3;  // cluster design only
};

struct BenchConfig {
  std::vector<DesignSpec> designs;    // empty = all six at the defaults above
  std::vector<std::string> methods;   // descriptors, e.g. "gd+lasso+ebic"
  int replicates = 40;
  std::uint64_t master_seed = 1;
  std::string output_dir = "bench-out";
  std::string cutoff_mode = "min-max-x";  // or "truth-size"

  // shared hyper-parameters
  double enet_alpha = 0.5;
  int cd_grid = 1000;
  double cd_eps_ratio = 1e-3;
  long lars_max_steps = -1;   // -1 = 50 min(p, n-1)
  int resamples = 100;
  int resample_grid = 100;    // lambda grid used by frequency methods
  double select_threshold = 0.6;
  int escv_folds = 10;
  int tigress_steps = 50;
  double knockoff_q = 0.1;
  int workers = 0;            // 0 = hardware concurrency
  bool resume = false;
};

inline std::vector<DesignSpec> default_designs(int n = 150, int p = 200) {
  std::vector<DesignSpec> out;
  for (Design d : {Design::independent, Design::cluster, Design::scalefree_max,
                   Design::scalefree_min, Design::frank_max, Design::frank_min}) {
    DesignSpec s;
    s.design = d;
    s.n = n;
    s.p = p;
    out.push_back(s);
  }
  return out;
}

inline std::vector<std::string> default_methods() {
  return {
      "gd+lasso+ebic",   "gd+lasso+linselect",  "gd+lasso+slope",   "gd+lasso+dimjump",
      "lars+lasso+ebic", "lars+lasso+linselect", "lars+enet+ebic",  "lars+enet+linselect",
      "gd+enet+escv",    "gd+lasso+escv",
      "gd+lasso+bolasso", "gd+enet+bolasso", "gd+lasso-rand+bolasso", "lars+lasso+bolasso",
      "gd+lasso+stabsel", "gd+lasso-rand+stabsel", "gd+lasso-rand+stabsel+fixed",
      "tigress",
      "gd+lasso+knockoffs",
      "lars+lasso+path", "lars+enet+path",
  };
}

// --quick profile for CI: small designs, fewer replicates.
inline void apply_quick_profile(BenchConfig& cfg) {
  cfg.replicates = 8;
  if (cfg.designs.empty()) cfg.designs = default_designs(60, 40);
  for (auto& d : cfg.designs) {
    d.n = 60;
    d.p = 40;
  }
  cfg.cd_grid = 200;
  cfg.resample_grid = 50;
  cfg.resamples = 30;
}

// One executable pipeline per descriptor. Tokens are joined with '+':
//   [gd|lars] + [lasso|enet][-rand] + rule [+ shared|fixed]
// where rule is one of ebic, linselect, slope, dimjump, escv, bolasso,
// stabsel, tigress, knockoffs, path (ranking only, no final subset).
// "tigress" alone expands to its fixed pipeline (lars + randomized lasso).
struct MethodSpec {
  enum class Rule {
    ebic, linselect, slope, dimjump, escv, bolasso, stabsel, tigress, knockoff, path_only
  };
  std::string id;
  PathAlgorithm algorithm = PathAlgorithm::gradient_descent;
  PenaltyKind penalty = PenaltyKind::lasso;
  bool randomized = false;
  Rule rule = Rule::ebic;
  GridMode grid_mode = GridMode::shared_samples;
};

struct BadMethodDescriptor : std::runtime_error {
  explicit BadMethodDescriptor(const std::string& s)
      : std::runtime_error("unrecognized method descriptor: " + s) {}
};

inline MethodSpec parse_method(const std::string& id) {
  MethodSpec m;
  m.id = id;
  std::vector<std::string> tok;
  std::size_t pos = 0;
  while (pos <= id.size()) {
    std::size_t plus = id.find('+', pos);
    if (plus == std::string::npos) plus = id.size();
    tok.push_back(id.substr(pos, plus - pos));
    pos = plus + 1;
  }
  if (tok.size() == 1 && tok[0] == "tigress") {
    m.algorithm = PathAlgorithm::lars;
    m.randomized = true;
    m.rule = MethodSpec::Rule::tigress;
    return m;
  }
  std::size_t t = 0;
  if (t < tok.size() && (tok[t] == "gd" || tok[t] == "lars")) {
    m.algorithm = tok[t] == "lars" ? PathAlgorithm::lars : PathAlgorithm::gradient_descent;
    ++t;
  }
  if (t >= tok.size()) throw BadMethodDescriptor(id);
  {
    std::string pen = tok[t++];
    if (pen.size() > 5 && pen.substr(pen.size() - 5) == "-rand") {
      m.randomized = true;
      pen = pen.substr(0, pen.size() - 5);
    }
    if (pen == "lasso")
      m.penalty = PenaltyKind::lasso;
    else if (pen == "enet")
      m.penalty = PenaltyKind::elastic_net;
    else
      throw BadMethodDescriptor(id);
  }
  if (t >= tok.size()) throw BadMethodDescriptor(id);
  {
    const std::string& r = tok[t++];
    if (r == "ebic") m.rule = MethodSpec::Rule::ebic;
    else if (r == "linselect") m.rule = MethodSpec::Rule::linselect;
    else if (r == "slope") m.rule = MethodSpec::Rule::slope;
    else if (r == "dimjump") m.rule = MethodSpec::Rule::dimjump;
    else if (r == "escv") m.rule = MethodSpec::Rule::escv;
    else if (r == "bolasso") m.rule = MethodSpec::Rule::bolasso;
    else if (r == "stabsel") m.rule = MethodSpec::Rule::stabsel;
    else if (r == "tigress") m.rule = MethodSpec::Rule::tigress;
    else if (r == "knockoffs" || r == "knockoff") m.rule = MethodSpec::Rule::knockoff;
    else if (r == "path") m.rule = MethodSpec::Rule::path_only;
    else throw BadMethodDescriptor(id);
  }
  if (t < tok.size()) {
    const std::string& g = tok[t++];
    if (g == "shared")
      m.grid_mode = GridMode::shared_samples;
    else if (g == "fixed" || g == "perlambda")
      m.grid_mode = GridMode::per_lambda;
    else
      throw BadMethodDescriptor(id);
  }
  if (t != tok.size()) throw BadMethodDescriptor(id);
  if (m.grid_mode == GridMode::per_lambda &&
      (m.algorithm != PathAlgorithm::gradient_descent ||
       (m.rule != MethodSpec::Rule::bolasso && m.rule != MethodSpec::Rule::stabsel)))
    throw BadMethodDescriptor(id);
  if (m.rule == MethodSpec::Rule::tigress &&
      (m.algorithm != PathAlgorithm::lars || !m.randomized || m.penalty != PenaltyKind::lasso))
    throw BadMethodDescriptor(id);
  return m;
}

inline nlohmann::json config_to_json(const BenchConfig& c) {
  nlohmann::json j;
  j["designs"] = nlohmann::json::array();
  for (const auto& d : c.designs) {
    nlohmann::json jd;
    jd["design"] = design_name(d.design);
    jd["n"] = d.n;
    jd["p"] = d.p;
    jd["blocks"] = d.blocks;
    jd["connect_prob"] = d.connect_prob;
    j["designs"].push_back(jd);
  }
  j["methods"] = c.methods;
  j["replicates"] = c.replicates;
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir;
  j["cutoff_mode"] = c.cutoff_mode;
  j["enet_alpha"] = c.enet_alpha;
  j["cd_grid"] = c.cd_grid;
  j["cd_eps_ratio"] = c.cd_eps_ratio;
  j["lars_max_steps"] = c.lars_max_steps;
  j["resamples"] = c.resamples;
  j["resample_grid"] = c.resample_grid;
  j["select_threshold"] = c.select_threshold;
  j["escv_folds"] = c.escv_folds;
  j["tigress_steps"] = c.tigress_steps;
  j["knockoff_q"] = c.knockoff_q;
  j["workers"] = c.workers;
  return j;
}

inline BenchConfig config_from_json(const nlohmann::json& j) {
  BenchConfig c;
  if (j.contains("designs")) {
    for (const auto& jd : j.at("designs")) {
      DesignSpec d;
      if (jd.is_string()) {
        d.design = design_from_name(jd.get<std::string>());
      } else {
        d.design = design_from_name(jd.at("design").get<std::string>());
        if (jd.contains("n")) d.n = jd.at("n").get<int>();
        if (jd.contains("p")) d.p = jd.at("p").get<int>();
        if (jd.contains("blocks")) d.blocks = jd.at("blocks").get<int>();
        if (jd.contains("connect_prob")) d.connect_prob = jd.at("connect_prob").get<double>();
      }
      c.designs.push_back(d);
    }
  }
  if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("replicates", c.replicates);
  get("master_seed", c.master_seed);
  get("output_dir", c.output_dir);
  get("cutoff_mode", c.cutoff_mode);
  get("enet_alpha", c.enet_alpha);
  get("cd_grid", c.cd_grid);
  get("cd_eps_ratio", c.cd_eps_ratio);
  get("lars_max_steps", c.lars_max_steps);
  get("resamples", c.resamples);
  get("resample_grid", c.resample_grid);
  get("select_threshold", c.select_threshold);
  get("escv_folds", c.escv_folds);
  get("tigress_steps", c.tigress_steps);
  get("knockoff_q", c.knockoff_q);
  get("workers", c.workers);
  if (c.cutoff_mode != "min-max-x" && c.cutoff_mode != "truth-size")
    throw std::invalid_argument("cutoff_mode must be min-max-x or truth-size");
  for (const auto& m : c.methods) parse_method(m);  // validate early
  return c;
}

inline BenchConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  return config_from_json(nlohmann::json::parse(f));
}

}  // namespace pathsel
