#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pathsel {

enum class Design { independent, cluster, scalefree_max, scalefree_min, frank_max, frank_min };

inline const char* design_name(Design d) {
  switch (d) {
    case Design::independent: return "independent";
    case Design::cluster: return "cluster";
    case Design::scalefree_max: return "scalefree-max";
    case Design::scalefree_min: return "scalefree-min";
    case Design::frank_max: return "frank-max";
    case Design::frank_min: return "frank-min";
  }
  return "?";
}

inline Design design_from_name(const std::string& s) {
  if (s == "independent") return Design::independent;
  if (s == "cluster") return Design::cluster;
  if (s == "scalefree-max") return Design::scalefree_max;
  if (s == "scalefree-min") return Design::scalefree_min;
  if (s == "frank-max") return Design::frank_max;
  if (s == "frank-min") return Design::frank_min;
  throw std::invalid_argument("unknown design: " + s);
}

struct ConstantColumn : std::runtime_error {
  ConstantColumn() : std::runtime_error("column has zero variance") {}
};
struct OddRowCount : std::runtime_error {
  OddRowCount() : std::runtime_error("split requires an even row count") {}
};

struct Dataset {
  Design design = Design::independent;
  Eigen::MatrixXd X;                // n x p
  Eigen::VectorXd y;                // n
  std::vector<int> truth_support;   // 0-based column indices
  Eigen::VectorXd beta0;            // p, zero outside truth_support
  double noise_sd = -1.0;           // < 0 means unknown
  std::uint64_t seed = 0;

  int n() const { return int(X.rows()); }
  int p() const { return int(X.cols()); }
};

struct SplitPair {
  Dataset train;
  Dataset test;
  int replicate_id = 0;
};

// Center and scale every column of X and y to mean 0, sample (n-1) sd 1.
inline Dataset standardize(const Dataset& d) {
  Dataset out = d;
  const int n = d.n();
  if (n < 2) throw std::invalid_argument("standardize: need at least 2 rows");
  auto scale_vec = [n](Eigen::VectorXd& v) {
    const double mean = v.mean();
    v.array() -= mean;
    const double sd = std::sqrt(v.squaredNorm() / double(n - 1));
    if (sd == 0.0) throw ConstantColumn();
    v /= sd;
  };
  for (int j = 0; j < d.p(); ++j) {
    Eigen::VectorXd col = out.X.col(j);
    scale_vec(col);
    out.X.col(j) = col;
  }
  scale_vec(out.y);
  return out;
}

// Random disjoint halves of a 2n-row dataset, each standardized independently.
template <typename Rng>
SplitPair split(const Dataset& d, Rng& rng, int replicate_id = 0) {
  const int n2 = d.n();
  if (n2 % 2 != 0) throw OddRowCount();
  const int n = n2 / 2;
  std::vector<int> perm = rng.permutation(n2);
  auto take = [&](int offset) {
    Dataset part;
    part.design = d.design;
    part.truth_support = d.truth_support;
    part.beta0 = d.beta0;
    part.noise_sd = d.noise_sd;
    part.seed = d.seed;
    part.X.resize(n, d.p());
    part.y.resize(n);
    for (int i = 0; i < n; ++i) {
      part.X.row(i) = d.X.row(perm[offset + i]);
      part.y(i) = d.y(perm[offset + i]);
    }
    return standardize(part);
  };
  SplitPair sp;
  sp.train = take(0);
  sp.test = take(n);
  sp.replicate_id = replicate_id;
  return sp;
}

namespace detail {
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

// Persist as a per-replicate directory: X.csv, y.csv, truth.json.
inline void save_dataset(const Dataset& d, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream xf(dir / "X.csv");
    for (int i = 0; i < d.n(); ++i) {
      for (int j = 0; j < d.p(); ++j) {
        if (j) xf << ',';
        xf << detail::fmt17(d.X(i, j));
      }
      xf << '\n';
    }
  }
  {
    std::ofstream yf(dir / "y.csv");
    for (int i = 0; i < d.n(); ++i) yf << detail::fmt17(d.y(i)) << '\n';
  }
  nlohmann::json truth;
  truth["design-label"] = design_name(d.design);
  truth["seed"] = d.seed;
  std::vector<int> sup1;
  for (int j : d.truth_support) sup1.push_back(j + 1);  // 1-based on disk
  truth["support"] = sup1;
  truth["beta0"] = std::vector<double>(d.beta0.data(), d.beta0.data() + d.beta0.size());
  if (d.noise_sd >= 0.0)
    truth["noise-sd"] = d.noise_sd;
  else
    truth["noise-sd"] = nullptr;
  std::ofstream tf(dir / "truth.json");
  tf << truth.dump(2) << '\n';
}

inline Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset d;
  std::vector<std::vector<double>> rows;
  {
    std::ifstream xf(dir / "X.csv");
    if (!xf) throw std::runtime_error("cannot open " + (dir / "X.csv").string());
    std::string line;
    while (std::getline(xf, line)) {
      if (line.empty()) continue;
      std::vector<double> row;
      std::size_t pos = 0;
      while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) comma = line.size();
        row.push_back(std::stod(line.substr(pos, comma - pos)));
        pos = comma + 1;
      }
      rows.push_back(std::move(row));
    }
  }
  const int n = int(rows.size());
  const int p = n ? int(rows[0].size()) : 0;
  d.X.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) d.X(i, j) = rows[i][j];
  {
    std::ifstream yf(dir / "y.csv");
    std::vector<double> yv;
    std::string line;
    while (std::getline(yf, line))
      if (!line.empty()) yv.push_back(std::stod(line));
    d.y = Eigen::Map<Eigen::VectorXd>(yv.data(), Eigen::Index(yv.size()));
  }
  std::ifstream tf(dir / "truth.json");
  nlohmann::json truth = nlohmann::json::parse(tf);
  d.design = design_from_name(truth.at("design-label").get<std::string>());
  d.seed = truth.at("seed").get<std::uint64_t>();
  for (int j : truth.at("support").get<std::vector<int>>()) d.truth_support.push_back(j - 1);
  auto b = truth.at("beta0").get<std::vector<double>>();
  d.beta0 = Eigen::Map<Eigen::VectorXd>(b.data(), Eigen::Index(b.size()));
  d.noise_sd = truth.at("noise-sd").is_null() ? -1.0 : truth.at("noise-sd").get<double>();
  return d;
}

}  // namespace pathsel
