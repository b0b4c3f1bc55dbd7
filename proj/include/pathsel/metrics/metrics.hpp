#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathsel/simgen/dataset.hpp"

namespace pathsel {

// Scores with higher = selected earlier. A score <= 0 means the variable was
// never selected by the procedure and the curve cannot reach it.
struct VariableRanking {
  Eigen::VectorXd scores;
  std::string method;
};

struct ConfusionSummary {
  int relevant = 0;        // selected and explaining
  int irrelevant = 0;      // selected, not explaining
  int missed = 0;          // explaining, not selected
  int true_negatives = 0;
  double recall = 0.0;
  double specificity = 0.0;
  double fdp = 0.0;  // 0 for an empty selection
};

struct DimensionMismatch : std::runtime_error {
  DimensionMismatch() : std::runtime_error("support/coefficient size mismatch") {}
};

// (1/n) || y~ - X~ beta ||^2 on the test half.
inline double test_mse(const Dataset& test, const std::vector<int>& support,
                       const Eigen::VectorXd& beta_hat) {
  if (int(support.size()) != int(beta_hat.size())) throw DimensionMismatch();
  const int n = test.n();
  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] < 0 || support[k] >= test.p()) throw DimensionMismatch();
    fitted += beta_hat(Eigen::Index(k)) * test.X.col(support[k]);
  }
  return (test.y - fitted).squaredNorm() / double(n);
}

inline ConfusionSummary confusion(const std::vector<int>& selected,
                                  const std::vector<int>& truth, int p) {
  std::vector<char> sel(p, 0), tru(p, 0);
  for (int j : selected) {
    if (j < 0 || j >= p) throw std::invalid_argument("confusion: index out of range");
    sel[j] = 1;
  }
  for (int j : truth) {
    if (j < 0 || j >= p) throw std::invalid_argument("confusion: index out of range");
    tru[j] = 1;
  }
  ConfusionSummary c;
  for (int j = 0; j < p; ++j) {
    if (sel[j] && tru[j]) ++c.relevant;
    if (sel[j] && !tru[j]) ++c.irrelevant;
    if (!sel[j] && tru[j]) ++c.missed;
    if (!sel[j] && !tru[j]) ++c.true_negatives;
  }
  const int n_pos = c.relevant + c.missed;
  const int n_neg = c.irrelevant + c.true_negatives;
  c.recall = n_pos ? double(c.relevant) / double(n_pos) : 1.0;
  c.specificity = n_neg ? double(c.true_negatives) / double(n_neg) : 1.0;
  const int n_sel = c.relevant + c.irrelevant;
  c.fdp = n_sel ? double(c.irrelevant) / double(n_sel) : 0.0;
  return c;
}

namespace detail {

struct RocPoint {
  double x, y;  // FPR, TPR (or recall, precision)
};

// Cumulative (FP, TP) counts after each distinct positive-score threshold,
// descending. Tied scores advance as one block.
inline void threshold_counts(const Eigen::VectorXd& scores, const std::vector<char>& is_pos,
                             std::vector<int>& tp, std::vector<int>& fp) {
  std::vector<int> order;
  for (int j = 0; j < scores.size(); ++j)
    if (scores(j) > 0.0) order.push_back(j);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return a < b;
  });
  tp.clear();
  fp.clear();
  int ctp = 0, cfp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t k = i;
    while (k < order.size() && scores(order[k]) == scores(order[i])) ++k;
    for (std::size_t t = i; t < k; ++t) {
      if (is_pos[order[t]])
        ++ctp;
      else
        ++cfp;
    }
    tp.push_back(ctp);
    fp.push_back(cfp);
    i = k;
  }
}

}  // namespace detail

// Partial area under the ROC step curve, truncated at FPR = x_cutoff.
// Tied blocks expand along a diagonal segment. Returns the raw area by
// default; with normalized = true the area is divided by the cutoff.
inline double p_roc_auc(const VariableRanking& ranking, const std::vector<int>& truth,
                        double x_cutoff, bool normalized = false) {
  if (x_cutoff <= 0.0 || x_cutoff > 1.0)
    throw std::invalid_argument("p_roc_auc: cutoff must be in (0, 1]");
  const int p = int(ranking.scores.size());
  std::vector<char> is_pos(p, 0);
  for (int j : truth) is_pos[j] = 1;
  const int n_pos = int(truth.size());
  const int n_neg = p - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::numeric_limits<double>::quiet_NaN();

  std::vector<int> tp, fp;
  detail::threshold_counts(ranking.scores, is_pos, tp, fp);

  double area = 0.0;
  double x0 = 0.0, y0 = 0.0;
  for (std::size_t k = 0; k < tp.size(); ++k) {
    double x1 = double(fp[k]) / double(n_neg);
    double y1 = double(tp[k]) / double(n_pos);
    if (x1 >= x_cutoff) {
      // clip the final segment at the cutoff
      const double frac = (x1 > x0) ? (x_cutoff - x0) / (x1 - x0) : 0.0;
      const double yc = y0 + frac * (y1 - y0);
      area += 0.5 * (y0 + yc) * (x_cutoff - x0);
      x0 = x_cutoff;
      y0 = yc;
      break;
    }
    area += 0.5 * (y0 + y1) * (x1 - x0);
    x0 = x1;
    y0 = y1;
  }
  return normalized ? area / x_cutoff : area;
}

// Partial area under the precision-recall step curve, truncated at
// recall = x_cutoff. Step interpolation: each block contributes
// (recall gain) * (precision at the block end).
inline double p_pr_auc(const VariableRanking& ranking, const std::vector<int>& truth,
                       double x_cutoff) {
  if (x_cutoff <= 0.0 || x_cutoff > 1.0)
    throw std::invalid_argument("p_pr_auc: cutoff must be in (0, 1]");
  const int p = int(ranking.scores.size());
  std::vector<char> is_pos(p, 0);
  for (int j : truth) is_pos[j] = 1;
  const int n_pos = int(truth.size());
  if (n_pos == 0 || n_pos == p) return std::numeric_limits<double>::quiet_NaN();

  std::vector<int> tp, fp;
  detail::threshold_counts(ranking.scores, is_pos, tp, fp);

  double area = 0.0;
  double r0 = 0.0;
  for (std::size_t k = 0; k < tp.size(); ++k) {
    const double r1 = double(tp[k]) / double(n_pos);
    const double prec = double(tp[k]) / double(tp[k] + fp[k]);
    if (r1 >= x_cutoff) {
      area += (x_cutoff - r0) * prec;
      r0 = x_cutoff;
      break;
    }
    area += (r1 - r0) * prec;
    r0 = r1;
  }
  return area;
}

enum class CutoffMode { truth_size, min_max_x };

// Largest x-axis value shared by all rankings: either the FPR each ranking
// reaches after its first |truth| selections, or the FPR at the end of each
// ranking's scored prefix; the minimum over rankings in both modes.
inline double common_cutoff(const std::vector<VariableRanking>& rankings,
                            const std::vector<int>& truth, CutoffMode mode) {
  if (rankings.empty()) throw std::invalid_argument("common_cutoff: empty list");
  const int p = int(rankings.front().scores.size());
  std::vector<char> is_pos(p, 0);
  for (int j : truth) is_pos[j] = 1;
  const int n_pos = int(truth.size());
  const int n_neg = p - n_pos;
  double cutoff = 1.0;
  for (const auto& r : rankings) {
    std::vector<int> tp, fp;
    detail::threshold_counts(r.scores, is_pos, tp, fp);
    double x = 0.0;
    if (mode == CutoffMode::min_max_x) {
      x = fp.empty() ? 0.0 : double(fp.back()) / double(n_neg);
    } else {
      for (std::size_t k = 0; k < tp.size(); ++k) {
        x = double(fp[k]) / double(n_neg);
        if (tp[k] + fp[k] >= n_pos) break;
      }
    }
    cutoff = std::min(cutoff, x);
  }
  return cutoff;
}

// pROC-AUC of the ideal ranking (every explaining variable strictly before
// every other variable) at the same cutoff and under the same conventions.
inline double reference_pauc(const std::vector<int>& truth, int p, double x_cutoff,
                             bool normalized = false) {
  VariableRanking ideal;
  ideal.scores.resize(p);
  std::vector<char> is_pos(p, 0);
  for (int j : truth) is_pos[j] = 1;
  double hi = 2.0 * p, lo = 1.0 * p;
  for (int j = 0; j < p; ++j) ideal.scores(j) = is_pos[j] ? hi-- : lo--;
  return p_roc_auc(ideal, truth, x_cutoff, normalized);
}

}  // namespace pathsel
