// Evaluation protocol: repeated stratified 70/30 splits, five-fold
// cross-validated grid search (positives-only fits, mixed validation folds),
// rate metrics with Gmean, bounded Gaussian noise injection, and the
// Wilcoxon signed-rank comparison.

#ifndef GESSVDD_EVAL_HPP
#define GESSVDD_EVAL_HPP

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "gessvdd/dataset.hpp"
#include "gessvdd/trainer.hpp"

namespace gessvdd {

struct SplitPlan {
  int repeats = 5;
  double train_fraction = 0.7;
  int cv_folds = 5;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<Index> train;
  std::vector<Index> test;
};

namespace detail {

inline std::vector<std::string> class_order(const std::vector<std::string>& labels) {
  std::vector<std::string> order;
  for (const std::string& label : labels) {
    if (std::find(order.begin(), order.end(), label) == order.end()) order.push_back(label);
  }
  return order;
}

}  // namespace detail

// Per repeat, each class contributes round(train_fraction * N_class) samples
// to the training side (at least one per side). Deterministic given the seed.
inline std::vector<SplitIndices> stratified_split(const OneClassTask& task,
                                                  const SplitPlan& plan) {
  if (plan.repeats < 1 || plan.train_fraction <= 0.0 || plan.train_fraction >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "stratified_split: bad plan");
  }
  const std::vector<std::string> classes = detail::class_order(task.labels);
  std::map<std::string, std::vector<Index>> members;
  for (Index i = 0; i < static_cast<Index>(task.labels.size()); ++i) {
    members[task.labels[static_cast<std::size_t>(i)]].push_back(i);
  }
  for (const std::string& cls : classes) {
    if (members[cls].size() < 2) {
      throw Error(ErrorCode::TooFewSamples,
                  "stratified_split: class '" + cls + "' has fewer than 2 samples");
    }
  }

  std::vector<SplitIndices> out;
  out.reserve(static_cast<std::size_t>(plan.repeats));
  for (int r = 0; r < plan.repeats; ++r) {
    Rng rng(mix_seed(plan.seed, static_cast<std::uint64_t>(r)));
    SplitIndices split;
    for (const std::string& cls : classes) {
      std::vector<Index> idx = members[cls];
      rng.shuffle(idx);
      const double nc = static_cast<double>(idx.size());
      Index n_train = static_cast<Index>(std::floor(plan.train_fraction * nc + 0.5));
      n_train = std::clamp<Index>(n_train, 1, static_cast<Index>(idx.size()) - 1);
      split.train.insert(split.train.end(), idx.begin(), idx.begin() + n_train);
      split.test.insert(split.test.end(), idx.begin() + n_train, idx.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    out.push_back(std::move(split));
  }
  return out;
}

struct Metrics {
  double tpr = 0.0;
  double tnr = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
  double gmean = 0.0;
};

inline Metrics metrics(const std::vector<bool>& predicted_positive,
                       const std::vector<bool>& truth_positive) {
  if (predicted_positive.size() != truth_positive.size()) {
    throw Error(ErrorCode::DimensionMismatch, "metrics: length mismatch");
  }
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth_positive.size(); ++i) {
    if (truth_positive[i]) {
      predicted_positive[i] ? ++tp : ++fn;
    } else {
      predicted_positive[i] ? ++fp : ++tn;
    }
  }
  const double p = tp + fn;
  const double n = tn + fp;
  if (p == 0 || n == 0) {
    throw Error(ErrorCode::DegenerateTruth, "metrics: need both classes in the truth vector");
  }
  Metrics m;
  m.tpr = tp / p;
  m.tnr = tn / n;
  m.fpr = fp / n;
  m.fnr = fn / p;
  m.gmean = std::sqrt(m.tpr * m.tnr);
  return m;
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

struct VariantSpec {
  LaplacianSpec graph;
  UpdateRule update = UpdateRule::Gradient;
  Direction direction = Direction::Min;
  KernelKind kernel = KernelKind::Linear;
};

struct HyperGrid {
  std::vector<double> c_values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::vector<int> d_values{1, 2, 3, 4, 5, 10, 20};
  std::vector<double> eta_values{1e-1, 1e0, 1e1, 1e2, 1e3};
  std::vector<double> sigma_values{1e-1, 1e0, 1e1, 1e2, 1e3};
};

struct GridPoint {
  double c = 0.0;
  int d = 0;
  double eta = 0.0;
  double sigma = 0.0;
  double score = 0.0;
  bool eligible = false;  // feasible and evaluated without errors
  std::string note;
};

struct GridSearchResult {
  Hyperparams best;
  double best_score = -1.0;
  std::vector<GridPoint> table;
  std::vector<std::string> warnings;
};

namespace detail {

struct CvFolds {
  // per fold: positive indices (into the task) and validation-only negatives
  std::vector<std::vector<Index>> positives;
  std::vector<std::vector<Index>> negatives;
};

// Positives are shuffled and dealt round-robin; negatives join validation
// folds round-robin per class.
inline CvFolds make_cv_folds(const OneClassTask& task, int folds, std::uint64_t seed) {
  CvFolds cv;
  cv.positives.resize(static_cast<std::size_t>(folds));
  cv.negatives.resize(static_cast<std::size_t>(folds));

  std::vector<Index> pos;
  std::map<std::string, std::vector<Index>> neg_by_class;
  for (Index i = 0; i < static_cast<Index>(task.labels.size()); ++i) {
    if (task.labels[static_cast<std::size_t>(i)] == task.positive_class) {
      pos.push_back(i);
    } else {
      neg_by_class[task.labels[static_cast<std::size_t>(i)]].push_back(i);
    }
  }
  if (static_cast<int>(pos.size()) < folds) {
    throw Error(ErrorCode::TooFewSamples, "cv folds: fewer positive samples than folds");
  }
  Rng rng(mix_seed(seed, 0xF01D));
  rng.shuffle(pos);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    cv.positives[i % static_cast<std::size_t>(folds)].push_back(pos[i]);
  }
  for (const std::string& cls : class_order(task.labels)) {
    auto it = neg_by_class.find(cls);
    if (it == neg_by_class.end()) continue;
    std::vector<Index>& idx = it->second;
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      cv.negatives[i % static_cast<std::size_t>(folds)].push_back(idx[i]);
    }
  }
  return cv;
}

inline Matrix gather_columns(const Matrix& features, const std::vector<Index>& idx) {
  Matrix out(features.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    out.col(static_cast<Index>(j)) = features.col(idx[j]);
  }
  return out;
}

inline Hyperparams assemble_params(const VariantSpec& variant, const Hyperparams& base,
                                   double c, int d, double eta, double sigma) {
  Hyperparams p = base;
  p.graph = variant.graph;
  p.update = variant.update;
  p.direction = variant.direction;
  p.kernel = variant.kernel;
  p.c = c;
  p.d = d;
  p.eta = eta;
  p.sigma = sigma;
  return p;
}

}  // namespace detail

// Five-fold positives-only fitting with mixed validation folds; returns the
// lexicographically-first argmax over (C, d, eta, sigma) and the full score
// table. The linear kernel skips the sigma sweep; the spectral update skips
// the eta sweep (it uses neither a step size nor a ridge).
inline GridSearchResult grid_search(const OneClassTask& task, const SplitPlan& plan,
                                    const VariantSpec& variant, const HyperGrid& grid,
                                    const Hyperparams& base) {
  detail::CvFolds cv = detail::make_cv_folds(task, plan.cv_folds, plan.seed);

  const bool sweep_sigma = variant.kernel == KernelKind::NptRbf;
  const bool sweep_eta = variant.update != UpdateRule::Spectral;
  const std::vector<double> sigmas = sweep_sigma ? grid.sigma_values : std::vector<double>{base.sigma};
  const std::vector<double> etas = sweep_eta ? grid.eta_values : std::vector<double>{base.eta};

  GridSearchResult result;
  bool have_best = false;

  for (double c : grid.c_values) {
    for (int d : grid.d_values) {
      for (double eta : etas) {
        for (double sigma : sigmas) {
          GridPoint point{c, d, eta, sigma, 0.0, false, {}};
          double score_sum = 0.0;
          int scored_folds = 0;
          bool errored = false;
          for (int f = 0; f < plan.cv_folds && !errored; ++f) {
            std::vector<Index> fit_idx;
            for (int g = 0; g < plan.cv_folds; ++g) {
              if (g == f) continue;
              const auto& fold = cv.positives[static_cast<std::size_t>(g)];
              fit_idx.insert(fit_idx.end(), fold.begin(), fold.end());
            }
            if (c * static_cast<double>(fit_idx.size()) < 1.0 - 1e-12) {
              point.note = "infeasible: C*N < 1 in cv fit";
              errored = true;
              break;
            }
            std::vector<Index> val_idx = cv.positives[static_cast<std::size_t>(f)];
            const std::size_t val_pos = val_idx.size();
            val_idx.insert(val_idx.end(), cv.negatives[static_cast<std::size_t>(f)].begin(),
                           cv.negatives[static_cast<std::size_t>(f)].end());
            if (val_pos == 0 || val_pos == val_idx.size()) continue;  // degenerate fold

            Hyperparams params = detail::assemble_params(variant, base, c, d, eta, sigma);
            params.seed = mix_seed(plan.seed, 0xCF0 + static_cast<std::uint64_t>(f));
            try {
              GessvddModel model = train(detail::gather_columns(task.features, fit_idx), params);
              std::vector<bool> pred, truth;
              for (std::size_t t = 0; t < val_idx.size(); ++t) {
                pred.push_back(predict_one(model, task.features.col(val_idx[t])).positive);
                truth.push_back(t < val_pos);
              }
              score_sum += metrics(pred, truth).gmean;
              ++scored_folds;
            } catch (const Error& e) {
              point.note = e.what();
              errored = true;
            }
          }
          if (!errored && scored_folds > 0) {
            point.score = score_sum / scored_folds;
            point.eligible = true;
            if (!have_best || point.score > result.best_score) {
              have_best = true;
              result.best_score = point.score;
              result.best = detail::assemble_params(variant, base, c, d, eta, sigma);
            }
          } else if (!point.note.empty()) {
            std::ostringstream msg;
            msg << "grid point C=" << c << " d=" << d << " eta=" << eta << " sigma=" << sigma
                << " skipped: " << point.note;
            result.warnings.push_back(msg.str());
          }
          result.table.push_back(std::move(point));
        }
      }
    }
  }
  if (!have_best) {
    throw Error(ErrorCode::InvalidArgument, "grid_search: no eligible grid point");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Noise injection
// ---------------------------------------------------------------------------

struct FeatureBounds {
  Vector lower;
  Vector upper;
};

inline FeatureBounds positive_feature_bounds(const OneClassTask& task,
                                             const std::vector<Index>& train_indices) {
  FeatureBounds bounds;
  bool any = false;
  for (Index idx : train_indices) {
    if (task.labels[static_cast<std::size_t>(idx)] != task.positive_class) continue;
    if (!any) {
      bounds.lower = task.features.col(idx);
      bounds.upper = task.features.col(idx);
      any = true;
    } else {
      bounds.lower = bounds.lower.cwiseMin(task.features.col(idx));
      bounds.upper = bounds.upper.cwiseMax(task.features.col(idx));
    }
  }
  if (!any) {
    throw Error(ErrorCode::TooFewSamples, "positive_feature_bounds: no positive samples");
  }
  return bounds;
}

// Adds standard-normal noise per feature, clamped to the positive-class
// per-feature range.
inline OneClassTask inject_noise(const OneClassTask& task, const FeatureBounds& bounds,
                                 std::uint64_t seed) {
  if (bounds.lower.size() != task.features.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "inject_noise: bounds dimension mismatch");
  }
  OneClassTask out = task;
  Rng rng(seed);
  for (Index j = 0; j < out.features.cols(); ++j) {
    for (Index i = 0; i < out.features.rows(); ++i) {
      const double noisy = out.features(i, j) + rng.next_gaussian();
      out.features(i, j) = std::clamp(noisy, bounds.lower(i), bounds.upper(i));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank test
// ---------------------------------------------------------------------------

struct WilcoxonResult {
  double t_statistic = 0.0;
  bool significant = false;
  int n_effective = 0;
  double critical_value = std::numeric_limits<double>::quiet_NaN();
};

// Two-sided test at the 0.05 level. Zero differences are dropped; tied
// absolute differences share average ranks; T is the smaller signed-rank sum.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                           const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 6) {
    throw Error(ErrorCode::InvalidArgument, "wilcoxon: need equal lengths >= 6");
  }
  std::vector<std::pair<double, bool>> diffs;  // |d|, d > 0
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back({std::abs(d), d > 0.0});
  }
  if (diffs.empty()) {
    throw Error(ErrorCode::AllZeroDifferences, "wilcoxon: all differences are zero");
  }
  std::sort(diffs.begin(), diffs.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  const std::size_t n = diffs.size();
  double w_plus = 0.0, w_minus = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && diffs[j].first == diffs[i].first) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      (diffs[k].second ? w_plus : w_minus) += avg_rank;
    }
    i = j;
  }

  WilcoxonResult out;
  out.n_effective = static_cast<int>(n);
  out.t_statistic = std::min(w_plus, w_minus);

  // two-sided 0.05 critical values for n = 6..25
  static const double critical[] = {0,  2,  3,  5,  8,  10, 13, 17, 21, 25,
                                    29, 34, 40, 46, 52, 58, 65, 73, 81, 89};
  if (n >= 6 && n <= 25) {
    out.critical_value = critical[n - 6];
    out.significant = out.t_statistic <= out.critical_value;
  } else if (n > 25) {
    const double mean = static_cast<double>(n * (n + 1)) / 4.0;
    const double sd = std::sqrt(static_cast<double>(n * (n + 1) * (2 * n + 1)) / 24.0);
    out.significant = (out.t_statistic - mean) / sd <= -1.959963984540054;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Benchmark protocol and report
// ---------------------------------------------------------------------------

struct SplitResult {
  int split = 0;
  Hyperparams chosen;
  Metrics test_metrics;
};

struct EvalReport {
  std::string dataset;
  std::string target_class;
  std::string variant_name;
  std::vector<SplitResult> splits;
  Metrics mean;
  Metrics stddev;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
};

inline std::string variant_name(const VariantSpec& variant) {
  std::string graph;
  switch (variant.graph.kind) {
    case GraphKind::Zero: graph = "0"; break;
    case GraphKind::Identity: graph = "i"; break;
    case GraphKind::Pca: graph = "pca"; break;
    case GraphKind::WithinCluster: graph = "sw"; break;
    case GraphKind::BetweenCluster: graph = "sb"; break;
    case GraphKind::Knn: graph = "knn"; break;
    default: graph = "?"; break;
  }
  const std::string update = variant.update == UpdateRule::Gradient
                                 ? "gr"
                                 : (variant.update == UpdateRule::Spectral ? "s" : "sr");
  const std::string dir = variant.direction == Direction::Min ? "min" : "max";
  const std::string kernel = variant.kernel == KernelKind::Linear ? "linear" : "rbf";
  return graph + "-" + update + "-" + dir + "-" + kernel;
}

namespace detail {

inline Metrics metrics_mean(const std::vector<SplitResult>& splits) {
  Metrics m;
  for (const SplitResult& s : splits) {
    m.tpr += s.test_metrics.tpr;
    m.tnr += s.test_metrics.tnr;
    m.fpr += s.test_metrics.fpr;
    m.fnr += s.test_metrics.fnr;
    m.gmean += s.test_metrics.gmean;
  }
  const double n = static_cast<double>(splits.size());
  m.tpr /= n; m.tnr /= n; m.fpr /= n; m.fnr /= n; m.gmean /= n;
  return m;
}

inline Metrics metrics_stddev(const std::vector<SplitResult>& splits, const Metrics& mean) {
  Metrics v;
  if (splits.size() < 2) return v;
  for (const SplitResult& s : splits) {
    v.tpr += (s.test_metrics.tpr - mean.tpr) * (s.test_metrics.tpr - mean.tpr);
    v.tnr += (s.test_metrics.tnr - mean.tnr) * (s.test_metrics.tnr - mean.tnr);
    v.fpr += (s.test_metrics.fpr - mean.fpr) * (s.test_metrics.fpr - mean.fpr);
    v.fnr += (s.test_metrics.fnr - mean.fnr) * (s.test_metrics.fnr - mean.fnr);
    v.gmean += (s.test_metrics.gmean - mean.gmean) * (s.test_metrics.gmean - mean.gmean);
  }
  const double n = static_cast<double>(splits.size() - 1);
  v.tpr = std::sqrt(v.tpr / n);
  v.tnr = std::sqrt(v.tnr / n);
  v.fpr = std::sqrt(v.fpr / n);
  v.fnr = std::sqrt(v.fnr / n);
  v.gmean = std::sqrt(v.gmean / n);
  return v;
}

}  // namespace detail

// Full protocol for one (dataset, target class, variant): repeated stratified
// splits, per-split grid search over the training portion, a final
// positives-only fit with the chosen hyperparameters, and test-set metrics.
inline EvalReport bench(const OneClassTask& task, const SplitPlan& plan,
                        const VariantSpec& variant, const HyperGrid& grid,
                        const Hyperparams& base) {
  if (task.positive_class.empty() ||
      std::find(task.labels.begin(), task.labels.end(), task.positive_class) ==
          task.labels.end()) {
    throw Error(ErrorCode::InvalidArgument, "bench: positive class not present in labels");
  }
  EvalReport report;
  report.dataset = task.name;
  report.target_class = task.positive_class;
  report.variant_name = variant_name(variant);
  report.seed = plan.seed;

  const std::vector<SplitIndices> splits = stratified_split(task, plan);
  for (int r = 0; r < static_cast<int>(splits.size()); ++r) {
    const SplitIndices& split = splits[static_cast<std::size_t>(r)];

    OneClassTask train_task;
    train_task.name = task.name;
    train_task.positive_class = task.positive_class;
    train_task.features = detail::gather_columns(task.features, split.train);
    for (Index idx : split.train) {
      train_task.labels.push_back(task.labels[static_cast<std::size_t>(idx)]);
    }

    SplitPlan cv_plan = plan;
    cv_plan.seed = mix_seed(plan.seed, 0x5E00 + static_cast<std::uint64_t>(r));
    GridSearchResult search = grid_search(train_task, cv_plan, variant, grid, base);
    for (const std::string& w : search.warnings) {
      report.warnings.push_back("split " + std::to_string(r) + ": " + w);
    }

    std::vector<Index> fit_idx;
    for (Index i = 0; i < static_cast<Index>(train_task.labels.size()); ++i) {
      if (train_task.labels[static_cast<std::size_t>(i)] == task.positive_class) {
        fit_idx.push_back(i);
      }
    }
    Hyperparams chosen = search.best;
    chosen.seed = mix_seed(plan.seed, 0xF17 + static_cast<std::uint64_t>(r));
    GessvddModel model = train(detail::gather_columns(train_task.features, fit_idx), chosen);

    std::vector<bool> pred, truth;
    for (Index idx : split.test) {
      pred.push_back(predict_one(model, task.features.col(idx)).positive);
      truth.push_back(task.labels[static_cast<std::size_t>(idx)] == task.positive_class);
    }
    SplitResult sr;
    sr.split = r;
    sr.chosen = chosen;
    sr.test_metrics = metrics(pred, truth);
    report.splits.push_back(std::move(sr));
  }

  report.mean = detail::metrics_mean(report.splits);
  report.stddev = detail::metrics_stddev(report.splits, report.mean);
  return report;
}

inline void write_report_csv(const std::vector<EvalReport>& reports, std::ostream& os) {
  os << "dataset,target_class,variant,split,C,d,eta,sigma,TPR,TNR,FPR,FNR,Gmean\n";
  char buf[256];
  auto write_metrics = [&](const Metrics& m) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f", m.tpr, m.tnr, m.fpr, m.fnr,
                  m.gmean);
    os << buf << '\n';
  };
  for (const EvalReport& report : reports) {
    for (const SplitResult& s : report.splits) {
      os << report.dataset << ',' << report.target_class << ',' << report.variant_name << ','
         << s.split << ',';
      std::snprintf(buf, sizeof(buf), "%g,%d,%g,%g,", s.chosen.c, s.chosen.d, s.chosen.eta,
                    s.chosen.kernel == KernelKind::NptRbf ? s.chosen.sigma : 0.0);
      os << buf;
      write_metrics(s.test_metrics);
    }
    os << report.dataset << ',' << report.target_class << ',' << report.variant_name
       << ",mean,,,,";
    write_metrics(report.mean);
    os << report.dataset << ',' << report.target_class << ',' << report.variant_name
       << ",stddev,,,,";
    write_metrics(report.stddev);
  }
}

inline std::string report_to_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  write_report_csv(reports, os);
  return os.str();
}

}  // namespace gessvdd

#endif  // GESSVDD_EVAL_HPP
