// Command-line surface: train / predict / gridsearch / bench / corrupt.
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "gessvdd/eval.hpp"
#include "gessvdd/model_io.hpp"
#include "gessvdd/variant.hpp"

namespace {

using namespace gessvdd;
using nlohmann::json;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ParseError:
    case ErrorCode::RaggedRows:
    case ErrorCode::TooFewSamples:
    case ErrorCode::DegenerateTruth:
    case ErrorCode::DimensionMismatch:
      return 3;
    case ErrorCode::InvalidArgument:
    case ErrorCode::InfeasibleC:
      return 2;
    default:
      return 4;  // NonFinite, SingularB, AllDegenerate, RankDeficient, ...
  }
}

struct CommonOptions {
  std::string data_path;
  std::string model_path;
  std::string out_path;
  std::string variant_text = "0-gr-min";
  std::string kernel = "linear";
  std::string positive_class;
  double sigma = 1.0;
  double c = 0.3;
  int d = 1;
  double eta = 0.1;
  int iterations = 5;
  int clusters = 5;
  int neighbors = 5;
  std::uint64_t seed = 0;
  int repeats = 5;
  int folds = 5;
  double train_fraction = 0.7;
};

void add_hyper_flags(CLI::App* cmd, CommonOptions* opt) {
  cmd->add_option("--variant", opt->variant_text,
                  "graph-update-direction triple, e.g. knn-gr-min");
  cmd->add_option("--kernel", opt->kernel, "linear or rbf")
      ->check(CLI::IsMember({"linear", "rbf"}));
  cmd->add_option("--sigma", opt->sigma, "RBF bandwidth");
  cmd->add_option("--C", opt->c, "SVDD regularization");
  cmd->add_option("--d", opt->d, "subspace dimensionality");
  cmd->add_option("--eta", opt->eta, "learning rate / ridge constant");
  cmd->add_option("--iterations", opt->iterations, "training iterations");
  cmd->add_option("--clusters", opt->clusters, "cluster count for sw/sb graphs");
  cmd->add_option("--neighbors", opt->neighbors, "neighbor count for the knn graph");
  cmd->add_option("--seed", opt->seed, "RNG seed");
}

Hyperparams hyperparams_from(const CommonOptions& opt, const VariantSpec& variant) {
  Hyperparams params;
  params.graph = variant.graph;
  params.update = variant.update;
  params.direction = variant.direction;
  params.kernel = variant.kernel;
  params.c = opt.c;
  params.d = opt.d;
  params.eta = opt.eta;
  params.iterations = opt.iterations;
  params.sigma = opt.sigma;
  params.seed = opt.seed;
  return params;
}

VariantSpec variant_from(const CommonOptions& opt) {
  VariantSpec variant = parse_variant(opt.variant_text);
  variant.kernel = opt.kernel == "rbf" ? KernelKind::NptRbf : KernelKind::Linear;
  const bool cluster_graph = variant.graph.kind == GraphKind::WithinCluster ||
                             variant.graph.kind == GraphKind::BetweenCluster;
  variant.graph.k = cluster_graph ? opt.clusters : opt.neighbors;
  return variant;
}

OneClassTask load_task(const CommonOptions& opt, bool need_positive) {
  OneClassTask task = load_csv(opt.data_path);
  if (need_positive) {
    if (opt.positive_class.empty()) {
      throw Error(ErrorCode::InvalidArgument, "--positive-class is required");
    }
    if (std::find(task.labels.begin(), task.labels.end(), opt.positive_class) ==
        task.labels.end()) {
      throw Error(ErrorCode::ParseError,
                  "positive class '" + opt.positive_class + "' not present in " + opt.data_path);
    }
    task.positive_class = opt.positive_class;
  }
  return task;
}

json grid_to_json(const HyperGrid& grid) {
  return json{{"C", grid.c_values},
              {"d", grid.d_values},
              {"eta", grid.eta_values},
              {"sigma", grid.sigma_values}};
}

int run_train(const CommonOptions& opt) {
  const OneClassTask task = load_task(opt, true);
  const VariantSpec variant = variant_from(opt);
  std::vector<Index> positives;
  for (Index i = 0; i < static_cast<Index>(task.labels.size()); ++i) {
    if (task.labels[static_cast<std::size_t>(i)] == task.positive_class) positives.push_back(i);
  }
  Matrix x(task.features.rows(), static_cast<Index>(positives.size()));
  for (std::size_t j = 0; j < positives.size(); ++j) {
    x.col(static_cast<Index>(j)) = task.features.col(positives[j]);
  }
  GessvddModel model = train(x, hyperparams_from(opt, variant));
  model.positive_class = task.positive_class;
  const std::string out = opt.out_path.empty() ? opt.model_path : opt.out_path;
  if (out.empty()) {
    throw Error(ErrorCode::InvalidArgument, "train: need --out or --model for the model file");
  }
  save_model(model, out);
  std::cout << "trained on " << positives.size() << " positive samples; radius "
            << model.sphere.radius << "; model written to " << out << "\n";
  for (const std::string& w : model.diagnostics.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  return 0;
}

int run_predict(const CommonOptions& opt) {
  if (opt.model_path.empty()) {
    throw Error(ErrorCode::InvalidArgument, "predict: --model is required");
  }
  const GessvddModel model = load_model(opt.model_path);
  const OneClassTask task = load_csv(opt.data_path);
  const std::vector<Classification> results = predict(model, task.features);

  std::ostringstream os;
  os << "index,prediction,score,label\n";
  char buf[64];
  for (std::size_t i = 0; i < results.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", results[i].score);
    os << i << ',' << (results[i].positive ? "positive" : "negative") << ',' << buf << ','
       << task.labels[i] << '\n';
  }
  if (opt.out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream out(opt.out_path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot open " + opt.out_path);
    out << os.str();
  }

  if (!model.positive_class.empty()) {
    std::vector<bool> pred, truth;
    bool have_pos = false, have_neg = false;
    for (std::size_t i = 0; i < results.size(); ++i) {
      pred.push_back(results[i].positive);
      const bool is_pos = task.labels[i] == model.positive_class;
      truth.push_back(is_pos);
      (is_pos ? have_pos : have_neg) = true;
    }
    if (have_pos && have_neg) {
      const Metrics m = metrics(pred, truth);
      std::cerr << "TPR " << m.tpr << "  TNR " << m.tnr << "  Gmean " << m.gmean << "\n";
    }
  }
  return 0;
}

int run_gridsearch(const CommonOptions& opt) {
  const OneClassTask task = load_task(opt, true);
  const VariantSpec variant = variant_from(opt);
  SplitPlan plan;
  plan.cv_folds = opt.folds;
  plan.seed = opt.seed;
  HyperGrid grid;
  const GridSearchResult result =
      grid_search(task, plan, variant, grid, hyperparams_from(opt, variant));

  std::ostringstream os;
  os << "C,d,eta,sigma,score,eligible,note\n";
  for (const GridPoint& p : result.table) {
    os << p.c << ',' << p.d << ',' << p.eta << ',' << p.sigma << ',' << p.score << ','
       << (p.eligible ? 1 : 0) << ',' << '"' << p.note << '"' << '\n';
  }
  if (!opt.out_path.empty()) {
    std::ofstream out(opt.out_path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot open " + opt.out_path);
    out << os.str();
  }
  std::cout << "best: C=" << result.best.c << " d=" << result.best.d
            << " eta=" << result.best.eta;
  if (variant.kernel == KernelKind::NptRbf) std::cout << " sigma=" << result.best.sigma;
  std::cout << " cv-gmean=" << result.best_score << "\n";
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int run_bench(const CommonOptions& opt) {
  OneClassTask task = load_task(opt, !opt.positive_class.empty());
  const VariantSpec variant = variant_from(opt);
  SplitPlan plan;
  plan.repeats = opt.repeats;
  plan.cv_folds = opt.folds;
  plan.train_fraction = opt.train_fraction;
  plan.seed = opt.seed;
  HyperGrid grid;
  const Hyperparams base = hyperparams_from(opt, variant);

  std::vector<std::string> targets;
  if (!opt.positive_class.empty()) {
    targets.push_back(opt.positive_class);
  } else {
    for (const std::string& label : task.labels) {
      if (std::find(targets.begin(), targets.end(), label) == targets.end()) {
        targets.push_back(label);
      }
    }
  }

  std::vector<EvalReport> reports;
  for (const std::string& target : targets) {
    task.positive_class = target;
    SplitPlan target_plan = plan;
    target_plan.seed = mix_seed(plan.seed, std::hash<std::string>{}(target));
    EvalReport report = bench(task, target_plan, variant, grid, base);
    std::cout << "target=" << target << " gmean=" << report.mean.gmean << " (+-"
              << report.stddev.gmean << ")\n";
    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
    reports.push_back(std::move(report));
  }

  if (!opt.out_path.empty()) {
    std::ofstream out(opt.out_path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot open " + opt.out_path);
    write_report_csv(reports, out);

    json manifest;
    manifest["command"] = "bench";
    manifest["version"] = GESSVDD_VERSION;
    manifest["data"] = opt.data_path;
    manifest["dataset"] = task.name;
    manifest["variant"] = opt.variant_text;
    manifest["kernel"] = opt.kernel;
    manifest["seed"] = opt.seed;
    manifest["repeats"] = plan.repeats;
    manifest["train_fraction"] = plan.train_fraction;
    manifest["cv_folds"] = plan.cv_folds;
    manifest["iterations"] = opt.iterations;
    manifest["clusters"] = opt.clusters;
    manifest["neighbors"] = opt.neighbors;
    manifest["grid"] = grid_to_json(grid);
    manifest["report"] = opt.out_path;
    json per_target = json::array();
    for (const EvalReport& report : reports) {
      json t;
      t["target_class"] = report.target_class;
      t["split_seed"] = report.seed;
      json chosen = json::array();
      for (const SplitResult& s : report.splits) {
        chosen.push_back(json{{"split", s.split},
                              {"C", s.chosen.c},
                              {"d", s.chosen.d},
                              {"eta", s.chosen.eta},
                              {"sigma", s.chosen.sigma},
                              {"gmean", s.test_metrics.gmean}});
      }
      t["chosen"] = chosen;
      per_target.push_back(t);
    }
    manifest["targets"] = per_target;
    std::ofstream mout(opt.out_path + ".manifest.json");
    if (!mout) throw Error(ErrorCode::ParseError, "cannot open manifest file");
    mout << manifest.dump(2) << '\n';
  }
  return 0;
}

int run_corrupt(const CommonOptions& opt) {
  const OneClassTask task = load_task(opt, true);
  std::vector<Index> all(static_cast<std::size_t>(task.features.cols()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Index>(i);
  const FeatureBounds bounds = positive_feature_bounds(task, all);
  const OneClassTask corrupted = inject_noise(task, bounds, opt.seed);
  if (opt.out_path.empty()) {
    throw Error(ErrorCode::InvalidArgument, "corrupt: --out is required");
  }
  save_csv(corrupted, opt.out_path);
  std::cout << "corrupted copy written to " << opt.out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-embedded subspace SVDD one-class classification toolkit"};
  app.require_subcommand(1);

  CommonOptions opt;

  CLI::App* cmd_train = app.add_subcommand("train", "fit a model on the positive class");
  cmd_train->add_option("--data", opt.data_path, "input CSV")->required();
  cmd_train->add_option("--positive-class", opt.positive_class, "target class label")->required();
  cmd_train->add_option("--model", opt.model_path, "model output path");
  cmd_train->add_option("--out", opt.out_path, "model output path (alias)");
  add_hyper_flags(cmd_train, &opt);

  CLI::App* cmd_predict = app.add_subcommand("predict", "classify samples with a saved model");
  cmd_predict->add_option("--data", opt.data_path, "input CSV")->required();
  cmd_predict->add_option("--model", opt.model_path, "model file")->required();
  cmd_predict->add_option("--out", opt.out_path, "predictions CSV (stdout when omitted)");

  CLI::App* cmd_grid = app.add_subcommand("gridsearch", "cross-validated hyperparameter search");
  cmd_grid->add_option("--data", opt.data_path, "input CSV")->required();
  cmd_grid->add_option("--positive-class", opt.positive_class, "target class label")->required();
  cmd_grid->add_option("--out", opt.out_path, "score table CSV");
  cmd_grid->add_option("--folds", opt.folds, "cross-validation folds");
  add_hyper_flags(cmd_grid, &opt);

  CLI::App* cmd_bench = app.add_subcommand("bench", "full repeated-split evaluation protocol");
  cmd_bench->add_option("--data", opt.data_path, "input CSV")->required();
  cmd_bench->add_option("--positive-class", opt.positive_class,
                        "target class (all classes when omitted)");
  cmd_bench->add_option("--out", opt.out_path, "report CSV; manifest written alongside");
  cmd_bench->add_option("--repeats", opt.repeats, "number of train/test splits");
  cmd_bench->add_option("--folds", opt.folds, "cross-validation folds");
  cmd_bench->add_option("--train-fraction", opt.train_fraction, "training fraction per split");
  add_hyper_flags(cmd_bench, &opt);

  CLI::App* cmd_corrupt = app.add_subcommand("corrupt", "write a noise-corrupted copy of a CSV");
  cmd_corrupt->add_option("--data", opt.data_path, "input CSV")->required();
  cmd_corrupt->add_option("--positive-class", opt.positive_class, "class whose feature ranges bound the noise")->required();
  cmd_corrupt->add_option("--out", opt.out_path, "output CSV")->required();
  cmd_corrupt->add_option("--seed", opt.seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_train->parsed()) return run_train(opt);
    if (cmd_predict->parsed()) return run_predict(opt);
    if (cmd_grid->parsed()) return run_gridsearch(opt);
    if (cmd_bench->parsed()) return run_bench(opt);
    if (cmd_corrupt->parsed()) return run_corrupt(opt);
  } catch (const gessvdd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
