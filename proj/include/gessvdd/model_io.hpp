// Self-describing text serialization of trained models. Doubles are written
// with 17 significant digits, which round-trips IEEE-754 exactly, so a
// loaded model predicts bit-identically to the in-process one.

#ifndef GESSVDD_MODEL_IO_HPP
#define GESSVDD_MODEL_IO_HPP

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "gessvdd/trainer.hpp"

namespace gessvdd {

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_matrix(std::ostream& os, const std::string& name, const Matrix& m) {
  os << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

inline const char* graph_token(GraphKind kind) {
  switch (kind) {
    case GraphKind::Zero: return "0";
    case GraphKind::Identity: return "i";
    case GraphKind::Pca: return "pca";
    case GraphKind::WithinCluster: return "sw";
    case GraphKind::BetweenCluster: return "sb";
    case GraphKind::Knn: return "knn";
    default: return "?";
  }
}

inline GraphKind graph_from_token(const std::string& token) {
  if (token == "0") return GraphKind::Zero;
  if (token == "i") return GraphKind::Identity;
  if (token == "pca") return GraphKind::Pca;
  if (token == "sw") return GraphKind::WithinCluster;
  if (token == "sb") return GraphKind::BetweenCluster;
  if (token == "knn") return GraphKind::Knn;
  throw Error(ErrorCode::ParseError, "unknown graph token: " + token);
}

inline const char* update_token(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::Gradient: return "gr";
    case UpdateRule::Spectral: return "s";
    default: return "sr";
  }
}

inline UpdateRule update_from_token(const std::string& token) {
  if (token == "gr") return UpdateRule::Gradient;
  if (token == "s") return UpdateRule::Spectral;
  if (token == "sr") return UpdateRule::SpectralRegression;
  throw Error(ErrorCode::ParseError, "unknown update token: " + token);
}

}  // namespace detail

inline std::string serialize_model(const GessvddModel& model) {
  std::ostringstream os;
  os << "gessvdd-model v1\n";
  os << "version " << GESSVDD_VERSION << '\n';
  os << "positive_class " << (model.positive_class.empty() ? "-" : model.positive_class) << '\n';
  os << "kernel " << (model.params.kernel == KernelKind::Linear ? "linear" : "rbf") << '\n';
  os << "graph " << detail::graph_token(model.params.graph.kind) << '\n';
  os << "graph_k " << model.params.graph.k << '\n';
  os << "update " << detail::update_token(model.params.update) << '\n';
  os << "direction " << (model.params.direction == Direction::Min ? "min" : "max") << '\n';
  os << "C " << detail::format_double(model.params.c) << '\n';
  os << "d " << model.params.d << '\n';
  os << "eta " << detail::format_double(model.params.eta) << '\n';
  os << "iterations " << model.params.iterations << '\n';
  os << "sigma " << detail::format_double(model.params.sigma) << '\n';
  os << "seed " << model.params.seed << '\n';
  os << "support_index " << model.sphere.support_index << '\n';
  os << "radius " << detail::format_double(model.sphere.radius) << '\n';
  os << "radius_sq " << detail::format_double(model.sphere.radius_sq) << '\n';
  os << "objective " << detail::format_double(model.dual.objective) << '\n';
  detail::write_matrix(os, "mean", model.mean);
  detail::write_matrix(os, "Q", model.q);
  detail::write_matrix(os, "whitener", model.whitener);
  detail::write_matrix(os, "center", model.sphere.center);
  detail::write_matrix(os, "alpha", model.dual.alpha);
  if (model.npt) {
    os << "npt 1\n";
    os << "npt_rank " << model.npt->retained_rank << '\n';
    detail::write_matrix(os, "npt_training_x", model.npt->training_x);
    detail::write_matrix(os, "npt_basis", model.npt->basis);
    detail::write_matrix(os, "npt_phi_pinv", model.npt->phi_pinv);
    detail::write_matrix(os, "npt_colmean", model.npt->kernel_colmean);
  } else {
    os << "npt 0\n";
  }
  os << "end\n";
  return os.str();
}

namespace detail {

class ModelReader {
 public:
  explicit ModelReader(std::istream& is) : is_(is) {}

  std::string next_line() {
    std::string line;
    if (!std::getline(is_, line)) {
      throw Error(ErrorCode::ParseError, "model document: unexpected end of input");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  // "key value" pair; verifies the key
  std::string expect(const std::string& key) {
    const std::string line = next_line();
    if (line.rfind(key + " ", 0) != 0) {
      throw Error(ErrorCode::ParseError, "model document: expected key '" + key + "'");
    }
    return line.substr(key.size() + 1);
  }

  double expect_double(const std::string& key) { return parse_double(expect(key)); }

  long expect_long(const std::string& key) { return std::stol(expect(key)); }

  std::uint64_t expect_u64(const std::string& key) { return std::stoull(expect(key)); }

  Matrix expect_matrix(const std::string& name) {
    std::istringstream header(next_line());
    std::string tag, got;
    Index rows = 0, cols = 0;
    header >> tag >> got >> rows >> cols;
    if (tag != "matrix" || got != name || rows < 0 || cols < 0) {
      throw Error(ErrorCode::ParseError, "model document: expected matrix '" + name + "'");
    }
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      std::istringstream row(next_line());
      for (Index j = 0; j < cols; ++j) {
        std::string cell;
        if (!(row >> cell)) {
          throw Error(ErrorCode::ParseError, "model document: short row in matrix " + name);
        }
        m(i, j) = parse_double(cell);
      }
    }
    return m;
  }

 private:
  static double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
      throw Error(ErrorCode::ParseError, "model document: bad number '" + s + "'");
    }
    return v;
  }

  std::istream& is_;
};

}  // namespace detail

inline GessvddModel deserialize_model(std::istream& is) {
  detail::ModelReader reader(is);
  if (reader.next_line() != "gessvdd-model v1") {
    throw Error(ErrorCode::ParseError, "model document: bad magic line");
  }
  reader.expect("version");

  GessvddModel model;
  const std::string positive = reader.expect("positive_class");
  model.positive_class = positive == "-" ? "" : positive;
  model.params.kernel =
      reader.expect("kernel") == "linear" ? KernelKind::Linear : KernelKind::NptRbf;
  model.params.graph.kind = detail::graph_from_token(reader.expect("graph"));
  model.params.graph.k = static_cast<int>(reader.expect_long("graph_k"));
  model.params.update = detail::update_from_token(reader.expect("update"));
  model.params.direction = reader.expect("direction") == "min" ? Direction::Min : Direction::Max;
  model.params.c = reader.expect_double("C");
  model.params.d = static_cast<int>(reader.expect_long("d"));
  model.params.eta = reader.expect_double("eta");
  model.params.iterations = static_cast<int>(reader.expect_long("iterations"));
  model.params.sigma = reader.expect_double("sigma");
  model.params.seed = reader.expect_u64("seed");
  model.sphere.support_index = reader.expect_long("support_index");
  model.sphere.radius = reader.expect_double("radius");
  model.sphere.radius_sq = reader.expect_double("radius_sq");
  model.dual.objective = reader.expect_double("objective");
  model.mean = reader.expect_matrix("mean");
  model.q = reader.expect_matrix("Q");
  model.whitener = reader.expect_matrix("whitener");
  model.sphere.center = reader.expect_matrix("center");
  model.dual.alpha = reader.expect_matrix("alpha");
  model.dual.categories = detail::categorize(model.dual.alpha, model.params.c);
  if (reader.expect_long("npt") == 1) {
    NptState state;
    state.sigma = model.params.sigma;
    state.retained_rank = reader.expect_long("npt_rank");
    state.training_x = reader.expect_matrix("npt_training_x");
    state.basis = reader.expect_matrix("npt_basis");
    state.phi_pinv = reader.expect_matrix("npt_phi_pinv");
    state.kernel_colmean = reader.expect_matrix("npt_colmean");
    model.npt = std::move(state);
  }
  if (reader.next_line() != "end") {
    throw Error(ErrorCode::ParseError, "model document: missing end marker");
  }
  return model;
}

inline void save_model(const GessvddModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot open model file for writing: " + path);
  out << serialize_model(model);
  if (!out) throw Error(ErrorCode::ParseError, "failed writing model file: " + path);
}

inline GessvddModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open model file: " + path);
  return deserialize_model(in);
}

}  // namespace gessvdd

#endif  // GESSVDD_MODEL_IO_HPP
