// CSV-backed one-class classification tasks: real-valued feature columns
// followed by a string class label, with optional auto-detected header.

#ifndef GESSVDD_DATASET_HPP
#define GESSVDD_DATASET_HPP

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "gessvdd/core.hpp"

namespace gessvdd {

struct OneClassTask {
  Matrix features;  // D x N
  std::vector<std::string> labels;
  std::string positive_class;
  std::string name;
  std::vector<std::string> feature_names;  // empty when the file had no header
  std::string label_name;
};

namespace detail {

inline bool parse_cell(const std::string& cell, double* out) {
  if (cell.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') return false;
  *out = v;
  return true;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    // trim surrounding whitespace
    const auto begin = cell.find_first_not_of(" \t");
    const auto fin = cell.find_last_not_of(" \t");
    cells.push_back(begin == std::string::npos ? "" : cell.substr(begin, fin - begin + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace detail

inline OneClassTask parse_csv(std::istream& is, const std::string& name) {
  OneClassTask task;
  task.name = name;

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first_data_row = true;

  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() < 2) {
      throw Error(ErrorCode::ParseError,
                  name + ": row " + std::to_string(line_no) + ": need at least 2 columns");
    }
    if (first_data_row) {
      // header iff any feature cell is non-numeric
      bool numeric = true;
      double ignored;
      for (std::size_t j = 0; j + 1 < cells.size(); ++j) {
        if (!detail::parse_cell(cells[j], &ignored)) {
          numeric = false;
          break;
        }
      }
      if (!numeric) {
        task.feature_names.assign(cells.begin(), cells.end() - 1);
        task.label_name = cells.back();
        continue;
      }
    }
    if (width == 0) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw Error(ErrorCode::RaggedRows,
                  name + ": row " + std::to_string(line_no) + ": expected " +
                      std::to_string(width) + " columns, got " + std::to_string(cells.size()));
    }
    first_data_row = false;
    std::vector<double> values(cells.size() - 1);
    for (std::size_t j = 0; j + 1 < cells.size(); ++j) {
      if (!detail::parse_cell(cells[j], &values[j])) {
        throw Error(ErrorCode::ParseError, name + ": row " + std::to_string(line_no) +
                                               " column " + std::to_string(j + 1) +
                                               ": not a number: '" + cells[j] + "'");
      }
    }
    rows.push_back(std::move(values));
    task.labels.push_back(cells.back());
  }

  if (rows.empty()) {
    throw Error(ErrorCode::ParseError, name + ": no data rows");
  }
  const Index dim = static_cast<Index>(rows[0].size());
  const Index n = static_cast<Index>(rows.size());
  task.features.resize(dim, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < dim; ++i) {
      task.features(i, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
  }
  return task;
}

inline OneClassTask load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open data file: " + path);
  std::string name = path;
  const auto slash = name.find_last_of("/\\");
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return parse_csv(in, name);
}

inline void save_csv(const OneClassTask& task, std::ostream& os) {
  if (!task.feature_names.empty()) {
    for (const std::string& fn : task.feature_names) os << fn << ',';
    os << (task.label_name.empty() ? "label" : task.label_name) << '\n';
  }
  char buf[64];
  for (Index j = 0; j < task.features.cols(); ++j) {
    for (Index i = 0; i < task.features.rows(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", task.features(i, j));
      os << buf << ',';
    }
    os << task.labels[static_cast<std::size_t>(j)] << '\n';
  }
}

inline void save_csv(const OneClassTask& task, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot open output file: " + path);
  save_csv(task, out);
}

}  // namespace gessvdd

#endif  // GESSVDD_DATASET_HPP
