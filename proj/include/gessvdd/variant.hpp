// Parsing of "graph-update-direction" variant strings such as "knn-gr-min".

#ifndef GESSVDD_VARIANT_HPP
#define GESSVDD_VARIANT_HPP

#include <string>

#include "gessvdd/eval.hpp"

namespace gessvdd {

// graph in {0, i, pca, sw, sb, knn}; update in {gr, s, sr};
// direction in {min, max}. Unknown tokens raise ParseError naming the
// accepted values.
inline VariantSpec parse_variant(const std::string& text) {
  const auto first = text.find('-');
  const auto second = text.find('-', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos ||
      text.find('-', second + 1) != std::string::npos) {
    throw Error(ErrorCode::ParseError,
                "variant '" + text + "' must be graph-update-direction, e.g. knn-gr-min");
  }
  const std::string graph = text.substr(0, first);
  const std::string update = text.substr(first + 1, second - first - 1);
  const std::string direction = text.substr(second + 1);

  VariantSpec variant;
  if (graph == "0") {
    variant.graph.kind = GraphKind::Zero;
  } else if (graph == "i") {
    variant.graph.kind = GraphKind::Identity;
  } else if (graph == "pca") {
    variant.graph.kind = GraphKind::Pca;
  } else if (graph == "sw") {
    variant.graph.kind = GraphKind::WithinCluster;
  } else if (graph == "sb") {
    variant.graph.kind = GraphKind::BetweenCluster;
  } else if (graph == "knn") {
    variant.graph.kind = GraphKind::Knn;
  } else {
    throw Error(ErrorCode::ParseError,
                "unknown graph token '" + graph + "'; valid: 0, i, pca, sw, sb, knn");
  }

  if (update == "gr") {
    variant.update = UpdateRule::Gradient;
  } else if (update == "s") {
    variant.update = UpdateRule::Spectral;
  } else if (update == "sr") {
    variant.update = UpdateRule::SpectralRegression;
  } else {
    throw Error(ErrorCode::ParseError,
                "unknown update token '" + update + "'; valid: gr, s, sr");
  }

  if (direction == "min") {
    variant.direction = Direction::Min;
  } else if (direction == "max") {
    variant.direction = Direction::Max;
  } else {
    throw Error(ErrorCode::ParseError,
                "unknown direction token '" + direction + "'; valid: min, max");
  }
  return variant;
}

}  // namespace gessvdd

#endif  // GESSVDD_VARIANT_HPP
