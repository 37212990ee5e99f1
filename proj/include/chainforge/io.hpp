#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chainforge/complex.hpp"
#include "chainforge/flatnorm.hpp"
#include "chainforge/metric_space.hpp"
#include "chainforge/rational.hpp"
#include "chainforge/slicing.hpp"

namespace chainforge {

using Json = nlohmann::ordered_json;

/// Whole file as bytes. Throws InputError when unreadable.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);
std::string sha256_hex(std::string_view bytes);

enum class EdgeMetric {
  /// lengths from vertex coordinates
  kEuclidean,
  /// every edge has length one; distances are edge-path distances
  kUnit,
};

/// OFF or nOFF text. Faces with m indices become (m-1)-simplices.
/// Diagnostics read "name:line: message".
ComplexPtr parse_off(std::string_view text, const std::string& name, EdgeMetric metric = EdgeMetric::kEuclidean);
std::string write_off(const std::vector<std::vector<Rational>>& coords, const std::vector<Simplex>& faces);

/// Square matrix of comma-separated entries; '#' starts a comment.
FiniteMetricSpace parse_metric_csv(std::string_view text, const std::string& name);
std::string write_metric_csv(const FiniteMetricSpace& space);

/// Parses JSON text; syntax errors report the line.
Json parse_json(std::string_view text, const std::string& name);

/// JSON number or "p/q" string.
Rational rational_from_json(const Json& j, const std::string& where);
Json rational_json(const Rational& q);

/// {"dim": k, "modulus": p|null, "coeffs": [[[v0,...], c], ...]}
Chain chain_from_json(const Json& j, const ComplexPtr& complex, const std::string& name);
Json chain_to_json(const Chain& c);
Json fractional_chain_to_json(const FractionalChain& c, const WeightedComplex& cx, int dim);

/// {"n_vertices": n, "simplices": [[...], ...], "weights": [...],
///  "metric": [[...]], "coords": [[...]]}; weights, metric and coords are
/// optional; without weights the simplex list is closed downward.
ComplexPtr complex_from_json(const Json& j, const std::string& name);
Json complex_to_json(const WeightedComplex& cx);

/// Object {"vertex": value} or array of values.
VertexFunction function_from_json(const Json& j, std::size_t n_vertices, const std::string& name);

/// .off files via parse_off, anything else as complex JSON.
ComplexPtr load_complex(const std::string& path, EdgeMetric metric = EdgeMetric::kEuclidean);

}  // namespace chainforge
