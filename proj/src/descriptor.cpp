// function_from_json: the inverse of ComputableFunction::descriptor() for
// every family the library builds.
#include "exactdiff/counterexample.hpp"
#include "exactdiff/function.hpp"
#include "exactdiff/geometry.hpp"

#include <stdexcept>

namespace exactdiff {

namespace {

Rational rational_of(const json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(static_cast<long>(v.get<long long>()));
  throw std::invalid_argument("function_from_json: expected a rational string, got " + v.dump());
}

Vector vector_of(const json& v) {
  if (!v.is_array() || v.empty()) throw std::invalid_argument("function_from_json: expected a nonempty array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = rational_of(v[i]);
  return out;
}

}  // namespace

ComputableFunction function_from_json(const json& d) {
  if (!d.is_object() || !d.contains("kind")) throw std::invalid_argument("function_from_json: missing 'kind'");
  const std::string kind = d.at("kind").get<std::string>();

  if (kind == "constant") return constant_function(d.at("dimension").get<std::size_t>(), rational_of(d.at("value")));
  if (kind == "linear") {
    return linear_form(vector_of(d.at("coefficients")), d.contains("offset") ? rational_of(d.at("offset")) : Rational(0));
  }
  if (kind == "monomial") return monomial(d.at("powers").get<std::vector<unsigned>>());
  if (kind == "abs") return abs_function(function_from_json(d.at("inner")));
  if (kind == "sum") {
    std::vector<ComputableFunction> terms;
    for (const auto& t : d.at("terms")) terms.push_back(function_from_json(t));
    return sum(terms);
  }
  if (kind == "scale") return scaled(rational_of(d.at("factor")), function_from_json(d.at("inner")));
  if (kind == "piecewise_linear") {
    std::vector<std::pair<Rational, Rational>> knots;
    for (const auto& k : d.at("knots")) {
      if (!k.is_array() || k.size() != 2) throw std::invalid_argument("function_from_json: knot must be [x, y]");
      knots.emplace_back(rational_of(k[0]), rational_of(k[1]));
    }
    return piecewise_linear(d.at("dimension").get<std::size_t>(), d.at("axis").get<std::size_t>(), std::move(knots));
  }
  if (kind == "clamp") {
    const auto n = d.at("dimension").get<std::size_t>();
    const auto axis = d.at("axis").get<std::size_t>();
    if (axis >= n) throw std::invalid_argument("function_from_json: clamp axis out of range");
    return clamp_p1(n)[axis];
  }
  if (kind == "affine_compose" || kind == "affine-compose") {
    const auto inner = function_from_json(d.at("inner"));
    const Matrix theta = matrix_from_json(d.at("matrix"));
    const Vector offset = d.contains("offset") ? vector_of(d.at("offset")) : Vector(Vector::Zero(theta.rows()));
    return compose_affine(inner, make_isometry(theta, offset));
  }
  if (kind == "tent") {
    return tent_for(cube_from_json(d.at("cell")), d.at("m").get<std::size_t>(),
                    BigInt(d.at("j").is_string() ? d.at("j").get<std::string>() : d.at("j").dump()))
        .function;
  }
  throw std::invalid_argument("function_from_json: unknown kind '" + kind + "'");
}

}  // namespace exactdiff
