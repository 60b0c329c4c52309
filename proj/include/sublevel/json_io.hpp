#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sublevel/blocks.hpp"
#include "sublevel/estimate.hpp"
#include "sublevel/lattice.hpp"
#include "sublevel/poly.hpp"

namespace sublevel {

// Polynomial schema: {"n": int, "d": even int, "terms": [[[e_1..e_n], coef], ...]}
// Multi-indices must sum to d; the zero polynomial is rejected.
HomogeneousPolynomial polynomial_from_json(const nlohmann::json& j);
HomogeneousPolynomial parse_polynomial(const std::string& text);
nlohmann::json polynomial_to_json(const HomogeneousPolynomial& f);
std::string serialize_polynomial(const HomogeneousPolynomial& f);

// Block schema: [{"dims": m, "poly": polynomial-schema}, ...]
BlockStructure blocks_from_json(const nlohmann::json& j);

// Points: JSON array of length-n arrays, or CSV with one point per row.
std::vector<Eigen::VectorXd> points_from_json(const nlohmann::json& j);
std::vector<Eigen::VectorXd> points_from_csv(const std::string& text);

// Lattice schema: {"basis": [v_1, ..., v_j]} with each v a length-n integer
// array (basis vectors become matrix columns).
IntegerLatticeBasis lattice_from_json(const nlohmann::json& j);

// Constraint schema: {"A": [row, ...], "b": [..]} over the integers.
void constraints_from_json(const nlohmann::json& j, IntMatrix& A, IntVector& b);

nlohmann::json estimate_to_json(const Estimate& e);
nlohmann::json count_report_to_json(const CountReport& r);

} // namespace sublevel
