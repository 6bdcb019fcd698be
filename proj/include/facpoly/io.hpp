#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "facpoly/arrangement.hpp"
#include "facpoly/instances.hpp"
#include "facpoly/matrix.hpp"
#include "facpoly/oracle.hpp"
#include "facpoly/reductions.hpp"

// JSON forms of every instance type. Block and node indices are 1-based in
// documents and 0-based in memory; the conversion happens only here.
// Rationals are written as canonical "p/q" strings; integers are accepted on
// input. Malformed documents raise ValidationError naming the field.

namespace facpoly::io {

using Json = nlohmann::json;

Json rational_to_json(const Rational& value);
Rational rational_from_json(const Json& value, const std::string& where);

Json to_json(const FactorizedInstance& inst);
Json to_json(const AffineFactorizedInstance& inst);
Json to_json(const ExplicitInstance& inst);
Json to_json(const DenseTensor& tensor);
Json to_json(const FactoredTensor& tensor);
Json to_json(const QuadraticInstance& inst);
Json to_json(const RationalMatrix& matrix);
Json to_json(const std::vector<AffineFunctional>& functionals);
Json to_json(const Solution& solution);
Json to_json(const oracle::Graph& graph);
Json to_json(const ReductionCertificate& certificate);

FactorizedInstance factorized_from_json(const Json& doc);
AffineFactorizedInstance affine_from_json(const Json& doc);
ExplicitInstance explicit_from_json(const Json& doc);
DenseTensor dense_tensor_from_json(const Json& doc);
FactoredTensor factored_tensor_from_json(const Json& doc);
QuadraticInstance quadratic_from_json(const Json& doc);
RationalMatrix matrix_from_json(const Json& doc);
std::vector<AffineFunctional> functionals_from_json(const Json& doc);
Solution solution_from_json(const Json& doc);
oracle::Graph graph_from_json(const Json& doc);

/// Rows of 0/1 integers.
Json bits_to_json(const Assignment& x);
Json bits_to_json(const BitVector& x);

/// Throws IoError when the file is unreadable or not JSON.
Json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline. Throws IoError on failure.
void write_json_file(const std::filesystem::path& path, const Json& doc);

}  // namespace facpoly::io
