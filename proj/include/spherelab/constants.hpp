#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "spherelab/sphere.hpp"

namespace spherelab {

/// Tolerance for the forbidden boundary c_{k-1} = -1.
inline constexpr double kDiameterTolerance = 1e-12;

/// Exponent data of an inductive configuration.
struct DerivedConstants {
  std::vector<double> c_sequence;  ///< c_1, ..., c_{k-1}
  double exponent_C = 0.0;         ///< C_R
  double exponent_eps = 0.0;       ///< eps_R
  bool valid = false;
  std::string reason;
};

/// Inner product after projecting onto the link of a point at inner product c:
/// f_c(r) = (r - c^2) / (1 - c^2).
double f_link(double c, double r);

/// c_1 = r_1, c_i = (f_{c_{i-1}} o ... o f_{c_1})(r_i); f_{c_1} is applied first.
/// Throws InvalidConfiguration if some c_j with j <= k-2 leaves (-1, 1).
std::vector<double> c_sequence(const InductiveConfiguration& config);

/// C_R = sum_i 2/(1-|c_i|) prod_{j<i} (1+|c_j|)/(1-|c_j|), accumulated in long double.
double exponent_C_from_c(std::span<const double> c);
/// eps_R = prod_i (1-|c_i|)/(1+|c_i|).
double exponent_eps_from_c(std::span<const double> c);

double exponent_C(const InductiveConfiguration& config);
double exponent_eps(const InductiveConfiguration& config);

struct DiameterCheck {
  bool ok;
  std::string reason;
};

/// Fails iff c_{k-1} <= -1 + 1e-12 (the last edge spans a diameter of the
/// intersection subsphere), or the sequence itself cannot be formed.
DiameterCheck check_diameter_condition(const InductiveConfiguration& config);

/// k x k band matrix with entry (i, j) = r_{min(i,j)} off the diagonal.
/// Throws InvalidConfiguration if the matrix is not positive semidefinite.
GramSpec gram_from_inductive(const InductiveConfiguration& config);

/// All of the above; never throws for well-formed r-values in (-1, 1).
DerivedConstants derive_constants(const InductiveConfiguration& config);

/// Closed form for simplices: c_i = r / (1 + (i-1) r).
double simplex_c(int i, double r);

nlohmann::json configuration_to_json(const InductiveConfiguration& config);
InductiveConfiguration configuration_from_json(const nlohmann::json& doc);
nlohmann::json constants_to_json(const DerivedConstants& constants);

}  // namespace spherelab
