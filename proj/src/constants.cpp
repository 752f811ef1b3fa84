#include "spherelab/constants.hpp"

#include <cmath>
#include <sstream>

#include "spherelab/error.hpp"
#include "spherelab/linalg.hpp"

namespace spherelab {
namespace {

void check_r_values(const InductiveConfiguration& config) {
  if (config.r_values.empty()) throw InvalidArgument("configuration needs at least one r-value (k >= 2)");
  for (double r : config.r_values) {
    if (!(std::abs(r) < 1.0)) throw InvalidArgument("every r-value must lie in (-1, 1)");
  }
}

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double f_link(double c, double r) {
  if (!(std::abs(c) < 1.0)) throw InvalidArgument("f_link: |c| must be < 1");
  return (r - c * c) / (1.0 - c * c);
}

std::vector<double> c_sequence(const InductiveConfiguration& config) {
  check_r_values(config);
  const std::size_t count = config.r_values.size();
  std::vector<double> c;
  c.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double value = config.r_values[i];
    for (std::size_t j = 0; j < i; ++j) {
      if (!(std::abs(c[j]) < 1.0)) {
        throw InvalidConfiguration("c_" + std::to_string(j + 1) + " = " + format_value(c[j]) +
                                   " leaves (-1, 1): the link subsphere is degenerate");
      }
      value = f_link(c[j], value);
    }
    c.push_back(value);
  }
  for (std::size_t j = 0; j + 1 < count; ++j) {
    if (!(std::abs(c[j]) < 1.0)) {
      throw InvalidConfiguration("c_" + std::to_string(j + 1) + " = " + format_value(c[j]) +
                                 " leaves (-1, 1): the link subsphere is degenerate");
    }
  }
  return c;
}

double exponent_C_from_c(std::span<const double> c) {
  long double sum = 0.0L;
  long double growth = 1.0L;
  for (double ci : c) {
    const long double a = std::abs(static_cast<long double>(ci));
    if (!(a < 1.0L)) throw InvalidConfiguration("exponent_C: |c_i| must be < 1");
    sum += 2.0L / (1.0L - a) * growth;
    growth *= (1.0L + a) / (1.0L - a);
  }
  return static_cast<double>(sum);
}

double exponent_eps_from_c(std::span<const double> c) {
  long double prod = 1.0L;
  for (double ci : c) {
    const long double a = std::abs(static_cast<long double>(ci));
    if (!(a < 1.0L)) throw InvalidConfiguration("exponent_eps: |c_i| must be < 1");
    prod *= (1.0L - a) / (1.0L + a);
  }
  return static_cast<double>(prod);
}

DiameterCheck check_diameter_condition(const InductiveConfiguration& config) {
  std::vector<double> c;
  try {
    c = c_sequence(config);
  } catch (const InvalidConfiguration& e) {
    return {false, e.what()};
  }
  const double last = c.back();
  if (last <= -1.0 + kDiameterTolerance) {
    return {false, "diameter condition violated: c_{k-1} = " + format_value(last) +
                       " equals -1, so the last edge spans a diameter of the intersection subsphere"};
  }
  return {true, "diameter condition holds: c_{k-1} = " + format_value(last) + " > -1"};
}

double exponent_C(const InductiveConfiguration& config) {
  const DiameterCheck check = check_diameter_condition(config);
  if (!check.ok) throw InvalidConfiguration(check.reason);
  const auto c = c_sequence(config);
  return exponent_C_from_c(c);
}

double exponent_eps(const InductiveConfiguration& config) {
  const DiameterCheck check = check_diameter_condition(config);
  if (!check.ok) throw InvalidConfiguration(check.reason);
  const auto c = c_sequence(config);
  return exponent_eps_from_c(c);
}

GramSpec gram_from_inductive(const InductiveConfiguration& config) {
  check_r_values(config);
  const int k = config.k();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j) m(i, j) = config.r_values[static_cast<std::size_t>(std::min(i, j))];
  return GramSpec(std::move(m));
}

DerivedConstants derive_constants(const InductiveConfiguration& config) {
  check_r_values(config);
  DerivedConstants out;
  const DiameterCheck check = check_diameter_condition(config);
  out.valid = check.ok;
  out.reason = check.reason;
  try {
    out.c_sequence = c_sequence(config);
  } catch (const InvalidConfiguration&) {
    return out;
  }
  if (out.valid) {
    out.exponent_C = exponent_C_from_c(out.c_sequence);
    out.exponent_eps = exponent_eps_from_c(out.c_sequence);
  }
  return out;
}

double simplex_c(int i, double r) { return r / (1.0 + (i - 1) * r); }

nlohmann::json configuration_to_json(const InductiveConfiguration& config) {
  return nlohmann::json{{"r_values", config.r_values}};
}

InductiveConfiguration configuration_from_json(const nlohmann::json& doc) {
  try {
    InductiveConfiguration config{doc.at("r_values").get<std::vector<double>>()};
    check_r_values(config);
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("configuration: malformed JSON: ") + e.what());
  }
}

nlohmann::json constants_to_json(const DerivedConstants& constants) {
  nlohmann::json doc;
  doc["c_sequence"] = constants.c_sequence;
  doc["valid"] = constants.valid;
  doc["reason"] = constants.reason;
  if (constants.valid) {
    doc["C_R"] = constants.exponent_C;
    doc["eps_R"] = constants.exponent_eps;
  } else {
    doc["C_R"] = nullptr;
    doc["eps_R"] = nullptr;
  }
  return doc;
}

}  // namespace spherelab
