#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "spherelab/sphere.hpp"

namespace spherelab {

struct RegionNode;

/// A measurable subset of S^{n-1} built from caps {x.v >= t0} and bands
/// {lo <= x.v <= hi} under union, intersection, complement and antipode
/// (x in Antipode(A) iff -x in A). Immutable; copies share structure.
class Region {
 public:
  enum class Kind { cap, band, union_of, intersection_of, complement, antipode };

  static Region cap(UnitVector axis, double t0);
  static Region band(UnitVector axis, double lo, double hi);
  static Region union_of(std::vector<Region> parts);
  static Region intersection_of(std::vector<Region> parts);
  static Region complement(Region inner);
  static Region antipode(Region inner);
  static Region empty() { return union_of({}); }
  static Region full() { return complement(empty()); }

  Kind kind() const;
  /// Ambient dimension, or nullopt for regions without primitives.
  std::optional<int> dimension() const { return dimension_; }

  // Accessors; valid only for the matching kind.
  const UnitVector& axis() const;
  double lower() const;  ///< t0 for caps, lo for bands
  double upper() const;  ///< 1 for caps, hi for bands
  const std::vector<Region>& children() const;

  bool contains(const UnitVector& x) const;

 private:
  explicit Region(std::shared_ptr<const RegionNode> node);
  std::shared_ptr<const RegionNode> node_;
  std::optional<int> dimension_;
};

struct RegionNode {
  Region::Kind kind;
  std::optional<UnitVector> axis;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<Region> children;
};

bool contains(const Region& region, const UnitVector& x);

/// sigma({x : x.v >= t0}) on S^{n-1}; t0 outside [-1, 1] is clamped.
double cap_measure(int n, double t0);

/// Threshold t0 with cap_measure(n, t0) = target, by bisection.
double find_threshold_for_measure(int n, double target);

enum class MeasureMethod { analytic, monte_carlo };

struct MeasureResult {
  double value = 0.0;
  MeasureMethod method = MeasureMethod::analytic;
  double std_error = 0.0;  ///< 0 for analytic; Wilson 95% half-width for Monte Carlo
  std::uint64_t samples = 0;
};

enum class SamplerKind { reduced, direct };

struct MonteCarloOptions {
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0;
  int workers = 1;
  SamplerKind sampler = SamplerKind::reduced;
};

/// True if every primitive shares one axis up to sign.
bool is_single_axis(const Region& region);

/// Disjoint closed intervals of the latitude t = x.v (v the reference axis)
/// whose union is the region, up to measure zero.
struct LatitudeSet {
  std::optional<UnitVector> axis;
  std::vector<std::pair<double, double>> intervals;
};

/// Throws InvalidArgument for multi-axis regions.
LatitudeSet latitude_set(const Region& region);

MeasureResult measure(const Region& region, int n, MeasureMethod method,
                      const MonteCarloOptions& options = {});

/// Analytic when the region is single-axis, Monte Carlo otherwise.
MeasureResult measure_auto(const Region& region, int n, const MonteCarloOptions& options = {});

// ---------------------------------------------------------------------------
// Evaluation on projected coordinates. Membership depends on x only through
// the inner products x.v with the region's axes; an AxisFrame collects those
// axes (for one or several regions) and a CompiledRegion evaluates
// membership from the vector of inner products.
// ---------------------------------------------------------------------------

class AxisFrame {
 public:
  explicit AxisFrame(int n);

  /// Index of `axis` in the frame, adding it if not already present.
  int add(const UnitVector& axis);
  int n() const { return n_; }
  int size() const { return static_cast<int>(axes_.size()); }
  const std::vector<UnitVector>& axes() const { return axes_; }
  /// m x m matrix of axis inner products.
  Eigen::MatrixXd gram() const;
  /// x.v_j for every axis.
  void project(const UnitVector& x, std::span<double> out) const;

 private:
  int n_;
  std::vector<UnitVector> axes_;
};

class CompiledRegion {
 public:
  CompiledRegion(const Region& region, AxisFrame& frame);

  /// Membership of a point whose inner products with the frame axes are `dots`.
  bool contains(std::span<const double> dots) const;

 private:
  struct Node {
    Region::Kind kind;
    int axis = -1;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<int> children;
  };
  int build(const Region& region, AxisFrame& frame);
  bool eval(int node, std::span<const double> dots, bool flipped) const;

  std::vector<Node> nodes_;
  int root_ = -1;
};

nlohmann::json region_to_json(const Region& region);
Region region_from_json(const nlohmann::json& doc);

std::string to_string(MeasureMethod method);
std::string to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& name);

}  // namespace spherelab
