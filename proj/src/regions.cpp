#include "spherelab/regions.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "spherelab/error.hpp"
#include "spherelab/parallel.hpp"
#include "spherelab/projected.hpp"
#include "spherelab/stats.hpp"

namespace spherelab {
namespace {

constexpr double kAxisMatchTolerance = 1e-12;

std::optional<int> merge_dimension(std::optional<int> a, std::optional<int> b) {
  if (a && b && *a != *b) throw InvalidArgument("Region: parts have different dimensions");
  return a ? a : b;
}

using Intervals = std::vector<std::pair<double, double>>;

Intervals normalize(Intervals in) {
  Intervals cleaned;
  for (auto [a, b] : in) {
    a = std::max(a, -1.0);
    b = std::min(b, 1.0);
    if (a < b) cleaned.emplace_back(a, b);
  }
  std::sort(cleaned.begin(), cleaned.end());
  Intervals out;
  for (const auto& iv : cleaned) {
    if (!out.empty() && iv.first <= out.back().second) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

Intervals complement_of(const Intervals& in) {
  Intervals out;
  double cursor = -1.0;
  for (const auto& [a, b] : in) {
    if (a > cursor) out.emplace_back(cursor, a);
    cursor = std::max(cursor, b);
  }
  if (cursor < 1.0) out.emplace_back(cursor, 1.0);
  return normalize(out);
}

Intervals intersect(const Intervals& a, const Intervals& b) {
  Intervals out;
  for (const auto& x : a)
    for (const auto& y : b) out.emplace_back(std::max(x.first, y.first), std::min(x.second, y.second));
  return normalize(out);
}

Intervals mirror(const Intervals& in) {
  Intervals out;
  for (const auto& [a, b] : in) out.emplace_back(-b, -a);
  return normalize(out);
}

void collect_axes(const Region& region, std::vector<const UnitVector*>& out) {
  switch (region.kind()) {
    case Region::Kind::cap:
    case Region::Kind::band:
      out.push_back(&region.axis());
      return;
    default:
      for (const Region& c : region.children()) collect_axes(c, out);
  }
}

// +1 / -1 if `axis` equals +-reference, 0 otherwise.
int axis_sign(const UnitVector& axis, const UnitVector& reference) {
  if (axis.dim() != reference.dim()) return 0;
  const double d = axis.dot(reference);
  if (std::abs(d - 1.0) <= kAxisMatchTolerance) return 1;
  if (std::abs(d + 1.0) <= kAxisMatchTolerance) return -1;
  return 0;
}

Intervals latitude_intervals(const Region& region, const UnitVector* reference) {
  switch (region.kind()) {
    case Region::Kind::cap:
    case Region::Kind::band: {
      const int sign = axis_sign(region.axis(), *reference);
      if (sign == 0) throw InvalidArgument("analytic measure requires a single-axis region");
      const Intervals iv{{region.lower(), region.upper()}};
      return sign > 0 ? normalize(iv) : mirror(normalize(iv));
    }
    case Region::Kind::union_of: {
      Intervals all;
      for (const Region& c : region.children()) {
        const Intervals part = latitude_intervals(c, reference);
        all.insert(all.end(), part.begin(), part.end());
      }
      return normalize(all);
    }
    case Region::Kind::intersection_of: {
      Intervals acc{{-1.0, 1.0}};
      for (const Region& c : region.children()) acc = intersect(acc, latitude_intervals(c, reference));
      return acc;
    }
    case Region::Kind::complement:
      return complement_of(latitude_intervals(region.children().front(), reference));
    case Region::Kind::antipode:
      return mirror(latitude_intervals(region.children().front(), reference));
  }
  throw Error("unreachable region kind");
}

std::string kind_name(Region::Kind kind) {
  switch (kind) {
    case Region::Kind::cap: return "cap";
    case Region::Kind::band: return "band";
    case Region::Kind::union_of: return "union";
    case Region::Kind::intersection_of: return "intersection";
    case Region::Kind::complement: return "complement";
    case Region::Kind::antipode: return "antipode";
  }
  return "?";
}

UnitVector axis_from_json(const nlohmann::json& doc) {
  if (!doc.contains("axis") || !doc.at("axis").is_array()) throw InvalidArgument("region: 'axis' must be an array");
  const auto& arr = doc.at("axis");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr.at(i).get<double>();
  return UnitVector(std::move(v));
}

nlohmann::json axis_to_json(const UnitVector& axis) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < axis.dim(); ++i) arr.push_back(axis[i]);
  return arr;
}

}  // namespace

Region::Region(std::shared_ptr<const RegionNode> node) : node_(std::move(node)) {
  if (node_->axis) dimension_ = node_->axis->dim();
  for (const Region& c : node_->children) dimension_ = merge_dimension(dimension_, c.dimension());
}

Region Region::cap(UnitVector axis, double t0) {
  if (std::isnan(t0)) throw InvalidArgument("cap threshold is NaN");
  return Region(std::make_shared<const RegionNode>(RegionNode{Kind::cap, std::move(axis), t0, 1.0, {}}));
}

Region Region::band(UnitVector axis, double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) throw InvalidArgument("band needs lo <= hi");
  return Region(std::make_shared<const RegionNode>(RegionNode{Kind::band, std::move(axis), lo, hi, {}}));
}

Region Region::union_of(std::vector<Region> parts) {
  return Region(std::make_shared<const RegionNode>(RegionNode{Kind::union_of, std::nullopt, 0, 0, std::move(parts)}));
}

Region Region::intersection_of(std::vector<Region> parts) {
  return Region(
      std::make_shared<const RegionNode>(RegionNode{Kind::intersection_of, std::nullopt, 0, 0, std::move(parts)}));
}

Region Region::complement(Region inner) {
  return Region(std::make_shared<const RegionNode>(RegionNode{Kind::complement, std::nullopt, 0, 0, {std::move(inner)}}));
}

Region Region::antipode(Region inner) {
  return Region(std::make_shared<const RegionNode>(RegionNode{Kind::antipode, std::nullopt, 0, 0, {std::move(inner)}}));
}

Region::Kind Region::kind() const { return node_->kind; }

const UnitVector& Region::axis() const {
  if (!node_->axis) throw InvalidArgument("region node has no axis");
  return *node_->axis;
}

double Region::lower() const { return node_->lo; }
double Region::upper() const { return node_->hi; }
const std::vector<Region>& Region::children() const { return node_->children; }

bool Region::contains(const UnitVector& x) const {
  if (dimension_ && *dimension_ != x.dim()) throw InvalidArgument("contains: dimension mismatch");
  switch (kind()) {
    case Kind::cap:
      return x.dot(axis()) >= lower();
    case Kind::band: {
      const double t = x.dot(axis());
      return lower() <= t && t <= upper();
    }
    case Kind::union_of:
      return std::any_of(children().begin(), children().end(), [&](const Region& c) { return c.contains(x); });
    case Kind::intersection_of:
      return std::all_of(children().begin(), children().end(), [&](const Region& c) { return c.contains(x); });
    case Kind::complement:
      return !children().front().contains(x);
    case Kind::antipode:
      return children().front().contains(-x);
  }
  return false;
}

bool contains(const Region& region, const UnitVector& x) { return region.contains(x); }

double cap_measure(int n, double t0) {
  if (n < 3) throw InvalidArgument("cap_measure: n must be >= 3");
  if (!(t0 >= -1.0 && t0 <= 1.0)) throw InvalidArgument("cap_measure: t0 must lie in [-1, 1]");
  if (t0 == 1.0) return 0.0;
  if (t0 == -1.0) return 1.0;
  // (x.v)^2 ~ Beta(1/2, (n-1)/2).
  const double upper_tail = 0.5 * boost::math::ibetac(0.5, 0.5 * (n - 1), t0 * t0);
  return t0 >= 0.0 ? upper_tail : 1.0 - upper_tail;
}

double find_threshold_for_measure(int n, double target) {
  if (!(target > 0.0 && target < 1.0)) throw InvalidArgument("target measure must lie in (0, 1)");
  double lo = -1.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (cap_measure(n, mid) > target) lo = mid; else hi = mid;
  }
  const double a = cap_measure(n, lo) - target;
  const double b = cap_measure(n, hi) - target;
  return std::abs(a) <= std::abs(b) ? lo : hi;
}

bool is_single_axis(const Region& region) {
  std::vector<const UnitVector*> axes;
  collect_axes(region, axes);
  if (axes.empty()) return true;
  return std::all_of(axes.begin(), axes.end(), [&](const UnitVector* a) { return axis_sign(*a, *axes.front()) != 0; });
}

LatitudeSet latitude_set(const Region& region) {
  std::vector<const UnitVector*> axes;
  collect_axes(region, axes);
  LatitudeSet out;
  if (axes.empty()) {
    // No primitives: the region is empty or full and needs no axis.
    out.intervals = latitude_intervals(region, nullptr);
    return out;
  }
  out.axis = *axes.front();
  out.intervals = latitude_intervals(region, axes.front());
  return out;
}

MeasureResult measure(const Region& region, int n, MeasureMethod method, const MonteCarloOptions& options) {
  if (n < 3) throw InvalidArgument("measure: n must be >= 3");
  if (region.dimension() && *region.dimension() != n) throw InvalidArgument("measure: dimension mismatch");
  MeasureResult result;
  result.method = method;
  if (method == MeasureMethod::analytic) {
    const LatitudeSet set = latitude_set(region);
    double total = 0.0;
    for (const auto& [a, b] : set.intervals) total += cap_measure(n, a) - cap_measure(n, b);
    result.value = std::clamp(total, 0.0, 1.0);
    return result;
  }
  if (options.samples == 0) throw InvalidArgument("measure: Monte Carlo needs samples > 0");
  AxisFrame frame(n);
  const CompiledRegion compiled(region, frame);
  const ProjectedTupleSampler sampler(frame, GramSpec(Eigen::MatrixXd::Identity(1, 1)), options.sampler);
  const HitCounter counts = run_chunked<HitCounter>(
      options.samples, ParallelPlan{options.workers}, RandomStream(options.seed),
      [&](std::uint64_t count, RandomStream& rng) {
        HitCounter c;
        Eigen::MatrixXd dots;
        for (std::uint64_t i = 0; i < count; ++i) {
          sampler.draw(rng, dots);
          if (compiled.contains(std::span<const double>(dots.data(), static_cast<std::size_t>(dots.size())))) ++c.hits;
          ++c.trials;
        }
        return c;
      });
  const Interval ci = wilson_interval(counts.hits, counts.trials);
  result.value = static_cast<double>(counts.hits) / static_cast<double>(counts.trials);
  result.std_error = 0.5 * (ci.high - ci.low);
  result.samples = counts.trials;
  return result;
}

MeasureResult measure_auto(const Region& region, int n, const MonteCarloOptions& options) {
  return measure(region, n, is_single_axis(region) ? MeasureMethod::analytic : MeasureMethod::monte_carlo, options);
}

AxisFrame::AxisFrame(int n) : n_(n) {
  if (n < 3) throw InvalidArgument("AxisFrame: n must be >= 3");
}

int AxisFrame::add(const UnitVector& axis) {
  if (axis.dim() != n_) throw InvalidArgument("AxisFrame: axis dimension mismatch");
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].coords() == axis.coords()) return static_cast<int>(i);
  }
  axes_.push_back(axis);
  return static_cast<int>(axes_.size()) - 1;
}

Eigen::MatrixXd AxisFrame::gram() const {
  Eigen::MatrixXd g(size(), size());
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j) g(i, j) = axes_[static_cast<std::size_t>(i)].dot(axes_[static_cast<std::size_t>(j)]);
  return g;
}

void AxisFrame::project(const UnitVector& x, std::span<double> out) const {
  if (x.dim() != n_) throw InvalidArgument("AxisFrame::project: dimension mismatch");
  for (std::size_t i = 0; i < axes_.size(); ++i) out[i] = x.dot(axes_[i]);
}

CompiledRegion::CompiledRegion(const Region& region, AxisFrame& frame) {
  if (region.dimension() && *region.dimension() != frame.n()) {
    throw InvalidArgument("CompiledRegion: region dimension differs from frame");
  }
  root_ = build(region, frame);
}

int CompiledRegion::build(const Region& region, AxisFrame& frame) {
  Node node;
  node.kind = region.kind();
  if (region.kind() == Region::Kind::cap || region.kind() == Region::Kind::band) {
    node.axis = frame.add(region.axis());
    node.lo = region.lower();
    node.hi = region.upper();
  } else {
    for (const Region& c : region.children()) node.children.push_back(build(c, frame));
  }
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

bool CompiledRegion::contains(std::span<const double> dots) const { return eval(root_, dots, false); }

bool CompiledRegion::eval(int index, std::span<const double> dots, bool flipped) const {
  const Node& node = nodes_[static_cast<std::size_t>(index)];
  switch (node.kind) {
    case Region::Kind::cap: {
      const double t = dots[static_cast<std::size_t>(node.axis)];
      return (flipped ? -t : t) >= node.lo;
    }
    case Region::Kind::band: {
      const double raw = dots[static_cast<std::size_t>(node.axis)];
      const double t = flipped ? -raw : raw;
      return node.lo <= t && t <= node.hi;
    }
    case Region::Kind::union_of:
      for (int c : node.children)
        if (eval(c, dots, flipped)) return true;
      return false;
    case Region::Kind::intersection_of:
      for (int c : node.children)
        if (!eval(c, dots, flipped)) return false;
      return true;
    case Region::Kind::complement:
      return !eval(node.children.front(), dots, flipped);
    case Region::Kind::antipode:
      return eval(node.children.front(), dots, !flipped);
  }
  return false;
}

nlohmann::json region_to_json(const Region& region) {
  nlohmann::json doc;
  doc["type"] = kind_name(region.kind());
  switch (region.kind()) {
    case Region::Kind::cap:
      doc["axis"] = axis_to_json(region.axis());
      doc["t0"] = region.lower();
      break;
    case Region::Kind::band:
      doc["axis"] = axis_to_json(region.axis());
      doc["lo"] = region.lower();
      doc["hi"] = region.upper();
      break;
    case Region::Kind::union_of:
    case Region::Kind::intersection_of: {
      nlohmann::json parts = nlohmann::json::array();
      for (const Region& c : region.children()) parts.push_back(region_to_json(c));
      doc["children"] = std::move(parts);
      break;
    }
    case Region::Kind::complement:
    case Region::Kind::antipode:
      doc["child"] = region_to_json(region.children().front());
      break;
  }
  return doc;
}

Region region_from_json(const nlohmann::json& doc) {
  try {
    const std::string type = doc.at("type").get<std::string>();
    if (type == "cap") return Region::cap(axis_from_json(doc), doc.at("t0").get<double>());
    if (type == "band") return Region::band(axis_from_json(doc), doc.at("lo").get<double>(), doc.at("hi").get<double>());
    if (type == "union" || type == "intersection") {
      std::vector<Region> parts;
      for (const auto& c : doc.at("children")) parts.push_back(region_from_json(c));
      return type == "union" ? Region::union_of(std::move(parts)) : Region::intersection_of(std::move(parts));
    }
    if (type == "complement") return Region::complement(region_from_json(doc.at("child")));
    if (type == "antipode") return Region::antipode(region_from_json(doc.at("child")));
    throw InvalidArgument("region: unknown type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("region: malformed JSON: ") + e.what());
  }
}

std::string to_string(MeasureMethod method) {
  return method == MeasureMethod::analytic ? "analytic" : "monte_carlo";
}

std::string to_string(SamplerKind kind) { return kind == SamplerKind::reduced ? "reduced" : "direct"; }

SamplerKind sampler_kind_from_string(const std::string& name) {
  if (name == "reduced") return SamplerKind::reduced;
  if (name == "direct") return SamplerKind::direct;
  throw InvalidArgument("unknown sampler '" + name + "' (expected reduced|direct)");
}

}  // namespace spherelab
