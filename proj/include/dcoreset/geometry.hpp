#pragma once

// Points, weighted point sets, and the k-means / k-median cost functions.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcoreset/error.hpp"

namespace dcoreset {

using Point = std::vector<double>;
using PointView = std::span<const double>;

enum class Objective { KMeans, KMedian };

/// Exponent applied to distances: 2 for k-means, 1 for k-median.
constexpr int exponent(Objective obj) noexcept { return obj == Objective::KMeans ? 2 : 1; }

inline std::string to_string(Objective obj) {
  return obj == Objective::KMeans ? "kmeans" : "kmedian";
}

inline Objective parse_objective(std::string_view s) {
  if (s == "kmeans") return Objective::KMeans;
  if (s == "kmedian") return Objective::KMedian;
  throw Error("unknown objective '" + std::string(s) + "'");
}

/// Row-major matrix of d-dimensional points.
class PointMatrix {
 public:
  PointMatrix() = default;
  explicit PointMatrix(std::size_t dim) : dim_(dim) {}

  PointMatrix(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    if (dim_ == 0) throw Error("points must have dimension >= 1");
    if (coords_.size() % dim_ != 0) throw Error("coordinate count is not a multiple of the dimension");
    for (double c : coords_)
      if (!std::isfinite(c)) throw Error("non-finite coordinate");
  }

  PointMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    for (const auto& row : rows) push_back(PointView(row.begin(), row.size()));
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  PointView operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  void push_back(PointView p) {
    if (dim_ == 0) {
      if (p.empty()) throw Error("points must have dimension >= 1");
      dim_ = p.size();
    } else if (p.size() != dim_) {
      throw DimensionMismatch(dim_, p.size());
    }
    for (double c : p)
      if (!std::isfinite(c)) throw Error("non-finite coordinate");
    coords_.insert(coords_.end(), p.begin(), p.end());
  }

  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  const std::vector<double>& coords() const noexcept { return coords_; }

  friend bool operator==(const PointMatrix&, const PointMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// A clustering solution: k >= 1 centers.
using Centers = PointMatrix;

/// Points with real (possibly negative) weights.
class WeightedPointSet {
 public:
  WeightedPointSet() = default;
  explicit WeightedPointSet(std::size_t dim) : points_(dim) {}

  WeightedPointSet(PointMatrix points, std::vector<double> weights)
      : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() != weights_.size()) throw Error("point and weight counts differ");
    for (double w : weights_)
      if (!std::isfinite(w)) throw Error("non-finite weight");
  }

  static WeightedPointSet unit(PointMatrix points) {
    std::vector<double> w(points.size(), 1.0);
    return {std::move(points), std::move(w)};
  }

  std::size_t size() const noexcept { return weights_.size(); }
  bool empty() const noexcept { return weights_.empty(); }
  std::size_t dim() const noexcept { return points_.dim(); }

  PointView point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const PointMatrix& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  void add(PointView p, double w) {
    if (!std::isfinite(w)) throw Error("non-finite weight");
    points_.push_back(p);
    weights_.push_back(w);
  }

  void append(const WeightedPointSet& other) {
    for (std::size_t i = 0; i < other.size(); ++i) add(other.point(i), other.weight(i));
  }

  void reserve(std::size_t n) {
    points_.reserve(n);
    weights_.reserve(n);
  }

  double total_weight() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

  bool has_negative_weights() const {
    for (double w : weights_)
      if (w < 0.0) return true;
    return false;
  }

  /// Entries with strictly positive weight, in order.
  WeightedPointSet positive_part() const {
    WeightedPointSet out(dim());
    for (std::size_t i = 0; i < size(); ++i)
      if (weights_[i] > 0.0) out.add(point(i), weights_[i]);
    return out;
  }

  friend bool operator==(const WeightedPointSet&, const WeightedPointSet&) = default;

 private:
  PointMatrix points_;
  std::vector<double> weights_;
};

namespace detail {

inline double squared_distance_unchecked(PointView p, PointView q) noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double diff = p[j] - q[j];
    s += diff * diff;
  }
  return s;
}

inline void check_dims(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionMismatch(a, b);
}

}  // namespace detail

inline double squared_distance(PointView p, PointView q) {
  detail::check_dims(p.size(), q.size());
  return detail::squared_distance_unchecked(p, q);
}

inline double distance(PointView p, PointView q) { return std::sqrt(squared_distance(p, q)); }

/// Raises a squared distance to the objective's exponent.
inline double cost_from_squared(double sq, Objective obj) noexcept {
  return obj == Objective::KMeans ? sq : std::sqrt(sq);
}

struct Nearest {
  std::size_t index;
  double squared_distance;

  double distance() const { return std::sqrt(squared_distance); }
};

/// Closest center; ties go to the lowest index.
inline Nearest closest_center(PointView p, const Centers& centers) {
  if (centers.empty()) throw Error("closest_center: no centers");
  detail::check_dims(p.size(), centers.dim());
  Nearest best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double sq = detail::squared_distance_unchecked(p, centers[c]);
    if (sq < best.squared_distance) best = {c, sq};
  }
  return best;
}

/// d(p, X)^e for a single unweighted point.
inline double point_cost(PointView p, const Centers& centers, Objective obj) {
  return cost_from_squared(closest_center(p, centers).squared_distance, obj);
}

/// Sum over P of w(p) * d(p, X)^e.
inline double cost(const WeightedPointSet& points, const Centers& centers, Objective obj) {
  if (points.empty()) return 0.0;
  if (centers.empty()) throw Error("cost: no centers");
  detail::check_dims(points.dim(), centers.dim());
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    total += points.weight(i) * point_cost(points.point(i), centers, obj);
  return total;
}

}  // namespace dcoreset
