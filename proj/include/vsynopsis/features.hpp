#ifndef VSYNOPSIS_FEATURES_HPP
#define VSYNOPSIS_FEATURES_HPP

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vsynopsis/error.hpp"
#include "vsynopsis/ingest.hpp"

namespace vsyn {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

/// Feature layout: x, y, speed, displacement, mean_speed.
template <typename Scalar>
using Vector5 = Eigen::Matrix<Scalar, 5, 1>;

/// Position history of one tracked object. Point 0 is the first sighting,
/// point n the current one. Speeds are per tracked step (a missed frame still
/// counts as one step between the two surrounding sightings).
template <typename Scalar>
class BasicTrackHistory {
 public:
  struct Point {
    double timestamp_s;
    Vector2<Scalar> center;
  };

  BasicTrackHistory() = default;
  BasicTrackHistory(TrackId id, std::string class_label)
      : track_id_(id), class_label_(std::move(class_label)) {}

  TrackId track_id() const { return track_id_; }
  const std::string& class_label() const { return class_label_; }
  const std::vector<Point>& points() const { return points_; }
  bool empty() const { return points_.empty(); }

  /// Number of steps, i.e. points().size() - 1 (0 for an empty history).
  std::size_t steps() const { return points_.empty() ? 0 : points_.size() - 1; }

  /// Sum of step lengths, accumulated in arrival order.
  Scalar path_length() const { return path_length_; }

  /// Appends a sighting. Throws OrderingError unless t is strictly after the
  /// last point.
  void append(double timestamp_s, const Vector2<Scalar>& center) {
    if (!points_.empty()) {
      if (!(timestamp_s > points_.back().timestamp_s))
        throw OrderingError("track " + std::to_string(track_id_) + ": timestamp " +
                            std::to_string(timestamp_s) + " does not advance");
      path_length_ += (center - points_.back().center).norm();
    }
    points_.push_back({timestamp_s, center});
  }

 private:
  TrackId track_id_ = 0;
  std::string class_label_;
  std::vector<Point> points_;
  Scalar path_length_ = Scalar(0);
};

using TrackHistory = BasicTrackHistory<double>;

/// Appends the detection's center to `history`. Throws ValidationError on a
/// track id mismatch and OrderingError on a timestamp regression.
template <typename Scalar>
void update_history(BasicTrackHistory<Scalar>& history, const Detection& d) {
  if (d.track_id != history.track_id())
    throw ValidationError("track_id", "detection of track " + std::to_string(d.track_id) +
                                          " sent to history of track " +
                                          std::to_string(history.track_id()));
  history.append(d.timestamp_s, Vector2<Scalar>(Scalar(d.cx_px), Scalar(d.cy_px)));
}

/// Distance between the last two centers; 0 for a single point.
template <typename Scalar>
Scalar instantaneous_speed(const BasicTrackHistory<Scalar>& h) {
  const auto& p = h.points();
  if (p.size() < 2) return Scalar(0);
  return (p.back().center - p[p.size() - 2].center).norm();
}

/// Straight-line distance from the first to the current center.
template <typename Scalar>
Scalar total_displacement(const BasicTrackHistory<Scalar>& h) {
  const auto& p = h.points();
  if (p.size() < 2) return Scalar(0);
  return (p.back().center - p.front().center).norm();
}

/// Path length divided by the number of steps; 0 for a single point.
template <typename Scalar>
Scalar mean_speed(const BasicTrackHistory<Scalar>& h) {
  if (h.steps() == 0) return Scalar(0);
  return h.path_length() / static_cast<Scalar>(h.steps());
}

template <typename Scalar>
Vector5<Scalar> make_feature_vector(const BasicTrackHistory<Scalar>& h) {
  if (h.empty()) throw StateError("feature vector of an empty track history");
  const auto& c = h.points().back().center;
  Vector5<Scalar> v;
  v << c.x(), c.y(), instantaneous_speed(h), total_displacement(h), mean_speed(h);
  return v;
}

/// Running per-dimension z-score (Welford). normalize() first folds the sample
/// into the statistics and then transforms it, so the very first sample maps
/// to the zero vector.
template <typename Scalar, int Dim = 5>
class BasicRunningNormalizer {
 public:
  using Vector = Eigen::Matrix<Scalar, Dim, 1>;

  static constexpr Scalar kEpsilon = Scalar(1e-8);

  BasicRunningNormalizer() : mean_(Vector::Zero()), m2_(Vector::Zero()) {}

  std::size_t count() const { return count_; }
  const Vector& mean() const { return mean_; }

  /// Population variance (M2 / count); zero before the first sample.
  Vector variance() const {
    if (count_ == 0) return Vector::Zero();
    return m2_ / static_cast<Scalar>(count_);
  }

  void update(const Vector& v) {
    ++count_;
    const Vector delta = v - mean_;
    mean_ += delta / static_cast<Scalar>(count_);
    m2_ += delta.cwiseProduct(v - mean_);
    // Rounding can push M2 a hair below zero on constant streams.
    m2_ = m2_.cwiseMax(Scalar(0));
  }

  /// Applies the current statistics without updating them.
  Vector transform(const Vector& v) const {
    return (v - mean_).cwiseQuotient((variance().array() + kEpsilon).sqrt().matrix());
  }

  Vector normalize(const Vector& v) {
    update(v);
    return transform(v);
  }

  /// Restores a snapshot taken with count()/mean()/m2().
  static BasicRunningNormalizer from_state(std::size_t count, const Vector& mean, const Vector& m2) {
    BasicRunningNormalizer n;
    n.count_ = count;
    n.mean_ = mean;
    n.m2_ = m2;
    return n;
  }
  const Vector& m2() const { return m2_; }

 private:
  std::size_t count_ = 0;
  Vector mean_;
  Vector m2_;
};

using RunningNormalizer = BasicRunningNormalizer<double>;

}  // namespace vsyn

#endif  // VSYNOPSIS_FEATURES_HPP
