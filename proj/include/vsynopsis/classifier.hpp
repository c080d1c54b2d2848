#ifndef VSYNOPSIS_CLASSIFIER_HPP
#define VSYNOPSIS_CLASSIFIER_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "vsynopsis/config.hpp"
#include "vsynopsis/error.hpp"
#include "vsynopsis/features.hpp"

namespace vsyn {

/// Online multiclass logistic regression: one linear score row per class over
/// the five normalized motion features plus a bias term.
///
/// Samples are buffered and fitted in mini-batches of `batch_size`, one SGD
/// epoch per batch in arrival order. Class counts move at buffering time so
/// the warm-up gates do not depend on where the flush boundary falls. Labels
/// are admitted whenever first seen, with a zero weight row.
///
/// Loss per sample (x~ = [x; 1], label k):
///   L = -log softmax(W x~)_k + (l2 / 2) * ||W||_F^2
/// so that each update is  W <- W - lr * ((p - e_k) x~^T + l2 * W).
template <typename Scalar>
class BasicOnlineClassifier {
 public:
  static constexpr int kInputs = 5;
  static constexpr int kCols = kInputs + 1;

  using Input = Vector5<Scalar>;
  using Augmented = Eigen::Matrix<Scalar, kCols, 1>;
  using Weights = Eigen::Matrix<Scalar, Eigen::Dynamic, kCols, Eigen::RowMajor>;
  using Probabilities = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Sample = std::pair<Input, std::size_t>;  ///< (normalized input, class index)

  explicit BasicOnlineClassifier(std::size_t batch_size = 100, Scalar learning_rate = Scalar(0.01),
                                 Scalar l2 = Scalar(1e-4))
      : batch_size_(batch_size), learning_rate_(learning_rate), l2_(l2), weights_(0, kCols) {
    if (batch_size_ == 0) throw ValidationError("batch_size", "must be >= 1");
    if (!(learning_rate_ > Scalar(0))) throw ValidationError("learning_rate", "must be > 0");
    if (!(l2_ >= Scalar(0))) throw ValidationError("l2", "must be >= 0");
  }

  static BasicOnlineClassifier from_config(const SynopsisConfig& cfg) {
    return BasicOnlineClassifier(static_cast<std::size_t>(cfg.batch_size),
                                 static_cast<Scalar>(cfg.learning_rate), static_cast<Scalar>(cfg.l2));
  }

  const std::vector<std::string>& classes() const { return classes_; }
  const Weights& weights() const { return weights_; }
  std::size_t batch_size() const { return batch_size_; }
  Scalar learning_rate() const { return learning_rate_; }
  Scalar l2() const { return l2_; }
  std::int64_t samples_total() const { return samples_total_; }
  const std::vector<Sample>& pending_batch() const { return pending_; }
  /// Number of partial fits executed so far (mini-batch flushes plus direct calls).
  std::int64_t fits_executed() const { return fits_; }

  std::int64_t samples_of(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? 0 : counts_[it->second];
  }

  bool has_class(const std::string& label) const { return index_.count(label) != 0; }

  /// Registers `label` if new and returns its row index.
  std::size_t register_class(const std::string& label) {
    if (auto it = index_.find(label); it != index_.end()) return it->second;
    const std::size_t k = classes_.size();
    classes_.push_back(label);
    counts_.push_back(0);
    index_.emplace(label, k);
    weights_.conservativeResize(static_cast<Eigen::Index>(k + 1), kCols);
    weights_.row(static_cast<Eigen::Index>(k)).setZero();
    return k;
  }

  /// Buffers one sample; fits and clears the buffer once it reaches batch_size.
  void ingest_sample(const Input& v, const std::string& label) {
    if (!v.allFinite()) throw DataError("non-finite feature vector for class '" + label + "'");
    const std::size_t k = register_class(label);
    ++counts_[k];
    ++samples_total_;
    pending_.emplace_back(v, k);
    if (pending_.size() >= batch_size_) {
      std::vector<Sample> batch;
      batch.swap(pending_);
      fit_indexed(batch);
    }
  }

  /// One SGD epoch over `batch` in order. Labels are registered on the fly.
  void partial_fit(const std::vector<std::pair<Input, std::string>>& batch) {
    if (batch.empty()) throw ValidationError("batch", "must be nonempty");
    std::vector<Sample> indexed;
    indexed.reserve(batch.size());
    for (const auto& [v, label] : batch) {
      if (!v.allFinite()) throw DataError("non-finite feature vector for class '" + label + "'");
      indexed.emplace_back(v, register_class(label));
    }
    fit_indexed(indexed);
  }

  /// Softmax over per-class affine scores, in classes() order.
  Probabilities probabilities(const Input& v) const {
    if (classes_.empty()) throw StateError("classifier has no classes");
    return softmax(weights_, augment(v));
  }

  std::map<std::string, Scalar> predict_proba(const Input& v) const {
    const Probabilities p = probabilities(v);
    std::map<std::string, Scalar> out;
    for (std::size_t k = 0; k < classes_.size(); ++k) out.emplace(classes_[k], p(static_cast<Eigen::Index>(k)));
    return out;
  }

  /// Probability that `v` belongs to `label`. Throws StateError for unknown labels.
  Scalar membership(const Input& v, const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw StateError("unknown class '" + label + "'");
    return probabilities(v)(static_cast<Eigen::Index>(it->second));
  }

  bool is_ready(const std::string& label, std::int64_t warmup_per_class, std::int64_t warmup_total) const {
    return samples_of(label) >= warmup_per_class && samples_total_ >= warmup_total;
  }

  bool is_ready(const std::string& label, const SynopsisConfig& cfg) const {
    return is_ready(label, cfg.warmup_per_class, cfg.warmup_total);
  }

  /// Per-sample loss at the current weights, including the L2 term.
  Scalar sample_loss(const Input& v, std::size_t k) const {
    const Augmented x = augment(v);
    const Probabilities scores = weights_ * x;
    const Scalar m = scores.maxCoeff();
    const Scalar lse = m + std::log((scores.array() - m).exp().sum());
    return lse - scores(static_cast<Eigen::Index>(k)) + l2_ / Scalar(2) * weights_.squaredNorm();
  }

  /// Gradient of sample_loss() with respect to the weight matrix.
  Weights sample_gradient(const Input& v, std::size_t k) const {
    const Augmented x = augment(v);
    Probabilities p = softmax(weights_, x);
    p(static_cast<Eigen::Index>(k)) -= Scalar(1);
    return p * x.transpose() + l2_ * weights_;
  }

  /// Direct state access for snapshot restore and tests.
  void set_weights(const Weights& w) {
    if (w.rows() != static_cast<Eigen::Index>(classes_.size()))
      throw StateError("weight rows do not match the registered classes");
    if (!w.allFinite()) throw DataError("non-finite weights");
    weights_ = w;
  }

  void restore_counts(const std::vector<std::int64_t>& per_class, std::vector<Sample> pending,
                      std::int64_t fits) {
    if (per_class.size() != classes_.size()) throw StateError("count vector does not match classes");
    counts_ = per_class;
    samples_total_ = 0;
    for (auto c : counts_) samples_total_ += c;
    pending_ = std::move(pending);
    fits_ = fits;
  }

  const std::vector<std::int64_t>& class_counts() const { return counts_; }

 private:
  static Augmented augment(const Input& v) {
    Augmented x;
    x << v, Scalar(1);
    return x;
  }

  static Probabilities softmax(const Weights& w, const Augmented& x) {
    Probabilities s = w * x;
    s.array() -= s.maxCoeff();
    s = s.array().exp().matrix();
    return s / s.sum();
  }

  void fit_indexed(const std::vector<Sample>& batch) {
    for (const auto& [v, k] : batch) {
      weights_ -= learning_rate_ * sample_gradient(v, k);
    }
    ++fits_;
    if (!weights_.allFinite()) throw DataError("weights diverged to a non-finite value");
  }

  std::size_t batch_size_;
  Scalar learning_rate_;
  Scalar l2_;
  std::vector<std::string> classes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::int64_t> counts_;
  std::int64_t samples_total_ = 0;
  Weights weights_;
  std::vector<Sample> pending_;
  std::int64_t fits_ = 0;
};

using OnlineClassifier = BasicOnlineClassifier<double>;

/// JSON snapshot: classes, weights, counts, pending batch, hyperparameters.
std::string classifier_snapshot(const OnlineClassifier& c);
OnlineClassifier classifier_from_snapshot(const std::string& json_text);

}  // namespace vsyn

#endif  // VSYNOPSIS_CLASSIFIER_HPP
