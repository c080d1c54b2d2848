#include "vsynopsis/classifier.hpp"

#include <json.hpp>

namespace vsyn {

using nlohmann::ordered_json;

std::string classifier_snapshot(const OnlineClassifier& c) {
  ordered_json j;
  j["classes"] = c.classes();
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < c.weights().rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index col = 0; col < c.weights().cols(); ++col) row.push_back(c.weights()(r, col));
    rows.push_back(row);
  }
  j["weights"] = rows;
  j["samples_per_class"] = c.class_counts();
  j["samples_total"] = c.samples_total();
  j["fits_executed"] = c.fits_executed();
  j["batch_size"] = c.batch_size();
  j["learning_rate"] = c.learning_rate();
  j["l2"] = c.l2();
  ordered_json pending = ordered_json::array();
  for (const auto& [v, k] : c.pending_batch()) {
    pending.push_back({{"x", std::vector<double>(v.data(), v.data() + v.size())}, {"k", k}});
  }
  j["pending"] = pending;
  return j.dump(2) + "\n";
}

OnlineClassifier classifier_from_snapshot(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
    OnlineClassifier c(j.at("batch_size").get<std::size_t>(), j.at("learning_rate").get<double>(),
                       j.at("l2").get<double>());
    for (const auto& label : j.at("classes")) c.register_class(label.get<std::string>());
    OnlineClassifier::Weights w(static_cast<Eigen::Index>(c.classes().size()), OnlineClassifier::kCols);
    const auto& rows = j.at("weights");
    if (rows.size() != c.classes().size()) throw StateError("weights/classes size mismatch");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != OnlineClassifier::kCols) throw StateError("weight row has wrong width");
      for (std::size_t col = 0; col < rows[r].size(); ++col)
        w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = rows[r][col].get<double>();
    }
    c.set_weights(w);
    std::vector<OnlineClassifier::Sample> pending;
    for (const auto& p : j.at("pending")) {
      auto x = p.at("x").get<std::vector<double>>();
      if (x.size() != OnlineClassifier::kInputs) throw StateError("pending sample has wrong width");
      auto k = p.at("k").get<std::size_t>();
      if (k >= c.classes().size()) throw StateError("pending sample has unknown class");
      pending.emplace_back(Eigen::Map<const Vector5<double>>(x.data()), k);
    }
    c.restore_counts(j.at("samples_per_class").get<std::vector<std::int64_t>>(), std::move(pending),
                     j.at("fits_executed").get<std::int64_t>());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad classifier snapshot: ") + e.what(), 0);
  }
}

}  // namespace vsyn
