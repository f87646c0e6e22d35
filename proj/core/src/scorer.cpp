#include <algorithm>

#include <nlohmann/json.hpp>

#include "avatar/error.hpp"
#include "avatar/genmodel.hpp"

namespace avatar {
namespace {

constexpr char kSeparator = '\x1f';
const Label kBegin = "\x02";
const Label kEnd = "\x03";

// Calls fn(n, key) for every n-gram of v, n = 1..3. Unigrams cover labels
// only; longer grams run over the boundary-padded sequence.
template <typename Fn>
void for_each_gram(const Variant& v, Fn fn) {
  for (const auto& label : v) fn(0, label);
  std::vector<const Label*> padded;
  padded.reserve(v.size() + 2);
  padded.push_back(&kBegin);
  for (const auto& label : v) padded.push_back(&label);
  padded.push_back(&kEnd);
  for (std::size_t n = 2; n <= 3; ++n) {
    for (std::size_t i = 0; i + n <= padded.size(); ++i) {
      std::string key = *padded[i];
      for (std::size_t j = 1; j < n; ++j) {
        key += kSeparator;
        key += *padded[i + j];
      }
      fn(n - 1, key);
    }
  }
}

}  // namespace

FeatureMap::FeatureMap(const std::vector<Variant>& reference) {
  if (reference.empty()) throw InvalidInput("FeatureMap: empty reference set");
  std::set<std::string> grams;
  for (const auto& v : reference) {
    for_each_gram(v, [&](std::size_t n, const std::string& key) { grams.insert(std::to_string(n) + key); });
    max_len_ = std::max(max_len_, v.size());
  }
  for (const auto& g : grams) vocabulary_.emplace(g, vocabulary_.size());
}

std::vector<double> FeatureMap::features(const Variant& v) const {
  std::vector<double> out(dimension(), 0.0);
  const std::size_t oov_base = vocabulary_.size();
  for_each_gram(v, [&](std::size_t n, const std::string& key) {
    auto it = vocabulary_.find(std::to_string(n) + key);
    if (it != vocabulary_.end()) {
      out[it->second] += 1.0;
    } else {
      out[oov_base + n] += 1.0;
    }
  });
  out[oov_base + 3] = static_cast<double>(v.size()) / static_cast<double>(max_len_);
  return out;
}

nlohmann::json FeatureMap::to_json() const {
  std::vector<std::string> grams(vocabulary_.size());
  for (const auto& [g, i] : vocabulary_) grams[i] = g;
  return {{"vocabulary", grams}, {"max_len", max_len_}};
}

FeatureMap FeatureMap::from_json(const nlohmann::json& doc) {
  FeatureMap m;
  const auto grams = doc.at("vocabulary").get<std::vector<std::string>>();
  for (const auto& g : grams) m.vocabulary_.emplace(g, m.vocabulary_.size());
  m.max_len_ = std::max<std::size_t>(1, doc.at("max_len").get<std::size_t>());
  return m;
}

FeatureScorer::FeatureScorer(FeatureMap map) : map_(std::move(map)) {
  model_.weights.assign(map_.dimension(), 0.0);
}

double FeatureScorer::score(const Variant& v) const {
  return std::clamp(sigmoid(raw(v)), kScoreEpsilon, 1.0 - kScoreEpsilon);
}

nlohmann::json FeatureScorer::to_json() const {
  return {{"features", map_.to_json()}, {"weights", model_.weights}, {"bias", model_.bias}};
}

FeatureScorer FeatureScorer::from_json(const nlohmann::json& doc) {
  try {
    FeatureScorer s(FeatureMap::from_json(doc.at("features")));
    auto weights = doc.at("weights").get<std::vector<double>>();
    if (weights.size() != s.map_.dimension()) throw InvalidInput("scorer checkpoint: weight dimension mismatch");
    s.model_.weights = std::move(weights);
    s.model_.bias = doc.at("bias").get<double>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("scorer checkpoint: ") + e.what());
  }
}

}  // namespace avatar
