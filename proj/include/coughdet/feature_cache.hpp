#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coughdet/cross_validation.hpp"
#include "coughdet/feature_matrix.hpp"
#include "coughdet/io.hpp"

namespace coughdet {

FeatureMatrix extract_features(const Event& e, const FeatureConfig& cfg);

/// On-disk feature matrices at <root>/<modality>/<config key>/<hash(event id)>.fmat.
class FeatureCache {
 public:
  explicit FeatureCache(std::filesystem::path root) : root_(std::move(root)) {}

  std::filesystem::path path_for(const std::string& event_id, const FeatureConfig& cfg) const;
  std::optional<FeatureMatrix> load(const std::string& event_id, const FeatureConfig& cfg) const;
  void store(const std::string& event_id, const FeatureConfig& cfg, const FeatureMatrix& m) const;

 private:
  std::filesystem::path root_;
};

EventTable make_event_table(const DatasetManifest& m);

/// Row i of each table is the flattened feature matrix of manifest record i.
/// Each event is loaded at most once, and only when some config is missing
/// from the cache (or there is no cache).
std::vector<FeatureTable> build_feature_tables(const DatasetManifest& m,
                                               std::span<const FeatureConfig> configs,
                                               const FeatureCache* cache = nullptr,
                                               unsigned threads = 1);

}  // namespace coughdet
