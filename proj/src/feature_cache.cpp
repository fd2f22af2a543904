#include "coughdet/feature_cache.hpp"

#include <cstdio>

#include "coughdet/parallel.hpp"

namespace coughdet {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t flat_width(const FeatureConfig& cfg) {
  if (cfg.modality == Modality::accel) return cfg.accel.segments * cfg.accel.cols();
  return cfg.audio.segments * cfg.audio.cols();
}

}  // namespace

FeatureMatrix extract_features(const Event& e, const FeatureConfig& cfg) {
  return cfg.modality == Modality::accel ? extract_accel_features(e, cfg.accel)
                                         : extract_audio_features(e, cfg.audio);
}

std::filesystem::path FeatureCache::path_for(const std::string& event_id, const FeatureConfig& cfg) const {
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.fmat", static_cast<unsigned long long>(fnv1a(event_id)));
  std::string dir = cfg.key();
  if (cfg.modality == Modality::audio) {
    // Non-grid audio settings change the features, so they are part of the key.
    const auto extra = cfg.to_json().dump();
    char tag[24];
    std::snprintf(tag, sizeof tag, "_%08llx", static_cast<unsigned long long>(fnv1a(extra) & 0xffffffffULL));
    dir += tag;
  }
  return root_ / std::string(to_string(cfg.modality)) / dir / name;
}

std::optional<FeatureMatrix> FeatureCache::load(const std::string& event_id, const FeatureConfig& cfg) const {
  const auto p = path_for(event_id, cfg);
  if (!std::filesystem::exists(p)) return std::nullopt;
  return read_feature_matrix(p, cfg.modality);
}

void FeatureCache::store(const std::string& event_id, const FeatureConfig& cfg, const FeatureMatrix& m) const {
  const auto p = path_for(event_id, cfg);
  std::filesystem::create_directories(p.parent_path());
  write_feature_matrix(p, m);
}

EventTable make_event_table(const DatasetManifest& m) {
  EventTable t;
  for (const auto& r : m.records) {
    t.ids.push_back(r.event_id);
    t.patients.push_back(r.patient_id);
    t.labels.push_back(r.label == Label::cough ? 1 : 0);
  }
  return t;
}

std::vector<FeatureTable> build_feature_tables(const DatasetManifest& m, std::span<const FeatureConfig> configs,
                                               const FeatureCache* cache, unsigned threads) {
  std::vector<FeatureTable> tables;
  for (const auto& c : configs) {
    if (c.modality == Modality::accel)
      c.accel.validate();
    else
      c.audio.validate();
    tables.push_back({c, Eigen::MatrixXd(static_cast<Eigen::Index>(m.records.size()),
                                         static_cast<Eigen::Index>(flat_width(c)))});
  }
  // Each task writes only its own row of every table.
  parallel_for(m.records.size(), threads, [&](std::size_t i) {
    const auto& rec = m.records[i];
    std::optional<Event> event;
    for (auto& t : tables) {
      std::optional<FeatureMatrix> fm;
      if (cache) fm = cache->load(rec.event_id, t.config);
      if (fm && fm->data.size() != flat_width(t.config)) fm.reset();
      if (!fm) {
        if (!event) event = load_event(rec);
        fm = extract_features(*event, t.config);
        if (cache) cache->store(rec.event_id, t.config, *fm);
      }
      for (std::size_t k = 0; k < fm->data.size(); ++k)
        t.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = fm->data[k];
    }
  });
  return tables;
}

}  // namespace coughdet
