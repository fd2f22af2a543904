#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "coughdet/signal.hpp"

namespace coughdet {

namespace fs = std::filesystem;

struct WavData {
  std::uint32_t sample_rate = 0;
  std::vector<double> samples;  // normalized by 1/32768
};

/// Reads a RIFF/WAVE PCM16 mono file. Throws LoadError naming the file.
WavData read_wav(const fs::path& path);

/// Writes PCM16 mono. Samples are scaled by 32768, rounded and clipped.
void write_wav(const fs::path& path, std::span<const double> samples,
               std::uint32_t sample_rate);

std::vector<double> read_accel_text(const fs::path& path);
void write_accel_text(const fs::path& path, std::span<const double> samples);

/// Writes via a temporary sibling file and rename.
void write_file_atomic(const fs::path& path, std::string_view bytes);
std::string read_file(const fs::path& path);

struct ManifestRecord {
  std::string event_id;
  std::string patient_id;
  Label label = Label::non_cough;
  fs::path accel_path;
  fs::path audio_path;
  double start_s = 0.0;
  double end_s = 0.0;

  double duration() const { return end_s - start_s; }
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;

  std::vector<std::string> patient_ids() const;  // sorted, unique
};

/// Parses JSON-lines. Relative file paths are resolved against the manifest's
/// directory. `event_id` is optional and defaults to the accel path as written.
DatasetManifest read_manifest(const fs::path& path, bool check_files = true);

/// One record per line; paths are written relative to `base_dir` when possible.
std::string format_manifest(const DatasetManifest& m, const fs::path& base_dir);

Event load_event(const ManifestRecord& record);

/// Writes both channels to the record's paths.
void save_event(const Event& e, const ManifestRecord& record);

}  // namespace coughdet
