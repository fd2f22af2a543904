#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "coughdet/signal.hpp"

namespace coughdet {

/// Row-major per-frame feature matrix for one event.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Modality modality = Modality::accel;
  std::vector<double> data;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c, Modality m)
      : rows(r), cols(c), modality(m), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool all_finite() const;
};

// Binary layout: u32 rows, u32 cols (little-endian), then rows*cols
// little-endian IEEE-754 binary64 values in row-major order.
std::string serialize(const FeatureMatrix& m);
FeatureMatrix deserialize_feature_matrix(std::string_view bytes, Modality modality);

void write_feature_matrix(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix read_feature_matrix(const std::filesystem::path& path, Modality modality);

}  // namespace coughdet
