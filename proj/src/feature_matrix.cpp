#include "coughdet/feature_matrix.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "coughdet/io.hpp"

namespace coughdet {

static_assert(std::endian::native == std::endian::little,
              "feature matrix serialization assumes a little-endian host");

bool FeatureMatrix::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string serialize(const FeatureMatrix& m) {
  std::string out(8 + m.data.size() * sizeof(double), '\0');
  const auto rows = static_cast<std::uint32_t>(m.rows);
  const auto cols = static_cast<std::uint32_t>(m.cols);
  std::memcpy(out.data(), &rows, 4);
  std::memcpy(out.data() + 4, &cols, 4);
  std::memcpy(out.data() + 8, m.data.data(), m.data.size() * sizeof(double));
  return out;
}

FeatureMatrix deserialize_feature_matrix(std::string_view bytes, Modality modality) {
  if (bytes.size() < 8) throw LoadError("feature matrix: truncated header");
  std::uint32_t rows = 0, cols = 0;
  std::memcpy(&rows, bytes.data(), 4);
  std::memcpy(&cols, bytes.data() + 4, 4);
  const std::size_t n = std::size_t(rows) * cols;
  if (bytes.size() != 8 + n * sizeof(double))
    throw LoadError("feature matrix: payload size does not match header");
  FeatureMatrix m(rows, cols, modality);
  std::memcpy(m.data.data(), bytes.data() + 8, n * sizeof(double));
  return m;
}

void write_feature_matrix(const std::filesystem::path& path, const FeatureMatrix& m) {
  write_file_atomic(path, serialize(m));
}

FeatureMatrix read_feature_matrix(const std::filesystem::path& path, Modality modality) {
  try {
    return deserialize_feature_matrix(read_file(path), modality);
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

}  // namespace coughdet
