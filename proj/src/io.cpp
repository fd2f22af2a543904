#include "coughdet/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace coughdet {

namespace {

std::uint32_t le32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

[[noreturn]] void fail(const fs::path& p, const std::string& what) {
  throw LoadError(p.string() + ": " + what);
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error(tmp.string() + ": write failed");
  }
  fs::rename(tmp, path);
}

WavData read_wav(const fs::path& path) {
  const std::string raw = read_file(path);
  const auto* b = reinterpret_cast<const unsigned char*>(raw.data());
  if (raw.size() < 12 || std::memcmp(b, "RIFF", 4) != 0 || std::memcmp(b + 8, "WAVE", 4) != 0)
    fail(path, "not a RIFF/WAVE file");

  std::size_t pos = 12;
  bool have_fmt = false;
  WavData out;
  while (pos + 8 <= raw.size()) {
    const std::uint32_t size = le32(b + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > raw.size()) fail(path, "truncated chunk");
    if (std::memcmp(b + pos, "fmt ", 4) == 0) {
      if (size < 16) fail(path, "malformed fmt chunk");
      const std::uint16_t format = le16(b + body);
      const std::uint16_t channels = le16(b + body + 2);
      out.sample_rate = le32(b + body + 4);
      const std::uint16_t bits = le16(b + body + 14);
      if (format != 1 || bits != 16) fail(path, "expected PCM16 audio");
      if (channels != 1) fail(path, "expected mono audio");
      have_fmt = true;
    } else if (std::memcmp(b + pos, "data", 4) == 0) {
      if (!have_fmt) fail(path, "data chunk before fmt chunk");
      if (size == 0) fail(path, "empty audio");
      if (size % 2 != 0) fail(path, "odd PCM16 data size");
      out.samples.resize(size / 2);
      for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(le16(b + body + 2 * i));
        out.samples[i] = v / 32768.0;
      }
      return out;
    }
    pos = body + size + (size & 1);
  }
  fail(path, "no data chunk");
}

void write_wav(const fs::path& path, std::span<const double> samples,
               std::uint32_t sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::string s;
  s.reserve(44 + data_bytes);
  s += "RIFF";
  put32(s, 36 + data_bytes);
  s += "WAVEfmt ";
  put32(s, 16);
  put16(s, 1);
  put16(s, 1);
  put32(s, sample_rate);
  put32(s, sample_rate * 2);
  put16(s, 2);
  put16(s, 16);
  s += "data";
  put32(s, data_bytes);
  for (double v : samples) {
    const double q = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
    put16(s, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  write_file_atomic(path, s);
}

std::vector<double> read_accel_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || line.find_first_not_of(" \t", end - line.c_str()) != std::string::npos ||
        !std::isfinite(v))
      fail(path, "malformed value on line " + std::to_string(lineno));
    out.push_back(v);
  }
  if (out.empty()) fail(path, "empty accelerometer file");
  return out;
}

void write_accel_text(const fs::path& path, std::span<const double> samples) {
  std::string s;
  s.reserve(samples.size() * 24);
  char buf[32];
  for (double v : samples) {
    const int n = std::snprintf(buf, sizeof buf, "%.17g\n", v);
    s.append(buf, static_cast<std::size_t>(n));
  }
  write_file_atomic(path, s);
}

std::vector<std::string> DatasetManifest::patient_ids() const {
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.patient_id);
  return {ids.begin(), ids.end()};
}

DatasetManifest read_manifest(const fs::path& path, bool check_files) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open manifest");
  const fs::path base = path.parent_path();
  DatasetManifest m;
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    ManifestRecord r;
    try {
      const auto j = nlohmann::json::parse(line);
      r.patient_id = j.at("patient_id").get<std::string>();
      r.label = parse_label(j.at("label").get<std::string>());
      const auto accel = j.at("accel_path").get<std::string>();
      const auto audio = j.at("audio_path").get<std::string>();
      r.accel_path = fs::path(accel).is_absolute() ? fs::path(accel) : base / accel;
      r.audio_path = fs::path(audio).is_absolute() ? fs::path(audio) : base / audio;
      r.start_s = j.at("start_s").get<double>();
      r.end_s = j.at("end_s").get<double>();
      r.event_id = j.contains("event_id") ? j["event_id"].get<std::string>() : accel;
    } catch (const nlohmann::json::exception& e) {
      fail(path, where + e.what());
    } catch (const InputError& e) {
      fail(path, where + e.what());
    }
    if (!(r.duration() > 0)) fail(path, where + "non-positive duration");
    if (!seen.insert(r.event_id).second) fail(path, where + "duplicate event id " + r.event_id);
    if (check_files) {
      if (!fs::exists(r.accel_path)) fail(r.accel_path, "missing file (manifest line " + std::to_string(lineno) + ")");
      if (!fs::exists(r.audio_path)) fail(r.audio_path, "missing file (manifest line " + std::to_string(lineno) + ")");
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

std::string format_manifest(const DatasetManifest& m, const fs::path& base_dir) {
  auto rel = [&](const fs::path& p) {
    const auto r = p.lexically_relative(base_dir);
    return (r.empty() ? p : r).generic_string();
  };
  std::string out;
  for (const auto& r : m.records) {
    nlohmann::ordered_json j;
    j["event_id"] = r.event_id;
    j["patient_id"] = r.patient_id;
    j["label"] = std::string(to_string(r.label));
    j["accel_path"] = rel(r.accel_path);
    j["audio_path"] = rel(r.audio_path);
    j["start_s"] = r.start_s;
    j["end_s"] = r.end_s;
    out += j.dump();
    out += '\n';
  }
  return out;
}

Event load_event(const ManifestRecord& record) {
  Event e;
  e.id = record.event_id;
  e.patient_id = record.patient_id;
  e.label = record.label;
  e.start_s = record.start_s;
  e.end_s = record.end_s;
  e.accel.samples = read_accel_text(record.accel_path);
  WavData wav = read_wav(record.audio_path);
  if (wav.sample_rate != static_cast<std::uint32_t>(kAudioRate))
    fail(record.audio_path, "sample rate " + std::to_string(wav.sample_rate) + " Hz, expected 22050 Hz");
  e.audio.samples = std::move(wav.samples);
  try {
    validate(e);
  } catch (const InputError& err) {
    fail(record.accel_path, err.what());
  }
  return e;
}

void save_event(const Event& e, const ManifestRecord& record) {
  write_accel_text(record.accel_path, e.accel.samples);
  write_wav(record.audio_path, e.audio.samples, static_cast<std::uint32_t>(kAudioRate));
}

}  // namespace coughdet
