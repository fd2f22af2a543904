#include "coughdet/signal.hpp"

#include <cmath>
#include <cstdlib>

namespace coughdet {

std::string_view to_string(Modality m) {
  return m == Modality::accel ? "accel" : "audio";
}

Modality parse_modality(std::string_view s) {
  if (s == "accel") return Modality::accel;
  if (s == "audio") return Modality::audio;
  throw InputError("unknown modality '" + std::string(s) + "'");
}

std::string_view to_string(Label l) {
  return l == Label::cough ? "cough" : "non_cough";
}

Label parse_label(std::string_view s) {
  if (s == "cough") return Label::cough;
  if (s == "non_cough") return Label::non_cough;
  throw InputError("unknown label '" + std::string(s) + "'");
}

namespace {

long expected_length(double duration, double rate) {
  return std::lround(duration * rate);
}

}  // namespace

void validate(const Event& e) {
  const std::string who = "event '" + e.id + "': ";
  if (!(e.end_s > e.start_s)) throw InputError(who + "end_s must exceed start_s");
  const double d = e.duration();
  const long na = static_cast<long>(e.accel.samples.size());
  const long nu = static_cast<long>(e.audio.samples.size());
  if (std::labs(na - expected_length(d, kAccelRate)) > 1)
    throw InputError(who + "accel length " + std::to_string(na) +
                     " inconsistent with duration");
  if (std::labs(nu - expected_length(d, kAudioRate)) > 1)
    throw InputError(who + "audio length " + std::to_string(nu) +
                     " inconsistent with duration");
  if (e.accel.samples.size() < kMinAccelFrame)
    throw InputError(who + "accel shorter than one analysis frame");
  if (e.audio.samples.size() < kMinAudioFrame)
    throw InputError(who + "audio shorter than one analysis frame");
  for (double v : e.accel.samples)
    if (!std::isfinite(v)) throw InputError(who + "non-finite accel sample");
  for (double v : e.audio.samples)
    if (!std::isfinite(v) || v < -1.0 || v > 1.0)
      throw InputError(who + "audio sample outside [-1, 1]");
}

AccelSignal magnitude(std::span<const double> x, std::span<const double> y,
                      std::span<const double> z) {
  if (x.size() != y.size() || x.size() != z.size())
    throw InputError("magnitude: axis lengths differ");
  AccelSignal out;
  out.samples.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]) || !std::isfinite(z[i]))
      throw InputError("magnitude: non-finite sample");
    out.samples[i] = std::sqrt(x[i] * x[i] + y[i] * y[i] + z[i] * z[i]);
  }
  return out;
}

}  // namespace coughdet
