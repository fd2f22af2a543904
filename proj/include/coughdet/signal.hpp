#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coughdet {

inline constexpr double kAccelRate = 100.0;
inline constexpr double kAudioRate = 22050.0;

// Smallest frame lengths in the feature grids; shorter events cannot be featurized.
inline constexpr std::size_t kMinAccelFrame = 16;
inline constexpr std::size_t kMinAudioFrame = 256;

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Modality { accel, audio };

std::string_view to_string(Modality m);
Modality parse_modality(std::string_view s);

enum class Label { non_cough = 0, cough = 1 };

std::string_view to_string(Label l);
Label parse_label(std::string_view s);

// Vector magnitude of the accelerometer, sampled at 100 Hz.
struct AccelSignal {
  static constexpr double sample_rate = kAccelRate;
  std::vector<double> samples;

  double duration() const { return samples.size() / sample_rate; }
};

// Mono audio normalized to [-1, 1], sampled at 22.05 kHz.
struct AudioSignal {
  static constexpr double sample_rate = kAudioRate;
  std::vector<double> samples;

  double duration() const { return samples.size() / sample_rate; }
};

struct Event {
  std::string id;
  std::string patient_id;
  double start_s = 0.0;
  double end_s = 0.0;
  Label label = Label::non_cough;
  AccelSignal accel;
  AudioSignal audio;

  double duration() const { return end_s - start_s; }
};

/// Checks the Event invariants: positive duration, channel lengths within one
/// sample of the declared duration, finite samples, audio in [-1, 1] and both
/// channels at least one analysis frame long. Throws InputError.
void validate(const Event& e);

/// Elementwise Euclidean norm of a tri-axial acceleration stream.
AccelSignal magnitude(std::span<const double> x, std::span<const double> y,
                      std::span<const double> z);

}  // namespace coughdet
