#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdwsmir/sh_series.hpp"
#include "tdwsmir/vec3.hpp"

namespace tdw {

/// Capsule directions of the 32-channel Eigenmike em32, in hardware channel
/// order (channel 1 first). Angles in radians, theta from +z, phi from +x.
std::span<const SphericalAngles> eigenmike32_directions();

struct MicArraySpec {
  Vec3 center{};
  double radius = 0.042;
  std::vector<SphericalAngles> mics;

  static MicArraySpec eigenmike32(const Vec3& center, double radius = 0.042);

  void validate() const;
  Vec3 mic_position(std::size_t q) const { return center + radius * unit_vector(mics[q].theta, mics[q].phi); }
};

/// Direction table override file: CSV with theta_rad,phi_rad per row.
std::vector<SphericalAngles> load_direction_table(const std::filesystem::path& path);

struct LowpassSpec {
  double cutoff_hz = 0.0;  // 0: 0.9 * fs / 2
  int taps = 63;           // odd
  double kaiser_beta = 8.0;
};

struct MicSignals {
  double fs = 0.0;
  std::vector<SphericalAngles> directions;
  std::vector<std::vector<double>> channels;
  double gain = 1.0;  // common factor applied by normalize_peak
  bool normalized = false;
  std::optional<LowpassSpec> filter;

  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
};

/// Real signals sum_{n,m} zeta_n^m(t) Y_n^m at every mic. Throws ModelError if the
/// discarded imaginary part exceeds 1e-9 of the signal norm.
MicSignals synthesize_mic_signals(const SHTimeSeries& zeta, const MicArraySpec& array);

/// Windowed-sinc (Kaiser) linear-phase low-pass taps with unit DC gain.
std::vector<double> design_lowpass(double fs, const LowpassSpec& spec);

/// Zero-delay ("same" length, group delay removed) FIR filtering.
std::vector<double> filter_zero_phase(std::span<const double> x, std::span<const double> taps);

MicSignals lowpass(const MicSignals& signals, const LowpassSpec& spec);
SHTimeSeries lowpass(const SHTimeSeries& series, const LowpassSpec& spec);

/// Scales every channel by one factor so the largest |sample| is 1.
MicSignals normalize_peak(const MicSignals& signals);

enum class OutputFormat { Wav, Csv, Both };

OutputFormat parse_output_format(const std::string& s);
std::string to_string(OutputFormat f);

/// Writes `<base>.wav` and/or `<base>.csv`; returns the files written.
std::vector<std::filesystem::path> write_outputs(const MicSignals& signals, const std::filesystem::path& base,
                                                 OutputFormat format);

/// Reads a mic-signal CSV written by write_outputs (sample rate and directions from its header).
MicSignals read_signals_csv(const std::filesystem::path& path);

}  // namespace tdw
