#pragma once

// Reference generators used to check the time-domain engine.
//
// p2p_rir is the classical point-to-point image method for an omni source
// (nearest-sample impulse placement). smir_rtf is a single-band SH-domain
// room transfer function: per frequency and image, the interior expansion
// -ik sum_n j_n(kr) h_n(k r_s) Y_n^m(x) Y_n^m*(s) of the free-space Green's
// function, weighted by the image's directivity toward the array center.
// Time convention exp(+i w t): a delay T multiplies by exp(-i w T).

#include <filesystem>
#include <vector>

#include "tdwsmir/array.hpp"
#include "tdwsmir/image_source.hpp"

namespace tdw {

struct RTF {
  std::vector<double> frequencies;
  std::vector<std::vector<Complex>> channels;  // channels[q][f]

  void validate() const;
};

std::vector<double> linear_frequencies(double f_lo, double f_hi, std::size_t count);

/// Sum over images of attenuation * delta(t - d/c) / (4 pi d), nearest-sample placement.
/// `length` = 0 sizes the result to the last arrival (or config.duration_s when set).
std::vector<double> p2p_rir(const std::vector<ImageSource>& images, const Vec3& mic, const SimulationConfig& config,
                            std::size_t length = 0);

/// Images enumerated exactly as the engine does, ordered relative to `reference`.
std::vector<double> p2p_rir(const RoomSpec& room, const Vec3& source, const Vec3& mic, const Vec3& reference,
                            const SimulationConfig& config, std::size_t length = 0);

/// Room transfer function at the array's mics for a source with room-oriented
/// coefficients `source_room` (any length; frequency dependence taken from its DTFT).
RTF smir_rtf(const std::vector<ImageSource>& images, const SHTimeSeries& source_room, const MicArraySpec& array,
             const std::vector<double>& frequencies, const SimulationConfig& config);

RTF smir_rtf(const RoomSpec& room, const SourceSpec& source, const MicArraySpec& array,
             const std::vector<double>& frequencies, const SimulationConfig& config);

/// DTFT of each channel at the given frequencies, t = k / fs.
RTF signal_spectrum(const MicSignals& signals, const std::vector<double>& frequencies);
std::vector<Complex> signal_spectrum(std::span<const double> x, double fs, const std::vector<double>& frequencies);

struct ChannelDeviation {
  double max_db = 0.0;
  double mean_db = 0.0;
};

struct RtfDeviation {
  std::vector<ChannelDeviation> channels;
  double max_db = 0.0;   // worst bin over all channels
  double mean_db = 0.0;  // mean of the per-channel means
  std::size_t bins = 0;  // bins inside the band
};

/// Magnitude deviation in dB inside [f_lo, f_hi] after normalizing each channel's
/// peak (over the whole grid) to 0 dB. Grids must be identical.
RtfDeviation rtf_compare(const RTF& a, const RTF& b, double f_lo, double f_hi);

/// CSV: frequency_hz, then mag_db_<q>, phase_rad_<q> per channel.
void write_rtf_csv(const std::filesystem::path& path, const RTF& rtf);

}  // namespace tdw
