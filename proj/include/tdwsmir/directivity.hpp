#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tdwsmir/sh.hpp"
#include "tdwsmir/sh_series.hpp"
#include "tdwsmir/vec3.hpp"

namespace tdw {

enum class PatternKind { Omnidirectional, Cardioid, Hypercardioid, Subcardioid, Bidirectional };

/// Frequency-invariant first-order pattern a + b cos(theta) about +z, a + b = 1.
struct AnalyticPattern {
  PatternKind kind = PatternKind::Omnidirectional;

  double a() const;
  double b() const;
  std::string name() const;

  /// Accepts "omnidirectional"/"omni", "cardioid", "hypercardioid", "subcardioid",
  /// "bidirectional"/"figure8". Throws DomainError otherwise.
  static AnalyticPattern parse(std::string_view name);
};

/// Axisymmetric coefficients of a single wave front emitted at t = 0:
/// gamma_0^0 = sqrt(4 pi) a, gamma_1^0 = sqrt(4 pi / 3) b. `order` must be >= 1
/// unless the pattern is omnidirectional.
SHMatrix pattern_to_sh(const AnalyticPattern& pattern, int order = 1);

/// Directional impulse responses of a loudspeaker sampled on a sphere of radius `radius`.
struct MeasuredDirectivity {
  double radius = 0.0;
  double fs = 0.0;
  std::vector<SphericalAngles> directions;
  std::vector<double> weights;  // optional quadrature weights, one per direction
  std::vector<std::vector<double>> responses;  // one sequence per direction

  std::size_t length() const { return responses.empty() ? 0 : responses.front().size(); }
  void validate() const;
};

struct AnalysisOptions {
  double regularization = 0.0;  // Tikhonov lambda on the least-squares fit
  double max_condition = 1e4;
  bool farfield_compensation = false;
  double speed_of_sound = 343.0;
};

/// Per-sample SH analysis of order `order` of a measured bundle. Uses the declared
/// quadrature weights when present, least squares otherwise.
SHTimeSeries dir_ir_to_sh(const MeasuredDirectivity& meas, int order, const AnalysisOptions& opts = {});

/// Condition number of the Q x (order+1)^2 synthesis matrix on `directions`.
double analysis_condition_number(const std::vector<SphericalAngles>& directions, int order);

SHMatrix rotate_directivity(const SHMatrix& coeffs, const EulerAngles& angles);
SHTimeSeries rotate_directivity(const SHTimeSeries& coeffs, const EulerAngles& angles);

/// Real-valued synthesis of a coefficient series at one direction.
std::vector<double> synthesize_direction(const SHTimeSeries& coeffs, double theta, double phi);

using Directivity = std::variant<AnalyticPattern, MeasuredDirectivity>;

struct SourceSpec {
  Vec3 position{};
  EulerAngles orientation{};  // rotates the pattern's +z axis into the room frame
  Directivity directivity = AnalyticPattern{};
  int order = 1;              // analysis order V
  AnalysisOptions analysis{};
};

/// gamma_v^u(t) of the source in the room-oriented source frame (pattern rotated by
/// `orientation`), at sample rate fs.
SHTimeSeries source_coefficients(const SourceSpec& source, double fs);

// Directivity bundle: a JSON manifest with radius_m, sample_rate_hz, channels,
// directions ([theta_rad, phi_rad] rows), optional weights, and "data" naming a
// Q-channel float32 WAV or a CSV with one row per sample and Q columns. Relative
// data paths resolve against the manifest's directory.
MeasuredDirectivity load_directivity_bundle(const std::filesystem::path& manifest);
void save_directivity_bundle(const std::filesystem::path& manifest, const MeasuredDirectivity& meas,
                             const std::string& data_file);

/// Quasi-uniform spherical Fibonacci grid of q directions.
std::vector<SphericalAngles> fibonacci_grid(std::size_t q);

/// Synthetic frequency-dependent, order-`order` loudspeaker directivity (main lobe on +z,
/// omnidirectional at low frequencies, narrowing and slightly asymmetric at high
/// frequencies) as a local-frame coefficient series, with the propagation delay and
/// 1/(4 pi radius) spreading a bundle measured at `radius` would show.
SHTimeSeries synthetic_loudspeaker_coefficients(double fs, int order = 5, double radius = 1.0,
                                                double speed_of_sound = 343.0);

/// The same directivity sampled on a grid, as a measurement bundle.
MeasuredDirectivity synthetic_loudspeaker_bundle(double fs, const std::vector<SphericalAngles>& grid, int order = 5,
                                                 double radius = 1.0, double speed_of_sound = 343.0);

}  // namespace tdw
