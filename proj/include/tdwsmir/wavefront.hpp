#pragma once

// Anechoic propagation of a sequence of spherical wave fronts, emitted by a
// source on the positive z-axis, to the SH coefficients of the signal seen
// on a concentric observation sphere.
//
// For a wave front emitted at tau and observed at t0 (dt = t0 - tau) the
// front intersects the sphere on the circle cos(theta) = cos_theta0(dt);
// seen from the source, that circle sits at cos_theta0_src(dt). The SH
// coefficients of the observed field are
//
//   zeta_n^m(t0) = c / (2 r r_s) * sum_v int gamma_v^m(tau)
//                  Pv_m(cos_theta0_src) Pn_m(cos_theta0) window(dt) dtau,
//
// a bank of convolutions, one per (n, m, v), with the orders coupled only
// through m == u.

#include <cstdint>
#include <string>
#include <vector>

#include "tdwsmir/sh_series.hpp"

namespace tdw {

inline constexpr double kDefaultSpeedOfSound = 343.0;

struct WavefrontGeometry {
  double radius = 0.0;           // observation sphere r [m]
  double source_distance = 0.0;  // r_s [m]
  double speed_of_sound = kDefaultSpeedOfSound;

  /// Throws ModelError("near-field overlap unsupported") unless r_s > r, and
  /// DomainError for non-positive r or c.
  void validate() const;

  double first_arrival() const { return (source_distance - radius) / speed_of_sound; }
  double last_arrival() const { return (source_distance + radius) / speed_of_sound; }
};

/// How the continuous kernel becomes a sample sequence.
///   Point:       direct evaluation at dt = k / fs (impulse-train sampling; aliases).
///   CellAverage: each tap is the kernel integrated over its sample cell
///                [k - 1/2, k + 1/2) / fs, a box prefilter that keeps the time
///                integral of every coefficient exact.
enum class KernelSampling { Point, CellAverage };

/// Indicator of r_s - r <= c dt <= r_s + r (closed at both ends).
bool window_xi(const WavefrontGeometry& g, double dt);

/// Polar angle cosine of the intersection circle in the array frame.
/// Contract: window_xi(g, dt) must hold.
double cos_theta0(const WavefrontGeometry& g, double dt);

/// Polar angle cosine of the intersection circle seen from the source.
double cos_theta0_src(const WavefrontGeometry& g, double dt);

/// Integer sample range [first, last] with window_xi(g, k / fs) true.
struct KernelSupport {
  std::int64_t first = 0;
  std::int64_t last = -1;

  std::size_t size() const { return last >= first ? static_cast<std::size_t>(last - first + 1) : 0; }
};

KernelSupport kernel_support(const WavefrontGeometry& g, double fs, KernelSampling sampling = KernelSampling::Point);

/// Kernel c/(2 r r_s) Pv_u(cos_theta0_src) Pn_m(cos_theta0) delta_{m,u}
/// sampled at dt = k / fs over kernel_support(g, fs). Entry i is k = first + i.
/// With CellAverage the entries are cell means rather than point values.
std::vector<double> kernel_sequence(const WavefrontGeometry& g, int n, int m, int v, int u, double fs,
                                    KernelSampling sampling = KernelSampling::Point);

/// zeta_n^m for n <= output_order from source coefficients gamma_v^u (source
/// on +z). The output is on the source's sample grid; each sample carries
/// the 1/fs quadrature weight so that impulse weights map to impulse weights.
SHTimeSeries propagate_anechoic(const SHTimeSeries& source, const WavefrontGeometry& g, int output_order,
                                KernelSampling sampling = KernelSampling::Point);

KernelSampling parse_kernel_sampling(const std::string& s);
std::string to_string(KernelSampling s);

}  // namespace tdw
