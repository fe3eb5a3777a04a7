#pragma once

// Time-domain wideband image-source model for an open spherical array in a
// cuboid room. Per image source: reflect the directivity coefficients by
// parity, rotate so the image lies on +z, propagate through the wavefront
// kernel with the wall attenuation, rotate back to the room orientation and
// accumulate on a common sample grid starting at the emission instant.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tdwsmir/directivity.hpp"
#include "tdwsmir/sh.hpp"
#include "tdwsmir/sh_series.hpp"
#include "tdwsmir/vec3.hpp"
#include "tdwsmir/wavefront.hpp"

namespace tdw {

/// Cuboid room. Wall order for `beta`: x=0, x=Lx, y=0, y=Ly, z=0, z=Lz.
struct RoomSpec {
  Vec3 dimensions{};
  std::array<double, 6> beta{};

  void validate() const;
  bool strictly_inside(const Vec3& p) const;
};

struct ImageSource {
  Vec3 position{};
  std::array<int, 6> counts{};     // reflections per wall, same order as RoomSpec::beta
  std::array<bool, 3> parity{};    // axis flips (x, y, z)
  std::array<int, 3> lattice{};    // mirrored-room index l per axis
  double attenuation = 1.0;        // prod beta_w^count_w
  double distance = 0.0;           // to the reference point used for ordering

  int order() const { return counts[0] + counts[1] + counts[2] + counts[3] + counts[4] + counts[5]; }
};

struct ImageSelection {
  enum class Mode { MaxOrder, Count };
  Mode mode = Mode::Count;
  int value = 1;

  static ImageSelection max_order(int k) { return {Mode::MaxOrder, k}; }
  static ImageSelection count(int c) { return {Mode::Count, c}; }
};

/// Lattice images of `source` sorted by (distance to `reference`, lattice index).
/// Count mode returns exactly the first `value` of that order, the original source included.
std::vector<ImageSource> enumerate_images(const RoomSpec& room, const Vec3& source, const Vec3& reference,
                                          const ImageSelection& selection);

/// Coefficients of the mirrored function f(Mx) for the axis flips in `parity`.
SHMatrix reflect_sh(const SHMatrix& coeffs, const std::array<bool, 3>& parity);
SHTimeSeries reflect_sh(const SHTimeSeries& coeffs, const std::array<bool, 3>& parity);
void reflect_sh_inplace(std::span<Complex> coeffs, const std::array<bool, 3>& parity);

struct FrameAlignment {
  EulerAngles to_source_frame;  // room-oriented coefficients -> frame with the image on +z
  EulerAngles back;             // inverse
  double distance = 0.0;
};

FrameAlignment frame_align(const Vec3& array_center, const Vec3& image_position);

struct SimulationConfig {
  double fs = 44100.0;
  double speed_of_sound = 343.0;
  int output_order = 5;  // N; the source order V lives in SourceSpec
  ImageSelection images = ImageSelection::count(24);
  double duration_s = 0.0;  // 0: long enough for the last arrival
  unsigned threads = 0;     // 0: hardware concurrency
  KernelSampling sampling = KernelSampling::CellAverage;

  void validate() const;
};

/// Observed SH coefficients zeta_n^m(t) in the room-oriented array frame, t = 0 at emission.
SHTimeSeries simulate_rir_sh(const RoomSpec& room, const SourceSpec& source, const Vec3& array_center,
                             double array_radius, const SimulationConfig& config);

/// Same as simulate_rir_sh for an explicit image list and room-oriented source coefficients.
SHTimeSeries simulate_images(const std::vector<ImageSource>& images, const SHTimeSeries& source_room,
                             const Vec3& array_center, double array_radius, const SimulationConfig& config);

/// Contribution of one image, before placement: starts at its own sample index.
SHTimeSeries image_contribution(const ImageSource& image, const SHTimeSeries& source_room,
                                const Vec3& array_center, double array_radius, const SimulationConfig& config);

}  // namespace tdw
