#include "tdwsmir/image_source.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "tdwsmir/error.hpp"
#include "tdwsmir/parallel.hpp"
#include "tdwsmir/rotation.hpp"
#include "tdwsmir/wavefront.hpp"

namespace tdw {
namespace {

std::string vec_str(const Vec3& v) {
  return "[" + std::to_string(v[0]) + ", " + std::to_string(v[1]) + ", " + std::to_string(v[2]) + "]";
}

struct AxisImage {
  int lattice;
  int flip;
  double coord;
  int count_low;   // reflections off the wall at 0
  int count_high;  // reflections off the wall at L
};

AxisImage axis_image(double src, double len, int l, int u) {
  return {l, u, (1 - 2 * u) * src + 2.0 * l * len, std::abs(l - u), std::abs(l)};
}

ImageSource make_image(const RoomSpec& room, const std::array<AxisImage, 3>& ax, const Vec3& reference) {
  ImageSource img;
  double att = 1.0;
  for (int a = 0; a < 3; ++a) {
    img.position[a] = ax[a].coord;
    img.counts[2 * a] = ax[a].count_low;
    img.counts[2 * a + 1] = ax[a].count_high;
    img.parity[a] = ax[a].flip != 0;
    img.lattice[a] = ax[a].lattice;
    att *= std::pow(room.beta[2 * a], ax[a].count_low) * std::pow(room.beta[2 * a + 1], ax[a].count_high);
  }
  img.attenuation = att;
  img.distance = norm(img.position - reference);
  return img;
}

auto sort_key(const ImageSource& s) {
  return std::make_tuple(s.distance, s.lattice[0], s.parity[0], s.lattice[1], s.parity[1], s.lattice[2], s.parity[2]);
}

// All images with |l| <= bound on every axis.
std::vector<ImageSource> lattice_box(const RoomSpec& room, const Vec3& source, const Vec3& reference, int bound) {
  std::vector<ImageSource> out;
  std::array<AxisImage, 3> ax{};
  for (int lx = -bound; lx <= bound; ++lx)
    for (int ux = 0; ux <= 1; ++ux)
      for (int ly = -bound; ly <= bound; ++ly)
        for (int uy = 0; uy <= 1; ++uy)
          for (int lz = -bound; lz <= bound; ++lz)
            for (int uz = 0; uz <= 1; ++uz) {
              ax[0] = axis_image(source[0], room.dimensions[0], lx, ux);
              ax[1] = axis_image(source[1], room.dimensions[1], ly, uy);
              ax[2] = axis_image(source[2], room.dimensions[2], lz, uz);
              out.push_back(make_image(room, ax, reference));
            }
  return out;
}

}  // namespace

void RoomSpec::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (!(dimensions[a] > 0.0)) throw DomainError("room: dimensions must be positive");
  }
  for (double b : beta) {
    if (!(b >= 0.0 && b <= 1.0)) throw DomainError("room: reflection coefficients must lie in [0, 1]");
  }
}

bool RoomSpec::strictly_inside(const Vec3& p) const {
  for (int a = 0; a < 3; ++a) {
    if (!(p[a] > 0.0 && p[a] < dimensions[a])) return false;
  }
  return true;
}

std::vector<ImageSource> enumerate_images(const RoomSpec& room, const Vec3& source, const Vec3& reference,
                                          const ImageSelection& selection) {
  room.validate();
  if (!room.strictly_inside(source)) {
    throw ModelError("source " + vec_str(source) + " is on or outside a wall");
  }
  if (selection.value < 0 || (selection.mode == ImageSelection::Mode::Count && selection.value < 1)) {
    throw DomainError("image selection: invalid value " + std::to_string(selection.value));
  }
  auto by_key = [](const ImageSource& a, const ImageSource& b) { return sort_key(a) < sort_key(b); };

  if (selection.mode == ImageSelection::Mode::MaxOrder) {
    // Total count on an axis is |l - u| + |l| >= |l|, so |l| <= K bounds the box.
    std::vector<ImageSource> all = lattice_box(room, source, reference, selection.value + 1);
    std::erase_if(all, [&](const ImageSource& s) { return s.order() > selection.value; });
    std::sort(all.begin(), all.end(), by_key);
    return all;
  }

  const auto wanted = static_cast<std::size_t>(selection.value);
  const double shortest_side = std::min({room.dimensions[0], room.dimensions[1], room.dimensions[2]});
  for (int bound = 1;; ++bound) {
    std::vector<ImageSource> box = lattice_box(room, source, reference, bound);
    std::sort(box.begin(), box.end(), by_key);
    // Any image outside the box lies at least 2 * bound * shortest_side away.
    if (box.size() >= wanted && box[wanted - 1].distance < 2.0 * bound * shortest_side) {
      box.resize(wanted);
      return box;
    }
  }
}

void reflect_sh_inplace(std::span<Complex> coeffs, const std::array<bool, 3>& parity) {
  int order = -1;
  while (sh_count(order + 1) <= coeffs.size()) ++order;
  if (sh_count(order) != coeffs.size()) throw DomainError("reflect_sh: coefficient count is not (N+1)^2");
  for (int n = 0; n <= order; ++n) {
    for (int m = 1; m <= n; ++m) {
      Complex& pos = coeffs[sh_index(n, m)];
      Complex& neg = coeffs[sh_index(n, -m)];
      const double odd = (m % 2) ? -1.0 : 1.0;
      // x -> -x: phi -> pi - phi, so c'_{n,m} = c_{n,-m}.
      if (parity[0]) std::swap(pos, neg);
      // y -> -y: phi -> -phi, so c'_{n,m} = (-1)^m c_{n,-m}.
      if (parity[1]) {
        std::swap(pos, neg);
        pos *= odd;
        neg *= odd;
      }
    }
    // z -> -z: theta -> pi - theta, so c'_{n,m} = (-1)^(n+m) c_{n,m}.
    if (parity[2]) {
      for (int m = -n; m <= n; ++m) {
        if ((n + m) % 2) coeffs[sh_index(n, m)] = -coeffs[sh_index(n, m)];
      }
    }
  }
}

SHMatrix reflect_sh(const SHMatrix& coeffs, const std::array<bool, 3>& parity) {
  SHMatrix out = coeffs;
  reflect_sh_inplace(out.coeffs(), parity);
  return out;
}

SHTimeSeries reflect_sh(const SHTimeSeries& coeffs, const std::array<bool, 3>& parity) {
  SHTimeSeries out = coeffs;
  for (std::size_t k = 0; k < out.frames(); ++k) reflect_sh_inplace(out.frame(k), parity);
  return out;
}

FrameAlignment frame_align(const Vec3& array_center, const Vec3& image_position) {
  const Vec3 d = image_position - array_center;
  const double dist = norm(d);
  if (!(dist > 0.0)) throw ModelError("frame_align: image source coincides with the array center");
  const SphericalAngles dir = direction_angles(d);
  FrameAlignment f;
  f.back = EulerAngles::aim(dir.theta, dir.phi);
  f.to_source_frame = f.back.inverse();
  f.distance = dist;
  return f;
}

void SimulationConfig::validate() const {
  if (!(fs > 0.0)) throw DomainError("simulation: sample rate must be positive");
  if (!(speed_of_sound > 0.0)) throw DomainError("simulation: speed of sound must be positive");
  if (output_order < 0 || output_order > kMaxDegree) throw DomainError("simulation: output order out of range");
  if (!(duration_s >= 0.0)) throw DomainError("simulation: duration must be non-negative");
}

SHTimeSeries image_contribution(const ImageSource& image, const SHTimeSeries& source_room,
                                const Vec3& array_center, double array_radius, const SimulationConfig& config) {
  const FrameAlignment frame = frame_align(array_center, image.position);
  const WavefrontGeometry geometry{array_radius, frame.distance, config.speed_of_sound};
  try {
    geometry.validate();
  } catch (const ModelError& e) {
    throw ModelError(std::string(e.what()) + " (image at " + vec_str(image.position) + ")");
  }

  SHTimeSeries gamma = reflect_sh(source_room, image.parity);
  gamma = SHRotation(gamma.order(), frame.to_source_frame).apply(gamma);

  SHTimeSeries zeta = propagate_anechoic(gamma, geometry, config.output_order, config.sampling);
  for (auto& c : zeta.data()) c *= image.attenuation;
  return SHRotation(config.output_order, frame.back).apply(zeta);
}

SHTimeSeries simulate_images(const std::vector<ImageSource>& images, const SHTimeSeries& source_room,
                             const Vec3& array_center, double array_radius, const SimulationConfig& config) {
  config.validate();
  if (source_room.fs() != config.fs) throw DomainError("simulate_images: source sample rate differs from config");

  // Zero-attenuation images contribute exactly nothing.
  std::vector<const ImageSource*> active;
  for (const auto& img : images) {
    if (img.attenuation != 0.0) active.push_back(&img);
  }

  std::int64_t length = 0;
  if (config.duration_s > 0.0) {
    length = std::llround(config.duration_s * config.fs);
  } else {
    for (const auto* img : active) {
      const double rs = norm(img->position - array_center);
      const WavefrontGeometry g{array_radius, rs, config.speed_of_sound};
      const std::int64_t last = kernel_support(g, config.fs, config.sampling).last + 1;
      length = std::max<std::int64_t>(length, source_room.start() + last + static_cast<std::int64_t>(source_room.frames()));
    }
  }

  SHTimeSeries out(config.output_order, config.fs, static_cast<std::size_t>(std::max<std::int64_t>(length, 0)));
  const unsigned threads = resolve_threads(config.threads);
  const std::size_t batch = std::max<std::size_t>(threads * 4, 1);
  std::vector<SHTimeSeries> parts;

  for (std::size_t lo = 0; lo < active.size(); lo += batch) {
    const std::size_t hi = std::min(active.size(), lo + batch);
    parts.assign(hi - lo, SHTimeSeries{});
    parallel_for(hi - lo, threads, [&](std::size_t i) {
      parts[i] = image_contribution(*active[lo + i], source_room, array_center, array_radius, config);
    });
    // Ordered reduction keeps the result independent of the thread count.
    for (const auto& part : parts) {
      for (std::size_t k = 0; k < part.frames(); ++k) {
        const std::int64_t t = part.start() + static_cast<std::int64_t>(k);
        if (t < 0 || t >= length) continue;
        const auto src = part.frame(k);
        auto dst = out.frame(static_cast<std::size_t>(t));
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
      }
    }
  }
  return out;
}

SHTimeSeries simulate_rir_sh(const RoomSpec& room, const SourceSpec& source, const Vec3& array_center,
                             double array_radius, const SimulationConfig& config) {
  config.validate();
  room.validate();
  if (!(array_radius > 0.0)) throw DomainError("array radius must be positive");
  for (int a = 0; a < 3; ++a) {
    if (!(array_center[a] - array_radius > 0.0 && array_center[a] + array_radius < room.dimensions[a])) {
      throw ModelError("array sphere at " + vec_str(array_center) + " with radius " + std::to_string(array_radius) +
                       " m protrudes through a wall");
    }
  }
  const SHTimeSeries gamma = source_coefficients(source, config.fs);
  const auto images = enumerate_images(room, source.position, array_center, config.images);
  return simulate_images(images, gamma, array_center, array_radius, config);
}

}  // namespace tdw
