#include "tdwsmir/wavefront.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "tdwsmir/error.hpp"

namespace tdw {
namespace {

// Rounding slack allowed at the window edges before a value counts as out of range.
constexpr double kEdgeSlack = 1e-9;

void require_in_window(const WavefrontGeometry& g, double dt, const char* fn) {
  const double d = g.speed_of_sound * dt;
  const double lo = g.source_distance - g.radius;
  const double hi = g.source_distance + g.radius;
  if (d < lo - kEdgeSlack * hi || d > hi + kEdgeSlack * hi) {
    throw DomainError(std::string(fn) + ": dt = " + std::to_string(dt) + " s lies outside the wavefront window");
  }
}

}  // namespace

void WavefrontGeometry::validate() const {
  if (!(radius > 0.0)) throw DomainError("wavefront geometry: radius must be positive");
  if (!(speed_of_sound > 0.0)) throw DomainError("wavefront geometry: speed of sound must be positive");
  if (!(source_distance > radius)) {
    throw ModelError("near-field overlap unsupported: source distance " + std::to_string(source_distance) +
                     " m does not exceed array radius " + std::to_string(radius) + " m");
  }
}

bool window_xi(const WavefrontGeometry& g, double dt) {
  const double d = g.speed_of_sound * dt;
  return d >= g.source_distance - g.radius && d <= g.source_distance + g.radius;
}

double cos_theta0(const WavefrontGeometry& g, double dt) {
  require_in_window(g, dt, "cos_theta0");
  const double d = g.speed_of_sound * dt;
  const double r = g.radius, rs = g.source_distance;
  const double v = (r * r + rs * rs - d * d) / (2.0 * r * rs);
  return std::clamp(v, -1.0, 1.0);
}

double cos_theta0_src(const WavefrontGeometry& g, double dt) {
  require_in_window(g, dt, "cos_theta0_src");
  const double d = g.speed_of_sound * dt;
  const double r = g.radius, rs = g.source_distance;
  const double v = -(d * d + rs * rs - r * r) / (2.0 * d * rs);
  return std::clamp(v, -1.0, 1.0);
}

KernelSupport kernel_support(const WavefrontGeometry& g, double fs, KernelSampling sampling) {
  g.validate();
  if (!(fs > 0.0)) throw DomainError("kernel_support: sample rate must be positive");
  KernelSupport s;
  if (sampling == KernelSampling::CellAverage) {
    // Cells [k - 1/2, k + 1/2) that overlap the window.
    s.first = static_cast<std::int64_t>(std::floor(g.first_arrival() * fs - 0.5)) + 1;
    s.last = static_cast<std::int64_t>(std::ceil(g.last_arrival() * fs + 0.5)) - 1;
    return s;
  }
  auto inside = [&](std::int64_t k) { return window_xi(g, static_cast<double>(k) / fs); };
  s.first = static_cast<std::int64_t>(std::ceil(g.first_arrival() * fs));
  s.last = static_cast<std::int64_t>(std::floor(g.last_arrival() * fs));
  while (inside(s.first - 1)) --s.first;
  while (s.first <= s.last && !inside(s.first)) ++s.first;
  while (inside(s.last + 1)) ++s.last;
  while (s.last >= s.first && !inside(s.last)) --s.last;
  return s;
}

namespace {

struct Node {
  double dt;
  double weight;
};

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 4> kGaussX = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                           0.9602898564975363};
constexpr std::array<double, 4> kGaussW = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                           0.1012285362903763};

// Evaluation points per tap; tap value = sum weight * kernel(dt).
std::vector<std::vector<Node>> tap_nodes(const WavefrontGeometry& g, double fs, KernelSampling sampling,
                                         const KernelSupport& support) {
  std::vector<std::vector<Node>> nodes(support.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto k = static_cast<double>(support.first + static_cast<std::int64_t>(i));
    if (sampling == KernelSampling::Point) {
      nodes[i] = {{k / fs, 1.0}};
      continue;
    }
    const double lo = std::max(k - 0.5, g.first_arrival() * fs);
    const double hi = std::min(k + 0.5, g.last_arrival() * fs);
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t j = 0; j < kGaussX.size(); ++j) {
      nodes[i].push_back({(mid - half * kGaussX[j]) / fs, half * kGaussW[j]});
      nodes[i].push_back({(mid + half * kGaussX[j]) / fs, half * kGaussW[j]});
    }
  }
  return nodes;
}

}  // namespace

std::vector<double> kernel_sequence(const WavefrontGeometry& g, int n, int m, int v, int u, double fs,
                                    KernelSampling sampling) {
  const KernelSupport s = kernel_support(g, fs, sampling);
  std::vector<double> out(s.size(), 0.0);
  if (m != u) return out;
  const double scale = g.speed_of_sound / (2.0 * g.radius * g.source_distance);
  const auto nodes = tap_nodes(g, fs, sampling, s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto& nd : nodes[i]) {
      out[i] += nd.weight * scale * norm_legendre(v, u, cos_theta0_src(g, nd.dt)) * norm_legendre(n, m, cos_theta0(g, nd.dt));
    }
  }
  return out;
}

KernelSampling parse_kernel_sampling(const std::string& s) {
  if (s == "point") return KernelSampling::Point;
  if (s == "cell_average") return KernelSampling::CellAverage;
  throw DomainError("unknown kernel sampling '" + s + "' (expected point or cell_average)");
}

std::string to_string(KernelSampling s) { return s == KernelSampling::Point ? "point" : "cell_average"; }

SHTimeSeries propagate_anechoic(const SHTimeSeries& source, const WavefrontGeometry& g, int output_order,
                                KernelSampling sampling) {
  g.validate();
  if (output_order < 0 || output_order > kMaxDegree) throw DomainError("propagate_anechoic: output order out of range");
  const double fs = source.fs();
  const KernelSupport support = kernel_support(g, fs, sampling);
  const int order_in = source.order();
  const int mmax = std::min(order_in, output_order);

  const std::size_t taps = support.size();
  const std::size_t frames_in = source.frames();
  SHTimeSeries out(output_order, fs, frames_in == 0 ? 0 : frames_in + taps - 1, source.start() + support.first);
  if (frames_in == 0 || taps == 0) return out;

  // Normalized Legendre tables at every evaluation node; kernels for -m equal those for +m.
  const double scale = g.speed_of_sound / (2.0 * g.radius * g.source_distance) / fs;
  const auto nodes = tap_nodes(g, fs, sampling, support);
  const std::size_t wo = sh_count(output_order), wi = sh_count(order_in);
  std::vector<std::size_t> node_begin(taps + 1, 0);
  for (std::size_t i = 0; i < taps; ++i) node_begin[i + 1] = node_begin[i] + nodes[i].size();
  std::vector<double> p_obs(node_begin[taps] * wo);
  std::vector<double> p_src(node_begin[taps] * wi);
  std::vector<double> node_weight(node_begin[taps]);
  for (std::size_t i = 0; i < taps; ++i) {
    for (std::size_t j = 0; j < nodes[i].size(); ++j) {
      const std::size_t p = node_begin[i] + j;
      node_weight[p] = nodes[i][j].weight * scale;
      norm_legendre_table(output_order, cos_theta0(g, nodes[i][j].dt), std::span<double>(p_obs).subspan(p * wo, wo));
      norm_legendre_table(order_in, cos_theta0_src(g, nodes[i][j].dt), std::span<double>(p_src).subspan(p * wi, wi));
    }
  }

  std::vector<double> kernel(taps);
  for (int m = -mmax; m <= mmax; ++m) {
    const int am = std::abs(m);
    for (int n = am; n <= output_order; ++n) {
      for (int v = am; v <= order_in; ++v) {
        for (std::size_t i = 0; i < taps; ++i) {
          double acc = 0.0;
          for (std::size_t p = node_begin[i]; p < node_begin[i + 1]; ++p) {
            acc += node_weight[p] * p_src[p * wi + sh_index(v, am)] * p_obs[p * wo + sh_index(n, am)];
          }
          kernel[i] = acc;
        }
        for (std::size_t j = 0; j < frames_in; ++j) {
          const Complex gam = source.at(j, v, m);
          if (gam == Complex{}) continue;
          for (std::size_t i = 0; i < taps; ++i) out.at(j + i, n, m) += gam * kernel[i];
        }
      }
    }
  }
  return out;
}

}  // namespace tdw
