#include "tdwsmir/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "tdwsmir/audio_io.hpp"
#include "tdwsmir/bessel.hpp"
#include "tdwsmir/error.hpp"
#include "tdwsmir/parallel.hpp"
#include "tdwsmir/rotation.hpp"

namespace tdw {
namespace {

constexpr double kDbFloor = 1e-300;

double to_db(double mag) { return 20.0 * std::log10(std::max(mag, kDbFloor)); }

}  // namespace

void RTF::validate() const {
  for (std::size_t i = 1; i < frequencies.size(); ++i) {
    if (!(frequencies[i] > frequencies[i - 1])) throw DomainError("RTF: frequencies must be strictly increasing");
  }
  for (const auto& ch : channels) {
    if (ch.size() != frequencies.size()) throw DomainError("RTF: channel length differs from frequency grid");
  }
}

std::vector<double> linear_frequencies(double f_lo, double f_hi, std::size_t count) {
  if (count == 0 || !(f_hi >= f_lo) || !(f_lo > 0.0)) throw DomainError("linear_frequencies: invalid grid");
  std::vector<double> f(count);
  for (std::size_t i = 0; i < count; ++i) {
    f[i] = count == 1 ? f_lo : f_lo + (f_hi - f_lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return f;
}

std::vector<double> p2p_rir(const std::vector<ImageSource>& images, const Vec3& mic, const SimulationConfig& config,
                            std::size_t length) {
  config.validate();
  if (length == 0 && config.duration_s > 0.0) length = static_cast<std::size_t>(std::llround(config.duration_s * config.fs));
  if (length == 0) {
    for (const auto& img : images) {
      if (img.attenuation == 0.0) continue;
      const double d = norm(img.position - mic);
      length = std::max<std::size_t>(length, static_cast<std::size_t>(std::llround(d * config.fs / config.speed_of_sound)) + 1);
    }
  }
  std::vector<double> h(length, 0.0);
  for (const auto& img : images) {
    if (img.attenuation == 0.0) continue;
    const double d = norm(img.position - mic);
    if (!(d > 0.0)) throw ModelError("p2p_rir: image source coincides with the microphone");
    const auto k = static_cast<std::size_t>(std::llround(d * config.fs / config.speed_of_sound));
    if (k < length) h[k] += img.attenuation / (4.0 * M_PI * d);
  }
  return h;
}

std::vector<double> p2p_rir(const RoomSpec& room, const Vec3& source, const Vec3& mic, const Vec3& reference,
                            const SimulationConfig& config, std::size_t length) {
  if (!room.strictly_inside(mic)) throw ModelError("p2p_rir: microphone is not inside the room");
  return p2p_rir(enumerate_images(room, source, reference, config.images), mic, config, length);
}

std::vector<Complex> signal_spectrum(std::span<const double> x, double fs, const std::vector<double>& frequencies) {
  std::vector<Complex> out(frequencies.size());
  for (std::size_t f = 0; f < frequencies.size(); ++f) {
    const double w = 2.0 * M_PI * frequencies[f] / fs;
    const Complex step = std::polar(1.0, -w);
    Complex phasor(1.0, 0.0);
    Complex acc{};
    for (std::size_t k = 0; k < x.size(); ++k) {
      // Re-anchor periodically so phasor rounding does not accumulate.
      if ((k & 255u) == 0) phasor = std::polar(1.0, -w * static_cast<double>(k));
      acc += x[k] * phasor;
      phasor *= step;
    }
    out[f] = acc;
  }
  return out;
}

RTF signal_spectrum(const MicSignals& signals, const std::vector<double>& frequencies) {
  RTF rtf;
  rtf.frequencies = frequencies;
  rtf.validate();
  for (const auto& ch : signals.channels) rtf.channels.push_back(signal_spectrum(ch, signals.fs, frequencies));
  return rtf;
}

RTF smir_rtf(const std::vector<ImageSource>& images, const SHTimeSeries& source_room, const MicArraySpec& array,
             const std::vector<double>& frequencies, const SimulationConfig& config) {
  config.validate();
  array.validate();
  const int order = config.output_order;
  const std::size_t nmics = array.mics.size();

  struct Prepared {
    double distance;
    double attenuation;
    std::vector<Complex> directivity;  // D_i(f) toward the array center
    std::vector<Complex> weights;      // [q * (order+1) + n]: sum_m' D^n_{m'0}(back) Y_n^m'(mic q)
  };
  std::vector<Prepared> prepared;

  std::vector<std::vector<Complex>> mic_harmonics;
  for (const auto& m : array.mics) mic_harmonics.push_back(sph_harmonics(order, m.theta, m.phi));

  std::vector<double> pole(sh_count(source_room.order()));
  norm_legendre_table(source_room.order(), -1.0, pole);

  for (const auto& img : images) {
    if (img.attenuation == 0.0) continue;
    const FrameAlignment frame = frame_align(array.center, img.position);
    if (!(frame.distance > array.radius)) throw ModelError("near-field overlap unsupported in smir_rtf");

    // Same reflection and rotation as the engine; then read the pattern at the
    // source-frame direction of the array center (theta = pi, only m = 0 survives).
    SHTimeSeries gamma = reflect_sh(source_room, img.parity);
    gamma = SHRotation(gamma.order(), frame.to_source_frame).apply(gamma);
    std::vector<double> toward(gamma.frames());
    for (std::size_t k = 0; k < gamma.frames(); ++k) {
      Complex s{};
      for (int v = 0; v <= gamma.order(); ++v) s += gamma.at(k, v, 0) * pole[sh_index(v, 0)];
      toward[k] = s.real();
    }
    Prepared p;
    p.distance = frame.distance;
    p.attenuation = img.attenuation;
    p.directivity = signal_spectrum(toward, config.fs, frequencies);
    for (std::size_t f = 0; f < frequencies.size(); ++f) {
      p.directivity[f] *= std::polar(1.0, -2.0 * M_PI * frequencies[f] * source_room.start_time());
    }

    const SHRotation back(order, frame.back);
    p.weights.assign(nmics * static_cast<std::size_t>(order + 1), Complex{});
    for (int n = 0; n <= order; ++n) {
      SHMatrix unit(order);
      unit(n, 0) = 1.0;
      const SHMatrix col = back.apply(unit);
      for (std::size_t q = 0; q < nmics; ++q) {
        Complex s{};
        for (int m = -n; m <= n; ++m) s += col(n, m) * mic_harmonics[q][sh_index(n, m)];
        p.weights[q * static_cast<std::size_t>(order + 1) + static_cast<std::size_t>(n)] = s;
      }
    }
    prepared.push_back(std::move(p));
  }

  RTF rtf;
  rtf.frequencies = frequencies;
  rtf.validate();
  rtf.channels.assign(nmics, std::vector<Complex>(frequencies.size()));

  parallel_for(frequencies.size(), config.threads, [&](std::size_t f) {
    const double freq = frequencies[f];
    if (!(freq > 0.0)) throw DomainError("smir_rtf: frequencies must be positive");
    const double k = 2.0 * M_PI * freq / config.speed_of_sound;
    const std::vector<double> jn = sph_bessel_j_all(order, k * array.radius);
    std::vector<Complex> radial(static_cast<std::size_t>(order + 1));
    std::vector<Complex> acc(nmics);
    for (const auto& p : prepared) {
      const Complex src = p.attenuation * p.directivity[f];
      const std::vector<double> js = sph_bessel_j_all(order, k * p.distance);
      const std::vector<double> ys = sph_bessel_y_all(order, k * p.distance);
      for (int n = 0; n <= order; ++n) {
        const Complex h2(js[static_cast<std::size_t>(n)], -ys[static_cast<std::size_t>(n)]);
        radial[static_cast<std::size_t>(n)] =
            Complex(0.0, -k) * jn[static_cast<std::size_t>(n)] * h2 * std::sqrt((2.0 * n + 1.0) / (4.0 * M_PI)) * src;
      }
      for (std::size_t q = 0; q < nmics; ++q) {
        Complex s{};
        for (int n = 0; n <= order; ++n) {
          s += radial[static_cast<std::size_t>(n)] * p.weights[q * static_cast<std::size_t>(order + 1) + static_cast<std::size_t>(n)];
        }
        acc[q] += s;
      }
    }
    for (std::size_t q = 0; q < nmics; ++q) rtf.channels[q][f] = acc[q];
  });
  return rtf;
}

RTF smir_rtf(const RoomSpec& room, const SourceSpec& source, const MicArraySpec& array,
             const std::vector<double>& frequencies, const SimulationConfig& config) {
  const SHTimeSeries gamma = source_coefficients(source, config.fs);
  const auto images = enumerate_images(room, source.position, array.center, config.images);
  return smir_rtf(images, gamma, array, frequencies, config);
}

RtfDeviation rtf_compare(const RTF& a, const RTF& b, double f_lo, double f_hi) {
  a.validate();
  b.validate();
  if (a.frequencies != b.frequencies) throw DomainError("rtf_compare: frequency grids differ");
  if (a.channels.size() != b.channels.size()) throw DomainError("rtf_compare: channel counts differ");

  RtfDeviation dev;
  for (std::size_t q = 0; q < a.channels.size(); ++q) {
    double peak_a = 0.0, peak_b = 0.0;
    for (std::size_t f = 0; f < a.frequencies.size(); ++f) {
      peak_a = std::max(peak_a, std::abs(a.channels[q][f]));
      peak_b = std::max(peak_b, std::abs(b.channels[q][f]));
    }
    ChannelDeviation cd;
    std::size_t bins = 0;
    double sum = 0.0;
    for (std::size_t f = 0; f < a.frequencies.size(); ++f) {
      if (a.frequencies[f] < f_lo || a.frequencies[f] > f_hi) continue;
      const double da = to_db(std::abs(a.channels[q][f])) - to_db(peak_a);
      const double db = to_db(std::abs(b.channels[q][f])) - to_db(peak_b);
      const double d = std::abs(da - db);
      cd.max_db = std::max(cd.max_db, d);
      sum += d;
      ++bins;
    }
    cd.mean_db = bins ? sum / static_cast<double>(bins) : 0.0;
    dev.bins = bins;
    dev.max_db = std::max(dev.max_db, cd.max_db);
    dev.mean_db += cd.mean_db;
    dev.channels.push_back(cd);
  }
  if (!dev.channels.empty()) dev.mean_db /= static_cast<double>(dev.channels.size());
  return dev;
}

void write_rtf_csv(const std::filesystem::path& path, const RTF& rtf) {
  rtf.validate();
  std::vector<std::string> header = {"frequency_hz"};
  std::vector<std::vector<double>> cols = {rtf.frequencies};
  for (std::size_t q = 0; q < rtf.channels.size(); ++q) {
    header.push_back("mag_db_" + std::to_string(q + 1));
    header.push_back("phase_rad_" + std::to_string(q + 1));
    std::vector<double> mag, phase;
    for (const auto& c : rtf.channels[q]) {
      mag.push_back(to_db(std::abs(c)));
      phase.push_back(std::arg(c));
    }
    cols.push_back(std::move(mag));
    cols.push_back(std::move(phase));
  }
  write_csv_matrix(path, {}, header, cols);
}

}  // namespace tdw
