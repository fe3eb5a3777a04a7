#include "tdwsmir/array.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tdwsmir/audio_io.hpp"
#include "tdwsmir/error.hpp"

namespace tdw {
namespace {

// em32 capsule (theta, phi) in degrees.
constexpr std::array<std::array<double, 2>, 32> kEigenmikeDegrees = {{
    {69, 0},   {90, 32},  {111, 0},  {90, 328}, {32, 0},   {55, 45},  {90, 69},  {125, 45},
    {148, 0},  {125, 315}, {90, 291}, {55, 315}, {21, 91},  {58, 90},  {121, 90}, {159, 89},
    {69, 180}, {90, 212}, {111, 180}, {90, 148}, {32, 180}, {55, 225}, {90, 249}, {125, 225},
    {148, 180}, {125, 135}, {90, 111}, {55, 135}, {21, 269}, {58, 270}, {122, 270}, {159, 271},
}};

const std::vector<SphericalAngles>& eigenmike_table() {
  static const std::vector<SphericalAngles> table = [] {
    std::vector<SphericalAngles> t;
    for (const auto& d : kEigenmikeDegrees) t.push_back({d[0] * M_PI / 180.0, d[1] * M_PI / 180.0});
    return t;
  }();
  return table;
}

std::string join_values(const std::vector<double>& v) {
  std::string s;
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    if (i) s += ',';
    s += buf;
  }
  return s;
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::strtod(cell.c_str(), nullptr));
  return out;
}

}  // namespace

std::span<const SphericalAngles> eigenmike32_directions() { return eigenmike_table(); }

MicArraySpec MicArraySpec::eigenmike32(const Vec3& center, double radius) {
  MicArraySpec a;
  a.center = center;
  a.radius = radius;
  a.mics.assign(eigenmike_table().begin(), eigenmike_table().end());
  return a;
}

void MicArraySpec::validate() const {
  if (!(radius > 0.0)) throw DomainError("mic array: radius must be positive");
  if (mics.empty()) throw DomainError("mic array: no microphones");
  for (const auto& m : mics) {
    if (!(m.theta >= 0.0 && m.theta <= M_PI) || !std::isfinite(m.phi)) {
      throw DomainError("mic array: invalid direction");
    }
  }
}

std::vector<SphericalAngles> load_direction_table(const std::filesystem::path& path) {
  const CsvMatrix m = read_csv_matrix(path);
  if (m.columns.size() != 2) throw IoError(path.string(), "direction table needs two columns: theta_rad,phi_rad");
  std::vector<SphericalAngles> out;
  for (std::size_t i = 0; i < m.columns[0].size(); ++i) out.push_back({m.columns[0][i], m.columns[1][i]});
  if (out.empty()) throw IoError(path.string(), "direction table is empty");
  return out;
}

MicSignals synthesize_mic_signals(const SHTimeSeries& zeta, const MicArraySpec& array) {
  array.validate();
  MicSignals out;
  out.fs = zeta.fs();
  out.directions = array.mics;
  const std::size_t len = zeta.frames();
  const std::size_t width = zeta.width();
  out.channels.assign(array.mics.size(), std::vector<double>(len, 0.0));

  double real_energy = 0.0, imag_energy = 0.0;
  std::vector<Complex> y(width);
  for (std::size_t q = 0; q < array.mics.size(); ++q) {
    sph_harmonics(zeta.order(), array.mics[q].theta, array.mics[q].phi, y);
    auto& ch = out.channels[q];
    for (std::size_t k = 0; k < len; ++k) {
      const auto f = zeta.frame(k);
      Complex s{};
      for (std::size_t i = 0; i < width; ++i) s += f[i] * y[i];
      ch[k] = s.real();
      real_energy += s.real() * s.real();
      imag_energy += s.imag() * s.imag();
    }
  }
  if (std::sqrt(imag_energy) > 1e-9 * std::sqrt(real_energy) && imag_energy > 0.0) {
    throw ModelError("synthesized mic signals have a non-negligible imaginary part (" +
                     std::to_string(std::sqrt(imag_energy / std::max(real_energy, 1e-300))) +
                     " relative); coefficients are not conjugate-symmetric");
  }
  return out;
}

std::vector<double> design_lowpass(double fs, const LowpassSpec& spec) {
  const double cutoff = spec.cutoff_hz > 0.0 ? spec.cutoff_hz : 0.9 * fs / 2.0;
  if (!(cutoff > 0.0 && cutoff < fs / 2.0)) {
    throw DomainError("lowpass: cutoff " + std::to_string(cutoff) + " Hz must lie in (0, fs/2)");
  }
  if (spec.taps < 1 || spec.taps % 2 == 0) throw DomainError("lowpass: tap count must be odd and positive");
  if (!(spec.kaiser_beta >= 0.0)) throw DomainError("lowpass: Kaiser beta must be non-negative");

  const int centre = spec.taps / 2;
  const double wc = 2.0 * cutoff / fs;
  const double norm_i0 = std::cyl_bessel_i(0.0, spec.kaiser_beta);
  std::vector<double> h(spec.taps);
  double sum = 0.0;
  for (int k = 0; k < spec.taps; ++k) {
    const double t = k - centre;
    const double x = M_PI * wc * t;
    const double sinc = t == 0 ? 1.0 : std::sin(x) / x;
    const double ratio = centre == 0 ? 0.0 : t / centre;
    const double w = std::cyl_bessel_i(0.0, spec.kaiser_beta * std::sqrt(std::max(0.0, 1.0 - ratio * ratio))) / norm_i0;
    h[k] = wc * sinc * w;
    sum += h[k];
  }
  for (double& v : h) v /= sum;
  return h;
}

std::vector<double> filter_zero_phase(std::span<const double> x, std::span<const double> taps) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto centre = static_cast<std::ptrdiff_t>(taps.size() / 2);
  std::vector<double> y(x.size(), 0.0);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(taps.size()); ++i) {
      const std::ptrdiff_t src = j + centre - i;
      if (src >= 0 && src < n) acc += taps[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(src)];
    }
    y[static_cast<std::size_t>(j)] = acc;
  }
  return y;
}

MicSignals lowpass(const MicSignals& signals, const LowpassSpec& spec) {
  const auto taps = design_lowpass(signals.fs, spec);
  MicSignals out = signals;
  for (auto& ch : out.channels) ch = filter_zero_phase(ch, taps);
  out.filter = spec;
  return out;
}

SHTimeSeries lowpass(const SHTimeSeries& series, const LowpassSpec& spec) {
  const auto taps = design_lowpass(series.fs(), spec);
  SHTimeSeries out = series;
  const auto centre = static_cast<std::ptrdiff_t>(taps.size() / 2);
  const auto n = static_cast<std::ptrdiff_t>(series.frames());
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    auto dst = out.frame(static_cast<std::size_t>(j));
    std::fill(dst.begin(), dst.end(), Complex{});
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(taps.size()); ++i) {
      const std::ptrdiff_t src = j + centre - i;
      if (src < 0 || src >= n) continue;
      const auto f = series.frame(static_cast<std::size_t>(src));
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += taps[static_cast<std::size_t>(i)] * f[c];
    }
  }
  return out;
}

MicSignals normalize_peak(const MicSignals& signals) {
  double peak = 0.0;
  for (const auto& ch : signals.channels) {
    for (double v : ch) peak = std::max(peak, std::abs(v));
  }
  if (!(peak > 0.0)) throw ModelError("normalize_peak: all-zero input");
  MicSignals out = signals;
  const double g = 1.0 / peak;
  for (auto& ch : out.channels) {
    for (double& v : ch) v *= g;
  }
  out.gain = signals.gain * g;
  out.normalized = true;
  return out;
}

OutputFormat parse_output_format(const std::string& s) {
  if (s == "wav") return OutputFormat::Wav;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "both") return OutputFormat::Both;
  throw DomainError("unknown output format '" + s + "' (expected wav, csv or both)");
}

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Wav: return "wav";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Both: return "both";
  }
  return "both";
}

std::vector<std::filesystem::path> write_outputs(const MicSignals& signals, const std::filesystem::path& base,
                                                 OutputFormat format) {
  std::vector<std::filesystem::path> written;
  if (base.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(base.parent_path(), ec);
    if (ec) throw IoError(base.parent_path().string(), "cannot create directory: " + ec.message());
  }
  if (format == OutputFormat::Wav || format == OutputFormat::Both) {
    auto p = base;
    p += ".wav";
    write_wav_float32(p, AudioData{signals.fs, signals.channels});
    written.push_back(p);
  }
  if (format == OutputFormat::Csv || format == OutputFormat::Both) {
    auto p = base;
    p += ".csv";
    std::vector<double> theta, phi;
    for (const auto& d : signals.directions) {
      theta.push_back(d.theta);
      phi.push_back(d.phi);
    }
    char fsbuf[64];
    std::snprintf(fsbuf, sizeof fsbuf, " fs_hz=%.17g", signals.fs);
    char gainbuf[96];
    std::snprintf(gainbuf, sizeof gainbuf, " normalized=%d gain=%.17g", signals.normalized ? 1 : 0, signals.gain);
    std::vector<std::string> comments = {fsbuf, " channels=" + std::to_string(signals.channels.size()),
                                         " theta_rad=" + join_values(theta), " phi_rad=" + join_values(phi), gainbuf};
    if (signals.filter) {
      char fbuf[128];
      std::snprintf(fbuf, sizeof fbuf, " lowpass cutoff_hz=%.17g taps=%d kaiser_beta=%.17g", signals.filter->cutoff_hz,
                    signals.filter->taps, signals.filter->kaiser_beta);
      comments.emplace_back(fbuf);
    }
    std::vector<std::string> header;
    for (std::size_t q = 0; q < signals.channels.size(); ++q) header.push_back("mic" + std::to_string(q + 1));
    write_csv_matrix(p, comments, header, signals.channels);
    written.push_back(p);
  }
  return written;
}

MicSignals read_signals_csv(const std::filesystem::path& path) {
  CsvMatrix m = read_csv_matrix(path);
  MicSignals s;
  std::vector<double> theta, phi;
  for (const auto& c : m.comments) {
    const auto eq = c.find('=');
    if (eq == std::string::npos) continue;
    std::string key = c.substr(0, eq);
    key.erase(0, key.find_first_not_of(' '));
    const std::string value = c.substr(eq + 1);
    if (key == "fs_hz") s.fs = std::strtod(value.c_str(), nullptr);
    else if (key == "theta_rad") theta = parse_values(value);
    else if (key == "phi_rad") phi = parse_values(value);
  }
  if (!(s.fs > 0.0)) throw IoError(path.string(), "missing fs_hz header");
  s.channels = std::move(m.columns);
  if (theta.size() == s.channels.size() && phi.size() == s.channels.size()) {
    for (std::size_t i = 0; i < theta.size(); ++i) s.directions.push_back({theta[i], phi[i]});
  }
  return s;
}

}  // namespace tdw
