#include "tdwsmir/directivity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <Eigen/SVD>
#include <json.hpp>

#include "tdwsmir/audio_io.hpp"
#include "tdwsmir/error.hpp"
#include "tdwsmir/rotation.hpp"

namespace tdw {
namespace {

Eigen::MatrixXcd synthesis_matrix(const std::vector<SphericalAngles>& dirs, int order) {
  Eigen::MatrixXcd y(static_cast<Eigen::Index>(dirs.size()), static_cast<Eigen::Index>(sh_count(order)));
  std::vector<Complex> row(sh_count(order));
  for (std::size_t q = 0; q < dirs.size(); ++q) {
    sph_harmonics(order, dirs[q].theta, dirs[q].phi, row);
    for (std::size_t i = 0; i < row.size(); ++i) y(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(i)) = row[i];
  }
  return y;
}

// Symmetric pulse of `width` taps (odd) with unit sum, Hann-shaped.
std::vector<double> hann_pulse(int half_width) {
  std::vector<double> p(2 * half_width + 1);
  double sum = 0.0;
  for (int k = -half_width; k <= half_width; ++k) {
    const double w = 0.5 * (1.0 + std::cos(M_PI * k / (half_width + 1)));
    p[k + half_width] = w;
    sum += w;
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

double AnalyticPattern::a() const {
  switch (kind) {
    case PatternKind::Omnidirectional: return 1.0;
    case PatternKind::Cardioid: return 0.5;
    case PatternKind::Hypercardioid: return 0.25;
    case PatternKind::Subcardioid: return 0.75;
    case PatternKind::Bidirectional: return 0.0;
  }
  return 1.0;
}

double AnalyticPattern::b() const { return 1.0 - a(); }

std::string AnalyticPattern::name() const {
  switch (kind) {
    case PatternKind::Omnidirectional: return "omnidirectional";
    case PatternKind::Cardioid: return "cardioid";
    case PatternKind::Hypercardioid: return "hypercardioid";
    case PatternKind::Subcardioid: return "subcardioid";
    case PatternKind::Bidirectional: return "bidirectional";
  }
  return "omnidirectional";
}

AnalyticPattern AnalyticPattern::parse(std::string_view name) {
  if (name == "omnidirectional" || name == "omni") return {PatternKind::Omnidirectional};
  if (name == "cardioid") return {PatternKind::Cardioid};
  if (name == "hypercardioid") return {PatternKind::Hypercardioid};
  if (name == "subcardioid") return {PatternKind::Subcardioid};
  if (name == "bidirectional" || name == "figure8") return {PatternKind::Bidirectional};
  throw DomainError("unknown directivity pattern '" + std::string(name) + "'");
}

SHMatrix pattern_to_sh(const AnalyticPattern& pattern, int order) {
  if (order < 1 && pattern.b() != 0.0) {
    throw DomainError("pattern_to_sh: " + pattern.name() + " needs order >= 1");
  }
  SHMatrix m(std::max(order, 0));
  m(0, 0) = std::sqrt(4.0 * M_PI) * pattern.a();
  if (order >= 1) m(1, 0) = std::sqrt(4.0 * M_PI / 3.0) * pattern.b();
  return m;
}

void MeasuredDirectivity::validate() const {
  if (!(radius > 0.0)) throw DomainError("measured directivity: radius must be positive");
  if (!(fs > 0.0)) throw DomainError("measured directivity: sample rate must be positive");
  if (directions.size() != responses.size()) {
    throw DomainError("measured directivity: " + std::to_string(directions.size()) + " directions but " +
                      std::to_string(responses.size()) + " responses");
  }
  if (!weights.empty() && weights.size() != directions.size()) {
    throw DomainError("measured directivity: weight count does not match direction count");
  }
  for (const auto& r : responses) {
    if (r.size() != length()) throw DomainError("measured directivity: responses differ in length");
  }
  for (const auto& d : directions) {
    if (!(d.theta >= 0.0 && d.theta <= M_PI)) throw DomainError("measured directivity: theta outside [0, pi]");
  }
}

double analysis_condition_number(const std::vector<SphericalAngles>& directions, int order) {
  const Eigen::MatrixXcd y = synthesis_matrix(directions, order);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(y);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : INFINITY;
}

SHTimeSeries dir_ir_to_sh(const MeasuredDirectivity& meas, int order, const AnalysisOptions& opts) {
  meas.validate();
  if (order < 0 || order > kMaxDegree) throw DomainError("dir_ir_to_sh: order out of range");
  const std::size_t q = meas.directions.size();
  const std::size_t ncoef = sh_count(order);
  if (q < ncoef) {
    throw DomainError("dir_ir_to_sh: " + std::to_string(q) + " directions cannot resolve order " +
                      std::to_string(order) + " (needs at least " + std::to_string(ncoef) + ")");
  }

  const Eigen::MatrixXcd y = synthesis_matrix(meas.directions, order);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
  if (!(cond <= opts.max_condition)) {
    throw DomainError("dir_ir_to_sh: direction grid is ill-conditioned for order " + std::to_string(order) +
                      " (condition number " + std::to_string(cond) + " exceeds " +
                      std::to_string(opts.max_condition) + ")");
  }

  Eigen::MatrixXcd analysis;
  if (!meas.weights.empty()) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(q));
    for (std::size_t i = 0; i < q; ++i) w(static_cast<Eigen::Index>(i)) = meas.weights[i];
    analysis = y.adjoint() * w.asDiagonal();
  } else {
    Eigen::VectorXd filt(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) filt(i) = s(i) / (s(i) * s(i) + opts.regularization);
    analysis = svd.matrixV() * filt.asDiagonal() * svd.matrixU().adjoint();
  }

  std::size_t skip = 0;
  double gain = 1.0;
  if (opts.farfield_compensation) {
    skip = static_cast<std::size_t>(std::llround(meas.radius * meas.fs / opts.speed_of_sound));
    gain = 4.0 * M_PI * meas.radius;
  }
  const std::size_t len = meas.length() > skip ? meas.length() - skip : 0;
  SHTimeSeries out(order, meas.fs, len);
  Eigen::VectorXcd h(static_cast<Eigen::Index>(q));
  for (std::size_t k = 0; k < len; ++k) {
    for (std::size_t i = 0; i < q; ++i) h(static_cast<Eigen::Index>(i)) = gain * meas.responses[i][k + skip];
    const Eigen::VectorXcd c = analysis * h;
    auto f = out.frame(k);
    for (std::size_t i = 0; i < ncoef; ++i) f[i] = c(static_cast<Eigen::Index>(i));
  }
  return out;
}

SHMatrix rotate_directivity(const SHMatrix& coeffs, const EulerAngles& angles) {
  return SHRotation(coeffs.order(), angles).apply(coeffs);
}

SHTimeSeries rotate_directivity(const SHTimeSeries& coeffs, const EulerAngles& angles) {
  return SHRotation(coeffs.order(), angles).apply(coeffs);
}

std::vector<double> synthesize_direction(const SHTimeSeries& coeffs, double theta, double phi) {
  const auto y = sph_harmonics(coeffs.order(), theta, phi);
  std::vector<double> out(coeffs.frames());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto f = coeffs.frame(k);
    Complex s{};
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * y[i];
    out[k] = s.real();
  }
  return out;
}

SHTimeSeries source_coefficients(const SourceSpec& source, double fs) {
  SHTimeSeries local;
  if (const auto* pattern = std::get_if<AnalyticPattern>(&source.directivity)) {
    local = SHTimeSeries::impulse(pattern_to_sh(*pattern, std::max(source.order, pattern->b() != 0.0 ? 1 : 0)), fs);
  } else {
    const auto& meas = std::get<MeasuredDirectivity>(source.directivity);
    if (meas.fs != fs) {
      throw ModelError("directivity bundle sampled at " + std::to_string(meas.fs) + " Hz but simulation runs at " +
                       std::to_string(fs) + " Hz");
    }
    local = dir_ir_to_sh(meas, source.order, source.analysis);
  }
  return rotate_directivity(local, source.orientation);
}

MeasuredDirectivity load_directivity_bundle(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError(manifest.string(), "directivity bundle manifest not found");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(manifest.string(), std::string("malformed manifest: ") + e.what());
  }

  MeasuredDirectivity meas;
  std::filesystem::path data;
  std::size_t channels = 0;
  try {
    meas.radius = j.at("radius_m").get<double>();
    meas.fs = j.at("sample_rate_hz").get<double>();
    channels = j.at("channels").get<std::size_t>();
    for (const auto& row : j.at("directions")) {
      if (row.size() != 2) throw IoError(manifest.string(), "each direction needs [theta_rad, phi_rad]");
      meas.directions.push_back({row[0].get<double>(), row[1].get<double>()});
    }
    if (j.contains("weights")) meas.weights = j.at("weights").get<std::vector<double>>();
    data = j.at("data").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(manifest.string(), std::string("invalid manifest: ") + e.what());
  }
  if (data.is_relative()) data = manifest.parent_path() / data;
  if (meas.directions.size() != channels) {
    throw IoError(manifest.string(), "channels = " + std::to_string(channels) + " but " +
                                         std::to_string(meas.directions.size()) + " directions listed");
  }

  const std::string ext = data.extension().string();
  if (ext == ".wav" || ext == ".WAV") {
    AudioData audio = read_wav_float32(data);
    if (audio.fs != meas.fs) throw IoError(data.string(), "sample rate disagrees with manifest");
    meas.responses = std::move(audio.channels);
  } else {
    CsvMatrix m = read_csv_matrix(data);
    meas.responses = std::move(m.columns);
  }
  if (meas.responses.size() != channels) {
    throw IoError(data.string(), "holds " + std::to_string(meas.responses.size()) + " channels, manifest declares " +
                                     std::to_string(channels));
  }
  meas.validate();
  return meas;
}

void save_directivity_bundle(const std::filesystem::path& manifest, const MeasuredDirectivity& meas,
                             const std::string& data_file) {
  meas.validate();
  nlohmann::json j;
  j["radius_m"] = meas.radius;
  j["sample_rate_hz"] = meas.fs;
  j["channels"] = meas.directions.size();
  nlohmann::json dirs = nlohmann::json::array();
  for (const auto& d : meas.directions) dirs.push_back({d.theta, d.phi});
  j["directions"] = dirs;
  if (!meas.weights.empty()) j["weights"] = meas.weights;
  j["data"] = data_file;

  if (manifest.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(manifest.parent_path(), ec);
    if (ec) throw IoError(manifest.parent_path().string(), "cannot create directory: " + ec.message());
  }
  const std::filesystem::path data = manifest.parent_path() / data_file;
  const std::string ext = data.extension().string();
  if (ext == ".wav" || ext == ".WAV") {
    write_wav_float32(data, AudioData{meas.fs, meas.responses});
  } else {
    write_csv_matrix(data, {}, {}, meas.responses);
  }
  std::ofstream out(manifest);
  if (!out) throw IoError(manifest.string(), "cannot open for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError(manifest.string(), "write failed");
}

std::vector<SphericalAngles> fibonacci_grid(std::size_t q) {
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  std::vector<SphericalAngles> out(q);
  for (std::size_t i = 0; i < q; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(q);
    out[i].theta = std::acos(z);
    out[i].phi = std::fmod(golden * static_cast<double>(i), 2.0 * M_PI);
  }
  return out;
}

SHTimeSeries synthetic_loudspeaker_coefficients(double fs, int order, double radius, double speed_of_sound) {
  if (order < 0 || order > kMaxDegree) throw DomainError("synthetic directivity: order out of range");
  const auto delay = static_cast<std::size_t>(std::llround(radius * fs / speed_of_sound));
  const double spread = 1.0 / (4.0 * M_PI * radius);

  // Every term is a zero-phase pulse centred on the same sample. Degree 0 is a
  // mild low-pass; higher degrees are DC-free band-passes so the pattern is
  // omnidirectional at low frequencies and narrows with frequency.
  const int half = 8;
  const std::size_t centre = delay + half;
  SHTimeSeries out(order, fs, centre + half + 1);
  const std::vector<double> sharp = hann_pulse(1);
  auto add = [&](int n, int m, Complex weight, const std::vector<double>& pulse) {
    const int h = static_cast<int>(pulse.size() / 2);
    for (int k = -h; k <= h; ++k) out.at(centre + k, n, m) += spread * weight * pulse[k + h];
  };

  add(0, 0, std::sqrt(4.0 * M_PI), sharp);
  for (int v = 1; v <= order; ++v) {
    const std::vector<double> wide = hann_pulse(2 + v);
    std::vector<double> band(wide.size(), 0.0);
    const int off = static_cast<int>(wide.size() / 2) - 1;
    for (std::size_t i = 0; i < wide.size(); ++i) band[i] = -wide[i];
    for (int i = 0; i < 3; ++i) band[off + i] += sharp[i];
    // On-axis weight 0.6 * 0.7^(v-1) per degree.
    const double axial = 0.6 * std::pow(0.7, v - 1);
    add(v, 0, axial * std::sqrt(4.0 * M_PI / (2.0 * v + 1.0)), band);
    if (v == 1 || v == 3) {
      const Complex c = 0.15 * std::polar(1.0, 0.7 * v);
      add(v, 1, c, band);
      add(v, -1, -std::conj(c), band);
    }
    if (v == 2 || v == 4) {
      const Complex c = 0.1 * std::polar(1.0, -0.4 * v);
      add(v, 2, c, band);
      add(v, -2, std::conj(c), band);
    }
  }
  return out;
}

MeasuredDirectivity synthetic_loudspeaker_bundle(double fs, const std::vector<SphericalAngles>& grid, int order,
                                                 double radius, double speed_of_sound) {
  const SHTimeSeries coeffs = synthetic_loudspeaker_coefficients(fs, order, radius, speed_of_sound);
  MeasuredDirectivity meas;
  meas.radius = radius;
  meas.fs = fs;
  meas.directions = grid;
  for (const auto& d : grid) meas.responses.push_back(synthesize_direction(coeffs, d.theta, d.phi));
  return meas;
}

}  // namespace tdw
