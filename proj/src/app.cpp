#include "tdwsmir/app.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "tdwsmir/audio_io.hpp"
#include "tdwsmir/error.hpp"

namespace tdw {
namespace {

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError(path.string(), "write failed");
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());
}

SimulationConfig effective_simulation(const RunConfig& config, bool anechoic) {
  SimulationConfig sim = config.simulation;
  if (anechoic) sim.images = ImageSelection::count(1);
  return sim;
}

nlohmann::json band_json(const BandSummary& b) {
  return {{"f_lo_hz", b.f_lo},
          {"f_hi_hz", b.f_hi},
          {"bins", b.deviation.bins},
          {"max_db", b.deviation.max_db},
          {"mean_db", b.deviation.mean_db}};
}

}  // namespace

MicSignals simulate_mic_signals(const RunConfig& config, bool anechoic) {
  validate_run_config(config);
  const SimulationConfig sim = effective_simulation(config, anechoic);
  const SourceSpec source = make_source_spec(config);
  const MicArraySpec array = make_array_spec(config);
  const SHTimeSeries zeta = simulate_rir_sh(config.room, source, array.center, array.radius, sim);
  return synthesize_mic_signals(zeta, array);
}

MicSignals postprocess(const MicSignals& signals, const RunConfig& config) {
  MicSignals out = config.filter.enabled ? lowpass(signals, config.filter.lowpass) : signals;
  if (config.output.normalize) out = normalize_peak(out);
  return out;
}

SimulateReport run_simulate(const RunConfig& config, bool anechoic) {
  ensure_directory(config.output.directory);
  SimulateReport report;
  const auto base = config.output.directory / config.output.basename;

  const MicSignals main = postprocess(simulate_mic_signals(config, anechoic), config);
  report.channels = main.channels.size();
  report.samples = main.length();
  for (const auto& f : write_outputs(main, base, config.output.format)) report.files.push_back(f);

  if (config.output.write_anechoic && !anechoic) {
    auto side = base;
    side += "_anechoic";
    const MicSignals an = postprocess(simulate_mic_signals(config, true), config);
    for (const auto& f : write_outputs(an, side, config.output.format)) report.files.push_back(f);
  }

  RunConfig resolved = config;
  if (anechoic) resolved.simulation.images = ImageSelection::count(1);
  auto meta = base;
  meta += ".json";
  write_json(meta, to_json(resolved));
  report.files.push_back(meta);
  return report;
}

CompareReport run_compare(const RunConfig& config, bool anechoic) {
  ensure_directory(config.output.directory);
  const auto& cc = config.compare;
  const std::vector<double> freqs = linear_frequencies(cc.f_min_hz, cc.f_max_hz, cc.bins);

  MicSignals tdw_signals = simulate_mic_signals(config, anechoic);
  if (config.filter.enabled) tdw_signals = lowpass(tdw_signals, config.filter.lowpass);
  const RTF tdw_rtf = signal_spectrum(tdw_signals, freqs);

  RTF reference;
  if (cc.against) {
    const MicSignals other = read_signals_csv(*cc.against);
    if (other.fs != tdw_signals.fs) {
      throw ModelError("sample rate mismatch: " + cc.against->string() + " has " + std::to_string(other.fs) +
                       " Hz, this run uses " + std::to_string(tdw_signals.fs) + " Hz");
    }
    if (other.channels.size() != tdw_signals.channels.size()) {
      throw ModelError("channel count mismatch against " + cc.against->string());
    }
    reference = signal_spectrum(other, freqs);
  } else {
    reference = smir_rtf(config.room, make_source_spec(config), make_array_spec(config), freqs,
                         effective_simulation(config, anechoic));
  }

  CompareReport report;
  const double split = std::clamp(cc.split_hz, cc.f_min_hz, cc.f_max_hz);
  report.bands.push_back({cc.f_min_hz, split, rtf_compare(tdw_rtf, reference, cc.f_min_hz, split)});
  report.bands.push_back({split, cc.f_max_hz, rtf_compare(tdw_rtf, reference, split, cc.f_max_hz)});
  report.bands.push_back({cc.f_min_hz, cc.f_max_hz, rtf_compare(tdw_rtf, reference, cc.f_min_hz, cc.f_max_hz)});

  const auto base = config.output.directory / config.output.basename;
  auto path_for = [&](const std::string& tail) {
    auto p = base;
    p += tail;
    return p;
  };

  const auto rtf_tdw = path_for("_rtf_tdw.csv");
  const auto rtf_ref = path_for(cc.against ? "_rtf_against.csv" : "_rtf_oracle.csv");
  write_rtf_csv(rtf_tdw, tdw_rtf);
  write_rtf_csv(rtf_ref, reference);

  // Per-mic deviation table.
  std::vector<std::string> header = {"mic"};
  std::vector<std::vector<double>> cols(1);
  for (std::size_t q = 0; q < tdw_rtf.channels.size(); ++q) cols[0].push_back(static_cast<double>(q + 1));
  for (const auto& b : report.bands) {
    char tag[64];
    std::snprintf(tag, sizeof tag, "%g_%g_hz", b.f_lo, b.f_hi);
    header.push_back(std::string("max_db_") + tag);
    header.push_back(std::string("mean_db_") + tag);
    std::vector<double> mx, mn;
    for (const auto& ch : b.deviation.channels) {
      mx.push_back(ch.max_db);
      mn.push_back(ch.mean_db);
    }
    cols.push_back(std::move(mx));
    cols.push_back(std::move(mn));
  }
  const auto dev = path_for("_deviation.csv");
  write_csv_matrix(dev, {}, header, cols);

  nlohmann::json summary = {{"reference", cc.against ? cc.against->string() : "oracle"},
                            {"anechoic", anechoic},
                            {"below_split", band_json(report.bands[0])},
                            {"above_split", band_json(report.bands[1])},
                            {"full", band_json(report.bands[2])}};
  const auto sum_path = path_for("_compare.json");
  write_json(sum_path, summary);

  report.files = {rtf_tdw, rtf_ref, dev, sum_path};
  return report;
}

void print_compare_summary(std::ostream& os, const CompareReport& report) {
  static const char* names[] = {"below split", "above split", "full range"};
  for (std::size_t i = 0; i < report.bands.size(); ++i) {
    const auto& b = report.bands[i];
    char line[200];
    std::snprintf(line, sizeof line, "%-12s [%7.1f, %7.1f] Hz: max %.3f dB, mean %.3f dB (%zu bins)\n", names[i % 3],
                  b.f_lo, b.f_hi, b.deviation.max_db, b.deviation.mean_db, b.deviation.bins);
    os << line;
  }
}

std::vector<std::pair<double, double>> run_pattern(const std::string& kind, int order, std::size_t points, double phi) {
  const AnalyticPattern p = AnalyticPattern::parse(kind);
  if (points < 2) throw DomainError("pattern: need at least two points");
  const SHMatrix c = pattern_to_sh(p, order);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < points; ++i) {
    const double theta = M_PI * static_cast<double>(i) / static_cast<double>(points - 1);
    out.emplace_back(theta, c.evaluate(theta, phi).real());
  }
  return out;
}

}  // namespace tdw
