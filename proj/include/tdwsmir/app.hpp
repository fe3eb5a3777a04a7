#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tdwsmir/config.hpp"
#include "tdwsmir/oracle.hpp"

namespace tdw {

/// Mic signals for a configuration, before normalization. With `anechoic` the
/// image selection is forced to the direct path only.
MicSignals simulate_mic_signals(const RunConfig& config, bool anechoic);

/// Applies the configured filter and normalization.
MicSignals postprocess(const MicSignals& signals, const RunConfig& config);

struct SimulateReport {
  std::vector<std::filesystem::path> files;
  std::size_t channels = 0;
  std::size_t samples = 0;
};

/// Writes <basename>.{wav,csv}, optional <basename>_anechoic.* and the side-car
/// <basename>.json holding the resolved configuration (itself a valid config).
SimulateReport run_simulate(const RunConfig& config, bool anechoic);

struct BandSummary {
  double f_lo = 0.0;
  double f_hi = 0.0;
  RtfDeviation deviation;
};

struct CompareReport {
  std::vector<BandSummary> bands;  // below split, above split, full range
  std::vector<std::filesystem::path> files;
};

/// TDW spectrum vs the SH-domain oracle (or vs compare.against when set).
CompareReport run_compare(const RunConfig& config, bool anechoic);

void print_compare_summary(std::ostream& os, const CompareReport& report);

/// Pattern a + b cos(theta) synthesized from its SH coefficients over `points`
/// polar angles in [0, pi] at azimuth `phi`. Columns: theta_rad, value.
std::vector<std::pair<double, double>> run_pattern(const std::string& kind, int order, std::size_t points, double phi = 0.0);

}  // namespace tdw
