#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tdw {

/// Channel-major sample matrix.
struct AudioData {
  double fs = 0.0;
  std::vector<std::vector<double>> channels;

  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
};

/// Multichannel 32-bit IEEE-float WAV. Sample rate must be a positive integer.
void write_wav_float32(const std::filesystem::path& path, const AudioData& audio);
AudioData read_wav_float32(const std::filesystem::path& path);

/// Numeric CSV: one row per sample, one column per channel. Lines starting
/// with '#' are comments and are returned separately; a non-numeric first
/// row is treated as a column header and skipped.
struct CsvMatrix {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

CsvMatrix read_csv_matrix(const std::filesystem::path& path);

/// Writes values with 17 significant digits so a re-read is bit-exact.
void write_csv_matrix(const std::filesystem::path& path, const std::vector<std::string>& comments,
                      const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns);

}  // namespace tdw
