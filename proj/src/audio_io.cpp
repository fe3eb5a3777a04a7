#include "tdwsmir/audio_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tdwsmir/error.hpp"

namespace tdw {
namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(const std::vector<char>& buf, std::size_t pos) {
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  return v;
}

std::string path_str(const std::filesystem::path& p) { return p.string(); }

}  // namespace

void write_wav_float32(const std::filesystem::path& path, const AudioData& audio) {
  const std::size_t nch = audio.channels.size();
  if (nch == 0 || nch > 65535) throw IoError(path_str(path), "WAV needs 1..65535 channels");
  const std::size_t len = audio.length();
  for (const auto& ch : audio.channels) {
    if (ch.size() != len) throw IoError(path_str(path), "channels differ in length");
  }
  if (!(audio.fs > 0.0) || std::floor(audio.fs) != audio.fs || audio.fs > 4294967295.0) {
    throw IoError(path_str(path), "WAV sample rate must be a positive integer");
  }
  const std::uint64_t data_bytes = static_cast<std::uint64_t>(len) * nch * 4;
  if (data_bytes > 0xFFFFFFFFull - 64) throw IoError(path_str(path), "data too large for a RIFF file");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path_str(path), "cannot open for writing");
  const auto rate = static_cast<std::uint32_t>(audio.fs);
  const auto block = static_cast<std::uint16_t>(nch * 4);
  out.write("RIFF", 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(4 + 8 + 18 + 8 + 4 + 8 + data_bytes));
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put<std::uint32_t>(out, 18);
  put<std::uint16_t>(out, kFormatFloat);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(nch));
  put<std::uint32_t>(out, rate);
  put<std::uint32_t>(out, rate * block);
  put<std::uint16_t>(out, block);
  put<std::uint16_t>(out, 32);
  put<std::uint16_t>(out, 0);
  out.write("fact", 4);
  put<std::uint32_t>(out, 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(len));
  out.write("data", 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(data_bytes));
  std::vector<float> frame(nch);
  for (std::size_t k = 0; k < len; ++k) {
    for (std::size_t c = 0; c < nch; ++c) frame[c] = static_cast<float>(audio.channels[c][k]);
    out.write(reinterpret_cast<const char*>(frame.data()), static_cast<std::streamsize>(nch * 4));
  }
  if (!out) throw IoError(path_str(path), "write failed");
}

AudioData read_wav_float32(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path_str(path), "cannot open for reading");
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 || std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw IoError(path_str(path), "not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, nch = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_pos = 0, data_len = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::string id(buf.data() + pos, 4);
    const auto size = get<std::uint32_t>(buf, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > buf.size()) throw IoError(path_str(path), "truncated chunk '" + id + "'");
    if (id == "fmt ") {
      if (size < 16) throw IoError(path_str(path), "short fmt chunk");
      format = get<std::uint16_t>(buf, body);
      nch = get<std::uint16_t>(buf, body + 2);
      rate = get<std::uint32_t>(buf, body + 4);
      bits = get<std::uint16_t>(buf, body + 14);
      if (format == kFormatExtensible && size >= 40) format = get<std::uint16_t>(buf, body + 24);
      have_fmt = true;
    } else if (id == "data") {
      data_pos = body;
      data_len = size;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt || data_pos == 0) throw IoError(path_str(path), "missing fmt or data chunk");
  if (format != kFormatFloat || bits != 32) throw IoError(path_str(path), "only 32-bit float WAV is supported");
  if (nch == 0) throw IoError(path_str(path), "zero channels");

  AudioData audio;
  audio.fs = rate;
  const std::size_t len = data_len / (4u * nch);
  audio.channels.assign(nch, std::vector<double>(len));
  for (std::size_t k = 0; k < len; ++k) {
    for (std::size_t c = 0; c < nch; ++c) {
      audio.channels[c][k] = get<float>(buf, data_pos + (k * nch + c) * 4);
    }
  }
  return audio;
}

CsvMatrix read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path_str(path), "cannot open for reading");
  CsvMatrix out;
  std::string line;
  std::size_t row = 0;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      out.comments.push_back(line.substr(1));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);

    std::vector<double> values;
    bool numeric = true;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str()) {
        numeric = false;
        break;
      }
      while (*end == ' ' || *end == '\t') ++end;
      if (*end != '\0') {
        numeric = false;
        break;
      }
      values.push_back(v);
    }
    if (!numeric) {
      if (first_data_line) {
        out.header = cells;
        first_data_line = false;
        continue;
      }
      throw IoError(path_str(path), "non-numeric value on data row " + std::to_string(row + 1));
    }
    first_data_line = false;
    if (out.columns.empty()) out.columns.resize(values.size());
    if (values.size() != out.columns.size()) {
      throw IoError(path_str(path), "row " + std::to_string(row + 1) + " has " + std::to_string(values.size()) +
                                        " columns, expected " + std::to_string(out.columns.size()));
    }
    for (std::size_t c = 0; c < values.size(); ++c) out.columns[c].push_back(values[c]);
    ++row;
  }
  return out;
}

void write_csv_matrix(const std::filesystem::path& path, const std::vector<std::string>& comments,
                      const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
  const std::size_t len = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != len) throw IoError(path_str(path), "columns differ in length");
  }
  std::FILE* f = std::fopen(path_str(path).c_str(), "w");
  if (!f) throw IoError(path_str(path), "cannot open for writing");
  for (const auto& c : comments) std::fprintf(f, "#%s\n", c.c_str());
  for (std::size_t i = 0; i < header.size(); ++i) std::fprintf(f, "%s%s", i ? "," : "", header[i].c_str());
  if (!header.empty()) std::fputc('\n', f);
  for (std::size_t k = 0; k < len; ++k) {
    for (std::size_t c = 0; c < columns.size(); ++c) std::fprintf(f, "%s%.17g", c ? "," : "", columns[c][k]);
    std::fputc('\n', f);
  }
  const bool bad = std::ferror(f) != 0;
  if (std::fclose(f) != 0 || bad) throw IoError(path_str(path), "write failed");
}

}  // namespace tdw
