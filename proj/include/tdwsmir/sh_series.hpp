#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tdwsmir/sh.hpp"

namespace tdw {

/// Uniformly sampled sequence of SH coefficient sets.
///
/// Samples are impulse weights on the grid t_k = (start + k) / fs, the same
/// convention as a digital impulse response: sample value w stands for
/// w * delta(t - t_k), so the DTFT sum h[k] exp(-i w t_k) is the transfer
/// function.
class SHTimeSeries {
 public:
  SHTimeSeries() = default;
  SHTimeSeries(int order, double fs, std::size_t frames, std::int64_t start = 0);

  int order() const noexcept { return order_; }
  double fs() const noexcept { return fs_; }
  std::int64_t start() const noexcept { return start_; }
  double start_time() const noexcept { return static_cast<double>(start_) / fs_; }
  std::size_t frames() const noexcept { return frames_; }
  std::size_t width() const noexcept { return sh_count(order_); }

  void set_start(std::int64_t start) noexcept { start_ = start; }

  std::span<Complex> frame(std::size_t k) { return {data_.data() + k * width(), width()}; }
  std::span<const Complex> frame(std::size_t k) const { return {data_.data() + k * width(), width()}; }

  Complex& at(std::size_t k, int n, int m) { return data_[k * width() + sh_index(n, m)]; }
  const Complex& at(std::size_t k, int n, int m) const { return data_[k * width() + sh_index(n, m)]; }

  SHMatrix frame_matrix(std::size_t k) const;
  void set_frame(std::size_t k, const SHMatrix& m);

  /// Single-frame series holding `m` at sample `start`.
  static SHTimeSeries impulse(const SHMatrix& m, double fs, std::int64_t start = 0);

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  /// Largest |c| over all frames and entries.
  double max_abs() const;

 private:
  int order_ = 0;
  double fs_ = 1.0;
  std::int64_t start_ = 0;
  std::size_t frames_ = 0;
  std::vector<Complex> data_;
};

}  // namespace tdw
