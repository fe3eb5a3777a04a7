#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tdwsmir/sh.hpp"
#include "tdwsmir/sh_series.hpp"

namespace tdw {

/// Per-degree Wigner D-matrices for one rotation, precomputed up to `order`.
class SHRotation {
 public:
  SHRotation(int order, const EulerAngles& angles);

  int order() const noexcept { return order_; }
  const EulerAngles& angles() const noexcept { return angles_; }

  /// In-place c <- D c for every degree present in `coeffs` (size must be sh_count(n) for n <= order).
  void apply(std::span<Complex> coeffs) const;

  SHMatrix apply(const SHMatrix& m) const;
  SHTimeSeries apply(const SHTimeSeries& s) const;

 private:
  int order_;
  EulerAngles angles_;
  std::vector<Eigen::MatrixXcd> d_;
};

}  // namespace tdw
