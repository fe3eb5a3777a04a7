#include "tdwsmir/sh_series.hpp"

#include <algorithm>
#include <cmath>

#include "tdwsmir/error.hpp"

namespace tdw {

SHTimeSeries::SHTimeSeries(int order, double fs, std::size_t frames, std::int64_t start)
    : order_(order), fs_(fs), start_(start), frames_(frames) {
  if (order < 0 || order > kMaxDegree) throw DomainError("SHTimeSeries: order out of range");
  if (!(fs > 0.0)) throw DomainError("SHTimeSeries: sample rate must be positive");
  data_.assign(frames * sh_count(order), Complex{});
}

SHMatrix SHTimeSeries::frame_matrix(std::size_t k) const {
  SHMatrix m(order_);
  const auto f = frame(k);
  std::copy(f.begin(), f.end(), m.coeffs().begin());
  return m;
}

void SHTimeSeries::set_frame(std::size_t k, const SHMatrix& m) {
  if (m.order() != order_) throw DomainError("SHTimeSeries::set_frame: order mismatch");
  std::copy(m.coeffs().begin(), m.coeffs().end(), frame(k).begin());
}

SHTimeSeries SHTimeSeries::impulse(const SHMatrix& m, double fs, std::int64_t start) {
  SHTimeSeries s(m.order(), fs, 1, start);
  s.set_frame(0, m);
  return s;
}

double SHTimeSeries::max_abs() const {
  double v = 0.0;
  for (const auto& c : data_) v = std::max(v, std::abs(c));
  return v;
}

}  // namespace tdw
