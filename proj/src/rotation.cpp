#include "tdwsmir/rotation.hpp"

#include "tdwsmir/error.hpp"

namespace tdw {

SHRotation::SHRotation(int order, const EulerAngles& angles) : order_(order), angles_(angles) {
  if (order < 0 || order > kMaxDegree) throw DomainError("SHRotation: order out of range");
  d_.reserve(order + 1);
  for (int n = 0; n <= order; ++n) d_.push_back(wigner_d_matrix(n, angles));
}

void SHRotation::apply(std::span<Complex> coeffs) const {
  int top = -1;
  while (sh_count(top + 1) <= coeffs.size()) ++top;
  if (sh_count(top) != coeffs.size() || top > order_) {
    throw DomainError("SHRotation::apply: coefficient count does not match a supported order");
  }
  Eigen::VectorXcd tmp;
  for (int n = 1; n <= top; ++n) {
    Eigen::Map<Eigen::VectorXcd> block(coeffs.data() + sh_index(n, -n), 2 * n + 1);
    tmp.noalias() = d_[n] * block;
    block = tmp;
  }
}

SHMatrix SHRotation::apply(const SHMatrix& m) const {
  SHMatrix out = m;
  apply(out.coeffs());
  return out;
}

SHTimeSeries SHRotation::apply(const SHTimeSeries& s) const {
  SHTimeSeries out = s;
  for (std::size_t k = 0; k < out.frames(); ++k) apply(out.frame(k));
  return out;
}

}  // namespace tdw
