#include "tdwsmir/bessel.hpp"

#include <cmath>
#include <string>

#include "tdwsmir/error.hpp"

namespace tdw {
namespace {

void check_order(int n, const char* fn) {
  if (n < 0) throw DomainError(std::string(fn) + ": negative order " + std::to_string(n));
}

}  // namespace

std::vector<double> sph_bessel_j_all(int order, double x) {
  check_order(order, "sph_bessel_j");
  if (!(x >= 0.0)) throw DomainError("sph_bessel_j: negative argument");
  std::vector<double> j(order + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  const double j0 = std::sin(x) / x;
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;

  if (static_cast<double>(order) < x) {
    j[0] = j0;
    if (order >= 1) j[1] = j1;
    for (int l = 1; l < order; ++l) j[l + 1] = (2.0 * l + 1.0) / x * j[l] - j[l - 1];
    return j;
  }

  // Miller: recur downward from well above the turning point, then normalize.
  const int start = order + 16 + static_cast<int>(std::sqrt(40.0 * (order + x)));
  double above = 0.0;
  double cur = 1e-300;
  for (int l = start; l > 0; --l) {
    const double below = (2.0 * l + 1.0) / x * cur - above;
    above = cur;
    cur = below;
    if (l - 1 <= order) j[l - 1] = cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      above *= 1e-250;
      for (int k = l - 1; k <= order; ++k) j[k] *= 1e-250;
    }
  }
  // Normalize on whichever of j0, j1 is further from a zero.
  const double scale = (std::abs(j0) >= std::abs(j1) || order == 0) ? j0 / j[0] : j1 / j[1];
  for (double& v : j) v *= scale;
  return j;
}

std::vector<double> sph_bessel_y_all(int order, double x) {
  check_order(order, "sph_bessel_y");
  if (!(x > 0.0)) throw DomainError("sph_bessel_y: argument must be positive");
  std::vector<double> y(order + 1);
  y[0] = -std::cos(x) / x;
  if (order >= 1) y[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (int l = 1; l < order; ++l) y[l + 1] = (2.0 * l + 1.0) / x * y[l] - y[l - 1];
  return y;
}

double sph_bessel_j(int n, double x) { return sph_bessel_j_all(n, x)[n]; }

double sph_bessel_y(int n, double x) { return sph_bessel_y_all(n, x)[n]; }

std::complex<double> sph_hankel(int n, double x) {
  if (!(x > 0.0)) throw DomainError("sph_hankel: argument must be positive");
  return {sph_bessel_j(n, x), sph_bessel_y(n, x)};
}

std::complex<double> sph_hankel2(int n, double x) { return std::conj(sph_hankel(n, x)); }

}  // namespace tdw
