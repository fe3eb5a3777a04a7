#pragma once

// Spherical-harmonic special functions.
//
// Convention: complex orthonormal harmonics with the Condon-Shortley phase,
//   Y_n^m(theta, phi) = Pn_m(cos theta) exp(i m phi),
// where Pn_m is the fully normalized associated Legendre function
//   Pn_m(x) = sqrt((2n+1)/(4 pi)) sqrt((n-m)!/(n+m)!) P_n^m(x)
// and negative orders follow Pn_{-m} = (-1)^m Pn_m.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tdw {

using Complex = std::complex<double>;

inline constexpr int kMaxDegree = 16;

struct SHIndex {
  int n = 0;
  int m = 0;
};

constexpr std::size_t sh_count(int order) {
  return static_cast<std::size_t>(order + 1) * static_cast<std::size_t>(order + 1);
}

/// Linear position of (n, m) in an order-N coefficient vector: n^2 + n + m.
constexpr std::size_t sh_index(int n, int m) {
  return static_cast<std::size_t>(n * n + n + m);
}

constexpr SHIndex sh_degree_order(std::size_t i) {
  int n = 0;
  while (sh_count(n) <= i) ++n;
  return {n, static_cast<int>(i) - n * n - n};
}

/// Coefficients {c_n^m : 0 <= n <= N, |m| <= n} at one time instant.
class SHMatrix {
 public:
  SHMatrix() = default;
  explicit SHMatrix(int order);

  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  Complex& operator()(int n, int m) { return coeffs_[sh_index(n, m)]; }
  const Complex& operator()(int n, int m) const { return coeffs_[sh_index(n, m)]; }

  std::span<Complex> coeffs() noexcept { return coeffs_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }

  /// Value of sum c_n^m Y_n^m at a direction.
  Complex evaluate(double theta, double phi) const;

  /// Sum of |c|^2 over all entries of degree n.
  double degree_energy(int n) const;

  /// Copy truncated or zero-padded to a new order.
  SHMatrix resized(int order) const;

 private:
  int order_ = 0;
  std::vector<Complex> coeffs_ = std::vector<Complex>(1);
};

/// z-y-z Euler angles of an active rotation R = Rz(alpha) Ry(beta) Rz(gamma).
struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  static EulerAngles identity() { return {}; }

  /// Angles of the rotation that takes +z to the direction (theta, phi), gamma = 0.
  static EulerAngles aim(double theta, double phi) { return {phi, theta, 0.0}; }

  /// Inverse rotation, normalized to beta in [0, pi] and alpha, gamma in [0, 2pi).
  EulerAngles inverse() const;

  /// 3x3 rotation matrix.
  Eigen::Matrix3d matrix() const;

  /// Angles of an arbitrary rotation matrix.
  static EulerAngles from_matrix(const Eigen::Matrix3d& r);
};

/// Composition a o b (apply b first, then a).
EulerAngles compose(const EulerAngles& a, const EulerAngles& b);

/// Unnormalized associated Legendre function with Condon-Shortley phase.
/// Requires 0 <= m <= n and |x| <= 1.
double assoc_legendre(int n, int m, double x);

/// Normalized Legendre function Pn_m(x); m may be negative.
double norm_legendre(int n, int m, double x);

/// All Pn_m(x) for 0 <= m <= n <= order, written at sh_index(n, m).
/// `out` must hold at least sh_count(order) entries; negative-m slots are left untouched.
void norm_legendre_table(int order, double x, std::span<double> out);

Complex sph_harmonic(int n, int m, double theta, double phi);

/// All Y_n^m(theta, phi) up to `order`, indexed by sh_index.
std::vector<Complex> sph_harmonics(int order, double theta, double phi);
void sph_harmonics(int order, double theta, double phi, std::span<Complex> out);

/// Wigner D-matrix of degree n, rows/columns indexed by m + n.
///
/// If f has degree-n coefficients c, the rotated function f(R^-1 x) has
/// coefficients D * c.
Eigen::MatrixXcd wigner_d_matrix(int n, const EulerAngles& angles);

/// Real small-d matrix d^n(beta).
Eigen::MatrixXd wigner_small_d(int n, double beta);

}  // namespace tdw
