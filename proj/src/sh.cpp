#include "tdwsmir/sh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "tdwsmir/error.hpp"

namespace tdw {
namespace {

constexpr double kInvSqrt4Pi = 0.28209479177387814347;  // 1 / sqrt(4 pi)

void check_degree_order(int n, int m, const char* fn) {
  if (n < 0 || n > kMaxDegree || std::abs(m) > n) {
    throw DomainError(std::string(fn) + ": invalid (n, m) = (" + std::to_string(n) + ", " +
                      std::to_string(m) + ")");
  }
}

void check_argument(double x, const char* fn) {
  if (!(std::abs(x) <= 1.0)) {
    throw DomainError(std::string(fn) + ": argument " + std::to_string(x) + " outside [-1, 1]");
  }
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a < 0.0) a += 2.0 * M_PI;
  // fmod can land exactly on 2pi after the shift.
  if (a >= 2.0 * M_PI) a -= 2.0 * M_PI;
  return a;
}

Eigen::Matrix3d rot_z(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a), 0.0, 0.0, 0.0, 1.0;
  return r;
}

Eigen::Matrix3d rot_y(double b) {
  Eigen::Matrix3d r;
  r << std::cos(b), 0.0, std::sin(b), 0.0, 1.0, 0.0, -std::sin(b), 0.0, std::cos(b);
  return r;
}

}  // namespace

SHMatrix::SHMatrix(int order) : order_(order) {
  if (order < 0 || order > kMaxDegree) {
    throw DomainError("SHMatrix: order " + std::to_string(order) + " out of range");
  }
  coeffs_.assign(sh_count(order), Complex{});
}

Complex SHMatrix::evaluate(double theta, double phi) const {
  const auto y = sph_harmonics(order_, theta, phi);
  Complex sum{};
  for (std::size_t i = 0; i < coeffs_.size(); ++i) sum += coeffs_[i] * y[i];
  return sum;
}

double SHMatrix::degree_energy(int n) const {
  double e = 0.0;
  for (int m = -n; m <= n; ++m) e += std::norm((*this)(n, m));
  return e;
}

SHMatrix SHMatrix::resized(int order) const {
  SHMatrix out(order);
  const std::size_t keep = std::min(out.size(), size());
  std::copy_n(coeffs_.begin(), keep, out.coeffs_.begin());
  return out;
}

Eigen::Matrix3d EulerAngles::matrix() const { return rot_z(alpha) * rot_y(beta) * rot_z(gamma); }

EulerAngles EulerAngles::from_matrix(const Eigen::Matrix3d& r) {
  const double cb = std::clamp(r(2, 2), -1.0, 1.0);
  const double sb = std::hypot(r(0, 2), r(1, 2));
  EulerAngles e;
  e.beta = std::acos(cb);
  if (sb > 1e-12) {
    e.alpha = std::atan2(r(1, 2), r(0, 2));
    e.gamma = std::atan2(r(2, 1), -r(2, 0));
  } else if (cb > 0.0) {
    e.beta = 0.0;
    e.alpha = std::atan2(r(1, 0), r(0, 0));
  } else {
    e.beta = M_PI;
    e.alpha = std::atan2(-r(1, 0), -r(0, 0));
  }
  e.alpha = wrap_angle(e.alpha);
  e.gamma = wrap_angle(e.gamma);
  return e;
}

EulerAngles EulerAngles::inverse() const { return from_matrix(matrix().transpose()); }

EulerAngles compose(const EulerAngles& a, const EulerAngles& b) {
  return EulerAngles::from_matrix(a.matrix() * b.matrix());
}

double assoc_legendre(int n, int m, double x) {
  if (m < 0) throw DomainError("assoc_legendre: negative order " + std::to_string(m));
  check_degree_order(n, m, "assoc_legendre");
  check_argument(x, "assoc_legendre");

  const double s = std::sqrt((1.0 - x) * (1.0 + x));
  double pmm = 1.0;
  for (int k = 1; k <= m; ++k) pmm *= -static_cast<double>(2 * k - 1) * s;
  if (n == m) return pmm;

  double p1 = pmm;
  double p2 = x * static_cast<double>(2 * m + 1) * pmm;
  for (int l = m + 2; l <= n; ++l) {
    const double p = (x * static_cast<double>(2 * l - 1) * p2 - static_cast<double>(l + m - 1) * p1) /
                     static_cast<double>(l - m);
    p1 = p2;
    p2 = p;
  }
  return p2;
}

void norm_legendre_table(int order, double x, std::span<double> out) {
  if (order < 0 || order > kMaxDegree) throw DomainError("norm_legendre_table: order out of range");
  check_argument(x, "norm_legendre_table");
  if (out.size() < sh_count(order)) throw DomainError("norm_legendre_table: output span too small");

  const double s = std::sqrt((1.0 - x) * (1.0 + x));
  double pmm = kInvSqrt4Pi;
  for (int m = 0; m <= order; ++m) {
    if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    out[sh_index(m, m)] = pmm;
    if (m == order) break;
    double p1 = pmm;
    double p2 = std::sqrt(2.0 * m + 3.0) * x * pmm;
    out[sh_index(m + 1, m)] = p2;
    for (int n = m + 2; n <= order; ++n) {
      const double nn = n, mm = m;
      const double a = std::sqrt((4.0 * nn * nn - 1.0) / (nn * nn - mm * mm));
      const double b = std::sqrt(((nn - 1.0) * (nn - 1.0) - mm * mm) / (4.0 * (nn - 1.0) * (nn - 1.0) - 1.0));
      const double p = a * (x * p2 - b * p1);
      out[sh_index(n, m)] = p;
      p1 = p2;
      p2 = p;
    }
  }
}

double norm_legendre(int n, int m, double x) {
  check_degree_order(n, m, "norm_legendre");
  check_argument(x, "norm_legendre");
  const int am = std::abs(m);
  std::vector<double> table(sh_count(n));
  norm_legendre_table(n, x, table);
  const double v = table[sh_index(n, am)];
  return (m < 0 && (am % 2)) ? -v : v;
}

void sph_harmonics(int order, double theta, double phi, std::span<Complex> out) {
  if (!(theta >= 0.0 && theta <= M_PI)) throw DomainError("sph_harmonics: theta outside [0, pi]");
  if (out.size() < sh_count(order)) throw DomainError("sph_harmonics: output span too small");
  std::vector<double> p(sh_count(order));
  norm_legendre_table(order, std::cos(theta), p);
  for (int m = 0; m <= order; ++m) {
    const Complex e = std::polar(1.0, m * phi);
    const double sign = (m % 2) ? -1.0 : 1.0;
    for (int n = m; n <= order; ++n) {
      const Complex y = p[sh_index(n, m)] * e;
      out[sh_index(n, m)] = y;
      if (m > 0) out[sh_index(n, -m)] = sign * std::conj(y);
    }
  }
}

std::vector<Complex> sph_harmonics(int order, double theta, double phi) {
  std::vector<Complex> out(sh_count(order));
  sph_harmonics(order, theta, phi, out);
  return out;
}

Complex sph_harmonic(int n, int m, double theta, double phi) {
  check_degree_order(n, m, "sph_harmonic");
  return sph_harmonics(n, theta, phi)[sh_index(n, m)];
}

Eigen::MatrixXd wigner_small_d(int n, double beta) {
  if (n < 0 || n > kMaxDegree) throw DomainError("wigner_small_d: degree out of range");
  const int dim = 2 * n + 1;
  if (n == 0) return Eigen::MatrixXd::Ones(1, 1);

  // d(beta) = exp(-i beta J_y). J_y is Hermitian with integer spectrum -n..n,
  // so one eigendecomposition gives d for any beta without factorials.
  Eigen::MatrixXcd jy = Eigen::MatrixXcd::Zero(dim, dim);
  for (int m = -n; m < n; ++m) {
    const double s = 0.5 * std::sqrt(static_cast<double>((n - m) * (n + m + 1)));
    jy(m + 1 + n, m + n) = Complex(0.0, -s);
    jy(m + n, m + 1 + n) = Complex(0.0, s);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(jy);
  const Eigen::MatrixXcd& v = eig.eigenvectors();
  Eigen::VectorXcd phase(dim);
  for (int k = 0; k < dim; ++k) {
    const double lambda = std::round(eig.eigenvalues()(k));
    phase(k) = std::polar(1.0, -beta * lambda);
  }
  const Eigen::MatrixXcd d = v * phase.asDiagonal() * v.adjoint();
  return d.real();
}

Eigen::MatrixXcd wigner_d_matrix(int n, const EulerAngles& angles) {
  const Eigen::MatrixXd d = wigner_small_d(n, angles.beta);
  const int dim = 2 * n + 1;
  Eigen::MatrixXcd out(dim, dim);
  for (int mp = -n; mp <= n; ++mp) {
    for (int m = -n; m <= n; ++m) {
      out(mp + n, m + n) = std::polar(1.0, -mp * angles.alpha) * d(mp + n, m + n) *
                           std::polar(1.0, -m * angles.gamma);
    }
  }
  return out;
}

}  // namespace tdw
