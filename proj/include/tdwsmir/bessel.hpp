#pragma once

#include <complex>
#include <vector>

namespace tdw {

/// Spherical Bessel function of the first kind j_n(x), x >= 0.
double sph_bessel_j(int n, double x);

/// Spherical Bessel function of the second kind y_n(x), x > 0.
double sph_bessel_y(int n, double x);

/// j_0(x) .. j_order(x). Uses Miller's downward recurrence when order > x.
std::vector<double> sph_bessel_j_all(int order, double x);
std::vector<double> sph_bessel_y_all(int order, double x);

/// Spherical Hankel function of the first kind h_n(x) = j_n(x) + i y_n(x), x > 0.
std::complex<double> sph_hankel(int n, double x);

/// Second kind h_n(x) = j_n(x) - i y_n(x): the outgoing wave for an exp(+i w t) time convention.
std::complex<double> sph_hankel2(int n, double x);

}  // namespace tdw
