#pragma once

// Reference values computed without the theta-series code paths of the library:
// Lambert q-series, the sigma product formula and brute lattice sums.
// Lattice (1, i*t), q = exp(-pi t).

#include <cmath>
#include <complex>

namespace oracle {

using C = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

inline double nome(double t) { return std::exp(-pi * t); }

// eta1 = 2 zeta(1/2) = pi^2/3 * E2(q^2)
inline double eta1(double t) {
  const double q2 = nome(t) * nome(t);
  double s = 0.0, qn = q2;
  for (int n = 1; n < 4000 && qn > 1e-300; ++n, qn *= q2) s += n * qn / (1.0 - qn);
  return pi * pi / 3.0 * (1.0 - 24.0 * s);
}

inline double divisor_power_sum(int n, int k) {
  double s = 0.0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) s += std::pow(double(d), k);
  return s;
}

inline double g2(double t) {
  const double q2 = nome(t) * nome(t);
  double s = 0.0, qn = q2;
  for (int n = 1; n < 400 && qn > 1e-300; ++n, qn *= q2) s += divisor_power_sum(n, 3) * qn;
  return 4.0 * std::pow(pi, 4) / 3.0 * (1.0 + 240.0 * s);
}

inline double g3(double t) {
  const double q2 = nome(t) * nome(t);
  double s = 0.0, qn = q2;
  for (int n = 1; n < 400 && qn > 1e-300; ++n, qn *= q2) s += divisor_power_sum(n, 5) * qn;
  return 8.0 * std::pow(pi, 6) / 27.0 * (1.0 - 504.0 * s);
}

// valid for |Im z| < t
inline C zeta(C z, double t) {
  const double q2 = nome(t) * nome(t);
  C s = 0.0;
  double qn = q2;
  for (int n = 1; n < 4000 && qn > 1e-300; ++n, qn *= q2) s += qn / (1.0 - qn) * std::sin(2.0 * pi * n * z);
  return eta1(t) * z + pi * std::cos(pi * z) / std::sin(pi * z) + 4.0 * pi * s;
}

inline C wp(C z, double t) {
  const double q2 = nome(t) * nome(t);
  C s = 0.0;
  double qn = q2;
  for (int n = 1; n < 4000 && qn > 1e-300; ++n, qn *= q2) s += double(n) * qn / (1.0 - qn) * std::cos(2.0 * pi * n * z);
  const C sn = std::sin(pi * z);
  return -eta1(t) + pi * pi / (sn * sn) - 8.0 * pi * pi * s;
}

inline C sigma(C z, double t) {
  const double q2 = nome(t) * nome(t);
  C p = 1.0;
  double qn = q2;
  const C c = std::cos(2.0 * pi * z);
  for (int n = 1; n < 4000 && qn > 1e-300; ++n, qn *= q2) p *= (1.0 - 2.0 * qn * c + qn * qn) / ((1.0 - qn) * (1.0 - qn));
  return std::exp(eta1(t) * z * z / 2.0) * std::sin(pi * z) / pi * p;
}

// Brute Eisenstein-ordered lattice sum sum' w^-2k over |n1|,|n2| <= N, with the inner
// direction summed in closed pairs. Only used with loose tolerances.
inline double lattice_g2(double t, int N) {
  C s = 0.0;
  for (int a = -N; a <= N; ++a)
    for (int b = -N; b <= N; ++b) {
      if (a == 0 && b == 0) continue;
      const C w(a, b * t);
      s += 1.0 / (w * w * w * w);
    }
  return 60.0 * s.real();
}

}  // namespace oracle
