#include <boost/math/special_functions/beta.hpp>
#include <cmath>

#include "mesoperc/conformal.hpp"
#include "mesoperc/error.hpp"

namespace mesoperc {

namespace {

// theta_2(q) / (2 q^{1/4}) = sum q^{n(n+1)}
double theta2_reduced(double q) {
  double s = 0, term = 1;
  for (int n = 0; term > 1e-18 * s || n == 0; ++n) {
    term = std::pow(q, static_cast<double>(n) * (n + 1));
    s += term;
  }
  return s;
}

double theta3(double q) {
  double s = 1, term = 1;
  for (int n = 1; term > 1e-18 * s; ++n) {
    term = 2 * std::pow(q, static_cast<double>(n) * n);
    s += term;
  }
  return s;
}

// k = theta_2^2 / theta_3^2 for nome exp(-x), x > 0.
double modulus_from_nome_log(double x, double& theta3_sq) {
  const double q = std::exp(-x);
  const double t3 = theta3(q);
  theta3_sq = t3 * t3;
  const double t2 = 2 * std::exp(-x / 4) * theta2_reduced(q);
  return t2 * t2 / theta3_sq;
}

}  // namespace

EllipticModuli elliptic_moduli(double rho) {
  if (!(rho > 0) || !std::isfinite(rho)) throw InvalidArgument("elliptic_moduli: rho must be positive");
  EllipticModuli m;
  double t3, t3p;
  m.k = modulus_from_nome_log(2 * kPi / rho, t3);
  m.kp = modulus_from_nome_log(kPi * rho / 2, t3p);
  // Keep the smaller modulus from its series and recover the other exactly.
  if (m.k <= m.kp) {
    m.kp = std::sqrt((1 - m.k) * (1 + m.k));
  } else {
    m.k = std::sqrt((1 - m.kp) * (1 + m.kp));
  }
  m.K = kPi / 2 * t3;
  m.Kp = kPi / 2 * t3p;
  return m;
}

double cardy(double rho) {
  if (!(rho > 0) || !std::isfinite(rho)) throw InvalidArgument("cardy: rho must be positive");
  const EllipticModuli m = elliptic_moduli(rho);
  const double eta = std::pow(m.kp / (1 + m.k), 4);
  const double eta_bar = 4 * m.k / ((1 + m.k) * (1 + m.k));
  const double third = 1.0 / 3.0;
  if (eta <= 0.5) return boost::math::ibeta(third, third, eta);
  return boost::math::ibetac(third, third, eta_bar);
}

}  // namespace mesoperc
