#include <cmath>

#include "pat/errors.hpp"
#include "pat/rays.hpp"

namespace pat {

namespace {

double normal_root(double c, double lambda, double tau, double eta_norm) {
  if (!(tau < 0.0)) throw DomainError("boundary symbols are defined for tau < 0 only");
  if (!(c > 0.0) || lambda < 0.0 || eta_norm < 0.0) throw DomainError("need c > 0, lambda >= 0, |eta| >= 0");
  if (!(c * eta_norm < -tau)) throw DomainError("glancing or elliptic region: c |eta| >= -tau");
  return std::sqrt(tau * tau / (c * c) - eta_norm * eta_norm);
}

}  // namespace

double reflection_coefficient(double c, double lambda, double tau, double eta_norm) {
  const double s = normal_root(c, lambda, tau, eta_norm);
  return (s + tau * lambda) / (s - tau * lambda);
}

double symbol_p(double c, double lambda, double tau, double eta_norm) {
  return 1.0 + reflection_coefficient(c, lambda, tau, eta_norm);
}

double symbol_q(double c, double lambda, double tau, double eta_norm) {
  const double s = normal_root(c, lambda, tau, eta_norm);
  return -tau * lambda / (s - tau * lambda);
}

}  // namespace pat
