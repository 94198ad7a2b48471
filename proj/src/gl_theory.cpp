#include "softmodes/gl_theory.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace softmodes {

namespace {

double omega_size(int radius, int dimension) {
  return std::pow(2.0 * radius + 1.0, dimension);
}

double mass_offset(MassConvention c) {
  switch (c) {
    case MassConvention::main_text:
      return 0.5;
    case MassConvention::tree_level:
      return 0.0;
    case MassConvention::reverse_flow:
      return -0.5;
  }
  return 0.0;
}

double mass_of_sigma2(double s2, double omega, MassConvention c) {
  const double alpha2 = 1.0 - s2;
  return mass_offset(c) + 1.0 / s2 - alpha2 * omega / (s2 * s2);
}

}  // namespace

std::string to_string(MassConvention c) {
  switch (c) {
    case MassConvention::main_text:
      return "main-text";
    case MassConvention::tree_level:
      return "tree-level";
    case MassConvention::reverse_flow:
      return "reverse-flow";
  }
  return "?";
}

GLCoefficients gl_coefficients(int radius, int dimension, const VPSchedule& sched, double t,
                               MassConvention convention) {
  if (!(t > 0.0)) throw SingularNoiseError("coefficients require t > 0");
  const double alpha = sched.alpha(t);
  const double s2 = sched.sigma2(t);
  const double a2 = alpha * alpha;
  const double omega = omega_size(radius, dimension);
  const double K = static_cast<double>(radius);

  GLCoefficients out;
  out.t = t;
  out.convention = convention;
  out.r = mass_offset(convention) + 1.0 / s2 - a2 * omega / (s2 * s2);
  out.kappa = a2 / (s2 * s2) * K * (K + 1.0) / 6.0 * omega;
  out.u = a2 * a2 / (3.0 * s2 * s2 * s2 * s2) * omega * omega * omega;
  return out;
}

double critical_time(int radius, int dimension, const VPSchedule& sched,
                     MassConvention convention) {
  if (!sched.constant_rate())
    throw ParameterError("critical time solver requires a constant noise rate");
  const double beta = sched.beta();
  const double omega = omega_size(radius, dimension);

  if (convention == MassConvention::tree_level) return std::log1p(omega) / beta;

  // r is a monotone function of sigma^2 on (0, 1) after multiplying by
  // sigma^4 > 0, so one sign change exists iff the endpoints disagree.
  double lo = 1e-15, hi = 1.0 - 1e-16;
  double f_lo = mass_of_sigma2(lo, omega, convention);
  double f_hi = mass_of_sigma2(hi, omega, convention);
  if (f_lo * f_hi > 0.0) throw NoTransitionError("r(t) does not change sign");
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = mass_of_sigma2(mid, omega, convention);
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double s2_c = 0.5 * (lo + hi);
  return -std::log1p(-s2_c) / beta;
}

double effective_mass(const GLCoefficients& coeffs, double delta_x_var) {
  if (delta_x_var < 0.0) throw ParameterError("variance must be nonnegative");
  return coeffs.r + 3.0 * coeffs.u * delta_x_var;
}

std::vector<double> prototype_jacobian_spectrum(const PrototypeSet& set, const VPSchedule& sched,
                                                double t, bool as_written) {
  if (!(t > 0.0)) throw SingularNoiseError("Jacobian requires t > 0");
  const double s2 = sched.sigma2(t);
  const double alpha = sched.alpha(t);
  const double a = -(0.5 + 1.0 / s2);
  const double c = (as_written ? 1.0 : alpha * alpha) / (s2 * s2);

  const long n = set.grid().sites();
  Eigen::MatrixXd second_moment = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m < set.size(); ++m) {
    Eigen::Map<const Eigen::VectorXd> mu(set.prototype(m).values.data(), n);
    second_moment.noalias() += mu * mu.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(second_moment,
                                                        Eigen::EigenvaluesOnly);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + c * solver.eigenvalues()[i];
  std::sort(out.begin(), out.end());
  return out;
}

double two_prototype_r(const VPSchedule& sched, double t, double mu_norm2) {
  if (!(t > 0.0)) throw SingularNoiseError("r(t) requires t > 0");
  const double s2 = sched.sigma2(t);
  return (s2 + 2.0) / (2.0 * s2) - mu_norm2 / (s2 * s2);
}

}  // namespace softmodes
