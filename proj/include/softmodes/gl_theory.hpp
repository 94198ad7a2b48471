#pragma once

#include <string>
#include <vector>

#include "softmodes/schedule.hpp"
#include "softmodes/scores.hpp"

namespace softmodes {

/// The effective mass r(t) appears in three inequivalent forms depending on
/// which friction term the linearization keeps:
///   main_text:    r = 1/2 + 1/sigma^2 - alpha^2 |Omega| / sigma^4
///   tree_level:   r =       1/sigma^2 - alpha^2 |Omega| / sigma^4
///   reverse_flow: r = -1/2 + 1/sigma^2 - alpha^2 |Omega| / sigma^4
/// All three are kept side by side; tree_level reproduces t_c = log(1+|Omega|).
enum class MassConvention { main_text, tree_level, reverse_flow };

std::string to_string(MassConvention c);

struct GLCoefficients {
  double t;
  double r;      // effective mass, 1/time
  double kappa;  // stiffness, lattice^2/time
  double u;      // quartic coefficient, 1/(time * amplitude^2)
  MassConvention convention;
};

/// Closed-form coefficients of the coarse-grained theory for a hypercubic
/// (2K+1)^d receptive field:
///   kappa = alpha^2/sigma^4 * K(K+1)/6 * (2K+1)^d
///   u     = alpha^4/(3 sigma^8) * (2K+1)^(3d)
GLCoefficients gl_coefficients(int radius, int dimension, const VPSchedule& sched, double t,
                               MassConvention convention);

/// Time where r(t) = 0. Closed form log(1+|Omega|)/beta at tree level;
/// bisection on sigma^2 in (0,1) otherwise.
double critical_time(int radius, int dimension, const VPSchedule& sched, MassConvention convention);

/// Fluctuation-renormalized mass r_eff = r + 3 u <delta x^2>.
double effective_mass(const GLCoefficients& coeffs, double delta_x_var);

/// Eigenvalues of a*I + c*C with C = sum_m mu_m mu_m^T the second-moment
/// matrix, a = -(1/2 + 1/sigma^2). as_written uses c = 1/sigma^4; the
/// exact-score variant inserts the alpha^2 factor, c = alpha^2/sigma^4.
std::vector<double> prototype_jacobian_spectrum(const PrototypeSet& set, const VPSchedule& sched,
                                                double t, bool as_written);

/// Scalar mass of the two-prototype reduction:
/// r(t) = (sigma^2 + 2)/(2 sigma^2) - ||mu||^2 / sigma^4.
double two_prototype_r(const VPSchedule& sched, double t, double mu_norm2);

}  // namespace softmodes
