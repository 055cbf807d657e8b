#pragma once

// Shared closed-form fixtures. The scalar equation with coefficient a has the
// explicit radial solutions U = log(8 mu^2 lambda / (a (1 + lambda r^{2mu})^2)).

#include <cmath>

#include "liouville/radial_ode.hpp"

namespace fixtures {

using liouville::algebra::CoefficientMatrix;
using liouville::algebra::SingularityProfile;
using liouville::ode::ProblemSpec;

inline ProblemSpec scalar(double gamma, double alpha = 0.0, double a = 1.0) {
    Eigen::MatrixXd m(1, 1);
    m << a;
    Eigen::VectorXd al(1);
    al << alpha;
    return ProblemSpec(CoefficientMatrix(m), SingularityProfile(gamma), al);
}

inline ProblemSpec f1() { return scalar(0.0); }
inline ProblemSpec f2() { return scalar(-0.5); }

inline CoefficientMatrix a12() { return CoefficientMatrix::from_rows({{1, 2}, {2, 1}}); }
inline CoefficientMatrix a3() { return CoefficientMatrix::from_rows({{1, 1, 1}, {1, 1, 2}, {1, 2, 1}}); }

inline ProblemSpec f3() { return ProblemSpec(a12(), SingularityProfile(0.0), Eigen::VectorXd::Zero(2)); }

// Explicit scalar solution with coefficient a and U(0) = alpha.
inline double scalar_exact(double r, double mu, double alpha = 0.0, double a = 1.0) {
    const double lambda = a * std::exp(alpha) / (8.0 * mu * mu);
    return std::log(8.0 * mu * mu * lambda / a) - 2.0 * std::log1p(lambda * std::pow(r, 2.0 * mu));
}

inline double scalar_exact_dr(double r, double mu, double alpha = 0.0, double a = 1.0) {
    const double lambda = a * std::exp(alpha) / (8.0 * mu * mu);
    const double x = std::pow(r, 2.0 * mu);
    return -2.0 * lambda * 2.0 * mu * x / r / (1.0 + lambda * x);
}

}  // namespace fixtures
