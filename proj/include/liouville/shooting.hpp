#pragma once

// The shooting map alpha = (alpha_2..alpha_n) -> sigma = (sigma_2..sigma_n)
// with U_1(0) = 0 fixed, and its Newton inverse.

#include <Eigen/Dense>

#include "liouville/energy.hpp"

namespace liouville::shooting {

using algebra::CoefficientMatrix;
using algebra::SingularityProfile;

struct ShootingOptions {
    double r_max = ode::kDefaultRMax;
    double tol = ode::kDefaultTol;
};

struct ShootingPoint {
    CoefficientMatrix A;
    SingularityProfile singularity;
    Eigen::VectorXd reduced_alpha;  // alpha_2..alpha_n
    Eigen::VectorXd full_sigma;
    Eigen::VectorXd reduced_sigma;  // sigma_2..sigma_n
    // The system is integrated from (0, alpha_2, ..) - shift so that
    // max_i U_i(0) = 0; sigma does not depend on the shift.
    double normalization_shift = 0.0;
    energy::SolutionSummary summary;
};

inline constexpr double kAlphaBound = 30.0;

ShootingPoint alpha_to_sigma(const CoefficientMatrix& A, const SingularityProfile& singularity,
                             const Eigen::VectorXd& reduced_alpha, const ShootingOptions& opt = {});

/// d reduced_sigma / d reduced_alpha by centered differences; h in [1e-6, 1e-2].
Eigen::MatrixXd shooting_jacobian(const CoefficientMatrix& A, const SingularityProfile& singularity,
                                  const Eigen::VectorXd& reduced_alpha, double h = 1e-4,
                                  const ShootingOptions& opt = {});

struct InvertOptions {
    ShootingOptions shooting;
    double jacobian_step = 1e-4;
    double target_tol = 1e-9;
    int max_steps = 50;
    int max_halvings = 8;
};

struct InvertResult {
    Eigen::VectorXd reduced_alpha;
    double residual = 0.0;  // ||sigma(alpha) - target||_inf
    int steps = 0;
};

/// Damped Newton on alpha_to_sigma. Throws NonConvergence carrying the best
/// iterate when 50 steps or the line search are exhausted.
InvertResult invert_sigma(const CoefficientMatrix& A, const SingularityProfile& singularity,
                          const Eigen::VectorXd& target_reduced_sigma, const Eigen::VectorXd& guess,
                          const InvertOptions& opt = {});

}  // namespace liouville::shooting
