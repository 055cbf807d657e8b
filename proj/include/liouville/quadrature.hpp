#pragma once

// Globally adaptive 15-point Gauss-Kronrod quadrature (QUADPACK QAG style)
// for vector-valued integrands.

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace liouville::quad {

using VectorIntegrand = std::function<Eigen::VectorXd(double)>;
using ScalarIntegrand = std::function<double(double)>;

struct Result {
    Eigen::VectorXd value;
    double error = 0.0;  // max-norm error estimate
    int evaluations = 0;
    bool converged = false;
};

struct Options {
    double abs_tol = 1e-14;
    double rel_tol = 1e-12;
    int max_intervals = 20000;
};

/// Integrates f over [a, b], starting from the subdivision given by
/// `breakpoints` (may be empty; points outside (a, b) are ignored).
Result integrate(const VectorIntegrand& f, double a, double b, const Options& opt = {},
                 const std::vector<double>& breakpoints = {});

struct ScalarResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

ScalarResult integrate(const ScalarIntegrand& f, double a, double b, const Options& opt = {},
                       const std::vector<double>& breakpoints = {});

}  // namespace liouville::quad
