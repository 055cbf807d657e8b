#pragma once

// Radial global solutions of  U_i'' + U_i'/r = -sum_j a_ij r^{2 gamma} e^{U_j}.
//
// Everything is integrated in s = log r, where the system reads
//     d^2 U_i / ds^2 = -sum_j a_ij exp(2 mu s + U_j),   mu = 1 + gamma,
// and the singular weight turns into a smooth exponential. Near r = 0 the
// solution is a power series in x = r^{2 mu}; that series supplies the
// initial data and the values below the first grid node.

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

#include "liouville/algebra.hpp"

namespace liouville::ode {

using algebra::CoefficientMatrix;
using algebra::SingularityProfile;

struct ProblemSpec {
    CoefficientMatrix A;
    SingularityProfile singularity;
    Eigen::VectorXd alpha0;  // U_i(0)

    ProblemSpec(CoefficientMatrix a, SingularityProfile sing, Eigen::VectorXd alpha);
    int size() const { return A.size(); }
    double mu() const { return singularity.mu(); }
    // The usual normalization max_i U_i(0) = 0; optional.
    bool max_normalized() const { return alpha0.maxCoeff() == 0.0; }
};

/// Power-series solution U_i = sum_k c_{k,i} x^k, x = r^{2 mu}, with the
/// series of exp(U_i - alpha_i) kept alongside (used for the energy integrals
/// on [0, r_start]).
struct OriginSeries {
    std::vector<Eigen::VectorXd> coeffs;      // c_0 = alpha0, c_1, ..., c_K
    std::vector<Eigen::VectorXd> exp_coeffs;  // e_0 = 1, e_1, ... of exp(U - alpha0)
    double mu = 1.0;
    double x_valid = 0.0;  // series trusted for x <= x_valid

    double radius() const;  // r with r^{2 mu} = x_valid
};

OriginSeries build_origin_series(const ProblemSpec& spec, int terms = 12);

struct Sample {
    Eigen::VectorXd values;  // U_i(r)
    Eigen::VectorXd derivs;  // dU_i/dr
};

/// Series evaluation near the origin. Throws DomainError beyond the series radius.
Sample origin_series(const ProblemSpec& spec, double r);

/// Computed solution on a strictly increasing log-radius grid.
class RadialProfile {
public:
    RadialProfile(ProblemSpec spec, std::vector<double> s_nodes, std::vector<Eigen::VectorXd> values,
                  std::vector<Eigen::VectorXd> s_derivs);

    const ProblemSpec& spec() const { return spec_; }
    int size() const { return spec_.size(); }
    double mu() const { return spec_.mu(); }
    const std::vector<double>& s_nodes() const { return s_; }
    const std::vector<Eigen::VectorXd>& values() const { return u_; }
    const std::vector<Eigen::VectorXd>& s_derivs() const { return du_; }
    const OriginSeries& series() const { return series_; }
    double r_max() const;
    double r_min() const;
    double s_min() const { return s_.front(); }
    double s_max() const { return s_.back(); }

    /// U and dU/dr at radius r in [0, r_max].
    Sample evaluate(double r) const;

    /// U and dU/ds at log-radius s; s below the grid falls back to the series.
    void evaluate_log(double s, Eigen::VectorXd& values, Eigen::VectorXd& s_derivs) const;

    /// Right-hand side -sum_j a_ij exp(2 mu s + U_j): d^2U/ds^2 along the solution.
    Eigen::VectorXd second_s_derivative(double s, const Eigen::VectorXd& values) const;

private:
    ProblemSpec spec_;
    std::vector<double> s_;
    std::vector<Eigen::VectorXd> u_;
    std::vector<Eigen::VectorXd> du_;
    std::vector<Eigen::VectorXd> d2u_;
    OriginSeries series_;
};

inline constexpr double kDefaultRMax = 1e4;
inline constexpr double kDefaultTol = 1e-12;
inline constexpr double kSeriesStartRadius = 1e-6;
inline constexpr double kOverflowGuard = 50.0;

/// Adaptive Dormand-Prince 5(4) with PI step control from the series-matched
/// start to r_max. tol is the per-step local error bound (mixed abs/rel).
RadialProfile integrate(const ProblemSpec& spec, double r_max = kDefaultRMax, double tol = kDefaultTol);

/// Sample U(r) = W(a s + b) + c in log radius: maps a solution at strength mu
/// to one at strength a mu with U(0) shifted by c. Requires c = 2 log a + 2 mu b
/// (the exact symmetry of the radial system); nodes are mapped, not resampled.
RadialProfile remap_log_radius(const RadialProfile& profile, double a, double b, double c);

/// CSV with header r,U_1..U_n,dU_1..dU_n; 17 significant digits.
void write_profile_csv(std::ostream& os, const RadialProfile& profile);

}  // namespace liouville::ode
