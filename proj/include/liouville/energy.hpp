#pragma once

// Asymptotic data of a radial global solution: masses sigma_i, flux
// exponents m_i = sum_j a_ij sigma_j, the constants D_i and alpha_i = -U_i(0),
// plus the Pohozaev checks built on them.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "liouville/radial_ode.hpp"

namespace liouville::energy {

using ode::RadialProfile;

struct SolutionSummary {
    Eigen::VectorXd sigma;
    Eigen::VectorXd m;
    Eigen::VectorXd D;
    Eigen::VectorXd alpha;
    double mu = 1.0;
    double m_min = 0.0;
    int iterations = 0;
    std::vector<std::string> warnings;

    int size() const { return static_cast<int>(sigma.size()); }
    // e^{D_i - alpha_i}: the amplitude of the r^{-m_i} tail of e^{U_i}.
    Eigen::VectorXd tail_amplitude() const { return (D - alpha).array().exp().matrix(); }
};

/// sigma_iR = int_0^R r^{2 gamma + 1} e^{U_i} dr (the 1/2pi cancels the angle).
Eigen::VectorXd truncated_sigma(const RadialProfile& profile, double R);

/// D_iR = int_0^R log r sum_j a_ij r^{2 gamma + 1} e^{U_j} dr.
Eigen::VectorXd truncated_D(const RadialProfile& profile, double R);

/// Tail-corrected sigma, m, D, alpha. Throws ExtractionError when the
/// self-consistent tail iteration does not settle in 100 rounds or the
/// profile stops before the flux is within 1e-3 of its limit.
SolutionSummary extract_summary(const RadialProfile& profile);

struct Solved {
    RadialProfile profile;
    SolutionSummary summary;
};

/// integrate + extract_summary. When the flux has not settled by r_max the
/// radius is raised by factors of 100 up to max_r_max (a warning records it).
Solved solve(const ode::ProblemSpec& spec, double r_max = ode::kDefaultRMax, double tol = ode::kDefaultTol,
             double max_r_max = 1e30);

/// (sum a_ij sigma_i sigma_j - 4 mu sum sigma_i) / (4 mu sum sigma_i)
double pohozaev_residual(const SolutionSummary& summary, const Eigen::MatrixXd& A);
double pohozaev_residual(const SolutionSummary& summary, const algebra::CoefficientMatrix& A);

struct TailRow {
    double R;
    double defect;     // 4 sum sigma_iR/mu - sum a_ij (sigma_iR/mu)(sigma_jR/mu)
    double predicted;  // 2 sum e^{D_i - alpha_i}/mu^2 R^{2mu - m_i}
    double ratio;
};

std::vector<TailRow> pohozaev_tail_table(const RadialProfile& profile, const SolutionSummary& summary,
                                         const std::vector<double>& radii);
std::vector<TailRow> pohozaev_tail_table(const RadialProfile& profile, const std::vector<double>& radii);

/// U_i(r) minus the three-term large-r expansion
///   -m_i log r + D_i - alpha_i - sum_j a_ij e^{D_j - alpha_j} r^{2mu - m_j} / (m_j - 2mu)^2.
Eigen::VectorXd asymptotic_fit_error(const RadialProfile& profile, const SolutionSummary& summary, double r);

/// m_i recovered from the flux -r U_i'(r) at r_max plus its derivative tail.
Eigen::VectorXd flux_mass(const RadialProfile& profile, const SolutionSummary& summary);

/// Least-squares slope of log(sigma_i - sigma_iR) against log R on
/// log-spaced radii in [R_lo, R_hi].
double tail_decay_slope(const RadialProfile& profile, const SolutionSummary& summary, int component,
                        double R_lo, double R_hi, int samples = 16);

}  // namespace liouville::energy
