#pragma once

// Interaction-matrix checks and the closed-form objects of rho-space:
// critical values, the hypersurface function Lambda_L, the normal-direction
// masses, the symmetric point Q and region classification.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "liouville/errors.hpp"

namespace liouville::algebra {

struct Clause {
    std::string name;
    bool passed;
};

struct StructureReport {
    std::vector<Clause> h1;  // symmetric, nonnegative, irreducible, invertible
    std::vector<Clause> h2;  // a^ii <= 0, a^ij >= 0 (i != j), row sums of A^-1 >= 0
    bool h1_ok() const;
    bool h2_ok() const;
};

/// Evaluates every (H1)/(H2) clause. Throws InvalidInput for non-square or
/// non-finite input; a failing clause is reported, never thrown.
StructureReport validate_structure(const Eigen::MatrixXd& entries);

/// The interaction matrix A. Construction requires (H1); (H2) is recorded in
/// the report and is only a warning.
class CoefficientMatrix {
public:
    explicit CoefficientMatrix(Eigen::MatrixXd entries);
    static CoefficientMatrix from_rows(const std::vector<std::vector<double>>& rows);

    int size() const { return static_cast<int>(entries_.rows()); }
    double operator()(int i, int j) const { return entries_(i, j); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    const Eigen::MatrixXd& inverse() const { return inverse_; }
    const StructureReport& report() const { return report_; }
    bool satisfies_h2() const { return report_.h2_ok(); }

private:
    Eigen::MatrixXd entries_;
    Eigen::MatrixXd inverse_;
    StructureReport report_;
};

/// Strength of a source: gamma in (-1, 0], mu = 1 + gamma. gamma = 0 is a
/// regular point.
class SingularityProfile {
public:
    explicit SingularityProfile(double gamma);
    static SingularityProfile from_mu(double mu) { return SingularityProfile(mu - 1.0); }
    double gamma() const { return gamma_; }
    double mu() const { return 1.0 + gamma_; }
    bool regular() const { return gamma_ == 0.0; }

private:
    double gamma_;
};

class RhoVector {
public:
    explicit RhoVector(Eigen::VectorXd values);
    int size() const { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_[i]; }
    const Eigen::VectorXd& values() const { return values_; }

private:
    Eigen::VectorXd values_;
};

struct FrakM {
    Eigen::VectorXd frak_m_i;
    double frak_m = 0.0;
    std::vector<int> minimizers;  // I_1, zero based
};

struct HeightQuadratic {
    double B = 0.0;
    double C = 0.0;
    double E = 0.0;
};

struct Region {
    // rho lies between Gamma_L and Gamma_{L+1}; L = 0 means below the first
    // surface. When on_boundary, rho sits on Gamma_{boundary_index}.
    int L = 0;
    bool on_boundary = false;
    int boundary_index = 0;
    double ratio = 0.0;  // sum a_ij rho_i rho_j / sum rho_i
};

/// Sigma = {8 m pi + sum_{l in Lambda} 8 pi mu_l} \ {0}, m = 0..m_max,
/// sorted, duplicates merged at relative 1e-12.
std::vector<double> critical_values(const std::vector<SingularityProfile>& strengths, int m_max);

double lambda_L(const RhoVector& rho, const CoefficientMatrix& A, double n_L);

FrakM frak_m(const RhoVector& rho, const CoefficientMatrix& A, double n_L);

/// Solves sum_j a_ij Q_j = 8 pi n_L.
RhoVector q_point(const CoefficientMatrix& A, double n_L);

Region classify_region(const RhoVector& rho, const CoefficientMatrix& A,
                       const std::vector<double>& sigma_values);

/// Root of lambda^2 + B lambda + C = 1 + E on the branch near 1.
double solve_height_quadratic(const HeightQuadratic& q);

}  // namespace liouville::algebra
