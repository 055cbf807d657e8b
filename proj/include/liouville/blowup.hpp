#pragma once

// Blowup configurations on the flat torus and the coefficient formulas built
// from them: b_it, the leading terms of rho_k - rho, the location residuals
// of regular blowup points and the H_it compatibility residual.

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "liouville/algebra.hpp"
#include "liouville/errors.hpp"
#include "liouville/torus_green.hpp"

namespace liouville::blowup {

using green::Point;

/// Coefficient function h_i as a named preset with exact log-derivatives.
///   constant:   h = base
///   sinusoidal: h = base (1 + amplitude sin phi),
///               phi = 2 pi (f1 x / Lx + f2 y / Ly) + phase
/// f1, f2 must be integers so that h lives on the torus.
struct HField {
    enum class Kind { Constant, Sinusoidal };
    Kind kind = Kind::Constant;
    double base = 1.0;
    double amplitude = 0.0;
    double f1 = 0.0, f2 = 0.0;
    double phase = 0.0;

    static HField constant(double base = 1.0);
    static HField sinusoidal(double base, double amplitude, double f1, double f2, double phase = 0.0);

    void validate() const;
    double value(const Point& x, const green::TorusGreen& g) const;
    Point grad_log(const Point& x, const green::TorusGreen& g) const;
    double lap_log(const Point& x, const green::TorusGreen& g) const;
};

struct BlowupConfiguration {
    BlowupConfiguration(green::TorusGreen geometry, algebra::CoefficientMatrix A, algebra::RhoVector rho);

    green::TorusGreen geometry;
    algebra::CoefficientMatrix A;
    algebra::RhoVector rho;
    std::vector<Point> points;
    std::vector<algebra::SingularityProfile> strengths;
    double n_L = 0.0;
    std::vector<HField> h;           // one per component
    std::vector<double> curvature;   // K(p_t); empty means 0
    Eigen::VectorXd D, alpha;        // per component
    std::optional<double> mass_term; // replaces 2 pi n_L inside b_it

    int components() const { return A.size(); }
    int size() const { return static_cast<int>(points.size()); }
    /// Throws InvalidInput on inconsistent sizes, n_L != sum mu (1e-12),
    /// non-positive h or points closer than 1e-4.
    void validate() const;
    /// Indices of regular points (gamma_t = 0).
    std::vector<int> regular_set() const;
    algebra::FrakM frak() const;
    bool at_q(double rel_tol = 1e-8) const;
    double curvature_at(int t) const;
    /// sum_l mu_l G*(p_t, p_l)
    double gstar_sum(int t) const;
    /// sum_l mu_l grad_1 G*(p_t, p_l)
    Point gstar_grad_sum(int t) const;
};

struct AIntegralOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-11;
};

/// A_{i,delta0} at the point p_t over its Voronoi cell on the torus.
/// GeometryError when delta0 is not below the cell inradius.
double a_integral(const BlowupConfiguration& config, int i, int t, double delta0,
                  const AIntegralOptions& opt = {});

struct ALimit {
    double at_delta0;
    double at_half;
    double limit;     // Richardson step with exponent (2 - m) mu_t + 2
    double exponent;
};

/// lim A_{i,delta0} from delta0 and delta0/2. DomainError when the exponent
/// is not positive (the limit does not exist).
ALimit a_limit(const BlowupConfiguration& config, int i, int t, double delta0, const AIntegralOptions& opt = {});

/// e^{D_i - alpha_i} [Delta log h_i / 4 - K / 2 + 2 pi n_L
///                    + |grad log h_i + 8 pi sum_l mu_l grad_1 G*|^2 / 4] at p_t.
double b_coefficient(const BlowupConfiguration& config, int i, int t);

struct LeadingTermRow {
    int i, t;
    double B;
    ALimit A;
};

struct LeadingTerm {
    double D = 0.0;
    double prediction = 0.0;  // D eps^{m - 2} / n_L
    double frak_m = 0.0;
    bool on_surface = false;  // |Lambda_L(rho)| <= 1e-8
    std::vector<LeadingTermRow> rows;
};

LeadingTerm leading_term_general(const BlowupConfiguration& config, double delta0, double eps,
                                 const AIntegralOptions& opt = {});

/// -4 sum_i sum_{t in I_2} b_it eps^2 log(1/eps). WrongRegime unless rho = Q
/// and some point is regular.
double leading_term_Q(const BlowupConfiguration& config, double eps);

enum class Regime { General, Q };

Point location_residual(const BlowupConfiguration& config, int t, Regime regime);

struct LocationSearch {
    Point location;
    double residual_norm;
    int iterations;
    bool converged;
};

/// Moves p_t (others fixed) to minimize |location_residual|, Nelder-Mead
/// started from the current p_t with the given initial step.
LocationSearch locate_regular_point(const BlowupConfiguration& config, int t, Regime regime, double step = 0.05,
                                    double tol = 1e-10, int max_iter = 2000);

/// (H_it - H_is) - (H_jt - H_js),
/// H_it = 2 pi m_i / (m_i - 2) sum_l mu_l G*(p_t, p_l) + log(h_i(p_t) / mu_t^{m_i}) / (m_i - 2).
double h_relation_residual(const BlowupConfiguration& config, int i, int j, int t, int s);

}  // namespace liouville::blowup
