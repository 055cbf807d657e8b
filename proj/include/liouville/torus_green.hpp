#pragma once

// Green's function of a flat rectangular torus of area 1:
//   -Delta G(., p) = delta_p - 1,  int G(., p) = 0.
//
// Summing the Fourier series over the first index in closed form leaves a
// sum over the second index,
//   G = (Lx/2Ly)(X^2 - X + 1/6)
//     + (1/2pi) sum_{n>=1} cos(2 pi n Y) cosh(2 pi b n (X - 1/2)) / (n sinh(pi b n)),
// X = x/Lx in [0,1), Y = y/Ly, b = Lx/Ly. The slowly decaying first image on
// each side is summed exactly as -(1/4pi) log|1 - e^{-2 pi b u + 2 pi i Y}|^2,
// u in {X, 1 - X}; the remaining modes decay like e^{-2 pi b n}.

#include <Eigen/Dense>

#include <vector>

#include "liouville/errors.hpp"

namespace liouville::green {

using Point = Eigen::Vector2d;

class TorusGreen {
public:
    /// Periods (Lx, Ly) with Lx * Ly = 1.
    explicit TorusGreen(double Lx = 1.0, double Ly = 1.0, int n_modes = 16);

    double Lx() const { return L_[0]; }
    double Ly() const { return L_[1]; }
    int modes() const { return n_modes_; }

    /// Shortest representative of x - p.
    Point displacement(const Point& x, const Point& p) const;
    double distance(const Point& x, const Point& p) const { return displacement(x, p).norm(); }
    Point wrap(const Point& x) const;

    /// G(x, p); SingularityError when the torus distance is below 1e-8.
    double eval(const Point& x, const Point& p) const;
    /// Gradient in x.
    Point gradient(const Point& x, const Point& p) const;

    /// gamma(x, p) = G(x, p) + log|x - p| / 2pi with the shortest |x - p|;
    /// finite at x = p.
    double regular(const Point& x, const Point& p) const;
    Point regular_gradient(const Point& x, const Point& p) const;

    struct RegularPart {
        double value;            // gamma(p, p)
        Point gradient;          // grad_1 gamma(p, p)
        double extrapolated;     // Richardson limit over shrinking offsets
        double extrapolation_gap;
    };
    /// gamma(p, p) and grad_1 gamma(p, p). The value is the closed-form limit,
    /// confirmed by Richardson extrapolation of G + log r/2pi over offsets
    /// 1e-2, 5e-3, 2.5e-3; NonConvergence if the two disagree beyond 1e-8.
    RegularPart regular_part(const Point& p) const;

private:
    struct Parts {
        double value;
        Point grad;
    };
    // Everything except the singular image term, at reduced coordinates.
    Parts smooth_parts(double X, double Y) const;

    Eigen::Vector2d L_;
    bool swap_;  // evaluate with axes exchanged so that b >= 1
    double b_;
    int n_modes_;
    std::vector<double> coef_;  // e^{-2 pi b n} / (1 - e^{-2 pi b n})
};

/// Diagonal gamma(p_t, p_t), off-diagonal G(p_t, p_s). GeometryError when two
/// points are closer than 1e-4.
Eigen::MatrixXd gstar_matrix(const TorusGreen& g, const std::vector<Point>& points);

/// grad_1 G*(p_t, p_s) for all pairs (diagonal: grad_1 gamma).
std::vector<std::vector<Point>> gstar_gradients(const TorusGreen& g, const std::vector<Point>& points);

}  // namespace liouville::green
