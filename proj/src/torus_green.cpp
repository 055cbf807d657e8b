#include "liouville/torus_green.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace liouville::green {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kSmallW = 0.1;

// E(w) = (e^w - 1)/w
cd expm1_over(cd w) {
    if (std::abs(w) < kSmallW) {
        cd term = 1.0, sum = 1.0;
        for (int k = 2; k <= 14; ++k) {
            term *= w / static_cast<double>(k);
            sum += term;
        }
        return sum;
    }
    return (std::exp(w) - 1.0) / w;
}

// d/dw log E(w) = e^w/(e^w - 1) - 1/w
cd dlog_expm1_over(cd w) {
    if (std::abs(w) < kSmallW) {
        const cd w2 = w * w;
        return 0.5 + w * (1.0 / 12 + w2 * (-1.0 / 720 + w2 * (1.0 / 30240 + w2 * (-1.0 / 1209600))));
    }
    return 1.0 / (1.0 - std::exp(-w)) - 1.0 / w;
}

}  // namespace

TorusGreen::TorusGreen(double Lx, double Ly, int n_modes) : L_(Lx, Ly), n_modes_(n_modes) {
    if (!(Lx > 0.0 && Ly > 0.0) || !std::isfinite(Lx) || !std::isfinite(Ly))
        throw InvalidInput("torus periods must be positive");
    if (std::abs(Lx * Ly - 1.0) > 1e-12) throw InvalidInput("torus area Lx * Ly must equal 1");
    if (n_modes < 1) throw InvalidInput("n_modes must be at least 1");
    swap_ = Lx < Ly;
    b_ = swap_ ? Ly / Lx : Lx / Ly;
    const double a = 2.0 * kPi * b_;
    coef_.resize(n_modes + 1, 0.0);
    for (int n = 1; n <= n_modes; ++n) coef_[n] = std::exp(-a * n) / (-std::expm1(-a * n));
}

Point TorusGreen::wrap(const Point& x) const {
    Point w;
    for (int k = 0; k < 2; ++k) {
        w[k] = std::fmod(x[k], L_[k]);
        if (w[k] < 0.0) w[k] += L_[k];
    }
    return w;
}

Point TorusGreen::displacement(const Point& x, const Point& p) const {
    Point d = x - p;
    for (int k = 0; k < 2; ++k) d[k] -= L_[k] * std::round(d[k] / L_[k]);
    return d;
}

// gamma at reduced coordinates X, Y in [0, 1/2] of the (possibly swapped)
// torus, and its derivatives in X and theta = 2 pi Y.
TorusGreen::Parts TorusGreen::smooth_parts(double X, double Y) const {
    const double a = 2.0 * kPi * b_;
    const double th = 2.0 * kPi * Y;
    const double Ly = swap_ ? L_[0] : L_[1];

    double val = 0.5 * b_ * (X * X - X + 1.0 / 6.0) - std::log(2.0 * kPi / Ly) / (2.0 * kPi);
    double dX = 0.5 * b_ * (2.0 * X - 1.0);
    double dth = 0.0;

    // near image with the log|w| removed
    const cd w1(-a * X, th);
    val -= std::log(std::norm(expm1_over(w1))) / (4.0 * kPi);
    const cd L1 = dlog_expm1_over(w1);
    dX += 2.0 * a * L1.real() / (4.0 * kPi);
    dth += 2.0 * L1.imag() / (4.0 * kPi);

    // far image, u = 1 - X
    const cd z2 = std::exp(cd(-a * (1.0 - X), th));
    val -= std::log1p(-2.0 * z2.real() + std::norm(z2)) / (4.0 * kPi);
    const cd q2 = z2 / (1.0 - z2);
    dX += 2.0 * a * q2.real() / (4.0 * kPi);
    dth -= 2.0 * q2.imag() / (4.0 * kPi);

    // remaining modes
    double s = 0.0, sX = 0.0, sth = 0.0;
    for (int n = 1; n <= n_modes_; ++n) {
        const double e1 = std::exp(-a * n * X), e2 = std::exp(-a * n * (1.0 - X));
        const double c = std::cos(n * th), sn = std::sin(n * th);
        s += coef_[n] * c * (e1 + e2) / n;
        sX -= a * coef_[n] * c * (e1 - e2);
        sth -= coef_[n] * sn * (e1 + e2);
    }
    val += s / (2.0 * kPi);
    dX += sX / (2.0 * kPi);
    dth += sth / (2.0 * kPi);
    return {val, Point(dX, dth)};
}

double TorusGreen::regular(const Point& x, const Point& p) const {
    Point d = displacement(x, p);
    if (swap_) std::swap(d[0], d[1]);
    const double Lx = swap_ ? L_[1] : L_[0], Ly = swap_ ? L_[0] : L_[1];
    return smooth_parts(std::abs(d[0]) / Lx, std::abs(d[1]) / Ly).value;
}

Point TorusGreen::regular_gradient(const Point& x, const Point& p) const {
    Point d = displacement(x, p);
    if (swap_) std::swap(d[0], d[1]);
    const double Lx = swap_ ? L_[1] : L_[0], Ly = swap_ ? L_[0] : L_[1];
    const Parts parts = smooth_parts(std::abs(d[0]) / Lx, std::abs(d[1]) / Ly);
    Point g(parts.grad[0] / Lx, parts.grad[1] * 2.0 * kPi / Ly);
    if (d[0] < 0.0) g[0] = -g[0];
    if (d[1] < 0.0) g[1] = -g[1];
    if (swap_) std::swap(g[0], g[1]);
    return g;
}

double TorusGreen::eval(const Point& x, const Point& p) const {
    const double r = distance(x, p);
    if (r < 1e-8) throw SingularityError("G(x, p) is singular at x = p");
    return regular(x, p) - std::log(r) / (2.0 * kPi);
}

Point TorusGreen::gradient(const Point& x, const Point& p) const {
    const Point d = displacement(x, p);
    const double r2 = d.squaredNorm();
    if (r2 < 1e-16) throw SingularityError("grad G(x, p) is singular at x = p");
    return regular_gradient(x, p) - d / (2.0 * kPi * r2);
}

TorusGreen::RegularPart TorusGreen::regular_part(const Point& p) const {
    RegularPart out;
    out.value = regular(p, p);
    out.gradient = regular_gradient(p, p);

    auto avg = [&](double h) {
        double s = 0.0;
        for (const Point& e : {Point(h, 0), Point(-h, 0), Point(0, h), Point(0, -h)}) s += eval(p + e, p);
        return 0.25 * s + std::log(h) / (2.0 * kPi);
    };
    const double f0 = avg(1e-2), f1 = avg(5e-3), f2 = avg(2.5e-3);
    const double r0 = (4.0 * f1 - f0) / 3.0, r1 = (4.0 * f2 - f1) / 3.0;
    out.extrapolated = (16.0 * r1 - r0) / 15.0;
    out.extrapolation_gap = std::abs(out.extrapolated - out.value);
    if (!(out.extrapolation_gap < 1e-8))
        throw NonConvergence("regular-part extrapolation disagrees with the closed-form limit", {out.extrapolated},
                             out.extrapolation_gap);
    return out;
}

namespace {

void check_points(const TorusGreen& g, const std::vector<Point>& pts) {
    for (const Point& p : pts)
        if (!p.allFinite()) throw InvalidInput("points must be finite");
    for (std::size_t t = 0; t < pts.size(); ++t)
        for (std::size_t s = t + 1; s < pts.size(); ++s)
            if (g.distance(pts[t], pts[s]) < 1e-4) throw GeometryError("points closer than 1e-4 on the torus");
}

}  // namespace

Eigen::MatrixXd gstar_matrix(const TorusGreen& g, const std::vector<Point>& pts) {
    check_points(g, pts);
    const int N = static_cast<int>(pts.size());
    Eigen::MatrixXd M(N, N);
    for (int t = 0; t < N; ++t) {
        M(t, t) = g.regular(pts[t], pts[t]);
        for (int s = t + 1; s < N; ++s) M(t, s) = M(s, t) = g.eval(pts[t], pts[s]);
    }
    return M;
}

std::vector<std::vector<Point>> gstar_gradients(const TorusGreen& g, const std::vector<Point>& pts) {
    check_points(g, pts);
    const std::size_t N = pts.size();
    std::vector<std::vector<Point>> out(N, std::vector<Point>(N));
    for (std::size_t t = 0; t < N; ++t)
        for (std::size_t s = 0; s < N; ++s)
            out[t][s] = t == s ? g.regular_gradient(pts[t], pts[t]) : g.gradient(pts[t], pts[s]);
    return out;
}

}  // namespace liouville::green
