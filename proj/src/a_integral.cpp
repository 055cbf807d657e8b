#include <cmath>
#include <limits>
#include <numbers>

#include "liouville/blowup.hpp"
#include "liouville/quadrature.hpp"

namespace liouville::blowup {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kScanAngles = 720;

// Voronoi cell of p_t on the torus, seen from p_t: the half-planes
// e . x < |d|^2 / 2 for every other point image d.
class Cell {
public:
    Cell(const green::TorusGreen& g, const std::vector<Point>& pts, int t) {
        const Point pt = g.wrap(pts[t]);
        for (std::size_t l = 0; l < pts.size(); ++l) {
            const Point pl = g.wrap(pts[l]);
            for (int a = -2; a <= 2; ++a)
                for (int b = -2; b <= 2; ++b) {
                    if (static_cast<int>(l) == t && a == 0 && b == 0) continue;
                    images_.push_back(pl - pt + Point(a * g.Lx(), b * g.Ly()));
                }
        }
        inradius_ = std::numeric_limits<double>::infinity();
        for (const Point& d : images_) inradius_ = std::min(inradius_, 0.5 * d.norm());
    }

    double inradius() const { return inradius_; }

    double radius(double th) const { return radius_and_active(th).first; }

    // Angles in (0, 2 pi) where the active wall changes.
    std::vector<double> corners() const {
        std::vector<double> out;
        const double h = 2.0 * kPi / kScanAngles;
        int prev = radius_and_active(0.0).second;
        for (int k = 1; k <= kScanAngles; ++k) {
            const int cur = radius_and_active(k * h).second;
            if (cur == prev) continue;
            double lo = (k - 1) * h, hi = k * h;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (radius_and_active(mid).second == prev ? lo : hi) = mid;
            }
            if (k < kScanAngles || hi < 2.0 * kPi - 1e-12) out.push_back(0.5 * (lo + hi));
            prev = cur;
        }
        return out;
    }

private:
    std::pair<double, int> radius_and_active(double th) const {
        const Point e(std::cos(th), std::sin(th));
        double best = std::numeric_limits<double>::infinity();
        int arg = -1;
        for (std::size_t k = 0; k < images_.size(); ++k) {
            const double ed = e.dot(images_[k]);
            if (ed <= 0.0) continue;
            const double r = 0.5 * images_[k].squaredNorm() / ed;
            if (r < best) {
                best = r;
                arg = static_cast<int>(k);
            }
        }
        return {best, arg};
    }

    std::vector<Point> images_;
    double inradius_;
};

double checked(const quad::ScalarResult& r, const char* what) {
    if (!r.converged) throw NonConvergence(std::string("A integral: ") + what + " quadrature did not converge", {r.value}, r.error);
    return r.value;
}

}  // namespace

double a_integral(const BlowupConfiguration& config, int i, int t, double delta0, const AIntegralOptions& opt) {
    config.validate();
    if (i < 0 || i >= config.components()) throw InvalidInput("component index out of range");
    if (t < 0 || t >= config.size()) throw InvalidInput("point index out of range");
    if (!(delta0 > 0.0) || !std::isfinite(delta0)) throw InvalidInput("delta0 must be positive");

    const green::TorusGreen& g = config.geometry;
    const Cell cell(g, config.points, t);
    if (!(delta0 < cell.inradius()))
        throw GeometryError("delta0 must be below the inradius " + std::to_string(cell.inradius()) + " of the cell");

    const double m = config.frak().frak_m;
    const double mu = config.strengths[t].mu();
    const double p = (2.0 - m) * mu;
    const Point pt = g.wrap(config.points[t]);
    const HField& h = config.h[i];
    const double h_pt = h.value(pt, g);
    const double gamma_pt = g.regular(pt, pt);
    std::vector<double> g_pt(config.size(), 0.0);
    for (int l = 0; l < config.size(); ++l)
        if (l != t) g_pt[l] = g.eval(pt, config.points[l]);

    // smooth factor, F(p_t) = 1
    auto F = [&](const Point& x) {
        double e = mu * (g.regular(x, pt) - gamma_pt);
        for (int l = 0; l < config.size(); ++l)
            if (l != t) e += config.strengths[l].mu() * (g.eval(x, config.points[l]) - g_pt[l]);
        return h.value(x, g) / h_pt * std::exp(2.0 * kPi * m * e);
    };

    // angular mean of F on the circle of radius r, trapezoid rule with doubling
    auto F_bar = [&](double r) {
        int n = 16;
        double sum = 0.0;
        for (int k = 0; k < n; ++k) sum += F(pt + r * Point(std::cos(2 * kPi * k / n), std::sin(2 * kPi * k / n)));
        double mean = sum / n;
        while (n < 8192) {
            for (int k = 0; k < n; ++k) {
                const double th = 2 * kPi * (k + 0.5) / n;
                sum += F(pt + r * Point(std::cos(th), std::sin(th)));
            }
            n *= 2;
            const double next = sum / n;
            const bool done = std::abs(next - mean) < 1e-14;
            mean = next;
            if (done) break;
        }
        return mean;
    };

    quad::Options qo;
    qo.abs_tol = opt.abs_tol;
    qo.rel_tol = opt.rel_tol;

    const double rho0 = std::max(delta0, 0.5 * cell.inradius());
    double disk = 0.0;
    if (rho0 > delta0)
        disk = checked(quad::integrate(quad::ScalarIntegrand([&](double r) { return std::pow(r, p - 1.0) * (F_bar(r) - 1.0); }),
                                       delta0, rho0, qo),
                       "disk");

    quad::Options inner_opt = qo;
    inner_opt.abs_tol = 0.1 * opt.abs_tol;
    inner_opt.rel_tol = 0.1 * opt.rel_tol;
    auto ring = [&](double th) {
        const Point e(std::cos(th), std::sin(th));
        return checked(quad::integrate(quad::ScalarIntegrand([&](double r) { return std::pow(r, p - 1.0) * F(pt + r * e); }),
                                       rho0, cell.radius(th), inner_opt),
                       "radial");
    };
    const double outer = checked(quad::integrate(quad::ScalarIntegrand(ring), 0.0, 2.0 * kPi, qo, cell.corners()), "angular");

    return std::pow(rho0, p) / mu - (m - 2.0) * disk - (m - 2.0) / (2.0 * kPi) * outer;
}

}  // namespace liouville::blowup
