#include "liouville/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace liouville::quad {

namespace {

// Kronrod nodes (abscissae on [0,1], symmetric), Kronrod and Gauss weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b;
    Eigen::VectorXd value;
    double error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const VectorIntegrand& f, double a, double b, int& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Eigen::VectorXd fc = f(c);
    Eigen::VectorXd kron = fc * kWgk[7];
    Eigen::VectorXd gauss = fc * kWg[3];
    evals += 1;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        Eigen::VectorXd s = f(c - dx) + f(c + dx);
        evals += 2;
        kron += kWgk[j] * s;
        if (j % 2 == 1) gauss += kWg[j / 2] * s;
    }
    Piece p{a, b, kron * h, 0.0};
    p.error = ((kron - gauss) * h).cwiseAbs().maxCoeff();
    return p;
}

}  // namespace

Result integrate(const VectorIntegrand& f, double a, double b, const Options& opt,
                 const std::vector<double>& breakpoints) {
    Result res;
    if (a == b) {
        res.value = f(a) * 0.0;
        res.converged = true;
        return res;
    }
    const double sign = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);

    std::vector<double> cuts{lo};
    for (double x : breakpoints)
        if (x > lo && x < hi) cuts.push_back(x);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Piece> heap;
    Eigen::VectorXd total;
    double err = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        Piece p = gk15(f, cuts[k], cuts[k + 1], res.evaluations);
        total = total.size() ? Eigen::VectorXd(total + p.value) : p.value;
        err += p.error;
        heap.push(std::move(p));
    }

    int intervals = static_cast<int>(heap.size());
    while (err > std::max(opt.abs_tol, opt.rel_tol * total.cwiseAbs().maxCoeff()) &&
           intervals < opt.max_intervals) {
        Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(std::move(worst));
            break;  // interval at machine resolution
        }
        Piece left = gk15(f, worst.a, mid, res.evaluations);
        Piece right = gk15(f, mid, worst.b, res.evaluations);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++intervals;
    }

    // Re-sum from the pieces to shed accumulated cancellation error.
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(total.size());
    double esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    res.value = sign * sum;
    res.error = esum;
    res.converged = esum <= std::max(opt.abs_tol, opt.rel_tol * sum.cwiseAbs().maxCoeff());
    return res;
}

ScalarResult integrate(const ScalarIntegrand& f, double a, double b, const Options& opt,
                       const std::vector<double>& breakpoints) {
    auto wrapped = [&f](double x) {
        Eigen::VectorXd v(1);
        v[0] = f(x);
        return v;
    };
    Result r = integrate(VectorIntegrand(wrapped), a, b, opt, breakpoints);
    return {r.value[0], r.error, r.converged};
}

}  // namespace liouville::quad
