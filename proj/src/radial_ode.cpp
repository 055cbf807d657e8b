#include "liouville/radial_ode.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace liouville::ode {

ProblemSpec::ProblemSpec(CoefficientMatrix a, SingularityProfile sing, Eigen::VectorXd alpha)
    : A(std::move(a)), singularity(sing), alpha0(std::move(alpha)) {
    if (alpha0.size() != A.size()) throw InvalidInput("alpha0 length must match the matrix size");
    if (!alpha0.allFinite()) throw InvalidInput("alpha0 must be finite");
}

// ---------------------------------------------------------------------------
// Origin series

double OriginSeries::radius() const { return std::pow(x_valid, 1.0 / (2.0 * mu)); }

OriginSeries build_origin_series(const ProblemSpec& spec, int terms) {
    const int n = spec.size();
    const double mu = spec.mu();
    const Eigen::VectorXd weight = spec.alpha0.array().exp().matrix();

    OriginSeries s;
    s.mu = mu;
    s.coeffs.push_back(spec.alpha0);
    s.exp_coeffs.push_back(Eigen::VectorXd::Ones(n));
    for (int k = 1; k <= terms; ++k) {
        // 4 mu^2 k^2 c_k = -A (e^alpha .* e_{k-1})
        Eigen::VectorXd ck = -(spec.A.entries() * weight.cwiseProduct(s.exp_coeffs[k - 1])) /
                             (4.0 * mu * mu * k * k);
        s.coeffs.push_back(ck);
        // exp(g): k e_k = sum_{m=1}^k m c_m e_{k-m}
        Eigen::VectorXd ek = Eigen::VectorXd::Zero(n);
        for (int m = 1; m <= k; ++m) ek += m * s.coeffs[m].cwiseProduct(s.exp_coeffs[k - m]);
        s.exp_coeffs.push_back(ek / k);
    }

    const double scale = std::max(s.coeffs[1].cwiseAbs().maxCoeff(), 1e-300);
    const double last = s.coeffs[terms].cwiseAbs().maxCoeff();
    double x_valid = 0.05 / scale;
    if (last > 0.0) x_valid = std::min(x_valid, std::pow(1e-17 / last, 1.0 / terms));
    s.x_valid = x_valid;
    return s;
}

namespace {

Sample eval_series(const OriginSeries& s, double r) {
    const int n = static_cast<int>(s.coeffs[0].size());
    Sample out{s.coeffs[0], Eigen::VectorXd::Zero(n)};
    if (r == 0.0) {
        // dU/dr ~ 2 mu c_1 r^{2 mu - 1}
        if (s.mu == 0.5)
            out.derivs = s.coeffs[1];
        else if (s.mu < 0.5)
            out.derivs = s.coeffs[1].unaryExpr([](double c) {
                return c < 0 ? -HUGE_VAL : (c > 0 ? HUGE_VAL : 0.0);
            });
        return out;
    }
    const double x = std::pow(r, 2.0 * s.mu);
    double xk = 1.0;
    Eigen::VectorXd ds = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 1; k < s.coeffs.size(); ++k) {
        xk *= x;
        out.values += s.coeffs[k] * xk;
        ds += s.coeffs[k] * (static_cast<double>(k) * xk);
    }
    out.derivs = ds * (2.0 * s.mu / r);
    return out;
}

// Quintic Hermite basis on t in [0, 1] and its derivative.
struct Basis {
    double h0, h1, h2, h3, h4, h5;
};

Basis quintic(double t) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    return {1 - 10 * t3 + 15 * t4 - 6 * t5,
            t - 6 * t3 + 8 * t4 - 3 * t5,
            0.5 * (t2 - 3 * t3 + 3 * t4 - t5),
            10 * t3 - 15 * t4 + 6 * t5,
            -4 * t3 + 7 * t4 - 3 * t5,
            0.5 * (t3 - 2 * t4 + t5)};
}

Basis quintic_dt(double t) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    return {-30 * t2 + 60 * t3 - 30 * t4,
            1 - 18 * t2 + 32 * t3 - 15 * t4,
            t - 4.5 * t2 + 6 * t3 - 2.5 * t4,
            30 * t2 - 60 * t3 + 30 * t4,
            -12 * t2 + 28 * t3 - 15 * t4,
            1.5 * t2 - 4 * t3 + 2.5 * t4};
}

Eigen::VectorXd rhs_second(const ProblemSpec& spec, double s, const Eigen::VectorXd& u) {
    const Eigen::VectorXd e = (u.array() + 2.0 * spec.mu() * s).exp().matrix();
    return -(spec.A.entries() * e);
}

}  // namespace

Sample origin_series(const ProblemSpec& spec, double r) {
    if (!(r >= 0.0)) throw InvalidInput("radius must be nonnegative");
    const OriginSeries s = build_origin_series(spec);
    if (r > s.radius()) throw DomainError("radius beyond the origin-series validity range");
    return eval_series(s, r);
}

// ---------------------------------------------------------------------------
// Profile

RadialProfile::RadialProfile(ProblemSpec spec, std::vector<double> s_nodes,
                             std::vector<Eigen::VectorXd> values, std::vector<Eigen::VectorXd> s_derivs)
    : spec_(std::move(spec)),
      s_(std::move(s_nodes)),
      u_(std::move(values)),
      du_(std::move(s_derivs)),
      series_(build_origin_series(spec_)) {
    if (s_.size() < 2 || u_.size() != s_.size() || du_.size() != s_.size())
        throw InvalidInput("profile needs at least two consistent nodes");
    for (std::size_t k = 0; k < s_.size(); ++k) {
        if (k > 0 && !(s_[k] > s_[k - 1])) throw InvalidInput("profile grid must be strictly increasing");
        if (!u_[k].allFinite() || !du_[k].allFinite()) throw InvalidInput("profile has non-finite values");
    }
    // below the first node the origin series takes over, so it has to reach that far
    if (s_.front() > std::log(series_.radius()) + 1e-12)
        throw DomainError("first grid node lies beyond the origin-series range");
    d2u_.reserve(s_.size());
    for (std::size_t k = 0; k < s_.size(); ++k) d2u_.push_back(rhs_second(spec_, s_[k], u_[k]));
}

double RadialProfile::r_max() const { return std::exp(s_.back()); }
double RadialProfile::r_min() const { return std::exp(s_.front()); }

Eigen::VectorXd RadialProfile::second_s_derivative(double s, const Eigen::VectorXd& values) const {
    return rhs_second(spec_, s, values);
}

void RadialProfile::evaluate_log(double s, Eigen::VectorXd& values, Eigen::VectorXd& s_derivs) const {
    if (s < s_.front()) {
        const Sample smp = eval_series(series_, std::exp(s));
        values = smp.values;
        s_derivs = smp.derivs * std::exp(s);
        return;
    }
    if (s > s_.back()) {
        if (s > s_.back() + 1e-12 * std::max(1.0, std::abs(s_.back())))
            throw OutOfRange("log radius beyond the profile range");
        s = s_.back();
    }
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t k = static_cast<std::size_t>(it - s_.begin());
    k = std::clamp<std::size_t>(k, 1, s_.size() - 1) - 1;
    const double h = s_[k + 1] - s_[k];
    const double t = (s - s_[k]) / h;
    const Basis b = quintic(t);
    const Basis d = quintic_dt(t);
    values = b.h0 * u_[k] + (h * b.h1) * du_[k] + (h * h * b.h2) * d2u_[k] + b.h3 * u_[k + 1] +
             (h * b.h4) * du_[k + 1] + (h * h * b.h5) * d2u_[k + 1];
    s_derivs = (d.h0 * u_[k] + (h * d.h1) * du_[k] + (h * h * d.h2) * d2u_[k] + d.h3 * u_[k + 1] +
                (h * d.h4) * du_[k + 1] + (h * h * d.h5) * d2u_[k + 1]) /
               h;
}

Sample RadialProfile::evaluate(double r) const {
    if (!(r >= 0.0)) throw InvalidInput("radius must be nonnegative");
    if (r > r_max() * (1.0 + 1e-12)) throw OutOfRange("radius beyond r_max");
    if (r < r_min()) return eval_series(series_, r);
    Sample out;
    Eigen::VectorXd ds;
    evaluate_log(std::log(r), out.values, ds);
    out.derivs = ds / r;
    return out;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct System {
    const ProblemSpec& spec;
    int n;
    Eigen::VectorXd operator()(double s, const Eigen::VectorXd& y) const {
        Eigen::VectorXd f(2 * n);
        f.head(n) = y.tail(n);
        f.tail(n) = rhs_second(spec, s, y.head(n));
        return f;
    }
};

}  // namespace

RadialProfile integrate(const ProblemSpec& spec, double r_max, double tol) {
    if (!(r_max >= 10.0) || !std::isfinite(r_max)) throw InvalidInput("r_max must be >= 10");
    if (!(tol >= 1e-13 && tol <= 1e-4)) throw InvalidInput("tol must lie in [1e-13, 1e-4]");
    if (spec.alpha0.maxCoeff() > kOverflowGuard)
        throw BlowupError("initial value exceeds the overflow guard U <= 50");

    const int n = spec.size();
    const double mu = spec.mu();
    const OriginSeries series = build_origin_series(spec);

    const double x_start = std::min(std::pow(kSeriesStartRadius, 2.0 * mu), 0.01 * series.x_valid);
    double s = std::log(x_start) / (2.0 * mu);
    while (std::exp(s) > kSeriesStartRadius) s = std::nextafter(s, -INFINITY);
    const double s_end = std::log(r_max);

    const Sample start = eval_series(series, std::exp(s));
    Eigen::VectorXd y(2 * n);
    y.head(n) = start.values;
    y.tail(n) = start.derivs * std::exp(s);

    std::vector<double> nodes{s};
    std::vector<Eigen::VectorXd> vals{y.head(n)};
    std::vector<Eigen::VectorXd> ders{y.tail(n)};

    const System f{spec, n};
    const double h_max = 0.5;
    const double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9;
    double facold = 1e-4;
    double h = std::min(h_max, 1e-2 * (s_end - s));
    bool last_rejected = false;

    Eigen::VectorXd k1 = f(s, y);
    while (s < s_end) {
        const bool final_step = s + 1.01 * h >= s_end;
        if (final_step) h = s_end - s;
        if (h < 1e-14 * std::max(1.0, std::abs(s)))
            throw IntegrationError("step size underflow", std::exp(s));

        const Eigen::VectorXd k2 = f(s + c2 * h, y + h * a21 * k1);
        const Eigen::VectorXd k3 = f(s + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const Eigen::VectorXd k4 = f(s + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::VectorXd k5 = f(s + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::VectorXd k6 =
            f(s + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Eigen::VectorXd y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const Eigen::VectorXd k7 = f(s + h, y1);
        const Eigen::VectorXd err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        if (!y1.allFinite()) {
            h *= 0.25;
            last_rejected = true;
            continue;
        }
        double err = 0.0;
        for (int i = 0; i < 2 * n; ++i) {
            const double sk = tol + tol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err += (err_vec[i] / sk) * (err_vec[i] / sk);
        }
        err = std::sqrt(err / (2 * n));

        const double fac11 = std::pow(err, expo1);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::clamp(fac / safe, 1.0 / 10.0, 5.0);
        double h_new = h / fac;

        if (err <= 1.0) {
            facold = std::max(err, 1e-4);
            s = final_step ? s_end : s + h;
            y = y1;
            k1 = k7;
            if (y.head(n).maxCoeff() > kOverflowGuard)
                throw BlowupError("solution exceeds the overflow guard U <= 50");
            nodes.push_back(s);
            vals.push_back(y.head(n));
            ders.push_back(y.tail(n));
            if (last_rejected) h_new = std::min(h_new, h);
            last_rejected = false;
            h = std::min(h_new, h_max);
        } else {
            h = h / std::min(5.0, fac11 / safe);
            last_rejected = true;
        }
    }
    return RadialProfile(spec, std::move(nodes), std::move(vals), std::move(ders));
}

RadialProfile remap_log_radius(const RadialProfile& profile, double a, double b, double c) {
    if (!(a > 0.0) || !std::isfinite(b) || !std::isfinite(c)) throw DomainError("invalid log-radius map");
    const double mu_new = a * profile.mu();
    if (!(mu_new > 0.0 && mu_new <= 1.0 + 1e-15))
        throw DomainError("mapped strength mu must lie in (0, 1]");
    const double expected_c = 2.0 * std::log(a) + 2.0 * profile.mu() * b;
    if (std::abs(c - expected_c) > 1e-12 * std::max(1.0, std::abs(c)))
        throw DomainError("log-radius map does not preserve the radial system");

    const auto& ps = profile.spec();
    ProblemSpec spec(ps.A, SingularityProfile(std::min(mu_new, 1.0) - 1.0),
                     (ps.alpha0.array() + c).matrix());
    std::vector<double> nodes;
    std::vector<Eigen::VectorXd> vals, ders;
    nodes.reserve(profile.s_nodes().size());
    for (std::size_t k = 0; k < profile.s_nodes().size(); ++k) {
        nodes.push_back((profile.s_nodes()[k] - b) / a);
        vals.push_back((profile.values()[k].array() + c).matrix());
        ders.push_back(profile.s_derivs()[k] * a);
    }
    return RadialProfile(std::move(spec), std::move(nodes), std::move(vals), std::move(ders));
}

void write_profile_csv(std::ostream& os, const RadialProfile& profile) {
    const int n = profile.size();
    os << "r";
    for (int i = 1; i <= n; ++i) os << ",U_" << i;
    for (int i = 1; i <= n; ++i) os << ",dU_" << i;
    os << '\n';
    std::ostringstream line;
    line << std::setprecision(17);
    for (std::size_t k = 0; k < profile.s_nodes().size(); ++k) {
        const double r = std::exp(profile.s_nodes()[k]);
        line.str("");
        line << r;
        for (int i = 0; i < n; ++i) line << ',' << profile.values()[k][i];
        for (int i = 0; i < n; ++i) line << ',' << profile.s_derivs()[k][i] / r;
        os << line.str() << '\n';
    }
}

}  // namespace liouville::ode
