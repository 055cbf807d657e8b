#include "liouville/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "liouville/quadrature.hpp"

namespace liouville::energy {

namespace {

struct Moments {
    Eigen::VectorXd mass;      // int r^{2mu-1} e^{U_i} dr
    Eigen::VectorXd log_mass;  // int log r r^{2mu-1} e^{U_i} dr
};

// Series part on [0, r0]: e^{alpha} sum_k e_k int_0^{r0} r^{q_k - 1} (1, log r) dr,
// q_k = 2 mu (k + 1).
Moments series_moments(const RadialProfile& profile, double r0) {
    const auto& ser = profile.series();
    const int n = profile.size();
    const double mu = profile.mu();
    const double log_r0 = std::log(r0);
    Moments m{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    for (std::size_t k = 0; k < ser.exp_coeffs.size(); ++k) {
        const double q = 2.0 * mu * static_cast<double>(k + 1);
        const double pw = std::exp(q * log_r0);
        m.mass += ser.exp_coeffs[k] * (pw / q);
        m.log_mass += ser.exp_coeffs[k] * (pw * (log_r0 / q - 1.0 / (q * q)));
    }
    const Eigen::ArrayXd w = ser.coeffs[0].array().exp();
    m.mass = (m.mass.array() * w).matrix();
    m.log_mass = (m.log_mass.array() * w).matrix();
    return m;
}

Moments moments(const RadialProfile& profile, double R) {
    if (!(R >= 0.0)) throw InvalidInput("radius must be nonnegative");
    if (R > profile.r_max() * (1.0 + 1e-12)) throw OutOfRange("radius beyond r_max");
    const int n = profile.size();
    if (R == 0.0) return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    if (R <= profile.r_min()) return series_moments(profile, R);

    Moments out = series_moments(profile, profile.r_min());
    const double s_hi = std::min(std::log(R), profile.s_max());
    const double two_mu = 2.0 * profile.mu();
    auto f = [&](double s) {
        Eigen::VectorXd u, du;
        profile.evaluate_log(s, u, du);
        Eigen::VectorXd v(2 * n);
        v.head(n) = (u.array() + two_mu * s).exp().matrix();
        v.tail(n) = v.head(n) * s;
        return v;
    };
    const auto& nodes = profile.s_nodes();
    std::vector<double> cuts;
    const std::size_t stride = std::max<std::size_t>(1, nodes.size() / 256);
    for (std::size_t k = 0; k < nodes.size(); k += stride) cuts.push_back(nodes[k]);
    quad::Options opt;
    opt.abs_tol = 1e-16;
    opt.rel_tol = 1e-13;
    const quad::Result r = quad::integrate(quad::VectorIntegrand(f), profile.s_min(), s_hi, opt, cuts);
    out.mass += r.value.head(n);
    out.log_mass += r.value.tail(n);
    return out;
}

// Integrals over [R, inf) of r^{2mu-1} e^{U_i} and log r times it, using the
// two-term tail e^{U_i} ~ t_i r^{-m_i} (1 - sum_j a_ij t_j r^{2mu-m_j}/(m_j-2mu)^2).
Moments tail_moments(const Eigen::MatrixXd& A, const Eigen::ArrayXd& t, const Eigen::ArrayXd& p, double R) {
    const double logR = std::log(R);
    auto mass = [&](double q) { return std::exp(-q * logR) / q; };
    auto log_mass = [&](double q) { return std::exp(-q * logR) * (logR / q + 1.0 / (q * q)); };
    const int n = static_cast<int>(t.size());
    Moments m{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    for (int i = 0; i < n; ++i) {
        m.mass[i] = mass(p[i]);
        m.log_mass[i] = log_mass(p[i]);
        for (int j = 0; j < n; ++j) {
            const double c = A(i, j) * t[j] / (p[j] * p[j]);
            m.mass[i] -= c * mass(p[i] + p[j]);
            m.log_mass[i] -= c * log_mass(p[i] + p[j]);
        }
        m.mass[i] *= t[i];
        m.log_mass[i] *= t[i];
    }
    return m;
}

}  // namespace

Eigen::VectorXd truncated_sigma(const RadialProfile& profile, double R) { return moments(profile, R).mass; }

Eigen::VectorXd truncated_D(const RadialProfile& profile, double R) {
    return profile.spec().A.entries() * moments(profile, R).log_mass;
}

SolutionSummary extract_summary(const RadialProfile& profile) {
    const auto& A = profile.spec().A.entries();
    const double mu = profile.mu();
    const double R = profile.r_max();

    const Moments mom = moments(profile, R);
    const Eigen::VectorXd sigma_R = mom.mass;
    const Eigen::VectorXd D_R = A * mom.log_mass;

    Eigen::VectorXd u_end, du_end;
    profile.evaluate_log(profile.s_max(), u_end, du_end);

    SolutionSummary out;
    out.mu = mu;
    out.alpha = (-profile.spec().alpha0).array() + 0.0;  // no negative zeros
    out.m = -du_end;  // -r U'(r) at r_max
    out.D = D_R;
    out.sigma = sigma_R;

    // Tail model e^{U_j} ~ e^{D_j - alpha_j} r^{-m_j} (plus its first
    // correction) beyond R; D appears on both sides, so iterate to the fixed point.
    bool converged = false;
    for (int it = 1; it <= 100; ++it) {
        const Eigen::ArrayXd p = out.m.array() - 2.0 * mu;
        if ((p <= 0.0).any())
            throw ExtractionError("flux exponent m_i <= 2 mu: tail is not integrable");
        const Eigen::ArrayXd t = (out.D - out.alpha).array().exp();
        const Moments tail = tail_moments(A, t, p, R);
        const Eigen::VectorXd sigma_new = sigma_R + tail.mass;
        const double change = (sigma_new - out.sigma).cwiseAbs().maxCoeff();
        out.sigma = sigma_new;
        out.m = A * out.sigma;
        out.D = D_R + A * tail.log_mass;
        out.iterations = it;
        if (!out.sigma.allFinite() || !out.D.allFinite())
            throw ExtractionError("tail iteration produced non-finite values");
        if (change < 1e-11 && it > 1) {
            converged = true;
            break;
        }
    }
    if (!converged) throw ExtractionError("tail fixed point did not converge in 100 iterations");

    out.m_min = out.m.minCoeff();
    const Eigen::VectorXd flux_gap = out.m + du_end;
    if (flux_gap.cwiseAbs().maxCoeff() > 1e-3)
        throw ExtractionError("profile stops before -r U'(r) is within 1e-3 of its limit; raise r_max");
    if (out.m_min <= 2.0 * mu + 0.01)
        out.warnings.push_back("m_min within 0.01 of 2 mu: tail model unreliable");
    return out;
}

Solved solve(const ode::ProblemSpec& spec, double r_max, double tol, double max_r_max) {
    double R = r_max;
    for (;;) {
        RadialProfile profile = ode::integrate(spec, R, tol);
        try {
            SolutionSummary summary = extract_summary(profile);
            if (R != r_max) {
                std::ostringstream msg;
                msg << "r_max raised to " << R << " for flux convergence";
                summary.warnings.push_back(msg.str());
            }
            return {std::move(profile), std::move(summary)};
        } catch (const ExtractionError&) {
            if (R * 100.0 > max_r_max) throw;
            R *= 100.0;
        }
    }
}

double pohozaev_residual(const SolutionSummary& s, const Eigen::MatrixXd& A) {
    const double lin = 4.0 * s.mu * s.sigma.sum();
    return (s.sigma.dot(A * s.sigma) - lin) / lin;
}

double pohozaev_residual(const SolutionSummary& s, const algebra::CoefficientMatrix& A) {
    return pohozaev_residual(s, A.entries());
}

std::vector<TailRow> pohozaev_tail_table(const RadialProfile& profile, const SolutionSummary& summary,
                                         const std::vector<double>& radii) {
    const auto& A = profile.spec().A.entries();
    const double mu = summary.mu;
    const Eigen::ArrayXd t = summary.tail_amplitude().array();
    std::vector<TailRow> rows;
    for (double R : radii) {
        if (R < 10.0 || R > profile.r_max() * (1.0 + 1e-12))
            throw OutOfRange("tail-table radius must lie in [10, r_max]");
        const Eigen::VectorXd x = truncated_sigma(profile, R) / mu;
        TailRow row;
        row.R = R;
        row.defect = 4.0 * x.sum() - x.dot(A * x);
        row.predicted = 2.0 / (mu * mu) * (t * ((2.0 * mu - summary.m.array()) * std::log(R)).exp()).sum();
        row.ratio = row.defect / row.predicted;
        rows.push_back(row);
    }
    return rows;
}

std::vector<TailRow> pohozaev_tail_table(const RadialProfile& profile, const std::vector<double>& radii) {
    return pohozaev_tail_table(profile, extract_summary(profile), radii);
}

Eigen::VectorXd asymptotic_fit_error(const RadialProfile& profile, const SolutionSummary& s, double r) {
    if (r < 5.0) throw DomainError("asymptotic fit needs r >= 5");
    const auto& A = profile.spec().A.entries();
    const Eigen::ArrayXd p = s.m.array() - 2.0 * s.mu;
    const Eigen::ArrayXd corr = s.tail_amplitude().array() * (-p * std::log(r)).exp() / (p * p);
    const Eigen::VectorXd model =
        (-s.m.array() * std::log(r) + (s.D - s.alpha).array()).matrix() - A * corr.matrix();
    return profile.evaluate(r).values - model;
}

Eigen::VectorXd flux_mass(const RadialProfile& profile, const SolutionSummary& s) {
    const auto& A = profile.spec().A.entries();
    Eigen::VectorXd u, du;
    profile.evaluate_log(profile.s_max(), u, du);
    const Eigen::ArrayXd p = s.m.array() - 2.0 * s.mu;
    return -du + A * tail_moments(A, s.tail_amplitude().array(), p, profile.r_max()).mass;
}

double tail_decay_slope(const RadialProfile& profile, const SolutionSummary& s, int component, double R_lo,
                        double R_hi, int samples) {
    if (component < 0 || component >= s.size()) throw InvalidInput("component index out of range");
    if (!(R_lo > 0.0 && R_hi > R_lo) || samples < 2) throw InvalidInput("bad slope window");
    std::vector<double> xs, ys;
    for (int k = 0; k < samples; ++k) {
        const double L = std::log(R_lo) + (std::log(R_hi) - std::log(R_lo)) * k / (samples - 1);
        const double gap = s.sigma[component] - truncated_sigma(profile, std::exp(L))[component];
        if (!(gap > 0.0)) throw ExtractionError("sigma - sigma_R is not positive");
        xs.push_back(L);
        ys.push_back(std::log(gap));
    }
    double mx = 0, my = 0;
    for (int k = 0; k < samples; ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= samples;
    my /= samples;
    double sxy = 0, sxx = 0;
    for (int k = 0; k < samples; ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    return sxy / sxx;
}

}  // namespace liouville::energy
