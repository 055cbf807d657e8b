#include "liouville/scaling.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace liouville::scaling {

namespace {

void check_mu(double mu, const char* name) {
    if (!(mu > 0.0 && mu <= 1.0)) throw DomainError(std::string(name) + " must lie in (0, 1]");
}

}  // namespace

RadialProfile mu_transform(const RadialProfile& profile, double mu_p) {
    check_mu(mu_p, "mu_p");
    const double k = mu_p / profile.mu();
    if (k == 1.0) return profile;
    // s -> k s, shift 2 log k
    return ode::remap_log_radius(profile, k, 0.0, 2.0 * std::log(k));
}

ScalingHeights height_match(double M_p, double M_q, double mu_p, double mu_q) {
    if (!std::isfinite(M_p) || !std::isfinite(M_q)) throw InvalidInput("heights must be finite");
    check_mu(mu_p, "mu_p");
    check_mu(mu_q, "mu_q");
    ScalingHeights h{M_p, M_q, mu_p, mu_q, std::exp(-0.5 * M_p), std::exp(-0.5 * M_q), 1.0};
    h.eta = std::exp((mu_p * M_p - mu_q * M_q - 2.0 * std::log(mu_p / mu_q)) / (2.0 * mu_p));
    return h;
}

RadialProfile hat_rescale(const RadialProfile& transformed, const ScalingHeights& heights) {
    if (std::abs(transformed.mu() - heights.mu_p) > 1e-12)
        throw InvalidInput("profile strength does not match mu_p of the heights");
    if (heights.eta == 1.0) return transformed;
    const double b = std::log(heights.eta);
    return ode::remap_log_radius(transformed, 1.0, b, 2.0 * heights.mu_p * b);
}

Eigen::VectorXd d_relation_residual(const RadialProfile& profile_q, const SolutionSummary& summary_q, double mu_p,
                                    double M_p, double M_q) {
    const double mu_q = profile_q.mu();
    const ScalingHeights h = height_match(M_p, M_q, mu_p, mu_q);
    // V_q(x) = U_q(x / eps_q) - 2 mu_q log eps_q
    const RadialProfile v_bar = ode::remap_log_radius(profile_q, 1.0, 0.5 * M_q, mu_q * M_q);
    const RadialProfile v_hat = hat_rescale(mu_transform(v_bar, mu_p), h);
    // U^(x) = V^(eps_p x) + 2 mu_p log eps_p
    const RadialProfile u_hat = ode::remap_log_radius(v_hat, 1.0, -0.5 * M_p, -mu_p * M_p);
    const SolutionSummary s_hat = energy::extract_summary(u_hat);
    return s_hat.D - (summary_q.D + summary_q.m / mu_q * std::log(mu_p / mu_q));
}

BubbleDistance bubble_distance(const SolutionSummary& p, const SolutionSummary& q,
                               const std::optional<ScalingHeights>& heights) {
    if (p.size() != q.size()) throw InvalidInput("summaries have different sizes");
    BubbleDistance d;
    d.scaled_p = p.sigma / p.mu;
    d.scaled_q = q.sigma / q.mu;
    d.distance = (d.scaled_p - d.scaled_q).cwiseAbs();
    if (heights) d.reference = std::pow(heights->eps_p, p.m.minCoeff() - 2.0 * p.mu);
    return d;
}

void write_distance_csv(std::ostream& os, const BubbleDistance& d) {
    os << "i,sigma_p_over_mu_p,sigma_q_over_mu_q,distance,reference\n" << std::setprecision(17);
    for (int i = 0; i < d.distance.size(); ++i) {
        os << i + 1 << ',' << d.scaled_p[i] << ',' << d.scaled_q[i] << ',' << d.distance[i] << ',';
        if (d.reference) os << *d.reference;
        os << '\n';
    }
}

}  // namespace liouville::scaling
