#pragma once

// Comparison of bubbles with different singular strengths mu_q -> mu_p:
//   V~(r) = V(r^{mu_p/mu_q}) + 2 log(mu_p/mu_q)        (mu_transform)
//   V^(r) = V~(eta r) + 2 mu_p log eta                   (hat_rescale)
// with eta fixed by matching the heights mu_p M_p and mu_q M_q.

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <vector>

#include "liouville/energy.hpp"

namespace liouville::scaling {

using energy::SolutionSummary;
using ode::RadialProfile;

/// Transform a profile at strength mu_q into one at strength mu_p.
RadialProfile mu_transform(const RadialProfile& profile, double mu_p);

struct ScalingHeights {
    double M_p = 0.0;
    double M_q = 0.0;
    double mu_p = 1.0;
    double mu_q = 1.0;
    double eps_p = 1.0;  // e^{-M_p/2}
    double eps_q = 1.0;
    double eta = 1.0;
};

/// 2 mu_p log eta = mu_p M_p - mu_q M_q - 2 log(mu_p/mu_q).
ScalingHeights height_match(double M_p, double M_q, double mu_p, double mu_q);

RadialProfile hat_rescale(const RadialProfile& transformed, const ScalingHeights& heights);

/// Runs the full chain U_q -> V_q -> V~ -> V^ -> U^ (heights M_q, M_p),
/// extracts D^ by quadrature and returns D^_i - [D_i + (m_i/mu_q) log(mu_p/mu_q)].
/// profile_q must be integrated far enough that the chain's image still has a
/// converged flux (r_max^{mu_q/mu_p} well past the turning region).
Eigen::VectorXd d_relation_residual(const RadialProfile& profile_q, const SolutionSummary& summary_q, double mu_p,
                                    double M_p, double M_q);

struct BubbleDistance {
    Eigen::VectorXd scaled_p;  // sigma_i / mu_p
    Eigen::VectorXd scaled_q;  // sigma_i / mu_q
    Eigen::VectorXd distance;
    std::optional<double> reference;  // eps_p^{m_min - 2 mu_p}
};

BubbleDistance bubble_distance(const SolutionSummary& summary_p, const SolutionSummary& summary_q,
                               const std::optional<ScalingHeights>& heights = std::nullopt);

/// Rows i, sigma_p/mu_p, sigma_q/mu_q, distance, reference (empty when no heights).
void write_distance_csv(std::ostream& os, const BubbleDistance& d);

}  // namespace liouville::scaling
