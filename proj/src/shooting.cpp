#include "liouville/shooting.hpp"

#include <cmath>
#include <optional>

namespace liouville::shooting {

namespace {

void check_alpha(const CoefficientMatrix& A, const Eigen::VectorXd& reduced_alpha) {
    if (reduced_alpha.size() != A.size() - 1) throw InvalidInput("reduced alpha must have n - 1 entries");
    if (!reduced_alpha.allFinite()) throw InvalidInput("reduced alpha must be finite");
    if ((reduced_alpha.array().abs() > kAlphaBound).any())
        throw DomainError("reduced alpha entries must lie in [-30, 30]");
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

ShootingPoint alpha_to_sigma(const CoefficientMatrix& A, const SingularityProfile& singularity,
                             const Eigen::VectorXd& reduced_alpha, const ShootingOptions& opt) {
    check_alpha(A, reduced_alpha);
    const int n = A.size();
    Eigen::VectorXd alpha0(n);
    alpha0[0] = 0.0;
    alpha0.tail(n - 1) = reduced_alpha;
    const double shift = alpha0.maxCoeff();
    alpha0.array() -= shift;

    auto solved = energy::solve(ode::ProblemSpec(A, singularity, alpha0), opt.r_max, opt.tol);
    ShootingPoint pt{A, singularity, reduced_alpha, solved.summary.sigma, solved.summary.sigma.tail(n - 1), shift,
                     std::move(solved.summary)};
    return pt;
}

Eigen::MatrixXd shooting_jacobian(const CoefficientMatrix& A, const SingularityProfile& singularity,
                                  const Eigen::VectorXd& reduced_alpha, double h, const ShootingOptions& opt) {
    if (!(h >= 1e-6 && h <= 1e-2)) throw InvalidInput("jacobian step must lie in [1e-6, 1e-2]");
    check_alpha(A, reduced_alpha);
    const int d = A.size() - 1;
    Eigen::MatrixXd J(d, d);
    for (int k = 0; k < d; ++k) {
        Eigen::VectorXd hi = reduced_alpha, lo = reduced_alpha;
        hi[k] += h;
        lo[k] -= h;
        J.col(k) = (alpha_to_sigma(A, singularity, hi, opt).reduced_sigma -
                    alpha_to_sigma(A, singularity, lo, opt).reduced_sigma) /
                   (2.0 * h);
    }
    return J;
}

InvertResult invert_sigma(const CoefficientMatrix& A, const SingularityProfile& singularity,
                          const Eigen::VectorXd& target, const Eigen::VectorXd& guess, const InvertOptions& opt) {
    const int d = A.size() - 1;
    if (target.size() != d || guess.size() != d) throw InvalidInput("target and guess must have n - 1 entries");
    if (!target.allFinite() || !guess.allFinite()) throw InvalidInput("target and guess must be finite");
    if (d == 0) return {Eigen::VectorXd(0), 0.0, 0};

    auto residual_at = [&](const Eigen::VectorXd& a) -> std::optional<Eigen::VectorXd> {
        try {
            return alpha_to_sigma(A, singularity, a, opt.shooting).reduced_sigma - target;
        } catch (const Error&) {
            return std::nullopt;
        }
    };

    Eigen::VectorXd alpha = guess;
    auto F = residual_at(alpha);
    if (!F) throw NonConvergence("shooting map undefined at the initial guess", to_std(guess), INFINITY);
    double norm = F->cwiseAbs().maxCoeff();
    bool reached = norm < opt.target_tol;
    int polish = 0;

    for (int step = 1; step <= opt.max_steps; ++step) {
        // past the target, a few extra steps while they still reduce the residual
        if (reached && ++polish > 3) return {alpha, norm, step - 1};
        Eigen::MatrixXd J;
        try {
            J = shooting_jacobian(A, singularity, alpha, opt.jacobian_step, opt.shooting);
        } catch (const Error&) {
            throw NonConvergence("jacobian unavailable at the current iterate", to_std(alpha), norm);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        Eigen::VectorXd dir;
        if (lu.isInvertible()) {
            dir = -lu.solve(*F);
        } else {
            // steepest descent on |F|^2 / 2
            dir = -J.transpose() * *F;
            if (dir.norm() == 0.0)
                throw NonConvergence("singular jacobian with zero gradient", to_std(alpha), norm);
        }

        bool accepted = false;
        double lambda = 1.0;
        for (int halving = 0; halving <= opt.max_halvings; ++halving, lambda *= 0.5) {
            const Eigen::VectorXd trial = alpha + lambda * dir;
            if ((trial.array().abs() > kAlphaBound).any()) continue;
            auto Ft = residual_at(trial);
            if (!Ft) continue;
            const double tn = Ft->cwiseAbs().maxCoeff();
            if (tn <= (1.0 - 1e-4 * lambda) * norm) {
                alpha = trial;
                F = Ft;
                norm = tn;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (reached) return {alpha, norm, step - 1};
            throw NonConvergence("line search failed to reduce the residual", to_std(alpha), norm);
        }
        if (norm < opt.target_tol) reached = true;
    }
    if (reached) return {alpha, norm, opt.max_steps};
    throw NonConvergence("Newton iteration did not reach the target in the step limit", to_std(alpha), norm);
}

}  // namespace liouville::shooting
