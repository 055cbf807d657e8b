#include "liouville/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace liouville::algebra {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTieTol = 1e-12;
constexpr double kBoundaryTol = 1e-10;

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

bool connected(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        for (int j = 0; j < n; ++j) {
            if (!seen[j] && (a(i, j) > 0.0 || a(j, i) > 0.0)) {
                seen[j] = true;
                stack.push_back(j);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace

bool StructureReport::h1_ok() const {
    return std::all_of(h1.begin(), h1.end(), [](const Clause& c) { return c.passed; });
}

bool StructureReport::h2_ok() const {
    return !h2.empty() && std::all_of(h2.begin(), h2.end(), [](const Clause& c) { return c.passed; });
}

StructureReport validate_structure(const Eigen::MatrixXd& a) {
    if (a.rows() == 0 || a.rows() != a.cols())
        throw InvalidInput("interaction matrix must be square and non-empty");
    if (!all_finite(a))
        throw InvalidInput("interaction matrix has non-finite entries");

    const int n = static_cast<int>(a.rows());
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    StructureReport report;

    bool symmetric = true;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(a(i, j) - a(j, i)) > kTieTol * scale) symmetric = false;
    report.h1.push_back({"symmetric", symmetric});
    report.h1.push_back({"nonnegative", (a.array() >= 0.0).all()});
    report.h1.push_back({"irreducible", connected(a)});

    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    const bool invertible = lu.isInvertible();
    bool inverse_ok = false;
    Eigen::MatrixXd inv;
    if (invertible) {
        inv = lu.inverse();
        inverse_ok = ((inv * a) - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12 * scale * std::max(1.0, inv.cwiseAbs().maxCoeff());
    }
    report.h1.push_back({"invertible", invertible && inverse_ok});

    if (invertible) {
        bool diag = true, off = true, rows = true;
        for (int i = 0; i < n; ++i) {
            if (inv(i, i) > 0.0) diag = false;
            for (int j = 0; j < n; ++j)
                if (i != j && inv(i, j) < 0.0) off = false;
            if (inv.row(i).sum() < 0.0) rows = false;
        }
        report.h2.push_back({"inverse diagonal <= 0", diag});
        report.h2.push_back({"inverse off-diagonal >= 0", off});
        report.h2.push_back({"inverse row sums >= 0", rows});
    }
    return report;
}

CoefficientMatrix::CoefficientMatrix(Eigen::MatrixXd entries)
    : entries_(std::move(entries)), report_(validate_structure(entries_)) {
    if (!report_.h1_ok()) {
        std::ostringstream os;
        os << "interaction matrix fails (H1):";
        for (const auto& c : report_.h1)
            if (!c.passed) os << ' ' << c.name;
        throw InvalidInput(os.str());
    }
    inverse_ = entries_.fullPivLu().inverse();
}

CoefficientMatrix CoefficientMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const auto n = rows.size();
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw InvalidInput("interaction matrix must be square");
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return CoefficientMatrix(std::move(m));
}

SingularityProfile::SingularityProfile(double gamma) : gamma_(gamma) {
    if (!std::isfinite(gamma) || gamma <= -1.0 || gamma > 0.0)
        throw InvalidInput("gamma must lie in (-1, 0]");
}

RhoVector::RhoVector(Eigen::VectorXd values) : values_(std::move(values)) {
    if (!values_.allFinite() || (values_.array() < 0.0).any())
        throw InvalidInput("rho entries must be finite and nonnegative");
}

std::vector<double> critical_values(const std::vector<SingularityProfile>& strengths, int m_max) {
    if (m_max < 0) throw InvalidInput("m_max must be >= 0");

    // Subset sums of 8 pi mu_l, merged as they grow so repeated strengths stay cheap.
    std::vector<double> sums{0.0};
    for (const auto& s : strengths) {
        const double add = 8.0 * kPi * s.mu();
        std::vector<double> next = sums;
        for (double v : sums) next.push_back(v + add);
        std::sort(next.begin(), next.end());
        std::vector<double> merged;
        for (double v : next)
            if (merged.empty() || std::abs(v - merged.back()) > kTieTol * std::max(1.0, std::abs(v)))
                merged.push_back(v);
        sums = std::move(merged);
    }

    std::vector<double> all;
    for (int m = 0; m <= m_max; ++m)
        for (double v : sums) all.push_back(8.0 * m * kPi + v);
    std::sort(all.begin(), all.end());

    std::vector<double> out;
    for (double v : all) {
        if (v <= kTieTol) continue;
        if (out.empty() || std::abs(v - out.back()) > kTieTol * std::abs(v)) out.push_back(v);
    }
    return out;
}

double lambda_L(const RhoVector& rho, const CoefficientMatrix& A, double n_L) {
    if (!(n_L > 0.0)) throw InvalidInput("n_L must be positive");
    if (rho.size() != A.size()) throw InvalidInput("rho and A sizes differ");
    const Eigen::VectorXd x = rho.values() / (2.0 * kPi * n_L);
    return 4.0 * x.sum() - x.dot(A.entries() * x);
}

FrakM frak_m(const RhoVector& rho, const CoefficientMatrix& A, double n_L) {
    if (!(n_L > 0.0)) throw InvalidInput("n_L must be positive");
    if (rho.size() != A.size()) throw InvalidInput("rho and A sizes differ");
    FrakM out;
    out.frak_m_i = A.entries() * rho.values() / (2.0 * kPi * n_L);
    out.frak_m = out.frak_m_i.minCoeff();
    for (int i = 0; i < out.frak_m_i.size(); ++i)
        if (std::abs(out.frak_m_i[i] - out.frak_m) <= kTieTol * std::max(1.0, std::abs(out.frak_m)))
            out.minimizers.push_back(i);
    return out;
}

RhoVector q_point(const CoefficientMatrix& A, double n_L) {
    if (!(n_L > 0.0)) throw InvalidInput("n_L must be positive");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A.entries());
    if (!lu.isInvertible()) throw LinearSolveError("interaction matrix is singular");
    const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(A.size(), 8.0 * kPi * n_L);
    Eigen::VectorXd q = lu.solve(rhs);
    // one step of iterative refinement
    q += lu.solve(rhs - A.entries() * q);
    if ((A.entries() * q - rhs).cwiseAbs().maxCoeff() >= 1e-10 * std::max(1.0, rhs[0]))
        throw LinearSolveError("Q residual too large");
    const double floor = 1e-12 * q.cwiseAbs().maxCoeff();
    if ((q.array() < -floor).any())
        throw DomainError("Q has negative entries; no symmetric point in the positive cone");
    q = q.cwiseMax(0.0);
    return RhoVector(q);
}

Region classify_region(const RhoVector& rho, const CoefficientMatrix& A,
                       const std::vector<double>& sigma_values) {
    if (sigma_values.empty()) throw InvalidInput("critical value list is empty");
    if (!std::is_sorted(sigma_values.begin(), sigma_values.end()))
        throw InvalidInput("critical value list must be sorted");
    if (rho.size() != A.size()) throw InvalidInput("rho and A sizes differ");
    const double total = rho.values().sum();
    if (total <= 0.0) throw DomainError("rho = 0 has no region");

    Region r;
    r.ratio = rho.values().dot(A.entries() * rho.values()) / total;
    for (std::size_t k = 0; k < sigma_values.size(); ++k) {
        if (std::abs(r.ratio - sigma_values[k]) <= kBoundaryTol * sigma_values[k]) {
            r.on_boundary = true;
            r.boundary_index = static_cast<int>(k) + 1;
            r.L = static_cast<int>(k) + 1;
            return r;
        }
    }
    r.L = static_cast<int>(std::upper_bound(sigma_values.begin(), sigma_values.end(), r.ratio) -
                           sigma_values.begin());
    return r;
}

double solve_height_quadratic(const HeightQuadratic& q) {
    const double disc = q.B * q.B / 4.0 - (q.C - 1.0 - q.E);
    if (!(disc >= 0.0)) throw NoRealRoot("height quadratic has negative discriminant");
    return -q.B / 2.0 + std::sqrt(disc);
}

}  // namespace liouville::algebra
