#include "liouville/blowup.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <memory>
#include <numbers>

namespace liouville::blowup {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_integer(double v) { return std::isfinite(v) && v == std::round(v); }

Point phase_gradient(const HField& h, const green::TorusGreen& g) {
    return Point(2.0 * kPi * h.f1 / g.Lx(), 2.0 * kPi * h.f2 / g.Ly());
}

double phase_angle(const HField& h, const Point& x, const green::TorusGreen& g) {
    return 2.0 * kPi * (h.f1 * x[0] / g.Lx() + h.f2 * x[1] / g.Ly()) + h.phase;
}

void check_component(const BlowupConfiguration& c, int i) {
    if (i < 0 || i >= c.components()) throw InvalidInput("component index out of range");
}

void check_point(const BlowupConfiguration& c, int t) {
    if (t < 0 || t >= c.size()) throw InvalidInput("point index out of range");
}

void check_regular(const BlowupConfiguration& c, int t) {
    check_point(c, t);
    if (!c.strengths[t].regular()) throw DomainError("point " + std::to_string(t + 1) + " is singular (gamma != 0)");
}

}  // namespace

HField HField::constant(double base) {
    HField h;
    h.base = base;
    h.validate();
    return h;
}

HField HField::sinusoidal(double base, double amplitude, double f1, double f2, double phase) {
    HField h;
    h.kind = Kind::Sinusoidal;
    h.base = base;
    h.amplitude = amplitude;
    h.f1 = f1;
    h.f2 = f2;
    h.phase = phase;
    h.validate();
    return h;
}

void HField::validate() const {
    if (!(base > 0.0) || !std::isfinite(base)) throw InvalidInput("h base must be positive");
    if (kind == Kind::Sinusoidal) {
        if (!(std::abs(amplitude) < 1.0)) throw InvalidInput("h amplitude must satisfy |amplitude| < 1");
        if (!is_integer(f1) || !is_integer(f2)) throw InvalidInput("h frequencies must be integers");
        if (!std::isfinite(phase)) throw InvalidInput("h phase must be finite");
    }
}

double HField::value(const Point& x, const green::TorusGreen& g) const {
    if (kind == Kind::Constant) return base;
    return base * (1.0 + amplitude * std::sin(phase_angle(*this, x, g)));
}

Point HField::grad_log(const Point& x, const green::TorusGreen& g) const {
    if (kind == Kind::Constant) return Point::Zero();
    const double ph = phase_angle(*this, x, g);
    return amplitude * std::cos(ph) / (1.0 + amplitude * std::sin(ph)) * phase_gradient(*this, g);
}

double HField::lap_log(const Point& x, const green::TorusGreen& g) const {
    if (kind == Kind::Constant) return 0.0;
    const double ph = phase_angle(*this, x, g);
    const double den = 1.0 + amplitude * std::sin(ph);
    return -amplitude * (std::sin(ph) + amplitude) / (den * den) * phase_gradient(*this, g).squaredNorm();
}

BlowupConfiguration::BlowupConfiguration(green::TorusGreen geometry_, algebra::CoefficientMatrix A_,
                                         algebra::RhoVector rho_)
    : geometry(std::move(geometry_)), A(std::move(A_)), rho(std::move(rho_)) {}

void BlowupConfiguration::validate() const {
    const int n = components(), N = size();
    if (N == 0) throw InvalidInput("configuration has no points");
    if (rho.size() != n) throw InvalidInput("rho has " + std::to_string(rho.size()) + " entries, expected " + std::to_string(n));
    if (static_cast<int>(strengths.size()) != N) throw InvalidInput("strengths and points differ in number");
    if (static_cast<int>(h.size()) != n) throw InvalidInput("one h field per component is required");
    if (!curvature.empty() && static_cast<int>(curvature.size()) != N)
        throw InvalidInput("curvature needs one value per point");
    if (D.size() != n || alpha.size() != n) throw InvalidInput("D and alpha need one value per component");
    if (!D.allFinite() || !alpha.allFinite()) throw InvalidInput("D and alpha must be finite");
    for (const HField& f : h) f.validate();
    double sum = 0.0;
    for (const auto& s : strengths) sum += s.mu();
    if (!(std::abs(n_L - sum) <= 1e-12 * std::max(1.0, sum)))
        throw InvalidInput("n_L must equal the sum of the strengths mu_t");
    if (mass_term && !std::isfinite(*mass_term)) throw InvalidInput("mass_term must be finite");
    // coincident points
    green::gstar_matrix(geometry, {points.begin(), points.end()});
}

std::vector<int> BlowupConfiguration::regular_set() const {
    std::vector<int> out;
    for (int t = 0; t < size(); ++t)
        if (strengths[t].regular()) out.push_back(t);
    return out;
}

algebra::FrakM BlowupConfiguration::frak() const { return algebra::frak_m(rho, A, n_L); }

bool BlowupConfiguration::at_q(double rel_tol) const {
    const Eigen::VectorXd q = algebra::q_point(A, n_L).values();
    return (rho.values() - q).cwiseAbs().maxCoeff() <= rel_tol * q.cwiseAbs().maxCoeff();
}

double BlowupConfiguration::curvature_at(int t) const { return curvature.empty() ? 0.0 : curvature[t]; }

double BlowupConfiguration::gstar_sum(int t) const {
    double s = 0.0;
    for (int l = 0; l < size(); ++l)
        s += strengths[l].mu() * (l == t ? geometry.regular(points[t], points[t]) : geometry.eval(points[t], points[l]));
    return s;
}

Point BlowupConfiguration::gstar_grad_sum(int t) const {
    Point s = Point::Zero();
    for (int l = 0; l < size(); ++l)
        s += strengths[l].mu() *
             (l == t ? geometry.regular_gradient(points[t], points[t]) : geometry.gradient(points[t], points[l]));
    return s;
}

ALimit a_limit(const BlowupConfiguration& config, int i, int t, double delta0, const AIntegralOptions& opt) {
    check_point(config, t);
    const double m = config.frak().frak_m;
    const double q = (2.0 - m) * config.strengths[t].mu() + 2.0;
    if (!(q > 0.0)) throw DomainError("lim A_{i,delta0} does not exist: (2 - m) mu_t + 2 <= 0");
    ALimit out{};
    out.at_delta0 = a_integral(config, i, t, delta0, opt);
    out.at_half = a_integral(config, i, t, 0.5 * delta0, opt);
    out.exponent = q;
    out.limit = out.at_half + (out.at_half - out.at_delta0) / (std::pow(2.0, q) - 1.0);
    return out;
}

double b_coefficient(const BlowupConfiguration& config, int i, int t) {
    config.validate();
    check_component(config, i);
    check_regular(config, t);
    const Point& p = config.points[t];
    const HField& h = config.h[i];
    const double mass = config.mass_term.value_or(2.0 * kPi * config.n_L);
    const Point v = h.grad_log(p, config.geometry) + 8.0 * kPi * config.gstar_grad_sum(t);
    const double bracket =
        0.25 * h.lap_log(p, config.geometry) - 0.5 * config.curvature_at(t) + mass + 0.25 * v.squaredNorm();
    return std::exp(config.D[i] - config.alpha[i]) * bracket;
}

LeadingTerm leading_term_general(const BlowupConfiguration& config, double delta0, double eps,
                                 const AIntegralOptions& opt) {
    config.validate();
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1)");
    const algebra::FrakM fm = config.frak();
    if (!(fm.frak_m > 2.0)) throw DomainError("leading term needs m > 2");
    if (config.at_q() && !config.regular_set().empty())
        throw WrongRegime("rho = Q with regular points: use the Q-regime leading term");

    LeadingTerm out;
    out.frak_m = fm.frak_m;
    out.on_surface = std::abs(algebra::lambda_L(config.rho, config.A, config.n_L)) <= 1e-8;
    const double s1 = config.gstar_sum(0);
    for (int i : fm.minimizers) {
        const double h1 = config.h[i].value(config.points[0], config.geometry);
        for (int t = 0; t < config.size(); ++t) {
            LeadingTermRow row{i, t, 0.0, {}};
            row.B = std::exp(2.0 * kPi * fm.frak_m * (config.gstar_sum(t) - s1)) *
                    config.h[i].value(config.points[t], config.geometry) / h1 *
                    std::exp(config.D[i] - config.alpha[i]);
            row.A = a_limit(config, i, t, delta0, opt);
            out.D += row.B * row.A.limit;
            out.rows.push_back(row);
        }
    }
    out.prediction = out.D * std::pow(eps, fm.frak_m - 2.0) / config.n_L;
    return out;
}

double leading_term_Q(const BlowupConfiguration& config, double eps) {
    config.validate();
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1)");
    if (!config.at_q()) throw WrongRegime("rho != Q: use the general leading term");
    const std::vector<int> reg = config.regular_set();
    if (reg.empty()) throw WrongRegime("no regular blowup point: use the general leading term");
    double sum = 0.0;
    for (int i = 0; i < config.components(); ++i)
        for (int t : reg) sum += b_coefficient(config, i, t);
    return -4.0 * sum * eps * eps * std::log(1.0 / eps);
}

Point location_residual(const BlowupConfiguration& config, int t, Regime regime) {
    config.validate();
    check_regular(config, t);
    const Point& p = config.points[t];
    const Point gs = config.gstar_grad_sum(t);
    Point out = Point::Zero();
    if (regime == Regime::General) {
        const double m = config.frak().frak_m;
        for (int i = 0; i < config.components(); ++i)
            out += (config.h[i].grad_log(p, config.geometry) + 2.0 * kPi * m * gs) * config.rho[i];
    } else {
        const Eigen::VectorXd q = algebra::q_point(config.A, config.n_L).values();
        for (int i = 0; i < config.components(); ++i)
            out += (config.h[i].grad_log(p, config.geometry) + 8.0 * kPi * gs) * q[i];
    }
    return out;
}

namespace {

struct SearchData {
    BlowupConfiguration* config;
    int t;
    Regime regime;
};

double search_objective(const gsl_vector* v, void* params) {
    auto* d = static_cast<SearchData*>(params);
    d->config->points[d->t] = Point(gsl_vector_get(v, 0), gsl_vector_get(v, 1));
    try {
        return location_residual(*d->config, d->t, d->regime).norm();
    } catch (const GeometryError&) {
        return GSL_POSINF;
    } catch (const SingularityError&) {
        return GSL_POSINF;
    }
}

}  // namespace

LocationSearch locate_regular_point(const BlowupConfiguration& config, int t, Regime regime, double step, double tol,
                                    int max_iter) {
    location_residual(config, t, regime);
    if (!(step > 0.0) || !(tol > 0.0) || max_iter < 1) throw InvalidInput("invalid search parameters");

    gsl_set_error_handler_off();
    BlowupConfiguration work = config;
    SearchData data{&work, t, regime};
    gsl_multimin_function fn{&search_objective, 2, &data};

    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(2), &gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(2), &gsl_vector_free);
    gsl_vector_set(x.get(), 0, config.points[t][0]);
    gsl_vector_set(x.get(), 1, config.points[t][1]);
    gsl_vector_set_all(ss.get(), step);
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2), &gsl_multimin_fminimizer_free);
    gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get());

    LocationSearch out{config.points[t], 0.0, 0, false};
    for (; out.iterations < max_iter; ++out.iterations) {
        if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
        if (s->fval < tol || gsl_multimin_fminimizer_size(s.get()) < 1e-13) {
            out.converged = s->fval < tol;
            ++out.iterations;
            break;
        }
    }
    out.location = work.geometry.wrap(Point(gsl_vector_get(s->x, 0), gsl_vector_get(s->x, 1)));
    work.points[t] = out.location;
    out.residual_norm = location_residual(work, t, regime).norm();
    out.converged = out.residual_norm < tol;
    return out;
}

double h_relation_residual(const BlowupConfiguration& config, int i, int j, int t, int s) {
    config.validate();
    check_component(config, i);
    check_component(config, j);
    check_point(config, t);
    check_point(config, s);
    if (t == s) throw InvalidInput("h relation needs two distinct points");
    const Eigen::VectorXd m = config.frak().frak_m_i;
    if (!(m[i] > 2.0) || !(m[j] > 2.0)) throw DomainError("h relation needs m_i, m_j > 2");
    auto H = [&](int k, int u) {
        const double mk = m[k];
        return 2.0 * kPi * mk / (mk - 2.0) * config.gstar_sum(u) +
               std::log(config.h[k].value(config.points[u], config.geometry) /
                        std::pow(config.strengths[u].mu(), mk)) /
                   (mk - 2.0);
    };
    return (H(i, t) - H(i, s)) - (H(j, t) - H(j, s));
}

}  // namespace liouville::blowup
