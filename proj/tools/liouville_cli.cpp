// liouville: configuration-driven front end.
//
//   liouville <solve|invert|surface|compare|leading|green> --config PATH [--out DIR] [--tol T] [--quiet]
//
// Exit codes: 0 ok, 2 configuration, 3 solver, 4 non-convergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "liouville/algebra.hpp"
#include "liouville/blowup.hpp"
#include "liouville/energy.hpp"
#include "liouville/scaling.hpp"
#include "liouville/shooting.hpp"
#include "liouville/torus_green.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace liouville;

namespace {

constexpr double kPi = std::numbers::pi;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// schema

struct Schema {
    std::set<std::string> keys;
    std::map<std::string, const Schema*> blocks;
};

const Schema kSweep{{"t_min", "t_max", "steps"}, {}};
const Schema kSurface{{"n_L", "rho", "gammas", "m_max", "sweep"}, {{"sweep", &kSweep}}};
const Schema kCompare{{"mu_p", "M_p", "M_q", "alpha0_p", "r_max_q"}, {}};
const Schema kBlowup{{"periods", "n_modes", "points", "gammas", "rho", "h", "curvature", "D", "alpha", "mass_term",
                      "eps", "delta0", "regime"},
                     {}};
const Schema kGreen{{"periods", "n_modes", "points"}, {}};
const Schema kTop{{"matrix", "gamma", "alpha0", "reduced_alpha", "target_sigma", "r_max", "tol", "seed", "surface",
                   "compare", "blowup", "green"},
                  {{"surface", &kSurface}, {"compare", &kCompare}, {"blowup", &kBlowup}, {"green", &kGreen}}};
const std::set<std::string> kHKeys{"preset", "base", "amplitude", "f1", "f2", "phase"};

void check_keys(const json& j, const Schema& s, const std::string& where) {
    if (!j.is_object()) throw ConfigError("field '" + where + "': expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string path = where.empty() ? it.key() : where + "." + it.key();
        if (!s.keys.count(it.key())) throw ConfigError("field '" + path + "': unknown key");
        if (auto b = s.blocks.find(it.key()); b != s.blocks.end()) check_keys(it.value(), *b->second, path);
    }
}

std::string line_of(const std::string& text, std::size_t byte) {
    const auto line = 1 + std::count(text.begin(), text.begin() + std::min(byte, text.size()), '\n');
    return std::to_string(line);
}

// ---------------------------------------------------------------------------
// typed access; defaults are written back so the resolved config is complete

class Section {
public:
    Section(json& node, std::string path) : node_(node), path_(std::move(path)) {}

    bool has(const std::string& key) const { return node_.contains(key); }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw ConfigError("field '" + field(key) + "': " + msg);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key)) {
            if (!fallback) fail(key, "required");
            node_[key] = *fallback;
        }
        const json& v = node_[key];
        if (!v.is_number()) fail(key, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(key, "must be finite");
        return x;
    }

    int integer(const std::string& key, int fallback) {
        if (!has(key)) node_[key] = fallback;
        const json& v = node_[key];
        if (!v.is_number_integer()) fail(key, "expected an integer");
        return v.get<int>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) node_[key] = fallback;
        if (!node_[key].is_string()) fail(key, "expected a string");
        return node_[key].get<std::string>();
    }

    Eigen::VectorXd vector(const std::string& key, std::optional<int> size = std::nullopt) {
        if (!has(key)) fail(key, "required");
        return to_vector(node_[key], key, size);
    }

    std::vector<std::vector<double>> rows(const std::string& key) {
        if (!has(key)) fail(key, "required");
        const json& v = node_[key];
        if (!v.is_array() || v.empty()) fail(key, "expected a non-empty array of arrays");
        std::vector<std::vector<double>> out;
        for (const json& r : v) {
            if (!r.is_array()) fail(key, "expected a non-empty array of arrays");
            std::vector<double> row;
            for (const json& x : r) {
                if (!x.is_number()) fail(key, "entries must be numbers");
                row.push_back(x.get<double>());
            }
            out.push_back(std::move(row));
        }
        return out;
    }

    json& raw(const std::string& key) { return node_[key]; }

    Section block(const std::string& key) {
        if (!has(key)) fail(key, "required block");
        return Section(node_[key], field(key));
    }

    Eigen::VectorXd to_vector(const json& v, const std::string& key, std::optional<int> size) const {
        if (!v.is_array()) fail(key, "expected an array of numbers");
        Eigen::VectorXd out(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!v[k].is_number()) fail(key, "expected an array of numbers");
            out[static_cast<Eigen::Index>(k)] = v[k].get<double>();
        }
        if (size && out.size() != *size) fail(key, "expected " + std::to_string(*size) + " entries");
        if (!out.allFinite()) fail(key, "entries must be finite");
        return out;
    }

private:
    json& node_;
    std::string path_;
};

// ---------------------------------------------------------------------------
// resolved inputs

struct Options {
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    std::optional<double> tol;
    bool quiet = false;
};

struct RadialInput {
    algebra::CoefficientMatrix A;
    algebra::SingularityProfile singularity;
    double r_max;
    double tol;
};

algebra::CoefficientMatrix read_matrix(Section& s) {
    try {
        return algebra::CoefficientMatrix::from_rows(s.rows("matrix"));
    } catch (const Error& e) {
        s.fail("matrix", e.what());
    }
}

algebra::SingularityProfile read_gamma(Section& s, const std::string& key, double fallback) {
    const double g = s.number(key, fallback);
    if (!(g > -1.0 && g <= 0.0)) {
        std::ostringstream os;
        os << "must lie in (-1, 0], got " << g;
        s.fail(key, os.str());
    }
    return algebra::SingularityProfile(g);
}

RadialInput read_radial(Section& s, const Options& opt) {
    auto A = read_matrix(s);
    auto sing = read_gamma(s, "gamma", 0.0);
    const double r_max = s.number("r_max", ode::kDefaultRMax);
    if (!(r_max >= 10.0)) s.fail("r_max", "must be >= 10");
    if (opt.tol) s.raw("tol") = *opt.tol;
    const double tol = s.number("tol", ode::kDefaultTol);
    if (!(tol >= 1e-13 && tol <= 1e-4)) s.fail("tol", "must lie in [1e-13, 1e-4]");
    return {A, sing, r_max, tol};
}

Eigen::VectorXd read_alpha0(Section& s, int n) {
    if (s.has("alpha0") && s.has("reduced_alpha")) s.fail("alpha0", "give either alpha0 or reduced_alpha, not both");
    if (s.has("reduced_alpha")) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
        a.tail(n - 1) = s.vector("reduced_alpha", n - 1);
        return a;
    }
    if (!s.has("alpha0")) s.raw("alpha0") = std::vector<double>(n, 0.0);
    return s.vector("alpha0", n);
}

// ---------------------------------------------------------------------------
// output

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json matrix_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (int i = 0; i < m.rows(); ++i) out.push_back(to_std(m.row(i).transpose()));
    return out;
}

class Output {
public:
    Output(const Options& opt, const json& resolved, const std::string& command)
        : dir_(opt.out_dir), resolved_(resolved), command_(command), quiet_(opt.quiet) {}

    void write_json(const std::string& name, json body) const {
        json doc;
        doc["command"] = command_;
        doc["version"] = LIOUVILLE_VERSION;
        doc["config"] = resolved_;
        for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
        std::ofstream f = open(name);
        f << doc.dump(2) << '\n';
    }

    std::ofstream open_csv(const std::string& name) const {
        std::ofstream f = open(name);
        f << "# version: " << LIOUVILLE_VERSION << '\n' << "# command: " << command_ << '\n'
          << "# config: " << resolved_.dump() << '\n';
        return f;
    }

    std::ostream& report() const { return quiet_ ? null_ : std::cout; }

private:
    std::ofstream open(const std::string& name) const {
        fs::create_directories(dir_);
        std::ofstream f(dir_ / name);
        if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
        f << std::setprecision(17);
        return f;
    }

    fs::path dir_;
    json resolved_;
    std::string command_;
    bool quiet_;
    mutable std::ostream null_{nullptr};
};

json summary_json(const energy::SolutionSummary& s) {
    return json{{"sigma", to_std(s.sigma)}, {"m", to_std(s.m)},         {"D", to_std(s.D)},
                {"alpha", to_std(s.alpha)}, {"mu", s.mu},               {"m_min", s.m_min},
                {"tail_amplitude", to_std(s.tail_amplitude())},         {"warnings", s.warnings}};
}

void print_vector(std::ostream& os, const std::string& name, const Eigen::VectorXd& v) {
    os << std::setw(16) << std::left << name;
    for (int i = 0; i < v.size(); ++i) os << (i ? " " : "") << std::setprecision(12) << v[i];
    os << '\n';
}

// ---------------------------------------------------------------------------
// commands; each resolves its inputs first (ConfigError), then computes

int cmd_solve(json& cfg, const Options& opt) {
    Section top(cfg, "");
    const RadialInput in = read_radial(top, opt);
    const Eigen::VectorXd alpha0 = read_alpha0(top, in.A.size());

    const auto solved = energy::solve(ode::ProblemSpec(in.A, in.singularity, alpha0), in.r_max, in.tol);
    const Output out(opt, cfg, "solve");
    {
        auto f = out.open_csv("profile.csv");
        ode::write_profile_csv(f, solved.profile);
    }
    json body = summary_json(solved.summary);
    body["r_max_used"] = solved.profile.r_max();
    body["pohozaev_residual"] = energy::pohozaev_residual(solved.summary, in.A);
    out.write_json("summary.json", json{{"summary", body}});

    auto& os = out.report();
    print_vector(os, "sigma", solved.summary.sigma);
    print_vector(os, "m", solved.summary.m);
    print_vector(os, "D", solved.summary.D);
    print_vector(os, "alpha", solved.summary.alpha);
    os << "pohozaev        " << body["pohozaev_residual"].get<double>() << '\n';
    for (const auto& w : solved.summary.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
}

int cmd_invert(json& cfg, const Options& opt) {
    Section top(cfg, "");
    const RadialInput in = read_radial(top, opt);
    const int d = in.A.size() - 1;
    const Eigen::VectorXd target = top.vector("target_sigma", d);
    if (!top.has("reduced_alpha")) top.raw("reduced_alpha") = std::vector<double>(d, 0.0);
    const Eigen::VectorXd guess = top.vector("reduced_alpha", d);
    const Output out(opt, cfg, "invert");
    auto& os = out.report();

    shooting::InvertOptions io;
    io.shooting = {in.r_max, in.tol};
    if (d == 0) {
        const auto pt = shooting::alpha_to_sigma(in.A, in.singularity, Eigen::VectorXd(0), io.shooting);
        out.write_json("invert.json", json{{"converged", true},
                                           {"reduced_alpha", json::array()},
                                           {"forced_sigma", to_std(pt.full_sigma)},
                                           {"residual", 0.0},
                                           {"steps", 0}});
        os << "reduced_alpha   []\n";
        print_vector(os, "forced sigma", pt.full_sigma);
        return 0;
    }
    try {
        const auto r = shooting::invert_sigma(in.A, in.singularity, target, guess, io);
        const auto pt = shooting::alpha_to_sigma(in.A, in.singularity, r.reduced_alpha, io.shooting);
        out.write_json("invert.json", json{{"converged", true},
                                           {"reduced_alpha", to_std(r.reduced_alpha)},
                                           {"full_sigma", to_std(pt.full_sigma)},
                                           {"residual", r.residual},
                                           {"steps", r.steps}});
        print_vector(os, "reduced_alpha", r.reduced_alpha);
        print_vector(os, "sigma", pt.full_sigma);
        os << "residual        " << r.residual << '\n';
        return 0;
    } catch (const NonConvergence& e) {
        out.write_json("invert.json", json{{"converged", false},
                                           {"error", e.what()},
                                           {"best_reduced_alpha", e.best_iterate()},
                                           {"best_residual", e.best_residual()}});
        throw;
    }
}

int cmd_surface(json& cfg, const Options& opt) {
    Section top(cfg, "");
    auto A = read_matrix(top);
    Section s = top.block("surface");
    const double nL = s.number("n_L", 1.0);
    if (!(nL > 0.0)) s.fail("n_L", "must be positive");
    const algebra::RhoVector Q = [&] {
        try {
            return algebra::q_point(A, nL);
        } catch (const Error& e) {
            throw ConfigError(std::string("Q undefined for this matrix: ") + e.what());
        }
    }();
    if (!s.has("rho")) s.raw("rho") = to_std(Q.values());
    std::optional<algebra::RhoVector> rho;
    try {
        rho.emplace(s.vector("rho", A.size()));
    } catch (const Error& e) {
        s.fail("rho", e.what());
    }
    if (!s.has("gammas")) s.raw("gammas") = json::array();
    const Eigen::VectorXd gammas = s.vector("gammas");
    std::vector<algebra::SingularityProfile> strengths;
    for (int k = 0; k < gammas.size(); ++k) {
        if (!(gammas[k] > -1.0 && gammas[k] <= 0.0)) s.fail("gammas", "entries must lie in (-1, 0]");
        strengths.emplace_back(gammas[k]);
    }
    const int m_max = s.integer("m_max", 2);
    if (m_max < 0) s.fail("m_max", "must be >= 0");
    std::optional<std::array<double, 3>> sweep;
    if (s.has("sweep")) {
        Section w = s.block("sweep");
        const double lo = w.number("t_min", 0.5), hi = w.number("t_max", 1.5);
        const int steps = w.integer("steps", 21);
        if (!(hi > lo) || steps < 2) w.fail("steps", "need t_max > t_min and at least 2 steps");
        sweep = {lo, hi, static_cast<double>(steps)};
    }

    const Output out(opt, cfg, "surface");
    auto& os = out.report();
    const auto sigma = algebra::critical_values(strengths, m_max);
    const double lam = algebra::lambda_L(*rho, A, nL);
    const double lam_scale = std::max(1.0, rho->values().cwiseAbs().maxCoeff() / (2 * kPi * nL));
    const bool on_gamma = std::abs(lam) <= 1e-12 * lam_scale * lam_scale;
    const auto fm = algebra::frak_m(*rho, A, nL);
    const auto region = algebra::classify_region(*rho, A, sigma);
    std::vector<int> i1;
    for (int i : fm.minimizers) i1.push_back(i + 1);

    json body{{"Q", to_std(Q.values())},
              {"rho", to_std(rho->values())},
              {"Lambda", lam},
              {"Lambda_zero", on_gamma},
              {"frak_m_i", to_std(fm.frak_m_i)},
              {"frak_m", fm.frak_m},
              {"I_1", i1},
              {"critical_values", sigma},
              {"region",
               {{"L", region.L},
                {"on_boundary", region.on_boundary},
                {"boundary_index", region.boundary_index},
                {"ratio", region.ratio}}},
              {"h2", A.satisfies_h2()}};
    if (sweep) {
        auto f = out.open_csv("surface_sweep.csv");
        f << "t,Lambda\n";
        const int steps = static_cast<int>((*sweep)[2]);
        for (int k = 0; k < steps; ++k) {
            const double t = (*sweep)[0] + ((*sweep)[1] - (*sweep)[0]) * k / (steps - 1);
            f << t << ',' << algebra::lambda_L(algebra::RhoVector(t * Q.values()), A, nL) << '\n';
        }
        body["sweep_file"] = "surface_sweep.csv";
    }
    out.write_json("surface.json", body);

    print_vector(os, "Q", Q.values());
    os << "Lambda          " << lam << (on_gamma ? "  (Lambda = 0: rho on the surface)" : "") << '\n';
    os << "region          L = " << region.L;
    if (region.on_boundary) os << ", on Gamma_" << region.boundary_index;
    os << '\n';
    os << "critical values";
    for (double v : sigma) os << ' ' << std::setprecision(12) << v / kPi << "pi";
    os << '\n';
    return 0;
}

int cmd_compare(json& cfg, const Options& opt) {
    Section top(cfg, "");
    const RadialInput in = read_radial(top, opt);
    const Eigen::VectorXd alpha_q = read_alpha0(top, in.A.size());
    Section c = top.block("compare");
    const double mu_p = c.number("mu_p");
    if (!(mu_p > 0.0 && mu_p <= 1.0)) c.fail("mu_p", "must lie in (0, 1]");
    const double M_p = c.number("M_p", 10.0), M_q = c.number("M_q", 10.0);
    // the transformed profile reaches r_max^{mu_q/mu_p}; integrate the q side far enough
    const double r_max_q = c.number("r_max_q", std::max(in.r_max, 1e8));
    if (!(r_max_q >= in.r_max)) c.fail("r_max_q", "must be >= r_max");
    std::optional<Eigen::VectorXd> alpha_p;
    if (c.has("alpha0_p")) alpha_p = c.vector("alpha0_p", in.A.size());

    const auto q = energy::solve(ode::ProblemSpec(in.A, in.singularity, alpha_q), r_max_q, in.tol);
    const double mu_q = q.profile.mu();
    const auto transformed = scaling::mu_transform(q.profile, mu_p);
    const auto s_tilde = energy::extract_summary(transformed);
    const auto heights = scaling::height_match(M_p, M_q, mu_p, mu_q);
    const Eigen::VectorXd d_res = scaling::d_relation_residual(q.profile, q.summary, mu_p, M_p, M_q);
    const Eigen::VectorXd scaled_gap = s_tilde.sigma * mu_q - q.summary.sigma * mu_p;

    energy::SolutionSummary p_summary = s_tilde;
    if (alpha_p) {
        p_summary = energy::solve(ode::ProblemSpec(in.A, algebra::SingularityProfile::from_mu(mu_p), *alpha_p), in.r_max,
                                  in.tol)
                        .summary;
    }
    const auto dist = scaling::bubble_distance(p_summary, q.summary, heights);

    const Output out(opt, cfg, "compare");
    {
        auto f = out.open_csv("distance.csv");
        scaling::write_distance_csv(f, dist);
    }
    out.write_json("compare.json",
                   json{{"mu_p", mu_p},
                        {"mu_q", mu_q},
                        {"heights", {{"M_p", M_p}, {"M_q", M_q}, {"eps_p", heights.eps_p}, {"eps_q", heights.eps_q}, {"eta", heights.eta}}},
                        {"summary_q", summary_json(q.summary)},
                        {"summary_transformed", summary_json(s_tilde)},
                        {"sigma_scaling_gap", to_std(scaled_gap)},
                        {"d_relation_residual", to_std(d_res)},
                        {"p_side", alpha_p ? "solved" : "transformed"},
                        {"distance", to_std(dist.distance)},
                        {"distance_reference", dist.reference.value_or(0.0)}});
    auto& os = out.report();
    os << "mu_q -> mu_p    " << mu_q << " -> " << mu_p << '\n';
    print_vector(os, "sigma gap", scaled_gap);
    print_vector(os, "D residual", d_res);
    print_vector(os, "distance", dist.distance);
    return 0;
}

std::vector<green::Point> read_points(Section& s, const std::string& key) {
    if (!s.has(key)) s.fail(key, "required");
    const json& v = s.raw(key);
    if (!v.is_array() || v.empty()) s.fail(key, "expected a non-empty array of [x, y] pairs");
    std::vector<green::Point> out;
    for (const json& p : v) {
        const Eigen::VectorXd x = s.to_vector(p, key, 2);
        out.emplace_back(x[0], x[1]);
    }
    return out;
}

green::TorusGreen read_geometry(Section& s) {
    if (!s.has("periods")) s.raw("periods") = std::vector<double>{1.0, 1.0};
    const Eigen::VectorXd L = s.vector("periods", 2);
    const int modes = s.integer("n_modes", 16);
    try {
        return green::TorusGreen(L[0], L[1], modes);
    } catch (const Error& e) {
        s.fail("periods", e.what());
    }
}

blowup::HField read_h(Section& s, json& node, const std::string& key) {
    if (!node.is_object()) s.fail(key, "h entries must be objects");
    for (auto it = node.begin(); it != node.end(); ++it)
        if (!kHKeys.count(it.key())) s.fail(key, "unknown key '" + it.key() + "'");
    Section h(node, s.field(key));
    const std::string preset = h.string("preset", "constant");
    try {
        if (preset == "constant") {
            for (const char* k : {"amplitude", "f1", "f2", "phase"})
                if (node.contains(k)) h.fail(k, "not a parameter of the constant preset");
            return blowup::HField::constant(h.number("base", 1.0));
        }
        if (preset == "sinusoidal")
            return blowup::HField::sinusoidal(h.number("base", 1.0), h.number("amplitude"), h.number("f1", 1.0),
                                              h.number("f2", 0.0), h.number("phase", 0.0));
    } catch (const Error& e) {
        throw ConfigError("field '" + s.field(key) + "': " + e.what());
    }
    h.fail("preset", "must be 'constant' or 'sinusoidal'");
}

int cmd_leading(json& cfg, const Options& opt) {
    Section top(cfg, "");
    auto A = read_matrix(top);
    const int n = A.size();
    Section b = top.block("blowup");
    auto geometry = read_geometry(b);
    const auto points = read_points(b, "points");
    const int N = static_cast<int>(points.size());
    if (!b.has("gammas")) b.raw("gammas") = std::vector<double>(N, 0.0);
    const Eigen::VectorXd gammas = b.vector("gammas", N);
    std::vector<algebra::SingularityProfile> strengths;
    double nL = 0.0;
    for (int t = 0; t < N; ++t) {
        if (!(gammas[t] > -1.0 && gammas[t] <= 0.0)) b.fail("gammas", "entries must lie in (-1, 0]");
        strengths.emplace_back(gammas[t]);
        nL += strengths.back().mu();
    }
    std::optional<algebra::RhoVector> rho;
    try {
        if (!b.has("rho")) b.raw("rho") = to_std(algebra::q_point(A, nL).values());
        rho.emplace(b.vector("rho", n));
    } catch (const Error& e) {
        b.fail("rho", e.what());
    }
    if (!b.has("h")) {
        b.raw("h") = json::array();
        for (int i = 0; i < n; ++i) b.raw("h").push_back(json{{"preset", "constant"}, {"base", 1.0}});
    }
    json& hs = b.raw("h");
    if (!hs.is_array() || static_cast<int>(hs.size()) != n) b.fail("h", "expected one entry per component");
    std::vector<blowup::HField> h;
    for (int i = 0; i < n; ++i) h.push_back(read_h(b, hs[i], "h[" + std::to_string(i) + "]"));
    std::vector<double> curvature;
    if (b.has("curvature")) curvature = to_std(b.vector("curvature", N));
    std::optional<double> mass_term;
    if (b.has("mass_term")) mass_term = b.number("mass_term");
    const double eps = b.number("eps", 1e-3);
    if (!(eps > 0.0 && eps < 1.0)) b.fail("eps", "must lie in (0, 1)");
    const double delta0 = b.number("delta0", 0.005);
    if (!(delta0 > 0.0)) b.fail("delta0", "must be positive");
    const std::string regime = b.string("regime", "auto");
    if (regime != "auto" && regime != "general" && regime != "Q") b.fail("regime", "must be 'auto', 'general' or 'Q'");

    // D_i, alpha_i: given, or taken from the radial solution of the top-level problem
    Eigen::VectorXd D, alpha, alpha0;
    std::optional<RadialInput> radial;
    if (b.has("D") || b.has("alpha")) {
        D = b.vector("D", n);
        alpha = b.vector("alpha", n);
    } else {
        radial = read_radial(top, opt);
        alpha0 = read_alpha0(top, n);
    }

    blowup::BlowupConfiguration config(geometry, A, *rho);
    config.points = points;
    config.strengths = strengths;
    config.n_L = nL;
    config.h = h;
    config.curvature = curvature;
    config.mass_term = mass_term;
    if (radial) {
        const auto s = energy::solve(ode::ProblemSpec(radial->A, radial->singularity, alpha0), radial->r_max, radial->tol);
        D = s.summary.D;
        alpha = s.summary.alpha;
    }
    config.D = D;
    config.alpha = alpha;
    try {
        config.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("blowup: ") + e.what());
    } catch (const GeometryError& e) {
        throw ConfigError(std::string("field 'blowup.points': ") + e.what());
    }

    const Output out(opt, cfg, "leading");
    auto& os = out.report();
    const auto fm = config.frak();
    const auto I2 = config.regular_set();
    const bool q_regime = regime == "Q" || (regime == "auto" && config.at_q() && !I2.empty());

    json body{{"n_L", nL},
              {"frak_m", fm.frak_m},
              {"frak_m_i", to_std(fm.frak_m_i)},
              {"at_Q", config.at_q()},
              {"Lambda", algebra::lambda_L(config.rho, config.A, nL)},
              {"D_input", to_std(D)},
              {"alpha_input", to_std(alpha)},
              {"gstar", matrix_json(green::gstar_matrix(geometry, points))}};
    json reg = json::array();
    for (int t : I2) reg.push_back(t + 1);
    body["I_2"] = reg;

    if (q_regime) {
        body["regime"] = "Q";
        const double pred = blowup::leading_term_Q(config, eps);
        json bs = json::array();
        for (int i = 0; i < n; ++i)
            for (int t : I2) bs.push_back(json{{"i", i + 1}, {"t", t + 1}, {"b", blowup::b_coefficient(config, i, t)}});
        body["b"] = bs;
        body["eps"] = eps;
        body["prediction"] = pred;
        os << "regime          Q\n";
        for (const auto& r : bs)
            os << "b_" << r["i"].get<int>() << r["t"].get<int>() << "            " << std::setprecision(12)
               << r["b"].get<double>() << '\n';
        os << "prediction      " << std::setprecision(12) << pred << '\n';
    } else {
        body["regime"] = "general";
        const auto lt = blowup::leading_term_general(config, delta0, eps);
        json rows = json::array();
        for (const auto& r : lt.rows)
            rows.push_back(json{{"i", r.i + 1},
                                {"t", r.t + 1},
                                {"B", r.B},
                                {"A_delta0", r.A.at_delta0},
                                {"A_half", r.A.at_half},
                                {"A_limit", r.A.limit},
                                {"richardson_exponent", r.A.exponent}});
        // delta0-halving stability at the first point
        json stab = json::array();
        double prev = NAN;
        for (int k = 0; k < 4; ++k) {
            const double d0 = delta0 / std::pow(2.0, k);
            const double a = blowup::a_integral(config, lt.rows.front().i, 0, d0);
            stab.push_back(json{{"delta0", d0}, {"A", a}, {"gap", k ? json(std::abs(a - prev)) : json(nullptr)}});
            prev = a;
        }
        body["rows"] = rows;
        body["stability"] = stab;
        body["D"] = lt.D;
        body["eps"] = eps;
        body["prediction"] = lt.prediction;
        body["on_surface"] = lt.on_surface;
        os << "regime          general" << (lt.on_surface ? "" : " (rho off Gamma_L)") << '\n';
        os << "D               " << std::setprecision(12) << lt.D << '\n';
        os << "prediction      " << lt.prediction << '\n';
        for (const auto& s : stab)
            os << "A(" << s["delta0"].get<double>() << ")  " << std::setprecision(12) << s["A"].get<double>() << '\n';
        if (fm.frak_m_i.minCoeff() > 2.0 && N > 1) {
            json hr = json::array();
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    for (int t = 0; t < N; ++t)
                        for (int s = t + 1; s < N; ++s)
                            hr.push_back(json{{"i", i + 1}, {"j", j + 1}, {"t", t + 1}, {"s", s + 1},
                                              {"residual", blowup::h_relation_residual(config, i, j, t, s)}});
            body["h_relation"] = hr;
        }
    }
    json loc = json::array();
    for (int t : I2) {
        const auto r = blowup::location_residual(config, t, q_regime ? blowup::Regime::Q : blowup::Regime::General);
        loc.push_back(json{{"t", t + 1}, {"residual", {r[0], r[1]}}});
    }
    body["location_residual"] = loc;
    out.write_json("leading.json", body);
    return 0;
}

int cmd_green(json& cfg, const Options& opt) {
    Section top(cfg, "");
    Section g = top.block("green");
    const auto geometry = read_geometry(g);
    const auto points = read_points(g, "points");
    Eigen::MatrixXd M;
    try {
        M = green::gstar_matrix(geometry, points);
    } catch (const GeometryError& e) {
        g.fail("points", e.what());
    }
    const auto rp = geometry.regular_part(points.front());
    const auto grads = green::gstar_gradients(geometry, points);

    const Output out(opt, cfg, "green");
    {
        auto f = out.open_csv("gstar.csv");
        for (int t = 0; t < M.rows(); ++t) {
            for (int s = 0; s < M.cols(); ++s) f << (s ? "," : "") << M(t, s);
            f << '\n';
        }
    }
    json gj = json::array();
    for (const auto& row : grads) {
        json r = json::array();
        for (const auto& v : row) r.push_back({v[0], v[1]});
        gj.push_back(r);
    }
    out.write_json("green.json", json{{"regular_part", rp.value},
                                      {"regular_gradient", {rp.gradient[0], rp.gradient[1]}},
                                      {"extrapolation_gap", rp.extrapolation_gap},
                                      {"gstar", matrix_json(M)},
                                      {"gstar_gradients", gj}});
    auto& os = out.report();
    os << "gamma(p,p)      " << std::setprecision(15) << rp.value << '\n';
    os << "G* (" << M.rows() << "x" << M.cols() << ") written to gstar.csv\n";
    return 0;
}

json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();
    json cfg;
    try {
        cfg = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("parse error at line " + line_of(text, e.byte) + ": " + e.what());
    }
    check_keys(cfg, kTop, "");
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial Liouville systems, energy extraction and blowup coefficients"};
    app.set_version_flag("--version", std::string(LIOUVILLE_VERSION));
    Options opt;
    app.add_option("command", opt.command, "solve | invert | surface | compare | leading | green")
        ->required()
        ->check(CLI::IsMember({"solve", "invert", "surface", "compare", "leading", "green"}));
    app.add_option("--config", opt.config_path, "JSON configuration file")->required();
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--tol", opt.tol, "integrator tolerance (overrides the config)");
    app.add_flag("--quiet", opt.quiet, "no report on standard output");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        json cfg = load_config(opt.config_path);
        if (opt.command == "solve") return cmd_solve(cfg, opt);
        if (opt.command == "invert") return cmd_invert(cfg, opt);
        if (opt.command == "surface") return cmd_surface(cfg, opt);
        if (opt.command == "compare") return cmd_compare(cfg, opt);
        if (opt.command == "leading") return cmd_leading(cfg, opt);
        return cmd_green(cfg, opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NonConvergence& e) {
        std::cerr << "no convergence: " << e.what() << "\n  best iterate:";
        for (double v : e.best_iterate()) std::cerr << ' ' << std::setprecision(17) << v;
        std::cerr << "\n  best residual: " << e.best_residual() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 3;
    }
}
