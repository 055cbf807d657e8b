#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "liouville/scaling.hpp"
#include "liouville/shooting.hpp"

using namespace liouville;
using namespace liouville::scaling;
using liouville::algebra::SingularityProfile;

TEST_CASE("height_match") {
    CHECK(height_match(3.0, 3.0, 0.7, 0.7).eta == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(height_match(10.0, 20.0, 1.0, 0.5).eta == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(height_match(7.0, 5.0, 1.0, 1.0).eta == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    const auto h = height_match(4.0, 9.0, 0.8, 0.3);
    CHECK(2 * h.mu_p * std::log(h.eta) ==
          doctest::Approx(h.mu_p * h.M_p - h.mu_q * h.M_q - 2 * std::log(h.mu_p / h.mu_q)).epsilon(1e-14));
    CHECK(h.eps_p == doctest::Approx(std::exp(-2.0)));
    CHECK_THROWS_AS(height_match(1.0, 1.0, 0.0, 0.5), DomainError);
}

TEST_CASE("mu_transform of F2 is the regular explicit solution") {
    const auto f2 = ode::integrate(fixtures::f2(), 1e8);
    const auto t = mu_transform(f2, 1.0);
    CHECK(t.mu() == 1.0);
    CHECK(std::exp(t.spec().alpha0[0]) == doctest::Approx(4.0).epsilon(1e-15));
    for (double r : {0.0, 0.01, 0.5, 1.0, 3.0, 40.0, 1e3}) {
        const double ex = std::log(4.0) - 2 * std::log1p(r * r / 2);
        CHECK(std::abs(t.evaluate(r).values[0] - ex) < 1e-8);
    }
    // the transformed profile solves the mu_p system
    const auto& s = t.s_nodes();
    for (std::size_t k = 1; k + 1 < s.size(); k += 5) {
        Eigen::VectorXd u, du;
        t.evaluate_log(s[k], u, du);
        const double h = 1e-4;
        Eigen::VectorXd up, dup, um, dum;
        t.evaluate_log(s[k] + h, up, dup);
        t.evaluate_log(s[k] - h, um, dum);
        const Eigen::VectorXd d2 = (dup - dum) / (2 * h);
        CHECK((d2 - t.second_s_derivative(s[k], u)).cwiseAbs().maxCoeff() < 1e-7);
    }
    const auto s_bar = energy::extract_summary(f2);
    const auto s_til = energy::extract_summary(t);
    CHECK(std::abs(s_til.sigma[0] * 0.5 - s_bar.sigma[0] * 1.0) < 1e-8);
}

TEST_CASE("identity cases") {
    const auto f3 = ode::integrate(fixtures::f3());
    const auto same = mu_transform(f3, 1.0);
    CHECK(same.s_nodes() == f3.s_nodes());
    const auto h = height_match(5.0, 5.0, 1.0, 1.0);
    CHECK(hat_rescale(same, h).s_nodes() == f3.s_nodes());
    CHECK_THROWS_AS(mu_transform(f3, 1.5), DomainError);
    CHECK_THROWS_AS(mu_transform(f3, 0.0), DomainError);
}

TEST_CASE("scaled energies and initial gaps through the chain") {
    Eigen::VectorXd al(3);
    al << -0.3, 0.0, -1.2;
    const double mu_q = 0.6;
    const auto p = ode::integrate(ode::ProblemSpec(fixtures::a3(), SingularityProfile(mu_q - 1), al), 1e8);
    const auto sq = energy::extract_summary(p);
    for (double mu_p : {0.3, 0.9, 1.0}) {
        const auto t = mu_transform(p, mu_p);
        const auto st = energy::extract_summary(t);
        CHECK((st.sigma * mu_q - sq.sigma * mu_p).cwiseAbs().maxCoeff() < 1e-8);

        const auto h = height_match(12.0, 16.0, mu_p, mu_q);
        const auto v = hat_rescale(t, h);
        const auto sv = energy::extract_summary(v);
        CHECK((sv.sigma - st.sigma).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(v.spec().alpha0[0] == doctest::Approx(t.spec().alpha0[0] + 2 * mu_p * std::log(h.eta)).epsilon(1e-14));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double gap = al[i] - al[j];
                CHECK(std::abs((t.spec().alpha0[i] - t.spec().alpha0[j]) - gap) < 1e-13);
                CHECK(std::abs((v.spec().alpha0[i] - v.spec().alpha0[j]) - gap) < 1e-13);
            }
        const auto d = bubble_distance(st, sq);
        CHECK(d.distance.maxCoeff() < 1e-8);
    }
}

TEST_CASE("D relation") {
    const auto f2 = ode::integrate(fixtures::f2(), 1e8);
    const auto s2 = energy::extract_summary(f2);
    const Eigen::VectorXd r1 = d_relation_residual(f2, s2, 1.0, 10.0, 20.0);
    const Eigen::VectorXd r2 = d_relation_residual(f2, s2, 1.0, 3.0, 7.5);
    CHECK(std::abs(r1[0]) < 1e-6);
    CHECK(std::abs(r1[0] - r2[0]) < 1e-9);
    CHECK(std::abs(d_relation_residual(f2, s2, 0.5, 4.0, 4.0)[0]) < 1e-9);

    Eigen::VectorXd al(2);
    al << 0.0, -0.9;
    const auto p = ode::integrate(ode::ProblemSpec(fixtures::a12(), SingularityProfile(-0.4), al), 1e8);
    const auto sp = energy::extract_summary(p);
    const Eigen::VectorXd a = d_relation_residual(p, sp, 0.95, 8.0, 11.0);
    const Eigen::VectorXd b = d_relation_residual(p, sp, 0.95, 2.0, -1.0);
    CHECK(a.cwiseAbs().maxCoeff() < 1e-6);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("bubble distance") {
    const auto s1 = energy::extract_summary(ode::integrate(fixtures::f1()));
    const auto s2 = energy::extract_summary(ode::integrate(fixtures::f2()));
    CHECK(bubble_distance(s1, s2).distance[0] < 1e-8);

    const auto A = fixtures::a12();
    Eigen::VectorXd a0(2), a1(2);
    a0 << 0.0, -0.5;
    a1 << 0.0, -0.6;
    const auto sp = energy::extract_summary(ode::integrate(ode::ProblemSpec(A, SingularityProfile(0.0), a1)));
    const auto sq = energy::extract_summary(ode::integrate(ode::ProblemSpec(A, SingularityProfile(-0.5), a0)));
    const auto h = height_match(10.0, 20.0, 1.0, 0.5);
    const auto d = bubble_distance(sp, sq, h);
    CHECK(d.distance.maxCoeff() > 1e-4);
    // sigma/mu depends only on the initial gaps, so the distance is a shooting-map increment
    Eigen::VectorXd mid(1);
    mid << -0.55;
    const Eigen::MatrixXd J = shooting::shooting_jacobian(A, SingularityProfile(0.0), mid);
    CHECK(d.distance[1] <= 1.1 * std::abs(J(0, 0)) * 0.1);
    REQUIRE(d.reference.has_value());
    CHECK(*d.reference == doctest::Approx(std::exp(-5.0 * (sp.m.minCoeff() - 2.0))).epsilon(1e-12));

    std::ostringstream os;
    write_distance_csv(os, d);
    CHECK(os.str().rfind("i,sigma_p_over_mu_p,sigma_q_over_mu_q,distance,reference\n1,", 0) == 0);
}
