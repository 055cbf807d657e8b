#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "liouville/algebra.hpp"

using namespace liouville;
using namespace liouville::algebra;
using std::numbers::pi;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
    Eigen::MatrixXd m(rows.size(), rows.begin()->size());
    int i = 0;
    for (auto& r : rows) {
        int j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

RhoVector rho(std::initializer_list<double> v) {
    Eigen::VectorXd x(v.size());
    int i = 0;
    for (double d : v) x[i++] = d;
    return RhoVector(x);
}

}  // namespace

TEST_CASE("validate_structure on the reference matrices") {
    SUBCASE("[[1,2],[2,1]] passes H1 and H2") {
        const auto rep = validate_structure(mat({{1, 2}, {2, 1}}));
        CHECK(rep.h1_ok());
        CHECK(rep.h2_ok());
        const CoefficientMatrix A = fixtures::a12();
        CHECK(A.inverse()(0, 0) == doctest::Approx(-1.0 / 3).epsilon(1e-14));
        CHECK(A.inverse()(0, 1) == doctest::Approx(2.0 / 3).epsilon(1e-14));
    }
    SUBCASE("[[1]] fails H2 only") {
        const auto rep = validate_structure(mat({{1}}));
        CHECK(rep.h1_ok());
        CHECK_FALSE(rep.h2_ok());
        CHECK_FALSE(rep.h2[0].passed);
    }
    SUBCASE("[[1,0.5],[0.5,1]] fails H2 on the diagonal") {
        const CoefficientMatrix A(mat({{1, 0.5}, {0.5, 1}}));
        CHECK(A.inverse()(0, 0) == doctest::Approx(4.0 / 3).epsilon(1e-14));
        CHECK_FALSE(A.satisfies_h2());
    }
    SUBCASE("H1 failures block construction") {
        CHECK_FALSE(validate_structure(mat({{1, 0}, {0, 1}})).h1_ok());  // reducible
        CHECK_FALSE(validate_structure(mat({{1, 2}, {3, 1}})).h1_ok());  // asymmetric
        CHECK_FALSE(validate_structure(mat({{1, -1}, {-1, 1}})).h1_ok());
        CHECK_FALSE(validate_structure(mat({{1, 1}, {1, 1}})).h1_ok());  // singular
        CHECK_THROWS_AS(CoefficientMatrix(mat({{1, 1}, {1, 1}})), InvalidInput);
    }
    SUBCASE("malformed input is rejected") {
        CHECK_THROWS_AS(validate_structure(Eigen::MatrixXd(2, 3)), InvalidInput);
        CHECK_THROWS_AS(validate_structure(mat({{1, NAN}, {NAN, 1}})), InvalidInput);
        CHECK_THROWS_AS(CoefficientMatrix::from_rows({{1, 2}, {2}}), InvalidInput);
    }
}

TEST_CASE("singularity profile range") {
    CHECK(SingularityProfile(-0.5).mu() == 0.5);
    CHECK(SingularityProfile(0.0).regular());
    CHECK_THROWS_AS(SingularityProfile(-1.0), InvalidInput);
    CHECK_THROWS_AS(SingularityProfile(0.1), InvalidInput);
    CHECK_THROWS_AS(SingularityProfile(-1.5), InvalidInput);
}

TEST_CASE("critical values") {
    CHECK(critical_values({}, 2) == std::vector<double>{8 * pi, 16 * pi});

    const auto one = critical_values({SingularityProfile(-0.5)}, 1);
    REQUIRE(one.size() == 3);
    CHECK(one[0] == doctest::Approx(4 * pi));
    CHECK(one[1] == doctest::Approx(8 * pi));
    CHECK(one[2] == doctest::Approx(12 * pi));

    const auto two = critical_values({SingularityProfile(-0.5), SingularityProfile(-0.5)}, 0);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == doctest::Approx(4 * pi));
    CHECK(two[1] == doctest::Approx(8 * pi));

    CHECK_THROWS_AS(critical_values({}, -1), InvalidInput);
}

TEST_CASE("critical values are increasing and closed under the 8 pi shift") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> g(-0.95, 0.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<SingularityProfile> pts;
        const int N = 1 + trial % 4;
        for (int k = 0; k < N; ++k) pts.emplace_back(g(rng));
        const int m_max = 1 + trial % 3;
        const auto full = critical_values(pts, m_max);
        for (std::size_t k = 1; k < full.size(); ++k) CHECK(full[k] > full[k - 1]);
        // every level reachable with m < m_max shifts by 8 pi into the set
        for (double v : critical_values(pts, m_max - 1)) {
            const double target = v + 8 * pi;
            const bool found = std::any_of(full.begin(), full.end(), [&](double w) {
                return std::abs(w - target) <= 1e-12 * target;
            });
            CHECK(found);
        }
    }
}

TEST_CASE("lambda_L, frak_m and Q") {
    const CoefficientMatrix A = fixtures::a12();
    CHECK(lambda_L(rho({2 * pi, 2 * pi}), A, 1.0) == doctest::Approx(2.0).epsilon(1e-14));

    const CoefficientMatrix A1 = CoefficientMatrix::from_rows({{1}});
    CHECK(std::abs(lambda_L(rho({8 * pi}), A1, 1.0)) < 1e-14);

    const RhoVector q = q_point(A, 1.0);
    CHECK(q[0] == doctest::Approx(8 * pi / 3).epsilon(1e-14));
    CHECK(q[1] == doctest::Approx(8 * pi / 3).epsilon(1e-14));
    const RhoVector qh = q_point(A, 0.5);
    CHECK(qh[0] == doctest::Approx(4 * pi / 3).epsilon(1e-14));
    CHECK(q_point(A1, 1.0)[0] == doctest::Approx(8 * pi));

    const FrakM fm = frak_m(rho({2 * pi, 4 * pi}), A, 1.0);
    CHECK(fm.frak_m_i[0] == doctest::Approx(5.0));
    CHECK(fm.frak_m_i[1] == doctest::Approx(4.0));
    CHECK(fm.frak_m == doctest::Approx(4.0));
    CHECK(fm.minimizers == std::vector<int>{1});

    const FrakM fq = frak_m(q, A, 1.0);
    CHECK(fq.minimizers == std::vector<int>{0, 1});
    CHECK(fq.frak_m == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(frak_m(rho({6 * pi}), A1, 1.0).frak_m == doctest::Approx(3.0));

    CHECK_THROWS_AS(lambda_L(q, A, 0.0), InvalidInput);
}

TEST_CASE("Lambda_L vanishes at Q and changes sign along t Q") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> nl(0.2, 5.0);
    for (const auto& A : {fixtures::a12(), fixtures::a3(), CoefficientMatrix::from_rows({{2}})}) {
        for (int k = 0; k < 10; ++k) {
            const double n_L = nl(rng);
            const RhoVector q = q_point(A, n_L);
            CHECK(std::abs(lambda_L(q, A, n_L)) < 1e-12);
            const auto fm = frak_m(q, A, n_L);
            for (int i = 0; i < A.size(); ++i) CHECK(fm.frak_m_i[i] == doctest::Approx(4.0).epsilon(1e-13));
            for (double t : {0.1, 0.5, 0.9, 0.999}) CHECK(lambda_L(RhoVector(t * q.values()), A, n_L) > 0.0);
            for (double t : {1.001, 1.5, 1.9}) CHECK(lambda_L(RhoVector(t * q.values()), A, n_L) < 0.0);
            // frak_m is linear in rho
            const auto f2 = frak_m(RhoVector(2.5 * q.values()), A, n_L);
            CHECK((f2.frak_m_i - 2.5 * fm.frak_m_i).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("classify_region") {
    const CoefficientMatrix A = fixtures::a12();
    const std::vector<double> sig{8 * pi, 16 * pi};
    const Region below = classify_region(rho({2 * pi, 2 * pi}), A, sig);
    CHECK(below.L == 0);
    CHECK_FALSE(below.on_boundary);

    const Region on = classify_region(q_point(A, 1.0), A, sig);
    CHECK(on.on_boundary);
    CHECK(on.boundary_index == 1);

    const CoefficientMatrix A1 = CoefficientMatrix::from_rows({{1}});
    const Region mid = classify_region(rho({12 * pi}), A1, sig);
    CHECK(mid.L == 1);
    CHECK_FALSE(mid.on_boundary);
    CHECK(classify_region(rho({20 * pi}), A1, sig).L == 2);

    CHECK_THROWS_AS(classify_region(rho({0, 0}), A, sig), DomainError);
    CHECK_THROWS_AS(classify_region(rho({1, 1}), A, {}), InvalidInput);
}

TEST_CASE("height quadratic") {
    CHECK(solve_height_quadratic({0, 0, 0}) == 1.0);
    CHECK(solve_height_quadratic({0.1, 0, 0}) == doctest::Approx(-0.05 + std::sqrt(1.0025)).epsilon(1e-15));
    CHECK(solve_height_quadratic({0, 0.01, 0}) == doctest::Approx(std::sqrt(0.99)).epsilon(1e-15));
    CHECK_THROWS_AS(solve_height_quadratic({0, 3, 0}), NoRealRoot);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    for (int k = 0; k < 1000; ++k) {
        const HeightQuadratic q{u(rng), u(rng), u(rng)};
        const double l = solve_height_quadratic(q);
        CHECK(std::abs(l * l + q.B * l + q.C - 1 - q.E) < 1e-12);
        CHECK(std::abs(l - 1) <= 2 * (std::abs(q.B) + std::abs(q.C) + std::abs(q.E)));
    }
}
