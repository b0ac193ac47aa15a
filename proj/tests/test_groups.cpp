#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lgt/group.hpp"

using namespace lgt;

namespace {
const double pi = 3.14159265358979323846;

GroupElement random_element(const GroupSpec& spec, RngStream& rng) { return haar_sample(spec, rng); }

std::vector<GroupSpec> all_groups() {
    return {GroupSpec::cyclic(2), GroupSpec::cyclic(3), GroupSpec::cyclic(4), GroupSpec::circle(), GroupSpec::su2()};
}

std::vector<Representation> catalog(const GroupSpec& g) {
    std::vector<Representation> out;
    if (g.kind == GroupKind::Cyclic)
        for (int k = 0; k < g.n; ++k) out.push_back(Representation::cyclic_character(g, k));
    if (g.kind == GroupKind::Circle)
        for (int q : {-2, -1, 0, 1, 2}) out.push_back(Representation::circle_charge(q));
    if (g.kind == GroupKind::SpecialUnitary2) {
        out.push_back(Representation::su2_trivial());
        out.push_back(Representation::su2_fundamental());
        out.push_back(Representation::su2_adjoint());
    }
    return out;
}
} // namespace

TEST_CASE("multiplication examples") {
    auto z2 = GroupSpec::cyclic(2);
    CHECK(mul(z2, make_cyclic(z2, 1), make_cyclic(z2, 1)).residue == 0);

    auto u1 = GroupSpec::circle();
    GroupElement a = make_circle(pi / 2), b = make_circle(3 * pi / 2);
    CHECK(mul(u1, a, b).theta == doctest::Approx(0.0).epsilon(1e-14));

    auto su2 = GroupSpec::su2();
    GroupElement g = make_su2(Quat{0, 1, 0, 0});
    GroupElement gi = inv(su2, g);
    CHECK(gi.q.w == doctest::Approx(0));
    CHECK(gi.q.x == doctest::Approx(-1));
    CHECK(elements_equal(su2, mul(su2, g, gi), identity(su2), 1e-14));
}

TEST_CASE("group axioms on random triples") {
    for (const auto& spec : all_groups()) {
        RngStream rng(11);
        double tol = spec.is_finite() ? 0.0 : 1e-12;
        for (int t = 0; t < 10000; ++t) {
            GroupElement a = random_element(spec, rng), b = random_element(spec, rng), c = random_element(spec, rng);
            CHECK(elements_equal(spec, mul(spec, mul(spec, a, b), c), mul(spec, a, mul(spec, b, c)), tol));
            CHECK(elements_equal(spec, mul(spec, a, identity(spec)), a, tol));
            CHECK(elements_equal(spec, mul(spec, inv(spec, a), a), identity(spec), tol));
        }
    }
}

TEST_CASE("haar sampling moments") {
    const int n = 1000000;
    SUBCASE("Z2 frequency") {
        auto z2 = GroupSpec::cyclic(2);
        RngStream rng(42);
        long ones = 0;
        for (int i = 0; i < n; ++i) ones += haar_sample(z2, rng).residue;
        double freq = static_cast<double>(ones) / n;
        CHECK(std::abs(freq - 0.5) < 3 * 0.5 / std::sqrt(static_cast<double>(n))); // 3 sigma
    }
    SUBCASE("U1 mean phase") {
        auto u1 = GroupSpec::circle();
        RngStream rng(43);
        double sc = 0, ss = 0;
        for (int i = 0; i < n; ++i) {
            double t = haar_sample(u1, rng).theta;
            sc += std::cos(t);
            ss += std::sin(t);
        }
        double sigma = std::sqrt(0.5 / n);
        CHECK(std::abs(sc / n) < 3 * sigma);
        CHECK(std::abs(ss / n) < 3 * sigma);
    }
    SUBCASE("SU2 mean trace") {
        auto su2 = GroupSpec::su2();
        RngStream rng(44);
        double s = 0;
        for (int i = 0; i < n; ++i) s += re_tr_defining(su2, haar_sample(su2, rng));
        // var(2w) = 1 on the uniform 3-sphere
        CHECK(std::abs(s / n) < 3.0 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("haar invariance under left translation") {
    // two-sample comparison of trace moments for g vs h*g
    for (const auto& spec : all_groups()) {
        RngStream rng(7);
        GroupElement h = haar_sample(spec, rng);
        const int n = 1000000;
        double m1a = 0, m2a = 0, m1b = 0, m2b = 0;
        RngStream ra(101), rb(202);
        for (int i = 0; i < n; ++i) {
            double ta = re_tr_defining(spec, haar_sample(spec, ra));
            double tb = re_tr_defining(spec, mul(spec, h, haar_sample(spec, rb)));
            m1a += ta;
            m2a += ta * ta;
            m1b += tb;
            m2b += tb * tb;
        }
        m1a /= n; m2a /= n; m1b /= n; m2b /= n;
        double v1 = (m2a - m1a * m1a + m2b - m1b * m1b) / n;
        CHECK(std::abs(m1a - m1b) < 3 * std::sqrt(v1) + 1e-9);
        double va2 = 2.0 / n, sig2 = std::sqrt(va2); // loose bound for second-moment noise
        CHECK(std::abs(m2a - m2b) < 3 * sig2 + 1e-9);
    }
}

TEST_CASE("representation examples") {
    auto z2 = GroupSpec::cyclic(2);
    CHECK(rep_matrix(Representation::cyclic_character(z2, 1), make_cyclic(z2, 1)).a[0].real() == doctest::Approx(-1));

    CHECK(rep_matrix(Representation::circle_charge(2), make_circle(pi)).a[0].real() == doctest::Approx(1.0));

    auto su2 = GroupSpec::su2();
    RngStream rng(5);
    GroupElement g = haar_sample(su2, rng);
    CHECK(rep_matrix(Representation::su2_fundamental(), g).max_abs_diff(defining_matrix(su2, g)) < 1e-15);
}

TEST_CASE("rep matrices are unitary homomorphisms") {
    for (const auto& spec : all_groups()) {
        for (const auto& rep : catalog(spec)) {
            RngStream rng(13);
            for (int t = 0; t < 10000; ++t) {
                GroupElement a = random_element(spec, rng), b = random_element(spec, rng);
                CMat ma = rep_matrix(rep, a), mb = rep_matrix(rep, b);
                CHECK(ma.is_unitary(1e-10));
                CHECK(ma.mul(mb).max_abs_diff(rep_matrix(rep, mul(spec, a, b))) < 1e-10);
            }
        }
    }
}

TEST_CASE("center elements commute with haar samples") {
    for (const auto& spec : all_groups()) {
        auto centers = center_elements(spec);
        if (spec.kind == GroupKind::Cyclic) CHECK(static_cast<int>(centers.size()) == spec.n);
        if (spec.kind == GroupKind::SpecialUnitary2) {
            REQUIRE(centers.size() == 2);
            CHECK(centers[1].q.w == doctest::Approx(-1));
        }
        for (const auto& g0 : centers) CHECK(is_central(spec, g0, 100, 1e-10));
    }
}

TEST_CASE("center scalar and nontrivial action") {
    auto z2 = GroupSpec::cyclic(2);
    auto fund_z2 = Representation::cyclic_character(z2, 1);
    CHECK(center_scalar(fund_z2, make_cyclic(z2, 1)).real() == doctest::Approx(-1));
    CHECK(acts_nontrivially_on_center(fund_z2));
    CHECK_FALSE(acts_nontrivially_on_center(Representation::cyclic_character(z2, 0)));

    auto su2 = GroupSpec::su2();
    GroupElement minus_i = make_su2(Quat{-1, 0, 0, 0});
    CHECK(center_scalar(Representation::su2_fundamental(), minus_i).real() == doctest::Approx(-1));

    // adjoint of -I: conjugation action is trivial, computed entrywise
    CMat adj = rep_matrix(Representation::su2_adjoint(), minus_i);
    CHECK(adj.max_abs_diff(CMat::ident(3)) < 1e-14);
    CHECK(center_scalar(Representation::su2_adjoint(), minus_i).real() == doctest::Approx(1));
    CHECK_FALSE(acts_nontrivially_on_center(Representation::su2_adjoint()));
    CHECK(acts_nontrivially_on_center(Representation::su2_fundamental()));

    // Schur identity holds entrywise
    for (const auto& g0 : center_elements(su2)) {
        cplx c = center_scalar(Representation::su2_fundamental(), g0);
        CMat m = rep_matrix(Representation::su2_fundamental(), g0);
        CHECK(m.max_abs_diff(CMat::ident(2).scaled(c)) < 1e-14);
    }

    // non-central element is rejected
    GroupElement notc = make_su2(Quat{0.6, 0.8, 0, 0});
    CHECK_THROWS(center_scalar(Representation::su2_fundamental(), notc));
}

TEST_CASE("representation parsing") {
    auto z3 = GroupSpec::cyclic(3);
    CHECK(Representation::parse(z3, "char:2").label == 2);
    CHECK(Representation::parse(z3, "fund").label == 1);
    CHECK(Representation::parse(GroupSpec::circle(), "charge:-2").label == -2);
    CHECK(Representation::parse(GroupSpec::su2(), "adjoint").dim == 3);
    CHECK(Representation::parse(GroupSpec::su2(), "trivial").dim == 1);
    CHECK_THROWS(Representation::parse(z3, "adjoint"));
    CHECK(GroupSpec::parse("Z4").n == 4);
    CHECK(GroupSpec::parse("U1").kind == GroupKind::Circle);
    CHECK_THROWS(GroupSpec::parse("E8"));
}

TEST_CASE("mismatched group usage is an error") {
    auto z2 = GroupSpec::cyclic(2);
    auto u1 = GroupSpec::circle();
    GroupElement a = make_cyclic(z2, 1);
    GroupElement b = make_circle(0.5);
    CHECK_THROWS(mul(z2, a, b));
    CHECK_THROWS(rep_matrix(Representation::circle_charge(1), a));
    (void)u1;
}
