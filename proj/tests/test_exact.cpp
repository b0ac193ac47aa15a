#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lgt/exact.hpp"
#include "lgt/observables.hpp"

using namespace lgt;

TEST_CASE("single plaquette: <sigma_p> = tanh(beta), against a 16-term hand sum") {
    auto z2 = GroupSpec::cyclic(2);
    auto g = LatticeGeometry::box({2, 2});
    REQUIRE(g.edge_count() == 4);
    REQUIRE(g.plaquette_count() == 1);
    double beta = 0.37;

    // independent oracle: direct 16-term sums
    double num = 0, den = 0;
    for (int mask = 0; mask < 16; ++mask) {
        GaugeConfig c = GaugeConfig::identity(g, z2);
        for (int e = 0; e < 4; ++e) c.set(e, make_cyclic(z2, (mask >> e) & 1));
        double sp = plaquette_trace(c, 0);
        double w = std::exp(beta * sp);
        num += sp * w;
        den += w;
    }
    double oracle = num / den;
    CHECK(oracle == doctest::Approx(std::tanh(beta)).epsilon(1e-12));

    EnumeratedSpace space(g, z2, BoundaryCondition::free());
    GibbsResult gr = exact_gibbs(space, beta);
    cplx v = exact_expectation(space, gr.measure, [&](const GaugeConfig& c) { return cplx(plaquette_trace(c, 0)); });
    CHECK(v.real() == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("gibbs vector properties") {
    auto z3 = GroupSpec::cyclic(3);
    auto g = LatticeGeometry::box({3, 2});
    EnumeratedSpace space(g, z3, BoundaryCondition::free());
    SUBCASE("beta = 0 is uniform") {
        GibbsResult gr = exact_gibbs(space, 0.0);
        for (double p : gr.measure.p) CHECK(p == doctest::Approx(1.0 / space.total_states()).epsilon(1e-13));
        CHECK(gr.z == doctest::Approx(1.0));
    }
    SUBCASE("one state when everything is fixed") {
        auto tiny = LatticeGeometry::box({2, 2});
        BoundaryCondition bc = BoundaryCondition::fixed_identity(tiny, z3);
        EnumeratedSpace s2(tiny, z3, bc);
        CHECK(s2.total_states() == 1);
        GibbsResult gr = exact_gibbs(s2, 0.9);
        CHECK(gr.measure.p[0] == doctest::Approx(1.0));
    }
    SUBCASE("state cap is enforced") {
        CHECK_THROWS(exact_gibbs(space, 0.5, 10));
    }
}

TEST_CASE("expectation, marginal and conditional consistency") {
    auto z2 = GroupSpec::cyclic(2);
    auto g = LatticeGeometry::cube(2, 1);
    EnumeratedSpace space(g, z2, BoundaryCondition::free());
    GibbsResult gr = exact_gibbs(space, 0.45);

    SUBCASE("f == 1 integrates to 1") {
        cplx one = exact_expectation(space, gr.measure, [](const GaugeConfig&) { return cplx(1.0); });
        CHECK(one.real() == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("marginal of marginal") {
        std::vector<int> big = {0, 2, 5, 7};
        DiscreteMeasure m1 = exact_marginal(space, gr.measure, big);
        // marginal onto {0,5} two ways
        DiscreteMeasure direct = exact_marginal(space, gr.measure, {0, 5});
        DiscreteMeasure nested;
        nested.p.assign(4, 0.0);
        for (int s = 0; s < 16; ++s) {
            int d0 = s & 1, d5 = (s >> 2) & 1; // positions of 0 and 5 inside `big`
            nested.p[static_cast<size_t>(d0 + 2 * d5)] += m1.p[static_cast<size_t>(s)];
        }
        for (int i = 0; i < 4; ++i) CHECK(direct.p[static_cast<size_t>(i)] == doctest::Approx(nested.p[static_cast<size_t>(i)]).epsilon(1e-13));
    }
    SUBCASE("conditional times marginal reassembles the joint") {
        std::vector<int> cond_edges = {1, 4};
        DiscreteMeasure marg = exact_marginal(space, gr.measure, cond_edges);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                DiscreteMeasure cond = exact_conditional(space, gr.measure, {{1, a}, {4, b}});
                // reassemble: probability of full state = marg * cond
                long long idx = 0;
                for (long long s = 0; s < space.total_states(); ++s) {
                    auto d = space.decode(s);
                    if (d[static_cast<size_t>(space.free_position(1))] != a) continue;
                    if (d[static_cast<size_t>(space.free_position(4))] != b) continue;
                    double expect = marg.p[static_cast<size_t>(a + 2 * b)] * cond.p[static_cast<size_t>(idx)];
                    CHECK(gr.measure.p[static_cast<size_t>(s)] == doctest::Approx(expect).epsilon(1e-12));
                    ++idx;
                }
            }
    }
    SUBCASE("marginal onto one edge at beta=0 is uniform") {
        GibbsResult g0 = exact_gibbs(space, 0.0);
        DiscreteMeasure m = exact_marginal(space, g0.measure, {3});
        CHECK(m.p[0] == doctest::Approx(0.5).epsilon(1e-13));
    }
    SUBCASE("conditioning errors") {
        CHECK_THROWS(exact_conditional(space, gr.measure, {{99, 0}}));
    }
}

TEST_CASE("total variation distance") {
    SUBCASE("examples") {
        DiscreteMeasure a, b;
        a.p = {0.5, 0.5};
        b.p = {1.0, 0.0};
        CHECK(exact_tv(a, a) == 0.0);
        CHECK(exact_tv(a, b) == doctest::Approx(0.5));
        DiscreteMeasure c, d;
        c.p = {1.0, 0.0};
        d.p = {0.0, 1.0};
        CHECK(exact_tv(c, d) == doctest::Approx(1.0));
        DiscreteMeasure e;
        e.p = {0.5};
        CHECK_THROWS(exact_tv(a, e));
    }
    SUBCASE("half-L1 equals the sup over events") {
        RngStream rng(77);
        for (int t = 0; t < 100; ++t) {
            int k = 2 + rng.uniform_int(7); // up to 8 states
            DiscreteMeasure a, b;
            double sa = 0, sb = 0;
            for (int i = 0; i < k; ++i) {
                a.p.push_back(rng.uniform());
                b.p.push_back(rng.uniform());
                sa += a.p.back();
                sb += b.p.back();
            }
            for (double& v : a.p) v /= sa;
            for (double& v : b.p) v /= sb;
            CHECK(exact_tv(a, b) == doctest::Approx(tv_sup_over_events(a, b)).epsilon(1e-12));
        }
        // a couple of 16-state instances
        for (int t = 0; t < 5; ++t) {
            DiscreteMeasure a, b;
            double sa = 0, sb = 0;
            for (int i = 0; i < 16; ++i) {
                a.p.push_back(rng.uniform());
                b.p.push_back(rng.uniform());
                sa += a.p.back();
                sb += b.p.back();
            }
            for (double& v : a.p) v /= sa;
            for (double& v : b.p) v /= sb;
            CHECK(exact_tv(a, b) == doctest::Approx(tv_sup_over_events(a, b)).epsilon(1e-12));
        }
    }
}

TEST_CASE("window sums agree with the explicit vector") {
    auto z3 = GroupSpec::cyclic(3);
    auto g = LatticeGeometry::box({3, 2});
    for (auto bc : {BoundaryCondition::free(), BoundaryCondition::fixed_random(g, z3, 5)}) {
        EnumeratedSpace space(g, z3, bc);
        double beta = 0.6;
        GibbsResult gr = exact_gibbs(space, beta);
        std::vector<int> window;
        for (int e : space.free_edge_ids()) {
            window.push_back(e);
            if (window.size() == 2) break;
        }
        WindowSums ws = exact_window_sums(space, beta, window);
        DiscreteMeasure m = exact_marginal(space, gr.measure, window);
        REQUIRE(m.p.size() == ws.sums.size());
        for (size_t i = 0; i < m.p.size(); ++i)
            CHECK(ws.sums[i] / ws.z == doctest::Approx(m.p[i]).epsilon(1e-12));
    }
}

TEST_CASE("window sums are deterministic across thread counts") {
    auto z2 = GroupSpec::cyclic(2);
    auto g = LatticeGeometry::box({4, 4});
    EnumeratedSpace space(g, z2, BoundaryCondition::free());
    REQUIRE(space.total_states() == (1 << 24));
    std::vector<int> window = {0, 1, 7};
    WindowSums w1 = exact_window_sums(space, 0.5, window, kDefaultStateCap, 1);
    WindowSums w2 = exact_window_sums(space, 0.5, window, kDefaultStateCap, 2);
    REQUIRE(w1.sums.size() == w2.sums.size());
    for (size_t i = 0; i < w1.sums.size(); ++i) CHECK(w1.sums[i] == w2.sums[i]); // bit-identical
    CHECK(w1.z == w2.z);
}

TEST_CASE("streaming TV equals explicit TV") {
    auto z2 = GroupSpec::cyclic(2);
    auto g = LatticeGeometry::cube(2, 1);
    BoundaryCondition a = BoundaryCondition::fixed_identity(g, z2);
    BoundaryCondition b = BoundaryCondition::fixed_random(g, z2, 9);
    double beta = 0.8;
    double streamed = exact_tv_streaming(g, z2, beta, a, b);
    EnumeratedSpace sa(g, z2, a), sb(g, z2, b);
    DiscreteMeasure ma = exact_gibbs(sa, beta).measure;
    DiscreteMeasure mb = exact_gibbs(sb, beta).measure;
    CHECK(streamed == doctest::Approx(exact_tv(ma, mb)).epsilon(1e-12));
}

TEST_CASE("product law for Wilson loops under free boundary conditions in d=2") {
    // <W(R,T)> = s^{RT} with s the single-plaquette expectation
    auto z2 = GroupSpec::cyclic(2);
    for (double beta : {0.2, 0.5}) {
        for (auto extents : std::vector<std::vector<int>>{{3, 3}, {4, 4}}) {
            auto g = LatticeGeometry::box(extents);
            EnumeratedSpace space(g, z2, BoundaryCondition::free());
            Representation rep = Representation::cyclic_character(z2, 1);
            auto value = [&](int R, int T) {
                Loop loop = g.rect_loop(0, 1, R, T, {0, 0});
                return exact_wilson_expectation(space, beta, loop, rep, kDefaultStateCap, 2).real();
            };
            double s = value(1, 1);
            CHECK(s == doctest::Approx(std::tanh(beta)).epsilon(1e-12));
            CHECK(value(1, 2) == doctest::Approx(std::pow(s, 2)).epsilon(1e-10));
            if (extents[0] >= 3) CHECK(value(2, 2) == doctest::Approx(std::pow(s, 4)).epsilon(1e-10));
        }
    }
}
