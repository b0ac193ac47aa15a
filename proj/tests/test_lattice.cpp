#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "lgt/lattice.hpp"

using namespace lgt;

namespace {
// independent combinatorial oracle: nearest-neighbor pairs and unit squares by
// brute force over vertex coordinates
struct BruteCounts {
    long edges = 0, plaquettes = 0;
};
BruteCounts brute_counts(const std::vector<int>& lo, const std::vector<int>& hi) {
    int d = static_cast<int>(lo.size());
    std::vector<std::vector<int>> verts;
    std::vector<int> c(lo);
    while (true) {
        verts.push_back(c);
        int i = 0;
        for (; i < d; ++i) {
            if (++c[static_cast<size_t>(i)] <= hi[static_cast<size_t>(i)]) break;
            c[static_cast<size_t>(i)] = lo[static_cast<size_t>(i)];
        }
        if (i == d) break;
    }
    BruteCounts out;
    for (const auto& v : verts)
        for (int a = 0; a < d; ++a) {
            if (v[static_cast<size_t>(a)] + 1 <= hi[static_cast<size_t>(a)]) ++out.edges;
            for (int b = a + 1; b < d; ++b)
                if (v[static_cast<size_t>(a)] + 1 <= hi[static_cast<size_t>(a)] &&
                    v[static_cast<size_t>(b)] + 1 <= hi[static_cast<size_t>(b)])
                    ++out.plaquettes;
        }
    return out;
}
} // namespace

TEST_CASE("edge and plaquette counts match the enumeration oracle") {
    SUBCASE("d=2 N=1") {
        auto g = LatticeGeometry::cube(2, 1);
        CHECK(g.edge_count() == 12);
        CHECK(g.plaquette_count() == 4);
    }
    SUBCASE("d=3 N=1") {
        auto g = LatticeGeometry::cube(3, 1);
        CHECK(g.edge_count() == 54);
        CHECK(g.plaquette_count() == 36);
    }
    for (int d : {2, 3})
        for (int N : {1, 2, 3}) {
            auto g = LatticeGeometry::cube(d, N);
            auto bc = brute_counts(g.lo(), g.hi());
            CHECK(g.edge_count() == bc.edges);
            CHECK(g.plaquette_count() == bc.plaquettes);
            CHECK(static_cast<int>(g.interior_edges().size() + g.boundary_edges().size()) == g.edge_count());
        }
    for (auto [m, n] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {2, 2}, {4, 1}}) {
        auto g = LatticeGeometry::slab(2, m, n);
        auto bc = brute_counts(g.lo(), g.hi());
        CHECK(g.edge_count() == bc.edges);
        CHECK(g.plaquette_count() == bc.plaquettes);
    }
}

TEST_CASE("slab classification is an exhaustive disjoint partition of the boundary") {
    // vertical extent is the N+1 layers 0..N; temporal faces are layers 0 and N
    auto g = LatticeGeometry::slab(2, 2, 1);
    CHECK(g.vertex_count() == 2 * 5);
    for (int e : g.temporal_edges()) {
        int layer = g.edge_base_coords(e)[0];
        CHECK((layer == 0 || layer == 1));
        CHECK(g.edge_axis(e) != 0);
    }
    std::set<int> temporal(g.temporal_edges().begin(), g.temporal_edges().end());
    std::set<int> spatial(g.spatial_boundary_edges().begin(), g.spatial_boundary_edges().end());
    for (int e : g.boundary_edges()) CHECK((temporal.count(e) + spatial.count(e)) == 1);
    CHECK(temporal.size() + spatial.size() == g.boundary_edges().size());

    auto g3 = LatticeGeometry::slab(3, 2, 2);
    std::set<int> t3(g3.temporal_edges().begin(), g3.temporal_edges().end());
    std::set<int> s3(g3.spatial_boundary_edges().begin(), g3.spatial_boundary_edges().end());
    for (int e : g3.boundary_edges()) CHECK((t3.count(e) + s3.count(e)) == 1);
}

TEST_CASE("plaquette traversal closes in all 8 readings") {
    for (const auto& g : {LatticeGeometry::cube(2, 2), LatticeGeometry::cube(3, 1), LatticeGeometry::slab(2, 3, 1)}) {
        for (int p = 0; p < g.plaquette_count(); ++p) {
            auto readings = g.plaquette_readings(p);
            CHECK(readings.size() == 8);
            for (const auto& r : readings) {
                Loop loop{r};
                CHECK(g.loop_closes(loop));
            }
        }
    }
}

TEST_CASE("r-neighborhood construction formulas") {
    auto g = LatticeGeometry::cube(2, 4);
    SUBCASE("bottom-face edge") {
        int e = g.edge_id({0, -4}, 0);
        REQUIRE(e >= 0);
        REQUIRE(g.is_boundary_edge(e));
        auto nb = g.r_neighborhood(e, 1);
        CHECK(nb.a == std::vector<int>{-2, -4});
        CHECK(nb.b == std::vector<int>{2, 0});
    }
    SUBCASE("corner edge clamps") {
        int e = g.edge_id({-4, -4}, 0);
        REQUIRE(e >= 0);
        auto nb = g.r_neighborhood(e, 1);
        CHECK(nb.a == std::vector<int>{-4, -4});
        CHECK(nb.b == std::vector<int>{0, 0});
    }
    SUBCASE("errors") {
        int interior = g.interior_edges()[0];
        CHECK_THROWS(g.r_neighborhood(interior, 1));
        CHECK_THROWS(g.r_neighborhood(g.boundary_edges()[0], 0));
    }
}

TEST_CASE("r-neighborhood structure properties hold for every boundary edge") {
    // side 4r, containment, e on the boundary of B(e,r), adjacency capture,
    // and distance > r for new boundary edges
    for (auto [d, N, r] : std::vector<std::array<int, 3>>{{2, 4, 1}, {2, 8, 1}, {2, 8, 2}, {3, 4, 1}}) {
        auto g = LatticeGeometry::cube(d, N);
        for (int e : g.boundary_edges()) {
            auto nb = g.r_neighborhood(e, r);
            std::set<int> inside(nb.edges.begin(), nb.edges.end());
            std::set<int> on_bdry(nb.boundary_edges.begin(), nb.boundary_edges.end());
            for (int i = 0; i < d; ++i) {
                CHECK(nb.b[static_cast<size_t>(i)] - nb.a[static_cast<size_t>(i)] == 4 * r);
                CHECK(nb.a[static_cast<size_t>(i)] >= -N);
                CHECK(nb.b[static_cast<size_t>(i)] <= N);
            }
            CHECK(inside.count(e) == 1);
            CHECK(on_bdry.count(e) == 1);
            for (int u : g.neighbor_edges(e)) CHECK(inside.count(u) == 1);
            for (int u : nb.boundary_edges)
                if (!g.is_boundary_edge(u)) CHECK(g.dist(e, u) > r);
        }
    }
}

TEST_CASE("union neighborhood") {
    auto g = LatticeGeometry::cube(2, 8);
    CHECK(g.union_neighborhood({}, 1).empty());
    int e = g.edge_id({0, -8}, 0);
    REQUIRE(e >= 0);
    auto single = g.union_neighborhood({e}, 1);
    auto nb = g.r_neighborhood(e, 1);
    std::set<int> a(single.begin(), single.end()), b(nb.edges.begin(), nb.edges.end());
    CHECK(a == b);
    // two far-separated boundary edges: disjoint union
    int f = g.edge_id({0, 8}, 0);
    REQUIRE(f >= 0);
    auto both = g.union_neighborhood({e, f}, 1);
    CHECK(both.size() == 2 * nb.edges.size());
}

TEST_CASE("distances") {
    auto g = LatticeGeometry::cube(2, 2);
    int e = g.edge_id({0, 0}, 0);
    CHECK(g.dist(e, e) == 0);
    int f = g.edge_id({0, 1}, 0);
    CHECK(g.dist(e, f) == doctest::Approx(1.0));

    auto s = LatticeGeometry::slab(2, 5, 1);
    int edge = s.edge_id({0, 0}, 0);
    REQUIRE(edge >= 0);
    double direct = s.dist_to_spatial_boundary(edge);
    double brute = 1e300;
    for (int u : s.spatial_boundary_edges()) brute = std::min(brute, s.dist(edge, u));
    CHECK(direct == doctest::Approx(brute));
}

TEST_CASE("rect loops close and have 2(R+T) edges") {
    auto g = LatticeGeometry::cube(2, 3);
    for (int R : {1, 2, 3})
        for (int T : {1, 2}) {
            Loop loop = g.rect_loop(0, 1, R, T, {-1, -1});
            CHECK(static_cast<int>(loop.edges.size()) == 2 * (R + T));
            CHECK(g.loop_closes(loop));
        }
    // R=T=1 reproduces a plaquette boundary
    Loop unit = g.rect_loop(0, 1, 1, 1, {0, 0});
    std::set<int> loop_edges;
    for (const auto& de : unit.edges) loop_edges.insert(de.edge);
    bool found = false;
    for (int p = 0; p < g.plaquette_count(); ++p) {
        std::set<int> pe;
        for (const auto& de : g.plaquette_edges(p)) pe.insert(de.edge);
        if (pe == loop_edges) found = true;
    }
    CHECK(found);
    CHECK_THROWS(g.rect_loop(0, 1, 10, 1, {0, 0}));
}

TEST_CASE("vertical chains") {
    auto s = LatticeGeometry::slab(2, 4, 3);
    VerticalChain chain = s.vertical_chain_through({0});
    CHECK(chain.edges.size() == 3);
    for (size_t i = 0; i < chain.edges.size(); ++i) {
        CHECK(s.edge_axis(chain.edges[i]) == 0);
        CHECK(s.edge_base_coords(chain.edges[i])[0] == static_cast<int>(i));
    }
}

TEST_CASE("cubes in a slab") {
    auto s = LatticeGeometry::slab(2, 3, 1);
    auto cubes = s.cubes_in_slab();
    CHECK(static_cast<int>(cubes.size()) == 2 * 3 - 2 * 1 - 1);
    // brute-force oracle over admissible spatial corners
    int count = 0;
    for (int a = -10; a <= 10; ++a)
        if (-3 < a && a + 2 < 3) ++count;
    CHECK(static_cast<int>(cubes.size()) == count);
    for (const auto& c : cubes) {
        CHECK(c.a[0] == 0);
        CHECK(c.b[0] == 1);
        CHECK(c.b[1] - c.a[1] == 2);
        CHECK(c.interior_edges.size() == 1);
    }
    // no admissible translate when M <= N
    CHECK(LatticeGeometry::slab(2, 1, 1).cubes_in_slab().empty());

    // membership table
    auto big = LatticeGeometry::slab(2, 4, 1);
    auto bc = big.cubes_in_slab();
    for (int e : big.interior_edges()) {
        auto owners = big.cubes_containing(e, bc);
        for (int c : owners) {
            const auto& ie = bc[static_cast<size_t>(c)].interior_edges;
            CHECK(std::find(ie.begin(), ie.end(), e) != ie.end());
        }
    }
}

TEST_CASE("common window predicate") {
    auto g = LatticeGeometry::cube(2, 4);
    int e = g.edge_id({0, 0}, 0);
    int f = g.edge_id({1, 1}, 1);
    CHECK(g.in_common_window(e, f, 4));
    int far = g.edge_id({-4, -4}, 0);
    CHECK_FALSE(g.in_common_window(e, far, 4));
    CHECK(g.in_common_window(e, e, 1));
}

TEST_CASE("geometry guards") {
    CHECK_THROWS(LatticeGeometry::cube(1, 1));
    CHECK_THROWS(LatticeGeometry::cube(2, 0));
    CHECK_THROWS(LatticeGeometry::box({4}));
    CHECK_THROWS(LatticeGeometry::cube(9, 9)); // index space overflow
    CHECK_THROWS(LatticeGeometry::slab(2, 0, 1));
    auto g = LatticeGeometry::box({4, 4});
    CHECK(g.vertex_count() == 16);
    CHECK(g.edge_count() == 24);
    CHECK(g.plaquette_count() == 9);
}
