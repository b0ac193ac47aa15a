#include "lgt/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace lgt {

LatticeGeometry LatticeGeometry::cube(int d, int N) {
    if (d < 2) throw std::invalid_argument("dimension must be >= 2");
    if (N < 1) throw std::invalid_argument("cube needs N >= 1");
    LatticeGeometry g;
    g.d_ = d;
    g.shape_ = ShapeKind::Cube;
    g.N_ = N;
    g.lo_.assign(static_cast<size_t>(d), -N);
    g.hi_.assign(static_cast<size_t>(d), N);
    g.build();
    return g;
}

LatticeGeometry LatticeGeometry::slab(int d, int M, int N) {
    if (d < 2) throw std::invalid_argument("dimension must be >= 2");
    if (N < 1 || M < 1) throw std::invalid_argument("slab needs M, N >= 1");
    LatticeGeometry g;
    g.d_ = d;
    g.shape_ = ShapeKind::Slab;
    g.N_ = N;
    g.M_ = M;
    g.lo_.assign(static_cast<size_t>(d), -M);
    g.hi_.assign(static_cast<size_t>(d), M);
    g.lo_[0] = 0;
    g.hi_[0] = N;
    g.build();
    return g;
}

LatticeGeometry LatticeGeometry::box(const std::vector<int>& extents) {
    if (extents.size() < 2) throw std::invalid_argument("dimension must be >= 2");
    LatticeGeometry g;
    g.d_ = static_cast<int>(extents.size());
    g.shape_ = ShapeKind::Box;
    int max_ext = 0;
    for (int L : extents) {
        if (L < 1) throw std::invalid_argument("box extent must be >= 1 vertex");
        max_ext = std::max(max_ext, L);
        g.lo_.push_back(0);
        g.hi_.push_back(L - 1);
    }
    if (max_ext < 2) throw std::invalid_argument("box needs at least one extent >= 2");
    g.build();
    return g;
}

std::string LatticeGeometry::describe() const {
    switch (shape_) {
        case ShapeKind::Cube: return "cube(d=" + std::to_string(d_) + ",N=" + std::to_string(N_) + ")";
        case ShapeKind::Slab:
            return "slab(d=" + std::to_string(d_) + ",M=" + std::to_string(M_) + ",N=" + std::to_string(N_) + ")";
        case ShapeKind::Box: {
            std::string s = "box(";
            for (int i = 0; i < d_; ++i) s += (i ? "x" : "") + std::to_string(ext_[static_cast<size_t>(i)]);
            return s + ")";
        }
    }
    return "?";
}

void LatticeGeometry::build() {
    ext_.resize(static_cast<size_t>(d_));
    long long vcount = 1;
    for (int i = 0; i < d_; ++i) {
        ext_[static_cast<size_t>(i)] = hi_[static_cast<size_t>(i)] - lo_[static_cast<size_t>(i)] + 1;
        vcount *= ext_[static_cast<size_t>(i)];
        if (vcount > (1LL << 30)) throw std::invalid_argument("geometry index space overflow");
    }
    vertex_count_ = static_cast<int>(vcount);
    vstride_.resize(static_cast<size_t>(d_));
    int s = 1;
    for (int i = 0; i < d_; ++i) {
        vstride_[static_cast<size_t>(i)] = s;
        s *= ext_[static_cast<size_t>(i)];
    }

    // edges, axis-major
    axis_edge_offset_.assign(static_cast<size_t>(d_) + 1, 0);
    for (int a = 0; a < d_; ++a) {
        long long cnt = 1;
        for (int i = 0; i < d_; ++i) cnt *= (i == a) ? ext_[static_cast<size_t>(i)] - 1 : ext_[static_cast<size_t>(i)];
        axis_edge_offset_[static_cast<size_t>(a) + 1] = axis_edge_offset_[static_cast<size_t>(a)] + static_cast<int>(cnt);
    }
    int ecount = axis_edge_offset_[static_cast<size_t>(d_)];
    edge_axis_.resize(static_cast<size_t>(ecount));
    edge_base_.resize(static_cast<size_t>(ecount));
    for (int a = 0; a < d_; ++a) {
        int idx = axis_edge_offset_[static_cast<size_t>(a)];
        std::vector<int> c(lo_);
        while (true) {
            if (c[static_cast<size_t>(a)] < hi_[static_cast<size_t>(a)]) {
                edge_axis_[static_cast<size_t>(idx)] = a;
                edge_base_[static_cast<size_t>(idx)] = vertex_id(c);
                ++idx;
            }
            int i = 0;
            for (; i < d_; ++i) {
                if (++c[static_cast<size_t>(i)] <= hi_[static_cast<size_t>(i)]) break;
                c[static_cast<size_t>(i)] = lo_[static_cast<size_t>(i)];
            }
            if (i == d_) break;
        }
    }

    // boundary classification: an edge lies in the face x_j = lo_j/hi_j (j != axis)
    edge_boundary_.assign(static_cast<size_t>(ecount), false);
    edge_temporal_.assign(static_cast<size_t>(ecount), false);
    edge_spatial_.assign(static_cast<size_t>(ecount), false);
    for (int e = 0; e < ecount; ++e) {
        std::vector<int> c = vertex_coords(edge_base_[static_cast<size_t>(e)]);
        int a = edge_axis_[static_cast<size_t>(e)];
        bool boundary = false, temporal = false;
        for (int j = 0; j < d_; ++j) {
            if (j == a) continue;
            if (c[static_cast<size_t>(j)] == lo_[static_cast<size_t>(j)] ||
                c[static_cast<size_t>(j)] == hi_[static_cast<size_t>(j)]) {
                boundary = true;
                if (j == 0) temporal = true;
            }
        }
        edge_boundary_[static_cast<size_t>(e)] = boundary;
        if (shape_ == ShapeKind::Slab) {
            edge_temporal_[static_cast<size_t>(e)] = temporal;
            edge_spatial_[static_cast<size_t>(e)] = boundary && !temporal;
        }
        if (boundary)
            boundary_edges_.push_back(e);
        else
            interior_edges_.push_back(e);
        if (shape_ == ShapeKind::Slab) {
            if (temporal) temporal_edges_.push_back(e);
            else if (boundary) spatial_boundary_edges_.push_back(e);
        }
    }

    // plaquettes
    edge_plaqs_.assign(static_cast<size_t>(ecount), {});
    for (int a = 0; a < d_; ++a)
        for (int b = a + 1; b < d_; ++b) {
            std::vector<int> c(lo_);
            while (true) {
                if (c[static_cast<size_t>(a)] < hi_[static_cast<size_t>(a)] &&
                    c[static_cast<size_t>(b)] < hi_[static_cast<size_t>(b)]) {
                    int p = static_cast<int>(plaq_base_.size());
                    plaq_base_.push_back(vertex_id(c));
                    plaq_axis_a_.push_back(a);
                    plaq_axis_b_.push_back(b);
                    std::vector<int> va = c, vb = c;
                    va[static_cast<size_t>(a)] += 1;
                    vb[static_cast<size_t>(b)] += 1;
                    plaq_edges_.push_back({DirectedEdge{edge_id(c, a), +1}, DirectedEdge{edge_id(va, b), +1},
                                           DirectedEdge{edge_id(vb, a), -1}, DirectedEdge{edge_id(c, b), -1}});
                    for (const auto& de : plaq_edges_.back())
                        edge_plaqs_[static_cast<size_t>(de.edge)].push_back(p);
                }
                int i = 0;
                for (; i < d_; ++i) {
                    if (++c[static_cast<size_t>(i)] <= hi_[static_cast<size_t>(i)]) break;
                    c[static_cast<size_t>(i)] = lo_[static_cast<size_t>(i)];
                }
                if (i == d_) break;
            }
        }

    // neighbors: edges that share a plaquette
    edge_neighbors_.assign(static_cast<size_t>(ecount), {});
    for (int e = 0; e < ecount; ++e) {
        std::set<int> nb;
        for (int p : edge_plaqs_[static_cast<size_t>(e)])
            for (const auto& de : plaquette_edges(p))
                if (de.edge != e) nb.insert(de.edge);
        edge_neighbors_[static_cast<size_t>(e)].assign(nb.begin(), nb.end());
    }
}

std::vector<int> LatticeGeometry::vertex_coords(int vid) const {
    std::vector<int> c(static_cast<size_t>(d_));
    for (int i = 0; i < d_; ++i) {
        c[static_cast<size_t>(i)] = lo_[static_cast<size_t>(i)] + (vid % ext_[static_cast<size_t>(i)]);
        vid /= ext_[static_cast<size_t>(i)];
    }
    return c;
}

int LatticeGeometry::vertex_id(const std::vector<int>& coords) const {
    int id = 0;
    for (int i = 0; i < d_; ++i)
        id += (coords[static_cast<size_t>(i)] - lo_[static_cast<size_t>(i)]) * vstride_[static_cast<size_t>(i)];
    return id;
}

bool LatticeGeometry::vertex_in_bounds(const std::vector<int>& c) const {
    for (int i = 0; i < d_; ++i)
        if (c[static_cast<size_t>(i)] < lo_[static_cast<size_t>(i)] || c[static_cast<size_t>(i)] > hi_[static_cast<size_t>(i)])
            return false;
    return true;
}

int LatticeGeometry::edge_id(const std::vector<int>& base, int axis) const {
    if (!vertex_in_bounds(base)) return -1;
    if (base[static_cast<size_t>(axis)] >= hi_[static_cast<size_t>(axis)]) return -1;
    // linear index within the reduced grid of this axis
    int idx = 0, stride = 1;
    for (int i = 0; i < d_; ++i) {
        int e = (i == axis) ? ext_[static_cast<size_t>(i)] - 1 : ext_[static_cast<size_t>(i)];
        idx += (base[static_cast<size_t>(i)] - lo_[static_cast<size_t>(i)]) * stride;
        stride *= e;
    }
    return axis_edge_offset_[static_cast<size_t>(axis)] + idx;
}

bool LatticeGeometry::is_temporal_edge(int e) const { return edge_temporal_[static_cast<size_t>(e)]; }
bool LatticeGeometry::is_spatial_boundary_edge(int e) const { return edge_spatial_[static_cast<size_t>(e)]; }

const std::array<DirectedEdge, 4>& LatticeGeometry::plaquette_edges(int p) const {
    if (p < 0 || p >= plaquette_count()) throw std::invalid_argument("invalid plaquette id");
    return plaq_edges_[static_cast<size_t>(p)];
}

std::vector<std::vector<DirectedEdge>> LatticeGeometry::plaquette_readings(int p) const {
    const std::array<DirectedEdge, 4>& base = plaquette_edges(p);
    std::vector<std::vector<DirectedEdge>> out;
    for (int s = 0; s < 4; ++s) {
        std::vector<DirectedEdge> fwd;
        for (int i = 0; i < 4; ++i) fwd.push_back(base[static_cast<size_t>((s + i) % 4)]);
        out.push_back(fwd);
        std::vector<DirectedEdge> rev;
        for (int i = 3; i >= 0; --i) rev.push_back(DirectedEdge{fwd[static_cast<size_t>(i)].edge, -fwd[static_cast<size_t>(i)].sign});
        out.push_back(rev);
    }
    return out;
}

std::vector<double> LatticeGeometry::edge_midpoint(int e) const {
    std::vector<int> c = edge_base_coords(e);
    std::vector<double> m(c.begin(), c.end());
    m[static_cast<size_t>(edge_axis_[static_cast<size_t>(e)])] += 0.5;
    return m;
}

double LatticeGeometry::dist(int e, int f) const {
    auto a = edge_midpoint(e), b = edge_midpoint(f);
    double s = 0;
    for (int i = 0; i < d_; ++i) s += (a[static_cast<size_t>(i)] - b[static_cast<size_t>(i)]) * (a[static_cast<size_t>(i)] - b[static_cast<size_t>(i)]);
    return std::sqrt(s);
}

double LatticeGeometry::dist_to_spatial_boundary(int e) const {
    if (spatial_boundary_edges_.empty()) throw std::logic_error("no spatial boundary in this geometry");
    double best = 1e300;
    for (int u : spatial_boundary_edges_) best = std::min(best, dist(e, u));
    return best;
}

RNeighborhood LatticeGeometry::r_neighborhood(int e, int r) const {
    if (!is_boundary_edge(e)) throw std::invalid_argument("r_neighborhood: edge is not a boundary edge");
    if (r < 1) throw std::invalid_argument("r_neighborhood: r must be >= 1");
    std::vector<int> x = edge_base_coords(e);
    RNeighborhood nb;
    nb.a.resize(static_cast<size_t>(d_));
    nb.b.resize(static_cast<size_t>(d_));
    for (int i = 0; i < d_; ++i) {
        int loi = lo_[static_cast<size_t>(i)], hii = hi_[static_cast<size_t>(i)];
        int ai;
        if (x[static_cast<size_t>(i)] < loi + 2 * r)
            ai = loi;
        else if (x[static_cast<size_t>(i)] > hii - 2 * r)
            ai = hii - 4 * r;
        else
            ai = x[static_cast<size_t>(i)] - 2 * r;
        // side 4r when it fits; thin axes clamp to the full extent
        ai = std::max(ai, loi);
        int bi = std::min(ai + 4 * r, hii);
        nb.a[static_cast<size_t>(i)] = ai;
        nb.b[static_cast<size_t>(i)] = bi;
    }
    for (int u = 0; u < edge_count(); ++u) {
        std::vector<int> c = edge_base_coords(u);
        int ax = edge_axis_[static_cast<size_t>(u)];
        bool inside = true, on_face = false;
        for (int i = 0; i < d_ && inside; ++i) {
            int ci = c[static_cast<size_t>(i)];
            int top = ci + (i == ax ? 1 : 0);
            if (ci < nb.a[static_cast<size_t>(i)] || top > nb.b[static_cast<size_t>(i)]) inside = false;
            if (i != ax && (ci == nb.a[static_cast<size_t>(i)] || ci == nb.b[static_cast<size_t>(i)])) on_face = true;
        }
        if (inside) {
            nb.edges.push_back(u);
            if (on_face) nb.boundary_edges.push_back(u);
        }
    }
    return nb;
}

std::vector<int> LatticeGeometry::union_neighborhood(const std::vector<int>& boundary_set, int r) const {
    std::set<int> u;
    for (int e : boundary_set) {
        RNeighborhood nb = r_neighborhood(e, r);
        u.insert(nb.edges.begin(), nb.edges.end());
    }
    return std::vector<int>(u.begin(), u.end());
}

Loop LatticeGeometry::rect_loop(int axis_a, int axis_b, int R, int T, const std::vector<int>& anchor) const {
    if (R < 1 || T < 1) throw std::invalid_argument("rect_loop: R,T >= 1");
    if (axis_a == axis_b || axis_a < 0 || axis_b < 0 || axis_a >= d_ || axis_b >= d_)
        throw std::invalid_argument("rect_loop: invalid plane axes");
    Loop loop;
    std::vector<int> c = anchor;
    auto step = [&](int axis, int dir) {
        std::vector<int> base = c;
        if (dir < 0) base[static_cast<size_t>(axis)] -= 1;
        int id = edge_id(base, axis);
        if (id < 0) throw std::invalid_argument("rect_loop: loop exceeds geometry bounds");
        loop.edges.push_back(DirectedEdge{id, dir});
        c[static_cast<size_t>(axis)] += dir;
    };
    for (int i = 0; i < R; ++i) step(axis_a, +1);
    for (int i = 0; i < T; ++i) step(axis_b, +1);
    for (int i = 0; i < R; ++i) step(axis_a, -1);
    for (int i = 0; i < T; ++i) step(axis_b, -1);
    return loop;
}

bool LatticeGeometry::loop_closes(const Loop& loop) const {
    if (loop.edges.empty()) return false;
    auto endpoint = [&](const DirectedEdge& de, bool start) {
        std::vector<int> c = edge_base_coords(de.edge);
        bool at_base = (de.sign > 0) == start;
        if (!at_base) c[static_cast<size_t>(edge_axis(de.edge))] += 1;
        return c;
    };
    for (size_t i = 0; i < loop.edges.size(); ++i) {
        auto end = endpoint(loop.edges[i], false);
        auto next = endpoint(loop.edges[(i + 1) % loop.edges.size()], true);
        if (end != next) return false;
    }
    return true;
}

VerticalChain LatticeGeometry::vertical_chain_through(const std::vector<int>& spatial_coords) const {
    if (shape_ != ShapeKind::Slab) throw std::logic_error("vertical chains require a slab");
    if (static_cast<int>(spatial_coords.size()) != d_ - 1)
        throw std::invalid_argument("vertical_chain_through: need d-1 spatial coordinates");
    VerticalChain chain;
    for (int layer = 0; layer < N_; ++layer) {
        std::vector<int> base(static_cast<size_t>(d_));
        base[0] = layer;
        for (int i = 1; i < d_; ++i) base[static_cast<size_t>(i)] = spatial_coords[static_cast<size_t>(i - 1)];
        int id = edge_id(base, 0);
        if (id < 0) throw std::invalid_argument("vertical_chain_through: outside geometry");
        chain.edges.push_back(id);
    }
    return chain;
}

std::vector<SlabCube> LatticeGeometry::cubes_in_slab() const {
    if (shape_ != ShapeKind::Slab) throw std::logic_error("cubes_in_slab requires a slab");
    std::vector<SlabCube> cubes;
    if (M_ <= N_) return cubes; // no admissible translate
    // spatial corners a_i with -M < a_i, a_i + 2N < M
    std::vector<int> a(static_cast<size_t>(d_ - 1), -M_ + 1);
    while (true) {
        bool ok = true;
        for (int i = 0; i < d_ - 1; ++i)
            if (a[static_cast<size_t>(i)] + 2 * N_ >= M_) ok = false;
        if (ok) {
            SlabCube c;
            c.a.resize(static_cast<size_t>(d_));
            c.b.resize(static_cast<size_t>(d_));
            c.a[0] = 0;
            c.b[0] = N_;
            for (int i = 1; i < d_; ++i) {
                c.a[static_cast<size_t>(i)] = a[static_cast<size_t>(i - 1)];
                c.b[static_cast<size_t>(i)] = a[static_cast<size_t>(i - 1)] + 2 * N_;
            }
            for (int e = 0; e < edge_count(); ++e) {
                std::vector<int> cc = edge_base_coords(e);
                int ax = edge_axis_[static_cast<size_t>(e)];
                bool inside = true, on_face = false, on_temporal_face = false;
                for (int i = 0; i < d_ && inside; ++i) {
                    int ci = cc[static_cast<size_t>(i)];
                    int top = ci + (i == ax ? 1 : 0);
                    if (ci < c.a[static_cast<size_t>(i)] || top > c.b[static_cast<size_t>(i)]) inside = false;
                    if (i != ax && (ci == c.a[static_cast<size_t>(i)] || ci == c.b[static_cast<size_t>(i)])) {
                        on_face = true;
                        if (i == 0) on_temporal_face = true;
                    }
                }
                if (!inside) continue;
                if (on_face) {
                    c.boundary_edges.push_back(e);
                    if (!on_temporal_face) c.spatial_boundary_edges.push_back(e);
                } else {
                    c.interior_edges.push_back(e);
                }
            }
            cubes.push_back(std::move(c));
        }
        int i = 0;
        for (; i < d_ - 1; ++i) {
            if (++a[static_cast<size_t>(i)] <= M_ - 1) break;
            a[static_cast<size_t>(i)] = -M_ + 1;
        }
        if (i == d_ - 1) break;
    }
    return cubes;
}

std::vector<int> LatticeGeometry::cubes_containing(int e, const std::vector<SlabCube>& cubes) const {
    std::vector<int> out;
    for (size_t i = 0; i < cubes.size(); ++i) {
        const auto& ie = cubes[i].interior_edges;
        if (std::binary_search(ie.begin(), ie.end(), e)) out.push_back(static_cast<int>(i));
    }
    return out;
}

bool LatticeGeometry::in_common_window(int e, int u, int width) const {
    std::vector<int> ce = edge_base_coords(e), cu = edge_base_coords(u);
    int ae = edge_axis_[static_cast<size_t>(e)], au = edge_axis_[static_cast<size_t>(u)];
    for (int i = 0; i < d_; ++i) {
        int emin = ce[static_cast<size_t>(i)], emax = emin + (i == ae ? 1 : 0);
        int umin = cu[static_cast<size_t>(i)], umax = umin + (i == au ? 1 : 0);
        int span = std::max(emax, umax) - std::min(emin, umin);
        if (span > width) return false;
    }
    return true;
}

} // namespace lgt
