#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lgt {

enum class ShapeKind { Cube, Slab, Box };

// Directed reference to an edge: positively oriented edge id + traversal sign.
struct DirectedEdge {
    int edge = -1;
    int sign = +1;
};

struct Loop {
    std::vector<DirectedEdge> edges;
};

struct VerticalChain {
    std::vector<int> edges; // N vertical edge ids, layer 0 -> layer N
};

// Axis-aligned box neighborhood B(e,r) inside the parent geometry.
struct RNeighborhood {
    std::vector<int> a, b;            // inclusive vertex bounds per axis
    std::vector<int> edges;           // E(e,r): parent edge ids inside the box
    std::vector<int> boundary_edges;  // boundary edges of the box (as parent edges)
};

// A translate of the full-thickness cube sitting inside a slab (the set called
// B in the update-map construction).
struct SlabCube {
    std::vector<int> a, b;            // vertex bounds; a[0]=0, b[0]=N
    std::vector<int> interior_edges;  // interior edges of the cube
    std::vector<int> boundary_edges;  // boundary edges of the cube
    std::vector<int> spatial_boundary_edges; // boundary edges not in a temporal face of the cube
};

// Finite lattice geometry over an axis-aligned vertex box.
//   cube(d,N):  {-N..N}^d
//   slab(d,M,N): {0..N} x {-M..M}^{d-1}; axis 0 is the vertical/temporal axis,
//                vertical chains have N edges, temporal faces are layers 0 and N.
//   box(extents): {0..L_i-1} per axis (general grids, e.g. a 4x4-vertex lattice)
// Edges are positively oriented (smaller vertex to bigger); axis-major ids.
class LatticeGeometry {
  public:
    static LatticeGeometry cube(int d, int N);
    static LatticeGeometry slab(int d, int M, int N);
    static LatticeGeometry box(const std::vector<int>& extents);

    int dim() const { return d_; }
    ShapeKind shape() const { return shape_; }
    int cube_n() const { return N_; }
    int slab_m() const { return M_; }
    std::string describe() const;

    // vertices
    int vertex_count() const { return vertex_count_; }
    std::vector<int> vertex_coords(int vid) const;
    int vertex_id(const std::vector<int>& coords) const;
    bool vertex_in_bounds(const std::vector<int>& coords) const;
    const std::vector<int>& lo() const { return lo_; }
    const std::vector<int>& hi() const { return hi_; }

    // edges
    int edge_count() const { return static_cast<int>(edge_axis_.size()); }
    int edge_axis(int e) const { return edge_axis_[static_cast<size_t>(e)]; }
    int edge_base_vertex(int e) const { return edge_base_[static_cast<size_t>(e)]; }
    std::vector<int> edge_base_coords(int e) const { return vertex_coords(edge_base_vertex(e)); }
    int edge_id(const std::vector<int>& base, int axis) const; // -1 if absent
    bool is_boundary_edge(int e) const { return edge_boundary_[static_cast<size_t>(e)]; }
    bool is_temporal_edge(int e) const;          // slab only
    bool is_spatial_boundary_edge(int e) const;  // slab only
    const std::vector<int>& interior_edges() const { return interior_edges_; }
    const std::vector<int>& boundary_edges() const { return boundary_edges_; }
    const std::vector<int>& temporal_edges() const { return temporal_edges_; }
    const std::vector<int>& spatial_boundary_edges() const { return spatial_boundary_edges_; }

    // plaquettes
    int plaquette_count() const { return static_cast<int>(plaq_base_.size()); }
    // four directed edges traversed one after the next
    const std::array<DirectedEdge, 4>& plaquette_edges(int p) const;
    // all 8 admissible readings (4 starting edges x 2 directions)
    std::vector<std::vector<DirectedEdge>> plaquette_readings(int p) const;
    const std::vector<int>& plaquettes_containing(int e) const {
        return edge_plaqs_[static_cast<size_t>(e)];
    }
    // edges sharing a plaquette with e (the "neighbors" relation)
    const std::vector<int>& neighbor_edges(int e) const { return edge_neighbors_[static_cast<size_t>(e)]; }

    // distances (Euclidean, between edge midpoints)
    double dist(int e, int f) const;
    double dist_to_spatial_boundary(int e) const;
    std::vector<double> edge_midpoint(int e) const;

    // r-neighborhood of a boundary edge (construction a_i = x_i - 2r with clamps)
    RNeighborhood r_neighborhood(int e, int r) const;
    std::vector<int> union_neighborhood(const std::vector<int>& boundary_set, int r) const;

    // loops and chains
    Loop rect_loop(int axis_a, int axis_b, int R, int T, const std::vector<int>& anchor) const;
    bool loop_closes(const Loop& loop) const;
    VerticalChain vertical_chain_through(const std::vector<int>& spatial_coords) const;

    // translates of the full-thickness cube inside a slab (empty when M <= N)
    std::vector<SlabCube> cubes_in_slab() const;
    std::vector<int> cubes_containing(int e, const std::vector<SlabCube>& cubes) const;

    // edges u such that e and u fit in a common axis-aligned cube of the given width
    bool in_common_window(int e, int u, int width) const;

  private:
    LatticeGeometry() = default;
    void build();

    int d_ = 0;
    ShapeKind shape_ = ShapeKind::Box;
    int N_ = 0, M_ = 0;
    std::vector<int> lo_, hi_, ext_;
    int vertex_count_ = 0;
    std::vector<int> vstride_;

    std::vector<int> edge_axis_, edge_base_;
    std::vector<int> axis_edge_offset_;
    std::vector<bool> edge_boundary_, edge_temporal_, edge_spatial_;
    std::vector<int> interior_edges_, boundary_edges_, temporal_edges_, spatial_boundary_edges_;

    std::vector<int> plaq_base_, plaq_axis_a_, plaq_axis_b_;
    std::vector<std::array<DirectedEdge, 4>> plaq_edges_;
    std::vector<std::vector<int>> edge_plaqs_;
    std::vector<std::vector<int>> edge_neighbors_;
};

} // namespace lgt
