#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lgt/model.hpp"

namespace lgt {

inline constexpr long long kDefaultStateCap = 1LL << 24;

// Explicit probability vector over an enumerated finite set.
struct DiscreteMeasure {
    std::vector<double> p;

    long long size() const { return static_cast<long long>(p.size()); }
    double total() const;
    void normalize();
};

double exact_tv(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
// test oracle: sup over all 2^k events (small spaces only)
double tv_sup_over_events(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Enumeration of cyclic-group configurations on the free edges of a geometry.
// State codec: mixed-radix little-endian by free-edge position.
class EnumeratedSpace {
  public:
    EnumeratedSpace(const LatticeGeometry& geom, const GroupSpec& group, const BoundaryCondition& bc);

    const LatticeGeometry& geom() const { return *geom_; }
    const GroupSpec& group() const { return group_; }
    const std::vector<int>& free_edge_ids() const { return free_; }
    int digit_count() const { return static_cast<int>(free_.size()); }
    long long total_states() const { return total_; }
    int free_position(int edge) const; // -1 when the edge is not free

    std::vector<int> decode(long long state) const;
    long long encode(const std::vector<int>& digits) const;
    // frame has the boundary condition applied; free edges filled from digits
    GaugeConfig config_for(const std::vector<int>& digits) const;
    GaugeConfig config_for_state(long long state) const { return config_for(decode(state)); }

  private:
    const LatticeGeometry* geom_;
    GroupSpec group_;
    std::vector<int> free_;
    std::vector<int> free_pos_; // edge id -> digit position or -1
    GaugeConfig frame_;
    long long total_ = 1;
};

// dmu = Z^-1 exp(-beta H) dlambda; returns the vector and the normalizer
// Z = (1/#states) sum exp(-beta H) (lambda is the normalized product measure).
struct GibbsResult {
    DiscreteMeasure measure;
    double z = 0;
};
GibbsResult exact_gibbs(const EnumeratedSpace& space, double beta, long long cap = kDefaultStateCap);

cplx exact_expectation(const EnumeratedSpace& space, const DiscreteMeasure& mu,
                       const std::function<cplx(const GaugeConfig&)>& f);
cplx exact_expectation_digits(const EnumeratedSpace& space, const DiscreteMeasure& mu,
                              const std::function<cplx(const std::vector<int>&)>& f);

// marginal onto a subset of free edges (little-endian by position in `edges`)
DiscreteMeasure exact_marginal(const EnumeratedSpace& space, const DiscreteMeasure& mu, const std::vector<int>& edges);
// condition on an assignment of some free edges; measure over the remaining
// digits (little-endian by position among the remaining free edges)
DiscreteMeasure exact_conditional(const EnumeratedSpace& space, const DiscreteMeasure& mu,
                                  const std::vector<std::pair<int, int>>& fixed_edge_digits);

// ---- streaming kernel ----------------------------------------------------
// Weight sums bucketed by the joint assignment of a small window of free
// edges, computed by reflected-Gray enumeration with incremental plaquette
// updates. Deterministic for any thread count: fixed block decomposition and
// a fixed pairwise combine order; Kahan-compensated bucket accumulators.
struct WindowSums {
    std::vector<double> sums; // length n^|window|, little-endian by window position
    double z = 0;             // sum over all buckets
    long long states = 0;
};
WindowSums exact_window_sums(const EnumeratedSpace& space, double beta, const std::vector<int>& window_edges,
                             long long cap = kDefaultStateCap, int threads = 1);

// TV between the Gibbs measures of two boundary conditions on the same
// geometry (identical free-edge sets), streamed in two passes.
double exact_tv_streaming(const LatticeGeometry& geom, const GroupSpec& group, double beta,
                          const BoundaryCondition& bc_a, const BoundaryCondition& bc_b,
                          long long cap = kDefaultStateCap, int threads = 1);

} // namespace lgt
