#pragma once

#include <optional>
#include <vector>

#include "lgt/exact.hpp"
#include "lgt/model.hpp"
#include "lgt/stats.hpp"

namespace lgt {

cplx wilson_loop(const GaugeConfig& config, const Loop& loop, const Representation& rep);

// product of one matrix entry from each pi(omega_e) along a vertical chain
struct ChainVariableSpec {
    VerticalChain chain;
    Representation rep;
    std::vector<std::pair<int, int>> indices; // (row, col) per chain edge, 0-based
};
cplx chain_variable(const GaugeConfig& config, const ChainVariableSpec& spec);

// one entry choice per loop edge; Wilson loop = sum of the m^k matched components
struct LoopComponentSpec {
    Loop loop;
    Representation rep;
    std::vector<std::pair<int, int>> indices;
};
cplx loop_component(const GaugeConfig& config, const LoopComponentSpec& spec);
// expands W as the sum over matched index chains (test oracle for small loops)
cplx wilson_from_components(const GaugeConfig& config, const Loop& loop, const Representation& rep);

// multiply g0 onto every vertical edge from layer 0 to layer 1 of a slab
GaugeConfig center_transform(const GaugeConfig& config, const GroupElement& g0);
// the same transform restricted to the boundary edges of a fixed condition
BoundaryCondition center_twist_bc(const LatticeGeometry& geom, const GroupSpec& group, const BoundaryCondition& bc,
                                  const GroupElement& g0);

// exact integral of pi against the single-edge conditional density:
// explicit sum (cyclic), periodic trapezoid (circle), class-angle reduction (su2)
CMat conditional_link_expectation(const GaugeConfig& config, int e, const Representation& rep, double beta);

// ---- correlation decay -----------------------------------------------------
// local functions are normalized plaquette traces (Re Tr / m), supported on an
// edge of the plaquette
struct CorrelationRequest {
    int f_plaquette = 0;
    std::vector<int> g_plaquettes;
};
struct CorrelationPoint {
    double distance = 0;
    double cov = 0;
    double err = 0;
};
struct CorrelationResult {
    std::vector<CorrelationPoint> points;
    bool fit_valid = false;
    double k1 = 0, k2 = 0;   // |cov| ~ k1 exp(-k2 dist) over the usable window
    double k2_err = 0;
    double fit_chi2 = 0;
    long fit_ndof = 0;
};
CorrelationResult correlation_decay(const CorrelationRequest& request, const LatticeGeometry& geom,
                                    const GroupSpec& group, const BoundaryCondition& bc, const SamplerParams& params);
// supporting-edge distance used by the estimator, exposed for tests
double correlation_distance(const LatticeGeometry& geom, int plaq_f, int plaq_g);

// ---- potential / area-law fits ----------------------------------------------
struct WilsonTableEntry {
    int R = 0, T = 0;
    double mean = 0; // Re<W>
    double err = 0;
};
struct PotentialPoint {
    int R = 0;
    double v = 0, err = 0;
    bool valid = false;
};
struct CreutzPoint {
    int R = 0, T = 0;
    double chi = 0, err = 0;
    bool valid = false;
};
struct PotentialExtract {
    std::vector<PotentialPoint> potential; // V(R) from -log|W| vs T slopes
    std::vector<CreutzPoint> creutz;
    bool area_fit_valid = false;
    double sigma = 0, sigma_err = 0;       // coefficient of R*T
    double perimeter = 0, perimeter_err = 0;
    double constant = 0;
    std::vector<WilsonTableEntry> excluded; // cells with |mean| <= err
};
PotentialExtract potential_extract(const std::vector<WilsonTableEntry>& table);

// exact Wilson loop expectation through the enumeration oracle
cplx exact_wilson_expectation(const EnumeratedSpace& space, double beta, const Loop& loop, const Representation& rep,
                              long long cap = kDefaultStateCap, int threads = 1);
// exact chain-variable expectation through the enumeration oracle
cplx exact_chain_expectation(const EnumeratedSpace& space, double beta, const ChainVariableSpec& spec,
                             long long cap = kDefaultStateCap, int threads = 1);

} // namespace lgt
