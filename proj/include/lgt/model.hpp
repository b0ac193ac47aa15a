#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "lgt/group.hpp"
#include "lgt/lattice.hpp"

namespace lgt {

enum class BcMode { Free, Fixed };

// Boundary condition: fixed assigns one element to every boundary edge.
struct BoundaryCondition {
    BcMode mode = BcMode::Free;
    std::vector<GroupElement> values; // per edge id; consulted on boundary edges only

    static BoundaryCondition free();
    static BoundaryCondition fixed_identity(const LatticeGeometry& geom, const GroupSpec& group);
    static BoundaryCondition fixed_random(const LatticeGeometry& geom, const GroupSpec& group, uint64_t seed);
    bool edge_is_fixed(const LatticeGeometry& geom, int e) const {
        return mode == BcMode::Fixed && geom.is_boundary_edge(e);
    }
};

// elements on every positively oriented edge; negative refs resolve to inverses
struct GaugeConfig {
    const LatticeGeometry* geom = nullptr;
    GroupSpec group;
    std::vector<GroupElement> edges;
    // incremental energy bookkeeping, maintained by the single-edge updaters
    double energy = 0;
    bool energy_tracked = false;

    static GaugeConfig identity(const LatticeGeometry& geom, const GroupSpec& group);
    static GaugeConfig random(const LatticeGeometry& geom, const GroupSpec& group, RngStream& rng);

    GroupElement directed(const DirectedEdge& de) const {
        return de.sign > 0 ? edges[static_cast<size_t>(de.edge)] : inv(group, edges[static_cast<size_t>(de.edge)]);
    }
    void set(int e, const GroupElement& g) {
        edges[static_cast<size_t>(e)] = g;
        energy_tracked = false;
    }
    // update through the local action so the running energy stays consistent
    void set_tracked(int e, const GroupElement& g);
    void start_energy_tracking();
};

// free edges under the boundary condition (interior, plus boundary when free)
std::vector<int> free_edges(const LatticeGeometry& geom, const BoundaryCondition& bc);
// write bc values onto the boundary edges of a config
void apply_boundary(GaugeConfig& config, const BoundaryCondition& bc);

GroupElement plaquette_product(const GaugeConfig& config, int p);
double plaquette_trace(const GaugeConfig& config, int p); // Re Tr, defining rep

double hamiltonian(const GaugeConfig& config);

// gauge transformation at a vertex: omega_e -> g omega_e on outgoing, omega_e g^-1 on incoming
void apply_gauge_transform(GaugeConfig& config, int vertex, const GroupElement& g);

// The e-dependent part of H: local_action(g) = -sum_staples Re Tr(g * staple).
// H(config with omega_e := g) - H(config) == local_action(g) - local_action(omega_e).
struct LocalAction {
    GroupSpec group;
    std::vector<CMat> staples; // adjoint-corrected: term is Re Tr(defining(g) * staple)

    double eval(const GroupElement& g) const;
    double eval_matrix(const CMat& m) const; // Re Tr(m * staple) sum, for off-group probes
};
LocalAction local_action(const GaugeConfig& config, int e);

// conditional distribution of omega_e given everything else, density w.r.t. Haar
struct ConditionalDensity {
    GroupSpec group;
    double beta = 0;
    std::vector<double> probs;     // cyclic groups: explicit normalized vector over residues
    LocalAction action;            // continuous groups evaluate through this
    double log_norm = 0;           // log of the Haar-average of exp(-beta*action)
    double lower_bound = 0, upper_bound = 0; // uniform density bounds (group, beta, d only)

    double density(const GroupElement& g) const; // w.r.t. normalized Haar
};
ConditionalDensity conditional_density(const GaugeConfig& config, int e, double beta);

struct SamplerParams {
    double beta = 1.0;
    enum class Algorithm { HeatBath, Metropolis } algorithm = Algorithm::HeatBath;
    int therm_sweeps = 100;
    int measure_sweeps = 1000;
    int stride = 1;
    uint64_t seed = 1;
    double proposal_width = 0.5; // metropolis only
};

void heatbath_update(GaugeConfig& config, int e, double beta, RngStream& rng);
// returns true when the proposal was accepted
bool metropolis_update(GaugeConfig& config, int e, double beta, double width, RngStream& rng);

// checkerboard classes: edges in one class share no plaquette
std::vector<std::vector<int>> checkerboard_classes(const LatticeGeometry& geom, const std::vector<int>& edges);

// One full sweep over the free edges in checkerboard-class order.
// Returns the acceptance fraction (1 for heat bath).
double sweep(GaugeConfig& config, const std::vector<std::vector<int>>& classes, const SamplerParams& params,
             RngStream& rng);

using Observable = std::function<cplx(const GaugeConfig&)>;

struct EstimateResult {
    cplx mean;
    double se_re = 0, se_im = 0;
    double tau_int = 0;   // integrated autocorrelation estimate from batch means
    long n_samples = 0;
    double acceptance = 1.0;
};

EstimateResult estimate(const Observable& f, const LatticeGeometry& geom, const GroupSpec& group,
                        const BoundaryCondition& bc, const SamplerParams& params);

// Same chain, several observables measured on the same snapshots.
std::vector<EstimateResult> estimate_many(const std::vector<Observable>& fs, const LatticeGeometry& geom,
                                          const GroupSpec& group, const BoundaryCondition& bc,
                                          const SamplerParams& params,
                                          std::vector<std::vector<cplx>>* series_out = nullptr);

// Gradient/covariance identity at a boundary edge (circle group only):
//   grad_e <f> = -beta <f grad_e H> + beta <f><grad_e H>
// lhs by central finite differences in the ambient (x,y) coordinates of delta_e,
// rhs by tensor-product quadrature over the interior edges.
struct GradientIdentityResult {
    double lhs[2];
    double rhs[2];
    double gap; // max abs component difference
};
GradientIdentityResult gradient_identity_check(const Observable& f, int e, const LatticeGeometry& geom,
                                               const BoundaryCondition& bc, double beta, int quad_nodes = 64,
                                               double fd_step = 1e-4);

} // namespace lgt
