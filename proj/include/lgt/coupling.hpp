#pragma once

#include <map>
#include <memory>

#include "lgt/exact.hpp"
#include "lgt/observables.hpp"

namespace lgt {

// joint probability vector over ordered pairs of one finite base set
struct DiscreteCoupling {
    long long n = 0;
    std::vector<double> joint; // row-major: joint[i*n + j]

    double at(long long i, long long j) const { return joint[static_cast<size_t>(i * n + j)]; }
    double& at(long long i, long long j) { return joint[static_cast<size_t>(i * n + j)]; }
    DiscreteMeasure marginal_first() const;
    DiscreteMeasure marginal_second() const;
    double offdiag_mass() const;
    double total() const;
};

// the explicit overlap/residual construction attaining the TV infimum
DiscreteCoupling optimal_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct StabilityCheckResult {
    double lhs = 0; // TV(gamma, gamma')
    double rhs = 0; // 10 sqrt(max(TV(mu,mu'), TV(nu,nu')))
    double b = 0;
    bool holds = false;
};
StabilityCheckResult coupling_stability_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                              const DiscreteMeasure& mu_p, const DiscreteMeasure& nu_p);

// row-stochastic kernel between finite sets
struct ConditionalKernel {
    long long src = 0, dst = 0;
    std::vector<double> rows; // src x dst

    double at(long long x, long long y) const { return rows[static_cast<size_t>(x * dst + y)]; }
    double& at(long long x, long long y) { return rows[static_cast<size_t>(x * dst + y)]; }
    // sup of the density w.r.t. the uniform reference measure on dst
    double sup_density() const;
    static ConditionalKernel uniform(long long src, long long dst);
};

// joint measure over X x Y (id = x*|Y|+y) built from mu and a kernel
DiscreteMeasure kernel_joint(const DiscreteMeasure& mu, const ConditionalKernel& phi);
// product-kernel gluing: extends a coupling on X^2 to one on (X x Y)^2
DiscreteCoupling glue(const DiscreteCoupling& base, const ConditionalKernel& phi, const ConditionalKernel& phi_p);
// rhs of the conditional-gluing TV bound: a TV(mu,mu') + sup |f - f'|
double gluing_bound_rhs(const DiscreteMeasure& mu, const DiscreteMeasure& mu_p, const ConditionalKernel& phi,
                        const ConditionalKernel& phi_p);

// ---- coupling in a cube -----------------------------------------------------
struct CubeCouplingCertificate {
    std::vector<int> disagreement_edges; // A: boundary edges where the conditions differ
    std::vector<int> neighborhood_edges; // E(A,r)
    std::vector<int> outside_edges;      // free edges outside E(A,r)
    double p_disagree_outside = 0;       // off-diagonal mass of the outside coupling
    double tv_outside = 0;               // exact TV of the outside marginals
    double tv_full = 0;                  // TV of the full measures
};
struct CubeCouplingResult {
    DiscreteCoupling gamma; // over the shared free-edge state space
    CubeCouplingCertificate cert;
};
// optimal coupling of the outside marginals glued with the product of
// conditional kernels; requires pair space within cap
CubeCouplingResult cube_coupling(const LatticeGeometry& geom, const GroupSpec& group, double beta,
                                 const BoundaryCondition& delta, const BoundaryCondition& delta_p, int r,
                                 long long cap = kDefaultStateCap);
// certificate only (streamed marginals), for instances whose pair space is too large
CubeCouplingCertificate cube_coupling_certificate(const LatticeGeometry& geom, const GroupSpec& group, double beta,
                                                  const BoundaryCondition& delta, const BoundaryCondition& delta_p,
                                                  int r, long long cap = kDefaultStateCap, int threads = 1);

struct DisagreementProfile {
    std::vector<int> edges;  // free edges of the slab
    std::vector<double> rho; // rho(gamma, e)
    double max_abs_change(const DisagreementProfile& other) const;
};

// Update maps tau_B and tau for a slab with two boundary conditions that agree
// on the temporal faces. Exact mode: explicit joint vectors.
class SlabCoupling {
  public:
    SlabCoupling(const LatticeGeometry& slab, const GroupSpec& group, double beta, const BoundaryCondition& delta,
                 const BoundaryCondition& delta_p, int r, long long cap = kDefaultStateCap);

    const EnumeratedSpace& space() const { return *space_; }
    const DiscreteMeasure& mu() const { return mu_; }
    const DiscreteMeasure& mu_prime() const { return mu_p_; }
    const std::vector<SlabCube>& cubes() const { return cubes_; }

    DiscreteCoupling product_coupling() const; // gamma_0 = mu x mu'
    bool is_coupling(const DiscreteCoupling& gamma, double tol = 1e-12) const;

    DiscreteCoupling local_update(const DiscreteCoupling& gamma, int cube_index) const; // tau_B
    DiscreteCoupling global_update(const DiscreteCoupling& gamma) const;                // tau

    double rho(const DiscreteCoupling& gamma, int edge) const;
    DisagreementProfile profile(const DiscreteCoupling& gamma) const;

    struct IterateResult {
        DiscreteCoupling gamma;
        DisagreementProfile profile;
        int iterations = 0;
        bool converged = false;
    };
    IterateResult iterate(int max_iterations = 1000, double tol = 1e-10) const;

  private:
    const LatticeGeometry* slab_;
    GroupSpec group_;
    double beta_;
    int r_;
    BoundaryCondition delta_, delta_p_;
    std::unique_ptr<EnumeratedSpace> space_;
    DiscreteMeasure mu_, mu_p_;
    std::vector<SlabCube> cubes_;

    struct CubeContext {
        explicit CubeContext(LatticeGeometry b) : box(std::move(b)) {}
        LatticeGeometry box;                  // the cube as its own geometry
        std::vector<int> cube_to_slab;        // cube edge id -> slab edge id
        std::vector<int> inner_slab_edges;    // slab ids of the cube-interior edges (cube free order)
        std::vector<int> outer_positions;     // free positions outside the cube interior
        std::vector<int> inner_positions;     // free positions of inner edges, cube free order
        std::vector<long long> state_x;       // outer index -> partial state
        std::vector<long long> state_y;       // inner index -> partial state
        std::vector<int> boundary_slab_edges; // slab ids of the cube-boundary edges
        mutable std::map<std::vector<int>, std::shared_ptr<DiscreteCoupling>> kernel_cache;
    };
    std::vector<std::unique_ptr<CubeContext>> contexts_;

    const DiscreteCoupling& cube_kernel(const CubeContext& ctx, const std::vector<int>& digits,
                                        const std::vector<int>& digits_p) const;
};

// the Haar-average gap inequality for functionals through a nontrivially
// acting representation, against an explicit density on a cyclic group
struct HaarGapResult {
    double eps_observed = 0; // 1 - max_f |int f rho| / sqrt(int |f|^2 rho)
    double worst_lhs = 0;    // |int f rho|^2 at the maximizing f
    double worst_rhs = 0;    // int |f|^2 rho at the maximizing f
    bool holds = false;      // every tested f had lhs <= rhs and eps_observed > 0
};
HaarGapResult haar_gap_check(const GroupSpec& group, const DiscreteMeasure& point_probs, const Representation& rep,
                             int random_maps = 1000, uint64_t seed = 7);

} // namespace lgt
