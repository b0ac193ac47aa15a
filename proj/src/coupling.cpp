#include "lgt/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace lgt {

DiscreteMeasure DiscreteCoupling::marginal_first() const {
    DiscreteMeasure m;
    m.p.assign(static_cast<size_t>(n), 0.0);
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < n; ++j) m.p[static_cast<size_t>(i)] += at(i, j);
    return m;
}

DiscreteMeasure DiscreteCoupling::marginal_second() const {
    DiscreteMeasure m;
    m.p.assign(static_cast<size_t>(n), 0.0);
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < n; ++j) m.p[static_cast<size_t>(j)] += at(i, j);
    return m;
}

double DiscreteCoupling::offdiag_mass() const {
    double s = 0;
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < n; ++j)
            if (i != j) s += at(i, j);
    return s;
}

double DiscreteCoupling::total() const {
    double s = 0;
    for (double v : joint) s += v;
    return s;
}

DiscreteCoupling optimal_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (mu.size() != nu.size()) throw std::invalid_argument("optimal_coupling: mismatched spaces");
    long long n = mu.size();
    DiscreteCoupling g;
    g.n = n;
    g.joint.assign(static_cast<size_t>(n * n), 0.0);
    std::vector<double> overlap(static_cast<size_t>(n)), res_f(static_cast<size_t>(n)), res_g(static_cast<size_t>(n));
    double tv = 0;
    for (long long i = 0; i < n; ++i) {
        double f = mu.p[static_cast<size_t>(i)], h = nu.p[static_cast<size_t>(i)];
        overlap[static_cast<size_t>(i)] = std::min(f, h);
        res_f[static_cast<size_t>(i)] = f - overlap[static_cast<size_t>(i)];
        res_g[static_cast<size_t>(i)] = h - overlap[static_cast<size_t>(i)];
        tv += res_f[static_cast<size_t>(i)];
    }
    for (long long i = 0; i < n; ++i) g.at(i, i) = overlap[static_cast<size_t>(i)];
    if (tv > 0) {
        for (long long i = 0; i < n; ++i) {
            if (res_f[static_cast<size_t>(i)] == 0) continue;
            for (long long j = 0; j < n; ++j)
                g.at(i, j) += res_f[static_cast<size_t>(i)] * res_g[static_cast<size_t>(j)] / tv;
        }
    }
    return g;
}

StabilityCheckResult coupling_stability_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                              const DiscreteMeasure& mu_p, const DiscreteMeasure& nu_p) {
    DiscreteCoupling g = optimal_coupling(mu, nu);
    DiscreteCoupling gp = optimal_coupling(mu_p, nu_p);
    DiscreteMeasure a, b;
    a.p = g.joint;
    b.p = gp.joint;
    StabilityCheckResult out;
    out.lhs = exact_tv(a, b);
    out.b = std::max(exact_tv(mu, mu_p), exact_tv(nu, nu_p));
    out.rhs = 10.0 * std::sqrt(out.b);
    out.holds = out.lhs <= out.rhs + 1e-12;
    return out;
}

double ConditionalKernel::sup_density() const {
    double m = 0;
    for (double v : rows) m = std::max(m, v);
    return m * static_cast<double>(dst);
}

ConditionalKernel ConditionalKernel::uniform(long long src, long long dst) {
    ConditionalKernel k;
    k.src = src;
    k.dst = dst;
    k.rows.assign(static_cast<size_t>(src * dst), 1.0 / static_cast<double>(dst));
    return k;
}

DiscreteMeasure kernel_joint(const DiscreteMeasure& mu, const ConditionalKernel& phi) {
    if (mu.size() != phi.src) throw std::invalid_argument("kernel_joint: dimension mismatch");
    DiscreteMeasure out;
    out.p.assign(static_cast<size_t>(phi.src * phi.dst), 0.0);
    for (long long x = 0; x < phi.src; ++x)
        for (long long y = 0; y < phi.dst; ++y)
            out.p[static_cast<size_t>(x * phi.dst + y)] = mu.p[static_cast<size_t>(x)] * phi.at(x, y);
    return out;
}

DiscreteCoupling glue(const DiscreteCoupling& base, const ConditionalKernel& phi, const ConditionalKernel& phi_p) {
    if (base.n != phi.src || base.n != phi_p.src) throw std::invalid_argument("glue: dimension mismatch");
    if (phi.dst != phi_p.dst) throw std::invalid_argument("glue: target spaces differ");
    long long nx = base.n, ny = phi.dst;
    long long n = nx * ny;
    DiscreteCoupling out;
    out.n = n;
    out.joint.assign(static_cast<size_t>(n * n), 0.0);
    for (long long x = 0; x < nx; ++x)
        for (long long xp = 0; xp < nx; ++xp) {
            double b = base.at(x, xp);
            if (b == 0) continue;
            for (long long y = 0; y < ny; ++y) {
                double f = phi.at(x, y);
                if (f == 0) continue;
                for (long long yp = 0; yp < ny; ++yp)
                    out.at(x * ny + y, xp * ny + yp) += b * f * phi_p.at(xp, yp);
            }
        }
    return out;
}

double gluing_bound_rhs(const DiscreteMeasure& mu, const DiscreteMeasure& mu_p, const ConditionalKernel& phi,
                        const ConditionalKernel& phi_p) {
    double a = std::max(phi.sup_density(), phi_p.sup_density());
    double gap = 0;
    for (long long x = 0; x < phi.src; ++x)
        for (long long y = 0; y < phi.dst; ++y)
            gap = std::max(gap, std::abs(phi.at(x, y) - phi_p.at(x, y)) * static_cast<double>(phi.dst));
    return a * exact_tv(mu, mu_p) + gap;
}

// ---- cube coupling ----------------------------------------------------------

namespace {

struct SplitInfo {
    std::vector<int> disagreement_edges;
    std::vector<int> neighborhood_edges;
    std::vector<int> outside_edges; // free, ascending
    std::vector<int> inside_edges;  // free, ascending
};

SplitInfo split_by_neighborhood(const LatticeGeometry& geom, const GroupSpec& group, const BoundaryCondition& delta,
                                const BoundaryCondition& delta_p, int r, const EnumeratedSpace& space) {
    if (delta.mode != BcMode::Fixed || delta_p.mode != BcMode::Fixed)
        throw std::invalid_argument("cube coupling needs two fixed boundary conditions");
    SplitInfo info;
    for (int e : geom.boundary_edges())
        if (!elements_equal(group, delta.values[static_cast<size_t>(e)], delta_p.values[static_cast<size_t>(e)]))
            info.disagreement_edges.push_back(e);
    if (!info.disagreement_edges.empty())
        info.neighborhood_edges = geom.union_neighborhood(info.disagreement_edges, r);
    std::set<int> nbset(info.neighborhood_edges.begin(), info.neighborhood_edges.end());
    for (int e : space.free_edge_ids()) {
        if (nbset.count(e))
            info.inside_edges.push_back(e);
        else
            info.outside_edges.push_back(e);
    }
    return info;
}

} // namespace

CubeCouplingResult cube_coupling(const LatticeGeometry& geom, const GroupSpec& group, double beta,
                                 const BoundaryCondition& delta, const BoundaryCondition& delta_p, int r,
                                 long long cap) {
    EnumeratedSpace space(geom, group, delta);
    EnumeratedSpace space_p(geom, group, delta_p);
    if (space.free_edge_ids() != space_p.free_edge_ids())
        throw std::logic_error("cube_coupling: free edge sets differ");
    long long nst = space.total_states();
    if (nst * nst > cap) throw std::runtime_error("cube_coupling: pair state space exceeds cap");

    GibbsResult ga = exact_gibbs(space, beta, cap);
    GibbsResult gb = exact_gibbs(space_p, beta, cap);
    SplitInfo info = split_by_neighborhood(geom, group, delta, delta_p, r, space);

    DiscreteMeasure mu_r = exact_marginal(space, ga.measure, info.outside_edges);
    DiscreteMeasure mu_r_p = exact_marginal(space_p, gb.measure, info.outside_edges);
    DiscreteCoupling gamma_r = optimal_coupling(mu_r, mu_r_p);

    int n = group.n;
    long long n_out = mu_r.size();
    long long n_in = 1;
    for (size_t i = 0; i < info.inside_edges.size(); ++i) n_in *= n;

    // conditional kernels onto the inside, one row per outside assignment
    ConditionalKernel phi, phi_p;
    phi.src = phi_p.src = n_out;
    phi.dst = phi_p.dst = n_in;
    phi.rows.assign(static_cast<size_t>(n_out * n_in), 0.0);
    phi_p.rows.assign(static_cast<size_t>(n_out * n_in), 0.0);
    std::vector<int> out_digits(info.outside_edges.size(), 0);
    for (long long x = 0; x < n_out; ++x) {
        std::vector<std::pair<int, int>> fixed;
        for (size_t i = 0; i < info.outside_edges.size(); ++i) fixed.push_back({info.outside_edges[i], out_digits[i]});
        DiscreteMeasure ca = exact_conditional(space, ga.measure, fixed);
        DiscreteMeasure cb = exact_conditional(space_p, gb.measure, fixed);
        for (long long y = 0; y < n_in; ++y) {
            phi.at(x, y) = ca.p[static_cast<size_t>(y)];
            phi_p.at(x, y) = cb.p[static_cast<size_t>(y)];
        }
        size_t i = 0;
        for (; i < out_digits.size(); ++i) {
            if (++out_digits[i] < n) break;
            out_digits[i] = 0;
        }
    }

    // state reassembly tables: full state = sx[x] + sy[y]
    std::vector<long long> sx(static_cast<size_t>(n_out), 0), sy(static_cast<size_t>(n_in), 0);
    {
        std::vector<long long> stride(static_cast<size_t>(space.digit_count()));
        long long st = 1;
        for (int i = 0; i < space.digit_count(); ++i) {
            stride[static_cast<size_t>(i)] = st;
            st *= n;
        }
        std::vector<int> dg(info.outside_edges.size(), 0);
        for (long long x = 0; x < n_out; ++x) {
            long long s = 0;
            for (size_t i = 0; i < info.outside_edges.size(); ++i)
                s += dg[i] * stride[static_cast<size_t>(space.free_position(info.outside_edges[i]))];
            sx[static_cast<size_t>(x)] = s;
            size_t i = 0;
            for (; i < dg.size(); ++i) {
                if (++dg[i] < n) break;
                dg[i] = 0;
            }
        }
        std::vector<int> dgi(info.inside_edges.size(), 0);
        for (long long y = 0; y < n_in; ++y) {
            long long s = 0;
            for (size_t i = 0; i < info.inside_edges.size(); ++i)
                s += dgi[i] * stride[static_cast<size_t>(space.free_position(info.inside_edges[i]))];
            sy[static_cast<size_t>(y)] = s;
            size_t i = 0;
            for (; i < dgi.size(); ++i) {
                if (++dgi[i] < n) break;
                dgi[i] = 0;
            }
        }
    }

    CubeCouplingResult out;
    out.gamma.n = nst;
    out.gamma.joint.assign(static_cast<size_t>(nst * nst), 0.0);
    for (long long x = 0; x < n_out; ++x)
        for (long long xp = 0; xp < n_out; ++xp) {
            double b = gamma_r.at(x, xp);
            if (b == 0) continue;
            for (long long y = 0; y < n_in; ++y) {
                double f = phi.at(x, y);
                if (f == 0) continue;
                for (long long yp = 0; yp < n_in; ++yp)
                    out.gamma.at(sx[static_cast<size_t>(x)] + sy[static_cast<size_t>(y)],
                                 sx[static_cast<size_t>(xp)] + sy[static_cast<size_t>(yp)]) +=
                        b * f * phi_p.at(xp, yp);
            }
        }
    out.cert.disagreement_edges = info.disagreement_edges;
    out.cert.neighborhood_edges = info.neighborhood_edges;
    out.cert.outside_edges = info.outside_edges;
    out.cert.p_disagree_outside = gamma_r.offdiag_mass();
    out.cert.tv_outside = exact_tv(mu_r, mu_r_p);
    out.cert.tv_full = exact_tv(ga.measure, gb.measure);
    return out;
}

CubeCouplingCertificate cube_coupling_certificate(const LatticeGeometry& geom, const GroupSpec& group, double beta,
                                                  const BoundaryCondition& delta, const BoundaryCondition& delta_p,
                                                  int r, long long cap, int threads) {
    EnumeratedSpace space(geom, group, delta);
    EnumeratedSpace space_p(geom, group, delta_p);
    if (space.free_edge_ids() != space_p.free_edge_ids())
        throw std::logic_error("cube_coupling_certificate: free edge sets differ");
    SplitInfo info = split_by_neighborhood(geom, group, delta, delta_p, r, space);
    CubeCouplingCertificate cert;
    cert.disagreement_edges = info.disagreement_edges;
    cert.neighborhood_edges = info.neighborhood_edges;
    cert.outside_edges = info.outside_edges;
    WindowSums wa = exact_window_sums(space, beta, info.outside_edges, cap, threads);
    WindowSums wb = exact_window_sums(space_p, beta, info.outside_edges, cap, threads);
    DiscreteMeasure mu_r, mu_r_p;
    mu_r.p = wa.sums;
    for (double& v : mu_r.p) v /= wa.z;
    mu_r_p.p = wb.sums;
    for (double& v : mu_r_p.p) v /= wb.z;
    cert.tv_outside = exact_tv(mu_r, mu_r_p);
    cert.p_disagree_outside = cert.tv_outside; // attained by the optimal outside coupling
    cert.tv_full = exact_tv_streaming(geom, group, beta, delta, delta_p, cap, threads);
    return cert;
}

// ---- slab coupling ----------------------------------------------------------

double DisagreementProfile::max_abs_change(const DisagreementProfile& other) const {
    double m = 0;
    for (size_t i = 0; i < rho.size(); ++i) m = std::max(m, std::abs(rho[i] - other.rho[i]));
    return m;
}

SlabCoupling::SlabCoupling(const LatticeGeometry& slab, const GroupSpec& group, double beta,
                           const BoundaryCondition& delta, const BoundaryCondition& delta_p, int r, long long cap)
    : slab_(&slab), group_(group), beta_(beta), r_(r), delta_(delta), delta_p_(delta_p) {
    if (slab.shape() != ShapeKind::Slab) throw std::invalid_argument("SlabCoupling needs a slab geometry");
    if (delta.mode != BcMode::Fixed || delta_p.mode != BcMode::Fixed)
        throw std::invalid_argument("SlabCoupling needs fixed boundary conditions");
    for (int e : slab.temporal_edges())
        if (!elements_equal(group, delta.values[static_cast<size_t>(e)], delta_p.values[static_cast<size_t>(e)]))
            throw std::invalid_argument("boundary conditions must agree on the temporal faces");
    space_ = std::make_unique<EnumeratedSpace>(slab, group, delta);
    long long nst = space_->total_states();
    if (nst * nst > cap) throw std::runtime_error("SlabCoupling: pair state space exceeds cap");
    mu_ = exact_gibbs(*space_, beta, cap).measure;
    EnumeratedSpace space_p(slab, group, delta_p);
    mu_p_ = exact_gibbs(space_p, beta, cap).measure;
    cubes_ = slab.cubes_in_slab();

    for (const auto& cube : cubes_) {
        std::vector<int> extents;
        for (int i = 0; i < slab.dim(); ++i)
            extents.push_back(cube.b[static_cast<size_t>(i)] - cube.a[static_cast<size_t>(i)] + 1);
        auto ctx = std::make_unique<CubeContext>(LatticeGeometry::box(extents));
        ctx->cube_to_slab.assign(static_cast<size_t>(ctx->box.edge_count()), -1);
        for (int ec = 0; ec < ctx->box.edge_count(); ++ec) {
            std::vector<int> c = ctx->box.edge_base_coords(ec);
            for (int i = 0; i < slab.dim(); ++i) c[static_cast<size_t>(i)] += cube.a[static_cast<size_t>(i)];
            int es = slab.edge_id(c, ctx->box.edge_axis(ec));
            if (es < 0) throw std::logic_error("cube edge fell outside the slab");
            ctx->cube_to_slab[static_cast<size_t>(ec)] = es;
        }
        for (int ec : ctx->box.interior_edges())
            ctx->inner_slab_edges.push_back(ctx->cube_to_slab[static_cast<size_t>(ec)]);
        for (int ec : ctx->box.boundary_edges())
            ctx->boundary_slab_edges.push_back(ctx->cube_to_slab[static_cast<size_t>(ec)]);

        std::set<int> inner(ctx->inner_slab_edges.begin(), ctx->inner_slab_edges.end());
        for (int i = 0; i < space_->digit_count(); ++i) {
            int edge = space_->free_edge_ids()[static_cast<size_t>(i)];
            if (inner.count(edge))
                ;
            else
                ctx->outer_positions.push_back(i);
        }
        for (int es : ctx->inner_slab_edges) {
            int pos = space_->free_position(es);
            if (pos < 0) throw std::logic_error("cube interior edge is not free in the slab");
            ctx->inner_positions.push_back(pos);
        }

        int n = group.n;
        std::vector<long long> stride(static_cast<size_t>(space_->digit_count()));
        long long st = 1;
        for (int i = 0; i < space_->digit_count(); ++i) {
            stride[static_cast<size_t>(i)] = st;
            st *= n;
        }
        long long n_out = 1;
        for (size_t i = 0; i < ctx->outer_positions.size(); ++i) n_out *= n;
        long long n_in = 1;
        for (size_t i = 0; i < ctx->inner_positions.size(); ++i) n_in *= n;
        ctx->state_x.assign(static_cast<size_t>(n_out), 0);
        ctx->state_y.assign(static_cast<size_t>(n_in), 0);
        std::vector<int> dg(ctx->outer_positions.size(), 0);
        for (long long x = 0; x < n_out; ++x) {
            long long s = 0;
            for (size_t i = 0; i < ctx->outer_positions.size(); ++i)
                s += dg[i] * stride[static_cast<size_t>(ctx->outer_positions[i])];
            ctx->state_x[static_cast<size_t>(x)] = s;
            size_t i = 0;
            for (; i < dg.size(); ++i) {
                if (++dg[i] < n) break;
                dg[i] = 0;
            }
        }
        std::vector<int> dgi(ctx->inner_positions.size(), 0);
        for (long long y = 0; y < n_in; ++y) {
            long long s = 0;
            for (size_t i = 0; i < ctx->inner_positions.size(); ++i)
                s += dgi[i] * stride[static_cast<size_t>(ctx->inner_positions[i])];
            ctx->state_y[static_cast<size_t>(y)] = s;
            size_t i = 0;
            for (; i < dgi.size(); ++i) {
                if (++dgi[i] < n) break;
                dgi[i] = 0;
            }
        }
        contexts_.push_back(std::move(ctx));
    }
}

DiscreteCoupling SlabCoupling::product_coupling() const {
    DiscreteCoupling g;
    g.n = space_->total_states();
    g.joint.assign(static_cast<size_t>(g.n * g.n), 0.0);
    for (long long i = 0; i < g.n; ++i)
        for (long long j = 0; j < g.n; ++j)
            g.at(i, j) = mu_.p[static_cast<size_t>(i)] * mu_p_.p[static_cast<size_t>(j)];
    return g;
}

bool SlabCoupling::is_coupling(const DiscreteCoupling& gamma, double tol) const {
    DiscreteMeasure a = gamma.marginal_first(), b = gamma.marginal_second();
    for (long long i = 0; i < gamma.n; ++i) {
        if (std::abs(a.p[static_cast<size_t>(i)] - mu_.p[static_cast<size_t>(i)]) > tol) return false;
        if (std::abs(b.p[static_cast<size_t>(i)] - mu_p_.p[static_cast<size_t>(i)]) > tol) return false;
    }
    return true;
}

const DiscreteCoupling& SlabCoupling::cube_kernel(const CubeContext& ctx, const std::vector<int>& digits,
                                                  const std::vector<int>& digits_p) const {
    std::vector<int> key = digits;
    key.insert(key.end(), digits_p.begin(), digits_p.end());
    auto it = ctx.kernel_cache.find(key);
    if (it != ctx.kernel_cache.end()) return *it->second;

    // boundary conditions on the cube from the frozen pair state + slab conditions
    BoundaryCondition bca, bcb;
    bca.mode = bcb.mode = BcMode::Fixed;
    bca.values.assign(static_cast<size_t>(ctx.box.edge_count()), identity(group_));
    bcb.values.assign(static_cast<size_t>(ctx.box.edge_count()), identity(group_));
    for (int ec : ctx.box.boundary_edges()) {
        int es = ctx.cube_to_slab[static_cast<size_t>(ec)];
        int pos = space_->free_position(es);
        if (pos >= 0) {
            bca.values[static_cast<size_t>(ec)] = make_cyclic(group_, digits[static_cast<size_t>(pos)]);
            bcb.values[static_cast<size_t>(ec)] = make_cyclic(group_, digits_p[static_cast<size_t>(pos)]);
        } else {
            bca.values[static_cast<size_t>(ec)] = delta_.values[static_cast<size_t>(es)];
            bcb.values[static_cast<size_t>(ec)] = delta_p_.values[static_cast<size_t>(es)];
        }
    }
    auto result = std::make_shared<DiscreteCoupling>(cube_coupling(ctx.box, group_, beta_, bca, bcb, r_).gamma);
    ctx.kernel_cache[key] = result;
    return *result;
}

DiscreteCoupling SlabCoupling::local_update(const DiscreteCoupling& gamma, int cube_index) const {
    const CubeContext& ctx = *contexts_[static_cast<size_t>(cube_index)];
    int n = group_.n;
    long long n_out = static_cast<long long>(ctx.state_x.size());
    long long n_in = static_cast<long long>(ctx.state_y.size());
    long long nst = space_->total_states();

    // gamma_B: marginal of gamma on the outer pair
    std::vector<double> gamma_B(static_cast<size_t>(n_out * n_out), 0.0);
    std::vector<long long> outer_of_state(static_cast<size_t>(nst), 0);
    for (long long s = 0; s < nst; ++s) {
        std::vector<int> d = space_->decode(s);
        long long x = 0;
        for (size_t i = ctx.outer_positions.size(); i-- > 0;)
            x = x * n + d[static_cast<size_t>(ctx.outer_positions[i])];
        outer_of_state[static_cast<size_t>(s)] = x;
    }
    for (long long s = 0; s < nst; ++s)
        for (long long sp = 0; sp < nst; ++sp) {
            double v = gamma.at(s, sp);
            if (v != 0)
                gamma_B[static_cast<size_t>(outer_of_state[static_cast<size_t>(s)] * n_out +
                                            outer_of_state[static_cast<size_t>(sp)])] += v;
        }

    DiscreteCoupling out;
    out.n = nst;
    out.joint.assign(static_cast<size_t>(nst * nst), 0.0);
    std::vector<int> dx(static_cast<size_t>(space_->digit_count()), 0), dxp(static_cast<size_t>(space_->digit_count()), 0);
    for (long long x = 0; x < n_out; ++x) {
        // digits of the outer assignment x (other positions zero; inner unused by the kernel)
        std::vector<int> d(static_cast<size_t>(space_->digit_count()), 0);
        long long tmp = x;
        for (size_t i = 0; i < ctx.outer_positions.size(); ++i) {
            d[static_cast<size_t>(ctx.outer_positions[i])] = static_cast<int>(tmp % n);
            tmp /= n;
        }
        for (long long xp = 0; xp < n_out; ++xp) {
            double b = gamma_B[static_cast<size_t>(x * n_out + xp)];
            if (b == 0) continue;
            std::vector<int> dp(static_cast<size_t>(space_->digit_count()), 0);
            long long tmp2 = xp;
            for (size_t i = 0; i < ctx.outer_positions.size(); ++i) {
                dp[static_cast<size_t>(ctx.outer_positions[i])] = static_cast<int>(tmp2 % n);
                tmp2 /= n;
            }
            const DiscreteCoupling& K = cube_kernel(ctx, d, dp);
            if (K.n != n_in) throw std::logic_error("cube kernel dimension mismatch");
            for (long long y = 0; y < n_in; ++y)
                for (long long yp = 0; yp < n_in; ++yp) {
                    double kv = K.at(y, yp);
                    if (kv == 0) continue;
                    out.at(ctx.state_x[static_cast<size_t>(x)] + ctx.state_y[static_cast<size_t>(y)],
                           ctx.state_x[static_cast<size_t>(xp)] + ctx.state_y[static_cast<size_t>(yp)]) += b * kv;
                }
        }
    }
    return out;
}

DiscreteCoupling SlabCoupling::global_update(const DiscreteCoupling& gamma) const {
    if (cubes_.empty()) return gamma; // tau = identity when no admissible cube exists
    DiscreteCoupling acc;
    acc.n = gamma.n;
    acc.joint.assign(gamma.joint.size(), 0.0);
    for (size_t c = 0; c < cubes_.size(); ++c) {
        DiscreteCoupling t = local_update(gamma, static_cast<int>(c));
        for (size_t i = 0; i < acc.joint.size(); ++i) acc.joint[i] += t.joint[i];
    }
    double w = 1.0 / static_cast<double>(cubes_.size());
    for (double& v : acc.joint) v *= w;
    return acc;
}

double SlabCoupling::rho(const DiscreteCoupling& gamma, int edge) const {
    int pos = space_->free_position(edge);
    if (pos < 0) throw std::invalid_argument("rho: edge is not free");
    long long nst = space_->total_states();
    int n = group_.n;
    long long stride = 1;
    for (int i = 0; i < pos; ++i) stride *= n;
    double s = 0;
    for (long long a = 0; a < nst; ++a) {
        int da = static_cast<int>((a / stride) % n);
        for (long long b = 0; b < nst; ++b) {
            int db = static_cast<int>((b / stride) % n);
            if (da != db) s += gamma.at(a, b);
        }
    }
    return s;
}

DisagreementProfile SlabCoupling::profile(const DiscreteCoupling& gamma) const {
    DisagreementProfile p;
    for (int e : space_->free_edge_ids()) {
        p.edges.push_back(e);
        p.rho.push_back(rho(gamma, e));
    }
    return p;
}

SlabCoupling::IterateResult SlabCoupling::iterate(int max_iterations, double tol) const {
    IterateResult res;
    res.gamma = product_coupling();
    res.profile = profile(res.gamma);
    for (int it = 1; it <= max_iterations; ++it) {
        DiscreteCoupling next = global_update(res.gamma);
        DisagreementProfile np = profile(next);
        double change = np.max_abs_change(res.profile);
        res.gamma = std::move(next);
        res.profile = std::move(np);
        res.iterations = it;
        if (change < tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

HaarGapResult haar_gap_check(const GroupSpec& group, const DiscreteMeasure& point_probs, const Representation& rep,
                             int random_maps, uint64_t seed) {
    if (!group.is_finite()) throw std::invalid_argument("haar_gap_check: exact mode covers cyclic groups");
    if (point_probs.size() != group.n) throw std::invalid_argument("haar_gap_check: density size mismatch");
    double tot = point_probs.total();
    if (std::abs(tot - 1.0) > 1e-10) throw std::invalid_argument("haar_gap_check: density does not integrate to 1");
    for (double v : point_probs.p)
        if (!(v > 0)) throw std::invalid_argument("haar_gap_check: density must be strictly positive");
    if (!acts_nontrivially_on_center(rep))
        throw std::invalid_argument("haar_gap_check: representation acts trivially on the center");

    int m = rep.dim;
    std::vector<CMat> mats;
    for (int j = 0; j < group.n; ++j) mats.push_back(rep_matrix(rep, make_cyclic(group, j)));

    auto ratio_for = [&](const std::vector<cplx>& lmap) {
        cplx mean = 0;
        double sq = 0;
        for (int j = 0; j < group.n; ++j) {
            cplx f = 0;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) f += lmap[static_cast<size_t>(a * m + b)] * mats[static_cast<size_t>(j)].at(a, b);
            double p = point_probs.p[static_cast<size_t>(j)];
            mean += f * p;
            sq += std::norm(f) * p;
        }
        return std::tuple<double, double>(std::norm(mean), sq);
    };

    HaarGapResult out;
    double max_ratio = 0;
    bool any = false;
    auto consider = [&](const std::vector<cplx>& lmap) {
        auto [lhs, rhs] = ratio_for(lmap);
        if (rhs < 1e-300) return;
        any = true;
        double r = std::sqrt(lhs / rhs);
        if (r > max_ratio) {
            max_ratio = r;
            out.worst_lhs = lhs;
            out.worst_rhs = rhs;
        }
    };
    // entry functionals, then random linear maps
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            std::vector<cplx> lmap(static_cast<size_t>(m * m), 0.0);
            lmap[static_cast<size_t>(a * m + b)] = 1.0;
            consider(lmap);
        }
    RngStream rng(seed);
    for (int t = 0; t < random_maps; ++t) {
        std::vector<cplx> lmap(static_cast<size_t>(m * m));
        for (auto& v : lmap) v = cplx(rng.normal(), rng.normal());
        consider(lmap);
    }
    out.eps_observed = 1.0 - max_ratio;
    out.holds = any && out.eps_observed > 0;
    return out;
}

} // namespace lgt
