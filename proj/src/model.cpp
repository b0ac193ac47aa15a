#include "lgt/model.hpp"

#include <cmath>
#include <stdexcept>

namespace lgt {

BoundaryCondition BoundaryCondition::free() {
    BoundaryCondition bc;
    bc.mode = BcMode::Free;
    return bc;
}

BoundaryCondition BoundaryCondition::fixed_identity(const LatticeGeometry& geom, const GroupSpec& group) {
    BoundaryCondition bc;
    bc.mode = BcMode::Fixed;
    bc.values.assign(static_cast<size_t>(geom.edge_count()), identity(group));
    return bc;
}

BoundaryCondition BoundaryCondition::fixed_random(const LatticeGeometry& geom, const GroupSpec& group, uint64_t seed) {
    BoundaryCondition bc;
    bc.mode = BcMode::Fixed;
    bc.values.assign(static_cast<size_t>(geom.edge_count()), identity(group));
    RngStream rng(seed);
    for (int e : geom.boundary_edges()) bc.values[static_cast<size_t>(e)] = haar_sample(group, rng);
    return bc;
}

GaugeConfig GaugeConfig::identity(const LatticeGeometry& geom, const GroupSpec& group) {
    GaugeConfig c;
    c.geom = &geom;
    c.group = group;
    c.edges.assign(static_cast<size_t>(geom.edge_count()), lgt::identity(group));
    return c;
}

GaugeConfig GaugeConfig::random(const LatticeGeometry& geom, const GroupSpec& group, RngStream& rng) {
    GaugeConfig c = identity(geom, group);
    for (auto& g : c.edges) g = haar_sample(group, rng);
    return c;
}

void GaugeConfig::start_energy_tracking() {
    energy = hamiltonian(*this);
    energy_tracked = true;
}

void GaugeConfig::set_tracked(int e, const GroupElement& g) {
    if (!energy_tracked) {
        set(e, g);
        return;
    }
    LocalAction la = local_action(*this, e);
    double delta = la.eval(g) - la.eval(edges[static_cast<size_t>(e)]);
    edges[static_cast<size_t>(e)] = g;
    energy += delta;
}

std::vector<int> free_edges(const LatticeGeometry& geom, const BoundaryCondition& bc) {
    if (bc.mode == BcMode::Free) {
        std::vector<int> all(static_cast<size_t>(geom.edge_count()));
        for (int e = 0; e < geom.edge_count(); ++e) all[static_cast<size_t>(e)] = e;
        return all;
    }
    return geom.interior_edges();
}

void apply_boundary(GaugeConfig& config, const BoundaryCondition& bc) {
    if (bc.mode != BcMode::Fixed) return;
    for (int e : config.geom->boundary_edges()) config.edges[static_cast<size_t>(e)] = bc.values[static_cast<size_t>(e)];
}

GroupElement plaquette_product(const GaugeConfig& config, int p) {
    auto des = config.geom->plaquette_edges(p);
    GroupElement g = config.directed(des[0]);
    for (size_t i = 1; i < des.size(); ++i) g = mul(config.group, g, config.directed(des[i]));
    return g;
}

double plaquette_trace(const GaugeConfig& config, int p) {
    return re_tr_defining(config.group, plaquette_product(config, p));
}

double hamiltonian(const GaugeConfig& config) {
    double h = 0;
    for (int p = 0; p < config.geom->plaquette_count(); ++p) h -= plaquette_trace(config, p);
    return h;
}

void apply_gauge_transform(GaugeConfig& config, int vertex, const GroupElement& g) {
    const auto& geom = *config.geom;
    std::vector<int> v = geom.vertex_coords(vertex);
    GroupElement gi = inv(config.group, g);
    for (int a = 0; a < geom.dim(); ++a) {
        int out = geom.edge_id(v, a);
        if (out >= 0) config.set(out, mul(config.group, g, config.edges[static_cast<size_t>(out)]));
        std::vector<int> w = v;
        w[static_cast<size_t>(a)] -= 1;
        int in = geom.edge_id(w, a);
        if (in >= 0) config.set(in, mul(config.group, config.edges[static_cast<size_t>(in)], gi));
    }
}

double LocalAction::eval(const GroupElement& g) const {
    CMat m = defining_matrix(group, g);
    return eval_matrix(m);
}

double LocalAction::eval_matrix(const CMat& m) const {
    double s = 0;
    for (const auto& st : staples) s -= std::real(m.mul(st).trace());
    return s;
}

LocalAction local_action(const GaugeConfig& config, int e) {
    LocalAction la;
    la.group = config.group;
    const auto& geom = *config.geom;
    for (int p : geom.plaquettes_containing(e)) {
        auto des = geom.plaquette_edges(p);
        int k = 0;
        while (des[static_cast<size_t>(k)].edge != e) ++k;
        int sigma = des[static_cast<size_t>(k)].sign;
        // rotate the cycle to start at e; S = product of the remaining three
        GroupElement s = config.directed(des[static_cast<size_t>((k + 1) % 4)]);
        s = mul(config.group, s, config.directed(des[static_cast<size_t>((k + 2) % 4)]));
        s = mul(config.group, s, config.directed(des[static_cast<size_t>((k + 3) % 4)]));
        CMat sm = defining_matrix(config.group, s);
        // negative traversal: Re Tr(w^-1 S) = Re Tr(w S^dag) for unitary w
        la.staples.push_back(sigma > 0 ? sm : sm.adjoint());
    }
    return la;
}

double ConditionalDensity::density(const GroupElement& g) const {
    if (group.is_finite()) return probs[static_cast<size_t>(g.residue)] * group.n;
    return std::exp(-beta * action.eval(g) - log_norm);
}

ConditionalDensity conditional_density(const GaugeConfig& config, int e, double beta) {
    ConditionalDensity cd;
    cd.group = config.group;
    cd.beta = beta;
    cd.action = local_action(config, e);
    int max_staples = 2 * (config.geom->dim() - 1);
    double m = config.group.defining_dim();
    cd.lower_bound = std::exp(-2.0 * std::abs(beta) * max_staples * m);
    cd.upper_bound = std::exp(2.0 * std::abs(beta) * max_staples * m);
    if (config.group.is_finite()) {
        int n = config.group.n;
        cd.probs.resize(static_cast<size_t>(n));
        double amax = -1e300;
        std::vector<double> av(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) {
            av[static_cast<size_t>(j)] = -beta * cd.action.eval(make_cyclic(config.group, j));
            amax = std::max(amax, av[static_cast<size_t>(j)]);
        }
        double z = 0;
        for (int j = 0; j < n; ++j) z += (cd.probs[static_cast<size_t>(j)] = std::exp(av[static_cast<size_t>(j)] - amax));
        for (auto& p : cd.probs) p /= z;
    } else if (config.group.kind == GroupKind::Circle) {
        // log of the Haar average of exp(-beta*action), periodic trapezoid rule
        const int K = 256;
        double amax = -1e300;
        std::vector<double> av(K);
        for (int k = 0; k < K; ++k) {
            av[static_cast<size_t>(k)] = -beta * cd.action.eval(make_circle(2 * M_PI * k / K));
            amax = std::max(amax, av[static_cast<size_t>(k)]);
        }
        double z = 0;
        for (int k = 0; k < K; ++k) z += std::exp(av[static_cast<size_t>(k)] - amax);
        cd.log_norm = amax + std::log(z / K);
    } else {
        // su2: Haar average over the 3-sphere via the class-angle reduction is
        // handled in observables; here we only need a normalizing constant for
        // density(), obtained by Monte Carlo over a fixed stream
        RngStream rng(0x7a117e57);
        const int K = 1 << 15;
        double amax = -1e300;
        std::vector<double> av(static_cast<size_t>(K));
        for (int k = 0; k < K; ++k) {
            av[static_cast<size_t>(k)] = -beta * cd.action.eval(haar_sample(config.group, rng));
            amax = std::max(amax, av[static_cast<size_t>(k)]);
        }
        double z = 0;
        for (int k = 0; k < K; ++k) z += std::exp(av[static_cast<size_t>(k)] - amax);
        cd.log_norm = amax + std::log(z / K);
    }
    return cd;
}

void heatbath_update(GaugeConfig& config, int e, double beta, RngStream& rng) {
    if (!config.group.is_finite())
        throw std::logic_error("heat bath is implemented for finite cyclic groups; use metropolis");
    ConditionalDensity cd = conditional_density(config, e, beta);
    double u = rng.uniform();
    double acc = 0;
    int pick = config.group.n - 1;
    for (int j = 0; j < config.group.n; ++j) {
        acc += cd.probs[static_cast<size_t>(j)];
        if (u < acc) {
            pick = j;
            break;
        }
    }
    GroupElement next = make_cyclic(config.group, pick);
    if (config.energy_tracked)
        config.energy += cd.action.eval(next) - cd.action.eval(config.edges[static_cast<size_t>(e)]);
    config.edges[static_cast<size_t>(e)] = next;
}

bool metropolis_update(GaugeConfig& config, int e, double beta, double width, RngStream& rng) {
    LocalAction la = local_action(config, e);
    GroupElement cur = config.edges[static_cast<size_t>(e)];
    GroupElement prop;
    switch (config.group.kind) {
        case GroupKind::Cyclic:
            prop = make_cyclic(config.group, rng.uniform_int(config.group.n));
            break;
        case GroupKind::Circle:
            prop = make_circle(cur.theta + width * (2 * rng.uniform() - 1));
            break;
        case GroupKind::SpecialUnitary2: {
            Quat h{1.0, width * rng.normal(), width * rng.normal(), width * rng.normal()};
            prop = mul(config.group, cur, make_su2(h));
            break;
        }
    }
    double delta = la.eval(prop) - la.eval(cur);
    if (delta <= 0 || rng.uniform() < std::exp(-beta * delta)) {
        if (config.energy_tracked) config.energy += delta;
        config.edges[static_cast<size_t>(e)] = prop;
        return true;
    }
    return false;
}

std::vector<std::vector<int>> checkerboard_classes(const LatticeGeometry& geom, const std::vector<int>& edges) {
    std::vector<int> color(static_cast<size_t>(geom.edge_count()), -1);
    int ncolors = 0;
    for (int e : edges) {
        std::vector<bool> used(static_cast<size_t>(ncolors) + 1, false);
        for (int u : geom.neighbor_edges(e))
            if (color[static_cast<size_t>(u)] >= 0) used[static_cast<size_t>(color[static_cast<size_t>(u)])] = true;
        int c = 0;
        while (c < ncolors && used[static_cast<size_t>(c)]) ++c;
        color[static_cast<size_t>(e)] = c;
        ncolors = std::max(ncolors, c + 1);
    }
    std::vector<std::vector<int>> classes(static_cast<size_t>(ncolors));
    for (int e : edges) classes[static_cast<size_t>(color[static_cast<size_t>(e)])].push_back(e);
    return classes;
}

double sweep(GaugeConfig& config, const std::vector<std::vector<int>>& classes, const SamplerParams& params,
             RngStream& rng) {
    long tried = 0, accepted = 0;
    for (const auto& cls : classes)
        for (int e : cls) {
            ++tried;
            if (params.algorithm == SamplerParams::Algorithm::HeatBath) {
                heatbath_update(config, e, params.beta, rng);
                ++accepted;
            } else {
                if (metropolis_update(config, e, params.beta, params.proposal_width, rng)) ++accepted;
            }
        }
    return tried ? static_cast<double>(accepted) / static_cast<double>(tried) : 1.0;
}

namespace {
// batch means with >= 50 batches; returns (se, tau_int)
std::pair<double, double> batch_stats(const std::vector<double>& xs) {
    long n = static_cast<long>(xs.size());
    if (n < 2) return {0.0, 0.5};
    long nb = std::min<long>(50, n);
    long bs = n / nb;
    nb = n / bs;
    double mean = 0;
    for (long i = 0; i < nb * bs; ++i) mean += xs[static_cast<size_t>(i)];
    mean /= static_cast<double>(nb * bs);
    double var = 0;
    for (long i = 0; i < nb * bs; ++i) {
        double d = xs[static_cast<size_t>(i)] - mean;
        var += d * d;
    }
    var /= static_cast<double>(nb * bs - 1);
    double bvar = 0;
    for (long b = 0; b < nb; ++b) {
        double bm = 0;
        for (long i = b * bs; i < (b + 1) * bs; ++i) bm += xs[static_cast<size_t>(i)];
        bm /= static_cast<double>(bs);
        bvar += (bm - mean) * (bm - mean);
    }
    bvar /= static_cast<double>(nb - 1);
    double se = std::sqrt(bvar / static_cast<double>(nb));
    double tau = var > 0 ? 0.5 * static_cast<double>(bs) * bvar / var : 0.5;
    return {se, std::max(tau, 0.5)};
}
} // namespace

std::vector<EstimateResult> estimate_many(const std::vector<Observable>& fs, const LatticeGeometry& geom,
                                          const GroupSpec& group, const BoundaryCondition& bc,
                                          const SamplerParams& params, std::vector<std::vector<cplx>>* series_out) {
    GaugeConfig config = GaugeConfig::identity(geom, group);
    RngStream rng = RngStream::substream(params.seed, 0);
    if (bc.mode == BcMode::Free) {
        config = GaugeConfig::random(geom, group, rng);
    } else {
        apply_boundary(config, bc);
        for (int e : geom.interior_edges()) config.set(e, haar_sample(group, rng));
    }
    auto classes = checkerboard_classes(geom, free_edges(geom, bc));
    for (int s = 0; s < params.therm_sweeps; ++s) sweep(config, classes, params, rng);

    std::vector<std::vector<cplx>> series(fs.size());
    double acc_sum = 0;
    long nmeas = 0;
    for (int s = 0; s < params.measure_sweeps; ++s) {
        acc_sum += sweep(config, classes, params, rng);
        if ((s + 1) % params.stride == 0) {
            for (size_t i = 0; i < fs.size(); ++i) {
                cplx v = fs[i](config);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    throw std::runtime_error("estimate: observable returned a non-finite value");
                series[i].push_back(v);
            }
            ++nmeas;
        }
    }
    std::vector<EstimateResult> out;
    for (size_t i = 0; i < fs.size(); ++i) {
        EstimateResult r;
        std::vector<double> re, im;
        re.reserve(series[i].size());
        im.reserve(series[i].size());
        cplx mean = 0;
        for (cplx v : series[i]) {
            re.push_back(v.real());
            im.push_back(v.imag());
            mean += v;
        }
        r.n_samples = nmeas;
        r.mean = nmeas ? mean / static_cast<double>(nmeas) : cplx(0);
        auto [se_r, tau_r] = batch_stats(re);
        auto [se_i, tau_i] = batch_stats(im);
        r.se_re = se_r;
        r.se_im = se_i;
        r.tau_int = std::max(tau_r, tau_i);
        r.acceptance = params.measure_sweeps ? acc_sum / params.measure_sweeps : 1.0;
        out.push_back(r);
    }
    if (series_out) *series_out = std::move(series);
    return out;
}

EstimateResult estimate(const Observable& f, const LatticeGeometry& geom, const GroupSpec& group,
                        const BoundaryCondition& bc, const SamplerParams& params) {
    return estimate_many({f}, geom, group, bc, params)[0];
}

namespace {
// plaquette phase terms of H as a function of the probed edge value, circle group
struct CirclePlaquetteTerm {
    double re_staple, im_staple;
    int sigma;
    // contribution -Re(w^(sigma) * S) with w = x + i y, adjoint extension off the circle
    double eval(double x, double y) const {
        return -(x * re_staple - sigma * y * im_staple);
    }
};
} // namespace

GradientIdentityResult gradient_identity_check(const Observable& f, int e, const LatticeGeometry& geom,
                                               const BoundaryCondition& bc, double beta, int quad_nodes,
                                               double fd_step) {
    GroupSpec group = GroupSpec::circle();
    if (bc.mode != BcMode::Fixed) throw std::invalid_argument("gradient_identity_check needs a fixed boundary condition");
    if (!geom.is_boundary_edge(e)) throw std::invalid_argument("gradient_identity_check: e must be a boundary edge");
    for (int b : geom.boundary_edges())
        if (bc.values[static_cast<size_t>(b)].kind != GroupKind::Circle)
            throw std::invalid_argument("gradient_identity_check: only the circle group has a gradient");
    std::vector<int> free = geom.interior_edges();
    if (free.size() > 6) throw std::invalid_argument("gradient_identity_check: too many interior edges for quadrature");

    GaugeConfig config = GaugeConfig::identity(geom, group);
    apply_boundary(config, bc);

    // Plaquettes containing e need the staple phase; H splits into a part linear
    // in the ambient coordinates of delta_e and a part independent of it.
    // <f>(x,y) is evaluated by tensor-product trapezoid quadrature on the free angles.
    int k = static_cast<int>(free.size());
    long long total = 1;
    for (int i = 0; i < k; ++i) total *= quad_nodes;

    // H splits as H_rest (no dependence on delta_e) plus a term linear in the
    // ambient coordinates: sum over plaquettes through e of -(x Re S - sigma y Im S),
    // so H(x,y) = H_rest + x*gx + y*gy with (gx,gy) = grad_e H, a function of
    // the neighbors only. One sweep over the quadrature grid serves the
    // on-circle covariance and the four displaced points for the differences.
    double x0 = std::cos(config.edges[static_cast<size_t>(e)].theta);
    double y0 = std::sin(config.edges[static_cast<size_t>(e)].theta);
    const double hstep = fd_step;
    const double px[5] = {x0, x0 + hstep, x0 - hstep, x0, x0};
    const double py[5] = {y0, y0, y0, y0 + hstep, y0 - hstep};

    double sum_w[5] = {0, 0, 0, 0, 0};
    double sum_fw[5] = {0, 0, 0, 0, 0};
    double sum_gx = 0, sum_gy = 0, sum_fgx = 0, sum_fgy = 0;

    std::vector<int> idx(static_cast<size_t>(k), 0);
    GaugeConfig local = config;
    for (long long t = 0; t < total; ++t) {
        for (int i = 0; i < k; ++i)
            local.set(free[static_cast<size_t>(i)], make_circle(2 * M_PI * idx[static_cast<size_t>(i)] / quad_nodes));
        double h_rest = 0;
        double gx = 0, gy = 0;
        for (int p = 0; p < geom.plaquette_count(); ++p) {
            const auto& des = geom.plaquette_edges(p);
            int pos = -1, sigma = 0;
            for (int i = 0; i < 4; ++i)
                if (des[static_cast<size_t>(i)].edge == e) {
                    pos = i;
                    sigma = des[static_cast<size_t>(i)].sign;
                }
            if (pos < 0) {
                h_rest -= plaquette_trace(local, p);
            } else {
                double ang = 0;
                for (int i = 1; i < 4; ++i) {
                    const auto& de = des[static_cast<size_t>((pos + i) % 4)];
                    ang += de.sign * local.edges[static_cast<size_t>(de.edge)].theta;
                }
                CirclePlaquetteTerm term{std::cos(ang), std::sin(ang), sigma};
                gx += -term.re_staple;
                gy += sigma * term.im_staple;
            }
        }
        double base = std::exp(-beta * h_rest);
        double fv = std::real(f(local));
        for (int q = 0; q < 5; ++q) {
            double w = base * std::exp(-beta * (px[q] * gx + py[q] * gy));
            sum_w[q] += w;
            sum_fw[q] += fv * w;
            if (q == 0) {
                sum_gx += gx * w;
                sum_gy += gy * w;
                sum_fgx += fv * gx * w;
                sum_fgy += fv * gy * w;
            }
        }
        int i = 0;
        for (; i < k; ++i) {
            if (++idx[static_cast<size_t>(i)] < quad_nodes) break;
            idx[static_cast<size_t>(i)] = 0;
        }
    }

    GradientIdentityResult res{};
    double mean_f = sum_fw[0] / sum_w[0];
    res.rhs[0] = -beta * (sum_fgx / sum_w[0]) + beta * mean_f * (sum_gx / sum_w[0]);
    res.rhs[1] = -beta * (sum_fgy / sum_w[0]) + beta * mean_f * (sum_gy / sum_w[0]);
    res.lhs[0] = (sum_fw[1] / sum_w[1] - sum_fw[2] / sum_w[2]) / (2 * hstep);
    res.lhs[1] = (sum_fw[3] / sum_w[3] - sum_fw[4] / sum_w[4]) / (2 * hstep);
    res.gap = std::max(std::abs(res.lhs[0] - res.rhs[0]), std::abs(res.lhs[1] - res.rhs[1]));
    return res;
}

} // namespace lgt
