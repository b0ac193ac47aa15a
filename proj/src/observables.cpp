#include "lgt/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace lgt {

cplx wilson_loop(const GaugeConfig& config, const Loop& loop, const Representation& rep) {
    if (loop.edges.empty() || !config.geom->loop_closes(loop)) throw std::invalid_argument("wilson_loop: open loop");
    CMat m = rep_matrix(rep, config.directed(loop.edges[0]));
    for (size_t i = 1; i < loop.edges.size(); ++i) m = m.mul(rep_matrix(rep, config.directed(loop.edges[i])));
    return m.trace();
}

cplx chain_variable(const GaugeConfig& config, const ChainVariableSpec& spec) {
    if (spec.indices.size() != spec.chain.edges.size())
        throw std::invalid_argument("chain_variable: one index pair per chain edge");
    cplx v = 1.0;
    for (size_t i = 0; i < spec.chain.edges.size(); ++i) {
        auto [r, c] = spec.indices[i];
        if (r < 0 || r >= spec.rep.dim || c < 0 || c >= spec.rep.dim)
            throw std::invalid_argument("chain_variable: index out of range");
        CMat m = rep_matrix(spec.rep, config.edges[static_cast<size_t>(spec.chain.edges[i])]);
        v *= m.at(r, c);
    }
    return v;
}

cplx loop_component(const GaugeConfig& config, const LoopComponentSpec& spec) {
    if (spec.indices.size() != spec.loop.edges.size())
        throw std::invalid_argument("loop_component: one index pair per loop edge");
    cplx v = 1.0;
    for (size_t i = 0; i < spec.loop.edges.size(); ++i) {
        auto [r, c] = spec.indices[i];
        CMat m = rep_matrix(spec.rep, config.directed(spec.loop.edges[i]));
        v *= m.at(r, c);
    }
    return v;
}

cplx wilson_from_components(const GaugeConfig& config, const Loop& loop, const Representation& rep) {
    int k = static_cast<int>(loop.edges.size());
    int m = rep.dim;
    long long total = 1;
    for (int i = 0; i < k; ++i) total *= m;
    cplx sum = 0;
    // matched chains: component (j_i, j_{i+1}) with cyclic index sequence j
    std::vector<int> j(static_cast<size_t>(k), 0);
    for (long long t = 0; t < total; ++t) {
        LoopComponentSpec spec{loop, rep, {}};
        for (int i = 0; i < k; ++i)
            spec.indices.push_back({j[static_cast<size_t>(i)], j[static_cast<size_t>((i + 1) % k)]});
        sum += loop_component(config, spec);
        int i = 0;
        for (; i < k; ++i) {
            if (++j[static_cast<size_t>(i)] < m) break;
            j[static_cast<size_t>(i)] = 0;
        }
    }
    return sum;
}

GaugeConfig center_transform(const GaugeConfig& config, const GroupElement& g0) {
    const LatticeGeometry& geom = *config.geom;
    if (geom.shape() != ShapeKind::Slab) throw std::logic_error("center_transform acts on slab configurations");
    if (!is_central(config.group, g0)) throw std::invalid_argument("center_transform: element fails the centrality test");
    GaugeConfig out = config;
    for (int e = 0; e < geom.edge_count(); ++e) {
        if (geom.edge_axis(e) != 0) continue;
        if (geom.edge_base_coords(e)[0] != 0) continue; // layer 0 -> layer 1
        out.set(e, mul(config.group, g0, config.edges[static_cast<size_t>(e)]));
    }
    return out;
}

BoundaryCondition center_twist_bc(const LatticeGeometry& geom, const GroupSpec& group, const BoundaryCondition& bc,
                                  const GroupElement& g0) {
    if (bc.mode != BcMode::Fixed) throw std::invalid_argument("center_twist_bc: needs a fixed boundary condition");
    if (!is_central(group, g0)) throw std::invalid_argument("center_twist_bc: element fails the centrality test");
    BoundaryCondition out = bc;
    for (int e : geom.boundary_edges()) {
        if (geom.edge_axis(e) != 0) continue;
        if (geom.edge_base_coords(e)[0] != 0) continue;
        out.values[static_cast<size_t>(e)] = mul(group, g0, bc.values[static_cast<size_t>(e)]);
    }
    return out;
}

namespace {
// Weyl reduction for su2 class functions: the staple sum is k*U with U in the
// group, so <pi(g)> = c_pi(2*beta*k) * pi(U^-1) with c_pi a 1d integral over
// the class angle, weight (2/pi) sin^2.
double su2_class_coefficient(const Representation& rep, double t) {
    // c = [ int chi_pi(x) e^{t cos x} sin^2 x dx ] / [ dim * int e^{t cos x} sin^2 x dx ]
    const int K = 4096;
    double num = 0, den = 0;
    for (int i = 0; i <= K; ++i) {
        double x = M_PI * i / K;
        double w = (i == 0 || i == K) ? 0.5 : 1.0;
        double s2 = std::sin(x) * std::sin(x);
        double e = std::exp(t * std::cos(x) - std::abs(t)); // scaled for stability
        double chi = 1.0;
        if (rep.kind == RepKind::Su2Fundamental) chi = 2 * std::cos(x);
        else if (rep.kind == RepKind::Su2Adjoint) chi = 1 + 2 * std::cos(2 * x);
        num += w * chi * e * s2;
        den += w * e * s2;
    }
    return num / (rep.dim * den);
}
} // namespace

CMat conditional_link_expectation(const GaugeConfig& config, int e, const Representation& rep, double beta) {
    if (!(rep.group == config.group)) throw std::invalid_argument("conditional_link_expectation: group mismatch");
    LocalAction la = local_action(config, e);
    switch (config.group.kind) {
        case GroupKind::Cyclic: {
            ConditionalDensity cd = conditional_density(config, e, beta);
            CMat acc = CMat::zero(rep.dim);
            for (int j = 0; j < config.group.n; ++j)
                acc = acc.add(rep_matrix(rep, make_cyclic(config.group, j)).scaled(cd.probs[static_cast<size_t>(j)]));
            return acc;
        }
        case GroupKind::Circle: {
            const int K = 1024;
            CMat acc = CMat::zero(rep.dim);
            double z = 0;
            double amax = -1e300;
            std::vector<double> av(K);
            for (int k = 0; k < K; ++k) {
                av[static_cast<size_t>(k)] = -beta * la.eval(make_circle(2 * M_PI * k / K));
                amax = std::max(amax, av[static_cast<size_t>(k)]);
            }
            for (int k = 0; k < K; ++k) {
                double w = std::exp(av[static_cast<size_t>(k)] - amax);
                acc = acc.add(rep_matrix(rep, make_circle(2 * M_PI * k / K)).scaled(w));
                z += w;
            }
            return acc.scaled(1.0 / z);
        }
        case GroupKind::SpecialUnitary2: {
            // K = sum of (adjoint-corrected) staples; a real quaternion multiple of SU(2)
            CMat K = CMat::zero(2);
            for (const auto& st : la.staples) K = K.add(st);
            double det_re = std::real(K.at(0, 0) * K.at(1, 1) - K.at(0, 1) * K.at(1, 0));
            double k = std::sqrt(std::max(0.0, det_re));
            if (k < 1e-14 || beta == 0.0) {
                if (rep.kind == RepKind::Su2Trivial) return CMat::ident(1);
                return CMat::zero(rep.dim); // Haar average of a nontrivial irrep
            }
            CMat U = K.scaled(1.0 / k);
            Quat qu{std::real(U.at(0, 0)), std::imag(U.at(0, 0)), std::real(U.at(0, 1)), std::imag(U.at(0, 1))};
            GroupElement u_inv = inv(config.group, make_su2(qu));
            double c = su2_class_coefficient(rep, 2 * beta * k);
            return rep_matrix(rep, u_inv).scaled(c);
        }
    }
    return CMat{};
}

double correlation_distance(const LatticeGeometry& geom, int plaq_f, int plaq_g) {
    int ef = geom.plaquette_edges(plaq_f)[0].edge;
    int eg = geom.plaquette_edges(plaq_g)[0].edge;
    return geom.dist(ef, eg);
}

CorrelationResult correlation_decay(const CorrelationRequest& request, const LatticeGeometry& geom,
                                    const GroupSpec& group, const BoundaryCondition& bc, const SamplerParams& params) {
    double m = group.defining_dim();
    std::vector<Observable> obs;
    obs.push_back([p = request.f_plaquette, m](const GaugeConfig& c) { return cplx(plaquette_trace(c, p) / m); });
    for (int p : request.g_plaquettes)
        obs.push_back([p, m](const GaugeConfig& c) { return cplx(plaquette_trace(c, p) / m); });

    std::vector<std::vector<cplx>> series;
    estimate_many(obs, geom, group, bc, params, &series);

    std::vector<double> fs;
    for (cplx v : series[0]) fs.push_back(v.real());

    CorrelationResult out;
    for (size_t i = 0; i < request.g_plaquettes.size(); ++i) {
        std::vector<double> gs;
        for (cplx v : series[i + 1]) gs.push_back(v.real());
        CovEstimate ce = jackknife_covariance(fs, gs);
        CorrelationPoint pt;
        pt.distance = correlation_distance(geom, request.f_plaquette, request.g_plaquettes[i]);
        pt.cov = ce.cov;
        pt.err = ce.err;
        out.points.push_back(pt);
    }
    // log-linear fit over the window where the signal beats twice the error
    std::vector<std::vector<double>> rows;
    std::vector<double> ys, sigmas;
    for (const auto& pt : out.points) {
        if (std::abs(pt.cov) > 2 * pt.err && pt.err > 0) {
            rows.push_back({1.0, pt.distance});
            ys.push_back(std::log(std::abs(pt.cov)));
            sigmas.push_back(pt.err / std::abs(pt.cov));
        }
    }
    if (rows.size() >= 2) {
        LinearFit fit = weighted_least_squares(rows, ys, sigmas);
        if (fit.valid) {
            out.fit_valid = true;
            out.k1 = std::exp(fit.coef[0]);
            out.k2 = -fit.coef[1];
            out.k2_err = fit.coef_err[1];
            out.fit_chi2 = fit.chi2;
            out.fit_ndof = fit.ndof;
        }
    }
    return out;
}

PotentialExtract potential_extract(const std::vector<WilsonTableEntry>& table) {
    PotentialExtract out;
    std::map<int, std::vector<WilsonTableEntry>> by_r;
    std::map<std::pair<int, int>, WilsonTableEntry> cells;
    for (const auto& e : table) {
        if (std::abs(e.mean) <= e.err || e.mean == 0.0) {
            out.excluded.push_back(e);
            continue;
        }
        by_r[e.R].push_back(e);
        cells[{e.R, e.T}] = e;
    }
    // V(R): slope of -log|W| against T
    for (auto& [r, entries] : by_r) {
        PotentialPoint pt;
        pt.R = r;
        if (entries.size() >= 3) {
            std::vector<std::vector<double>> rows;
            std::vector<double> ys, sigmas;
            for (const auto& e : entries) {
                rows.push_back({1.0, static_cast<double>(e.T)});
                ys.push_back(-std::log(std::abs(e.mean)));
                double s = e.err / std::abs(e.mean);
                sigmas.push_back(s > 0 ? s : 1e-12);
            }
            LinearFit fit = weighted_least_squares(rows, ys, sigmas);
            if (fit.valid) {
                pt.valid = true;
                pt.v = fit.coef[1];
                pt.err = fit.coef_err[1];
            }
        }
        out.potential.push_back(pt);
    }
    // Creutz ratios chi(R,T) = -log[ W(R,T) W(R-1,T-1) / (W(R,T-1) W(R-1,T)) ]
    for (const auto& [key, e] : cells) {
        auto [r, t] = key;
        auto a = cells.find({r, t});
        auto b = cells.find({r - 1, t - 1});
        auto c = cells.find({r, t - 1});
        auto d = cells.find({r - 1, t});
        if (b == cells.end() || c == cells.end() || d == cells.end()) continue;
        CreutzPoint cp;
        cp.R = r;
        cp.T = t;
        cp.chi = -(std::log(std::abs(a->second.mean)) + std::log(std::abs(b->second.mean)) -
                   std::log(std::abs(c->second.mean)) - std::log(std::abs(d->second.mean)));
        double v = 0;
        for (const auto* w : {&a->second, &b->second, &c->second, &d->second}) {
            double rel = w->err / std::abs(w->mean);
            v += rel * rel;
        }
        cp.err = std::sqrt(v);
        cp.valid = true;
        out.creutz.push_back(cp);
    }
    // global area+perimeter fit: -log|W| = sigma*RT + p*(R+T) + c
    std::vector<std::vector<double>> rows;
    std::vector<double> ys, sigmas;
    for (const auto& [key, e] : cells) {
        rows.push_back({static_cast<double>(e.R * e.T), static_cast<double>(e.R + e.T), 1.0});
        ys.push_back(-std::log(std::abs(e.mean)));
        double s = e.err / std::abs(e.mean);
        sigmas.push_back(s > 0 ? s : 1e-12);
    }
    if (rows.size() >= 4) {
        LinearFit fit = weighted_least_squares(rows, ys, sigmas);
        if (fit.valid) {
            out.area_fit_valid = true;
            out.sigma = fit.coef[0];
            out.sigma_err = fit.coef_err[0];
            out.perimeter = fit.coef[1];
            out.perimeter_err = fit.coef_err[1];
            out.constant = fit.coef[2];
        }
    }
    return out;
}

namespace {
// expectation of an observable supported on a few edges, from bucketed sums;
// fixed edges contribute through the frame config
cplx windowed_expectation(const EnumeratedSpace& space, double beta, const std::vector<int>& support,
                          const std::function<cplx(const GaugeConfig&)>& f, long long cap, int threads) {
    std::vector<int> window;
    for (int e : support)
        if (space.free_position(e) >= 0 && std::find(window.begin(), window.end(), e) == window.end())
            window.push_back(e);
    WindowSums ws = exact_window_sums(space, beta, window, cap, threads);
    int n = space.group().n;
    cplx acc = 0;
    std::vector<int> digits(window.size(), 0);
    GaugeConfig cfg = space.config_for(std::vector<int>(static_cast<size_t>(space.digit_count()), 0));
    for (long long b = 0; b < static_cast<long long>(ws.sums.size()); ++b) {
        for (size_t i = 0; i < window.size(); ++i) cfg.set(window[i], make_cyclic(space.group(), digits[i]));
        acc += f(cfg) * (ws.sums[static_cast<size_t>(b)] / ws.z);
        size_t i = 0;
        for (; i < window.size(); ++i) {
            if (++digits[i] < n) break;
            digits[i] = 0;
        }
    }
    return acc;
}
} // namespace

cplx exact_wilson_expectation(const EnumeratedSpace& space, double beta, const Loop& loop, const Representation& rep,
                              long long cap, int threads) {
    std::vector<int> support;
    for (const auto& de : loop.edges) support.push_back(de.edge);
    return windowed_expectation(
        space, beta, support, [&](const GaugeConfig& c) { return wilson_loop(c, loop, rep); }, cap, threads);
}

cplx exact_chain_expectation(const EnumeratedSpace& space, double beta, const ChainVariableSpec& spec, long long cap,
                             int threads) {
    return windowed_expectation(
        space, beta, spec.chain.edges, [&](const GaugeConfig& c) { return chain_variable(c, spec); }, cap, threads);
}

} // namespace lgt
