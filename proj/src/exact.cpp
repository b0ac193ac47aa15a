#include "lgt/exact.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace lgt {

double DiscreteMeasure::total() const {
    double s = 0;
    for (double v : p) s += v;
    return s;
}

void DiscreteMeasure::normalize() {
    double t = total();
    if (t <= 0) throw std::runtime_error("measure with nonpositive total mass");
    for (double& v : p) v /= t;
}

double exact_tv(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (mu.size() != nu.size()) throw std::invalid_argument("exact_tv: mismatched spaces");
    double s = 0;
    for (size_t i = 0; i < mu.p.size(); ++i) s += std::abs(mu.p[i] - nu.p[i]);
    return 0.5 * s;
}

double tv_sup_over_events(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (mu.size() != nu.size()) throw std::invalid_argument("tv_sup_over_events: mismatched spaces");
    if (mu.size() > 24) throw std::invalid_argument("tv_sup_over_events: space too large for subset sweep");
    int k = static_cast<int>(mu.size());
    double best = 0;
    for (long long mask = 0; mask < (1LL << k); ++mask) {
        double d = 0;
        for (int i = 0; i < k; ++i)
            if (mask & (1LL << i)) d += mu.p[static_cast<size_t>(i)] - nu.p[static_cast<size_t>(i)];
        best = std::max(best, std::abs(d));
    }
    return best;
}

EnumeratedSpace::EnumeratedSpace(const LatticeGeometry& geom, const GroupSpec& group, const BoundaryCondition& bc)
    : geom_(&geom), group_(group), frame_(GaugeConfig::identity(geom, group)) {
    if (!group.is_finite()) throw std::invalid_argument("enumeration requires a finite cyclic group");
    apply_boundary(frame_, bc);
    free_ = free_edges(geom, bc);
    free_pos_.assign(static_cast<size_t>(geom.edge_count()), -1);
    for (size_t i = 0; i < free_.size(); ++i) free_pos_[static_cast<size_t>(free_[i])] = static_cast<int>(i);
    total_ = 1;
    for (size_t i = 0; i < free_.size(); ++i) {
        if (total_ > (1LL << 61) / group.n) throw std::invalid_argument("state space exceeds 2^61");
        total_ *= group.n;
    }
}

int EnumeratedSpace::free_position(int edge) const {
    if (edge < 0 || edge >= static_cast<int>(free_pos_.size()))
        throw std::invalid_argument("free_position: no such edge");
    return free_pos_[static_cast<size_t>(edge)];
}

std::vector<int> EnumeratedSpace::decode(long long state) const {
    std::vector<int> d(free_.size());
    for (size_t i = 0; i < free_.size(); ++i) {
        d[i] = static_cast<int>(state % group_.n);
        state /= group_.n;
    }
    return d;
}

long long EnumeratedSpace::encode(const std::vector<int>& digits) const {
    long long s = 0;
    for (size_t i = digits.size(); i-- > 0;) s = s * group_.n + digits[i];
    return s;
}

GaugeConfig EnumeratedSpace::config_for(const std::vector<int>& digits) const {
    GaugeConfig c = frame_;
    for (size_t i = 0; i < free_.size(); ++i) c.set(free_[i], make_cyclic(group_, digits[i]));
    return c;
}

// ---- streaming Gray-code kernel -------------------------------------------

namespace {

struct StreamPlan {
    int n = 2;
    int k = 0;
    double beta = 0;
    int plaq_count = 0;
    std::vector<int> dig_off, dig_plaq, dig_sigma; // per digit: affected plaquettes
    std::vector<int> plaq_const;                   // residue contribution of the fixed edges
    std::vector<int> plaq_const_b;                 // dual mode: second boundary condition
    std::vector<double> ratio;                     // ratio[o*n+s] = F(s)/F(o)
    std::vector<double> coslog;                    // beta * cos(2 pi j / n)
    bool dual = false;

    double weight_from_residues(const std::vector<int>& s, bool second) const {
        double acc = 0;
        for (int p = 0; p < plaq_count; ++p) {
            int r = s[static_cast<size_t>(p)];
            if (second)
                r = (r + plaq_const_b[static_cast<size_t>(p)] - plaq_const[static_cast<size_t>(p)] + 2 * n) % n;
            acc += coslog[static_cast<size_t>(r)];
        }
        return std::exp(acc);
    }
};

// perm[internal digit] = external free position; identity when empty
StreamPlan make_plan(const EnumeratedSpace& space, double beta, const BoundaryCondition* bc_b,
                     const std::vector<int>& perm = {}) {
    const LatticeGeometry& geom = space.geom();
    StreamPlan plan;
    plan.n = space.group().n;
    plan.k = space.digit_count();
    plan.beta = beta;
    plan.plaq_count = geom.plaquette_count();
    plan.dual = bc_b != nullptr;

    std::vector<std::vector<std::pair<int, int>>> per_digit(static_cast<size_t>(plan.k));
    plan.plaq_const.assign(static_cast<size_t>(plan.plaq_count), 0);
    plan.plaq_const_b.assign(static_cast<size_t>(plan.plaq_count), 0);
    GaugeConfig frame = space.config_for(std::vector<int>(static_cast<size_t>(plan.k), 0));
    GaugeConfig frame_b = GaugeConfig::identity(geom, space.group());
    if (bc_b) apply_boundary(frame_b, *bc_b);
    for (int p = 0; p < plan.plaq_count; ++p) {
        for (const auto& de : geom.plaquette_edges(p)) {
            int pos = space.free_position(de.edge);
            if (pos >= 0) {
                per_digit[static_cast<size_t>(pos)].push_back({p, de.sign});
            } else {
                int r = frame.edges[static_cast<size_t>(de.edge)].residue;
                plan.plaq_const[static_cast<size_t>(p)] =
                    ((plan.plaq_const[static_cast<size_t>(p)] + de.sign * r) % plan.n + plan.n) % plan.n;
                if (bc_b) {
                    int rb = frame_b.edges[static_cast<size_t>(de.edge)].residue;
                    plan.plaq_const_b[static_cast<size_t>(p)] =
                        ((plan.plaq_const_b[static_cast<size_t>(p)] + de.sign * rb) % plan.n + plan.n) % plan.n;
                }
            }
        }
    }
    // remap external free positions to internal digit order
    std::vector<int> order(static_cast<size_t>(plan.k));
    if (perm.empty()) {
        for (int i = 0; i < plan.k; ++i) order[static_cast<size_t>(i)] = i;
    } else {
        if (static_cast<int>(perm.size()) != plan.k) throw std::logic_error("make_plan: bad permutation");
        order = perm;
    }
    plan.dig_off.assign(static_cast<size_t>(plan.k) + 1, 0);
    for (int i = 0; i < plan.k; ++i)
        plan.dig_off[static_cast<size_t>(i) + 1] =
            plan.dig_off[static_cast<size_t>(i)] +
            static_cast<int>(per_digit[static_cast<size_t>(order[static_cast<size_t>(i)])].size());
    for (int i = 0; i < plan.k; ++i)
        for (auto [p, s] : per_digit[static_cast<size_t>(order[static_cast<size_t>(i)])]) {
            plan.dig_plaq.push_back(p);
            plan.dig_sigma.push_back(s);
        }
    plan.coslog.resize(static_cast<size_t>(plan.n));
    for (int j = 0; j < plan.n; ++j)
        plan.coslog[static_cast<size_t>(j)] =
            beta * re_tr_defining(space.group(), make_cyclic(space.group(), j));
    plan.ratio.resize(static_cast<size_t>(plan.n * plan.n));
    for (int o = 0; o < plan.n; ++o)
        for (int s = 0; s < plan.n; ++s)
            plan.ratio[static_cast<size_t>(o * plan.n + s)] =
                std::exp(plan.coslog[static_cast<size_t>(s)] - plan.coslog[static_cast<size_t>(o)]);
    return plan;
}

// One block: top digits fixed, low digits enumerated by loopless reflected
// mixed-radix Gray code (Knuth 7.2.1.1, one digit moves +-1 per step).
// first(digits, w, wb) runs on the initial state, then step(j, dir, w, wb)
// after every move; the visitor tracks its own derived indices.
template <class VisitFirst, class VisitStep>
void walk_block(const StreamPlan& plan, int klow, const std::vector<int>& digits_init, VisitFirst&& first,
                VisitStep&& step) {
    const int n = plan.n;
    std::vector<int> digit = digits_init;
    std::vector<int> s(static_cast<size_t>(plan.plaq_count));
    for (int p = 0; p < plan.plaq_count; ++p) s[static_cast<size_t>(p)] = plan.plaq_const[static_cast<size_t>(p)];
    for (int i = 0; i < plan.k; ++i)
        for (int t = plan.dig_off[static_cast<size_t>(i)]; t < plan.dig_off[static_cast<size_t>(i) + 1]; ++t) {
            int p = plan.dig_plaq[static_cast<size_t>(t)];
            int& sp = s[static_cast<size_t>(p)];
            sp = ((sp + plan.dig_sigma[static_cast<size_t>(t)] * digit[static_cast<size_t>(i)]) % n + n) % n;
        }
    std::vector<int> dconst(static_cast<size_t>(plan.plaq_count), 0);
    if (plan.dual)
        for (int p = 0; p < plan.plaq_count; ++p)
            dconst[static_cast<size_t>(p)] =
                ((plan.plaq_const_b[static_cast<size_t>(p)] - plan.plaq_const[static_cast<size_t>(p)]) % n + n) % n;

    double w = plan.weight_from_residues(s, false);
    double wb = plan.dual ? plan.weight_from_residues(s, true) : 0.0;
    first(digit, w, wb);

    std::vector<int> f(static_cast<size_t>(klow) + 1);
    std::vector<int> o(static_cast<size_t>(klow), 1);
    for (int i = 0; i <= klow; ++i) f[static_cast<size_t>(i)] = i;

    long steps_since_anchor = 0;
    while (true) {
        int j = f[0];
        f[0] = 0;
        if (j == klow) break;
        int dir = o[static_cast<size_t>(j)];
        digit[static_cast<size_t>(j)] += dir;
        for (int t = plan.dig_off[static_cast<size_t>(j)]; t < plan.dig_off[static_cast<size_t>(j) + 1]; ++t) {
            int p = plan.dig_plaq[static_cast<size_t>(t)];
            int& sp = s[static_cast<size_t>(p)];
            int so = sp;
            sp += plan.dig_sigma[static_cast<size_t>(t)] * dir;
            if (sp >= n) sp -= n;
            if (sp < 0) sp += n;
            w *= plan.ratio[static_cast<size_t>(so * n + sp)];
            if (plan.dual) {
                int dob = so + dconst[static_cast<size_t>(p)];
                if (dob >= n) dob -= n;
                int dnb = sp + dconst[static_cast<size_t>(p)];
                if (dnb >= n) dnb -= n;
                wb *= plan.ratio[static_cast<size_t>(dob * n + dnb)];
            }
        }
        if (++steps_since_anchor >= 16384) { // cap multiplicative drift
            w = plan.weight_from_residues(s, false);
            if (plan.dual) wb = plan.weight_from_residues(s, true);
            steps_since_anchor = 0;
        }
        int dj = digit[static_cast<size_t>(j)];
        if (dj == 0 || dj == n - 1) {
            o[static_cast<size_t>(j)] = -o[static_cast<size_t>(j)];
            f[static_cast<size_t>(j)] = f[static_cast<size_t>(j) + 1];
            f[static_cast<size_t>(j) + 1] = j + 1;
        }
        step(j, dir, w, wb);
    }
}

struct BlockLayout {
    int klow = 0;
    long long blocks = 1;
    long long per_block = 1;
};

// Fixed decomposition into at most ~4096 blocks of >= ~16k states; the block
// structure depends only on the problem, never on the thread count.
BlockLayout block_layout(const StreamPlan& plan) {
    BlockLayout bl;
    bl.klow = 0;
    long long per = 1;
    while (bl.klow < plan.k && per < (1 << 14)) {
        per *= plan.n;
        ++bl.klow;
    }
    long long blocks = 1;
    for (int i = bl.klow; i < plan.k; ++i) blocks *= plan.n;
    while (blocks > 4096 && bl.klow < plan.k) {
        blocks /= plan.n;
        per *= plan.n;
        ++bl.klow;
    }
    bl.blocks = blocks;
    bl.per_block = per;
    return bl;
}

std::vector<int> block_digits(const StreamPlan& plan, const BlockLayout& bl, long long block) {
    std::vector<int> digits(static_cast<size_t>(plan.k), 0);
    for (int i = bl.klow; i < plan.k; ++i) {
        digits[static_cast<size_t>(i)] = static_cast<int>(block % plan.n);
        block /= plan.n;
    }
    return digits;
}

void run_blocks(const StreamPlan& plan, const BlockLayout& bl, int threads,
                const std::function<void(long long, const std::vector<int>&)>& run_one) {
    if (threads <= 1 || bl.blocks == 1) {
        for (long long b = 0; b < bl.blocks; ++b) run_one(b, block_digits(plan, bl, b));
        return;
    }
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&]() {
            while (true) {
                long long b = next.fetch_add(1);
                if (b >= bl.blocks) break;
                run_one(b, block_digits(plan, bl, b));
            }
        });
    for (auto& th : pool) th.join();
}

double tree_sum(const std::vector<double>& xs, size_t lo, size_t hi) {
    if (hi - lo == 1) return xs[lo];
    size_t mid = lo + (hi - lo) / 2;
    return tree_sum(xs, lo, mid) + tree_sum(xs, mid, hi);
}

double tree_sum(const std::vector<double>& xs) { return xs.empty() ? 0.0 : tree_sum(xs, 0, xs.size()); }

struct Kahan {
    double s = 0, c = 0;
    inline void add(double v) {
        double y = v - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

} // namespace

GibbsResult exact_gibbs(const EnumeratedSpace& space, double beta, long long cap) {
    if (space.total_states() > cap)
        throw std::runtime_error("exact_gibbs: state cap exceeded (" + std::to_string(space.total_states()) + " > " +
                                 std::to_string(cap) + ")");
    StreamPlan plan = make_plan(space, beta, nullptr);
    BlockLayout bl = block_layout(plan);
    GibbsResult out;
    out.measure.p.assign(static_cast<size_t>(space.total_states()), 0.0);
    std::vector<long long> stride(static_cast<size_t>(plan.k));
    long long st = 1;
    for (int i = 0; i < plan.k; ++i) {
        stride[static_cast<size_t>(i)] = st;
        st *= plan.n;
    }
    run_blocks(plan, bl, 1, [&](long long, const std::vector<int>& init) {
        long long lin = 0;
        for (int i = 0; i < plan.k; ++i) lin += init[static_cast<size_t>(i)] * stride[static_cast<size_t>(i)];
        out.measure.p[static_cast<size_t>(lin)] = 0; // set below via visits
        walk_block(
            plan, bl.klow, init,
            [&](const std::vector<int>&, double w, double) { out.measure.p[static_cast<size_t>(lin)] = w; },
            [&](int j, int dir, double w, double) {
                lin += dir * stride[static_cast<size_t>(j)];
                out.measure.p[static_cast<size_t>(lin)] = w;
            });
    });
    double total = tree_sum(out.measure.p);
    out.z = total / static_cast<double>(space.total_states());
    for (double& v : out.measure.p) v /= total;
    return out;
}

cplx exact_expectation(const EnumeratedSpace& space, const DiscreteMeasure& mu,
                       const std::function<cplx(const GaugeConfig&)>& f) {
    if (mu.size() != space.total_states()) throw std::invalid_argument("exact_expectation: measure/space mismatch");
    cplx acc = 0;
    for (long long s = 0; s < space.total_states(); ++s)
        acc += mu.p[static_cast<size_t>(s)] * f(space.config_for_state(s));
    return acc;
}

cplx exact_expectation_digits(const EnumeratedSpace& space, const DiscreteMeasure& mu,
                              const std::function<cplx(const std::vector<int>&)>& f) {
    if (mu.size() != space.total_states()) throw std::invalid_argument("exact_expectation: measure/space mismatch");
    cplx acc = 0;
    for (long long s = 0; s < space.total_states(); ++s) acc += mu.p[static_cast<size_t>(s)] * f(space.decode(s));
    return acc;
}

DiscreteMeasure exact_marginal(const EnumeratedSpace& space, const DiscreteMeasure& mu, const std::vector<int>& edges) {
    if (mu.size() != space.total_states()) throw std::invalid_argument("exact_marginal: measure/space mismatch");
    int n = space.group().n;
    std::vector<int> pos;
    for (int e : edges) {
        int p = space.free_position(e);
        if (p < 0) throw std::invalid_argument("exact_marginal: edge is not a free edge");
        pos.push_back(p);
    }
    long long msize = 1;
    for (size_t i = 0; i < pos.size(); ++i) msize *= n;
    DiscreteMeasure out;
    out.p.assign(static_cast<size_t>(msize), 0.0);
    for (long long s = 0; s < space.total_states(); ++s) {
        std::vector<int> d = space.decode(s);
        long long idx = 0;
        for (size_t i = pos.size(); i-- > 0;) idx = idx * n + d[static_cast<size_t>(pos[i])];
        out.p[static_cast<size_t>(idx)] += mu.p[static_cast<size_t>(s)];
    }
    return out;
}

DiscreteMeasure exact_conditional(const EnumeratedSpace& space, const DiscreteMeasure& mu,
                                  const std::vector<std::pair<int, int>>& fixed_edge_digits) {
    if (mu.size() != space.total_states()) throw std::invalid_argument("exact_conditional: measure/space mismatch");
    int n = space.group().n;
    std::vector<int> fixed_pos(static_cast<size_t>(space.digit_count()), -1);
    for (auto [e, v] : fixed_edge_digits) {
        int p = space.free_position(e);
        if (p < 0) throw std::invalid_argument("exact_conditional: edge is not a free edge");
        fixed_pos[static_cast<size_t>(p)] = v;
    }
    std::vector<int> rest;
    for (int i = 0; i < space.digit_count(); ++i)
        if (fixed_pos[static_cast<size_t>(i)] < 0) rest.push_back(i);
    long long csize = 1;
    for (size_t i = 0; i < rest.size(); ++i) csize *= n;
    DiscreteMeasure out;
    out.p.assign(static_cast<size_t>(csize), 0.0);
    for (long long s = 0; s < space.total_states(); ++s) {
        std::vector<int> d = space.decode(s);
        bool match = true;
        for (int i = 0; i < space.digit_count() && match; ++i)
            if (fixed_pos[static_cast<size_t>(i)] >= 0 && d[static_cast<size_t>(i)] != fixed_pos[static_cast<size_t>(i)])
                match = false;
        if (!match) continue;
        long long idx = 0;
        for (size_t i = rest.size(); i-- > 0;) idx = idx * n + d[static_cast<size_t>(rest[i])];
        out.p[static_cast<size_t>(idx)] += mu.p[static_cast<size_t>(s)];
    }
    double t = out.total();
    if (t <= 0) throw std::runtime_error("exact_conditional: conditioning on a zero-probability assignment");
    for (double& v : out.p) v /= t;
    return out;
}

WindowSums exact_window_sums(const EnumeratedSpace& space, double beta, const std::vector<int>& window_edges,
                             long long cap, int threads) {
    if (space.total_states() > cap)
        throw std::runtime_error("exact_window_sums: state cap exceeded (" + std::to_string(space.total_states()) +
                                 " > " + std::to_string(cap) + ")");
    int n = space.group().n;
    int k = space.digit_count();
    std::vector<int> wpos;
    long long wsize = 1;
    for (int e : window_edges) {
        int p = space.free_position(e);
        if (p < 0) throw std::invalid_argument("exact_window_sums: window edge is not free");
        wpos.push_back(p);
        wsize *= n;
    }

    WindowSums out;
    out.states = space.total_states();
    out.sums.assign(static_cast<size_t>(wsize), 0.0);

    // Fast layout: window digits pinned to the block-fixed top positions, so a
    // block contributes to exactly one bucket and the hot loop is a plain
    // running sum with compensated flushes.
    if (wsize <= (1 << 20) && static_cast<int>(wpos.size()) <= k) {
        std::vector<int> perm;
        std::vector<bool> is_window(static_cast<size_t>(k), false);
        for (int p : wpos) is_window[static_cast<size_t>(p)] = true;
        for (int i = 0; i < k; ++i)
            if (!is_window[static_cast<size_t>(i)]) perm.push_back(i);
        int klow_max = static_cast<int>(perm.size());
        for (int p : wpos) perm.push_back(p); // window at the top, little-endian within itself
        StreamPlan plan = make_plan(space, beta, nullptr, perm);

        // block-fixed digits: at least the window; extend for parallel grain
        int t = k - klow_max;
        long long blocks = wsize;
        while (klow_max - (t - static_cast<int>(wpos.size())) > 14 && blocks < 64) {
            ++t;
            blocks *= n;
        }
        BlockLayout bl;
        bl.klow = k - t;
        bl.blocks = blocks;
        bl.per_block = 1;
        for (int i = 0; i < bl.klow; ++i) bl.per_block *= n;

        std::vector<double> block_sums(static_cast<size_t>(bl.blocks), 0.0);
        run_blocks(plan, bl, threads, [&](long long b, const std::vector<int>& init) {
            Kahan acc;
            double seg = 0;
            long count = 0;
            walk_block(
                plan, bl.klow, init, [&](const std::vector<int>&, double w, double) { seg = w; },
                [&](int, int, double w, double) {
                    seg += w;
                    if (++count >= 16384) {
                        acc.add(seg);
                        seg = 0;
                        count = 0;
                    }
                });
            acc.add(seg);
            block_sums[static_cast<size_t>(b)] = acc.s;
        });
        // bucket of a block: its window digits (the lowest of the top block digits)
        std::vector<std::vector<double>> grouped(static_cast<size_t>(wsize));
        for (long long b = 0; b < bl.blocks; ++b) {
            long long widx = 0;
            std::vector<int> digits(static_cast<size_t>(k), 0);
            long long tmp = b;
            for (int i = bl.klow; i < k; ++i) {
                digits[static_cast<size_t>(i)] = static_cast<int>(tmp % n);
                tmp /= n;
            }
            long long wmul = 1;
            for (size_t wi = 0; wi < wpos.size(); ++wi) {
                widx += digits[static_cast<size_t>(klow_max + static_cast<int>(wi))] * wmul;
                wmul *= n;
            }
            grouped[static_cast<size_t>(widx)].push_back(block_sums[static_cast<size_t>(b)]);
        }
        for (long long j = 0; j < wsize; ++j) out.sums[static_cast<size_t>(j)] = tree_sum(grouped[static_cast<size_t>(j)]);
        out.z = tree_sum(out.sums);
        return out;
    }

    // general layout: track the bucket index inside the walk
    StreamPlan plan = make_plan(space, beta, nullptr);
    BlockLayout bl = block_layout(plan);
    std::vector<long long> wstride(static_cast<size_t>(k), 0);
    long long ws = 1;
    for (int p : wpos) {
        wstride[static_cast<size_t>(p)] = ws;
        ws *= n;
    }
    std::vector<std::vector<double>> block_sums(static_cast<size_t>(bl.blocks));
    run_blocks(plan, bl, threads, [&](long long b, const std::vector<int>& init) {
        std::vector<Kahan> acc(static_cast<size_t>(wsize));
        long long widx = 0;
        for (int i = 0; i < k; ++i) widx += init[static_cast<size_t>(i)] * wstride[static_cast<size_t>(i)];
        walk_block(
            plan, bl.klow, init,
            [&](const std::vector<int>&, double w, double) { acc[static_cast<size_t>(widx)].add(w); },
            [&](int j, int dir, double w, double) {
                widx += dir * wstride[static_cast<size_t>(j)];
                acc[static_cast<size_t>(widx)].add(w);
            });
        std::vector<double> sums(static_cast<size_t>(wsize));
        for (long long i = 0; i < wsize; ++i) sums[static_cast<size_t>(i)] = acc[static_cast<size_t>(i)].s;
        block_sums[static_cast<size_t>(b)] = std::move(sums);
    });
    std::vector<double> per_block(static_cast<size_t>(bl.blocks));
    for (long long j = 0; j < wsize; ++j) {
        for (long long b = 0; b < bl.blocks; ++b)
            per_block[static_cast<size_t>(b)] = block_sums[static_cast<size_t>(b)][static_cast<size_t>(j)];
        out.sums[static_cast<size_t>(j)] = tree_sum(per_block);
    }
    out.z = tree_sum(out.sums);
    return out;
}

double exact_tv_streaming(const LatticeGeometry& geom, const GroupSpec& group, double beta,
                          const BoundaryCondition& bc_a, const BoundaryCondition& bc_b, long long cap, int threads) {
    EnumeratedSpace space(geom, group, bc_a);
    EnumeratedSpace space_b(geom, group, bc_b);
    if (space.free_edge_ids() != space_b.free_edge_ids())
        throw std::invalid_argument("exact_tv_streaming: boundary conditions do not share a free-edge set");
    if (space.total_states() > cap) throw std::runtime_error("exact_tv_streaming: state cap exceeded");
    StreamPlan plan = make_plan(space, beta, &bc_b);
    BlockLayout bl = block_layout(plan);

    std::vector<double> za(static_cast<size_t>(bl.blocks)), zb(static_cast<size_t>(bl.blocks));
    run_blocks(plan, bl, threads, [&](long long b, const std::vector<int>& init) {
        Kahan sa, sb;
        walk_block(
            plan, bl.klow, init,
            [&](const std::vector<int>&, double w, double w2) {
                sa.add(w);
                sb.add(w2);
            },
            [&](int, int, double w, double w2) {
                sa.add(w);
                sb.add(w2);
            });
        za[static_cast<size_t>(b)] = sa.s;
        zb[static_cast<size_t>(b)] = sb.s;
    });
    double total_a = tree_sum(za), total_b = tree_sum(zb);

    std::vector<double> l1(static_cast<size_t>(bl.blocks));
    run_blocks(plan, bl, threads, [&](long long b, const std::vector<int>& init) {
        Kahan s;
        walk_block(
            plan, bl.klow, init,
            [&](const std::vector<int>&, double w, double w2) { s.add(std::abs(w / total_a - w2 / total_b)); },
            [&](int, int, double w, double w2) { s.add(std::abs(w / total_a - w2 / total_b)); });
        l1[static_cast<size_t>(b)] = s.s;
    });
    return 0.5 * tree_sum(l1);
}

} // namespace lgt
