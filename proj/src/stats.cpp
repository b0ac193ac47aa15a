#include "lgt/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace lgt {

namespace {
// solve A x = b in place, A symmetric positive definite, tiny dimension
bool solve_spd(std::vector<double>& a, int n, std::vector<double>& b) {
    for (int i = 0; i < n; ++i) {
        int piv = i;
        for (int r = i + 1; r < n; ++r)
            if (std::abs(a[static_cast<size_t>(r * n + i)]) > std::abs(a[static_cast<size_t>(piv * n + i)])) piv = r;
        if (std::abs(a[static_cast<size_t>(piv * n + i)]) < 1e-300) return false;
        if (piv != i) {
            for (int c = 0; c < n; ++c) std::swap(a[static_cast<size_t>(i * n + c)], a[static_cast<size_t>(piv * n + c)]);
            std::swap(b[static_cast<size_t>(i)], b[static_cast<size_t>(piv)]);
        }
        double d = a[static_cast<size_t>(i * n + i)];
        for (int r = 0; r < n; ++r) {
            if (r == i) continue;
            double f = a[static_cast<size_t>(r * n + i)] / d;
            for (int c = 0; c < n; ++c) a[static_cast<size_t>(r * n + c)] -= f * a[static_cast<size_t>(i * n + c)];
            b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(i)];
        }
    }
    for (int i = 0; i < n; ++i) b[static_cast<size_t>(i)] /= a[static_cast<size_t>(i * n + i)];
    return true;
}

// invert SPD matrix by solving against unit vectors
bool invert_spd(const std::vector<double>& a_in, int n, std::vector<double>& inv) {
    inv.assign(static_cast<size_t>(n * n), 0.0);
    for (int c = 0; c < n; ++c) {
        std::vector<double> a = a_in;
        std::vector<double> b(static_cast<size_t>(n), 0.0);
        b[static_cast<size_t>(c)] = 1.0;
        if (!solve_spd(a, n, b)) return false;
        for (int r = 0; r < n; ++r) inv[static_cast<size_t>(r * n + c)] = b[static_cast<size_t>(r)];
    }
    return true;
}
} // namespace

LinearFit weighted_least_squares(const std::vector<std::vector<double>>& rows, const std::vector<double>& y,
                                 const std::vector<double>& sigma) {
    LinearFit fit;
    size_t m = rows.size();
    if (m == 0 || y.size() != m || sigma.size() != m) return fit;
    int k = static_cast<int>(rows[0].size());
    if (static_cast<long>(m) < k) return fit;
    std::vector<double> ata(static_cast<size_t>(k * k), 0.0), atb(static_cast<size_t>(k), 0.0);
    for (size_t i = 0; i < m; ++i) {
        double s = sigma[i];
        if (!(s > 0)) return fit;
        double w = 1.0 / (s * s);
        for (int a = 0; a < k; ++a) {
            atb[static_cast<size_t>(a)] += w * rows[i][static_cast<size_t>(a)] * y[i];
            for (int b = 0; b < k; ++b)
                ata[static_cast<size_t>(a * k + b)] += w * rows[i][static_cast<size_t>(a)] * rows[i][static_cast<size_t>(b)];
        }
    }
    std::vector<double> cov;
    if (!invert_spd(ata, k, cov)) return fit;
    fit.coef.assign(static_cast<size_t>(k), 0.0);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) fit.coef[static_cast<size_t>(a)] += cov[static_cast<size_t>(a * k + b)] * atb[static_cast<size_t>(b)];
    fit.cov = cov;
    fit.coef_err.resize(static_cast<size_t>(k));
    for (int a = 0; a < k; ++a) fit.coef_err[static_cast<size_t>(a)] = std::sqrt(std::max(0.0, cov[static_cast<size_t>(a * k + a)]));
    fit.chi2 = 0;
    for (size_t i = 0; i < m; ++i) {
        double pred = 0;
        for (int a = 0; a < k; ++a) pred += rows[i][static_cast<size_t>(a)] * fit.coef[static_cast<size_t>(a)];
        double z = (y[i] - pred) / sigma[i];
        fit.chi2 += z * z;
    }
    fit.ndof = static_cast<long>(m) - k;
    fit.valid = true;
    return fit;
}

CovEstimate jackknife_covariance(const std::vector<double>& f, const std::vector<double>& g, int blocks) {
    CovEstimate out;
    size_t n = f.size();
    if (g.size() != n || n < 4) return out;
    int nb = static_cast<int>(std::min<size_t>(static_cast<size_t>(blocks), n / 2));
    size_t bs = n / static_cast<size_t>(nb);
    n = bs * static_cast<size_t>(nb);
    double sf = 0, sg = 0, sfg = 0;
    for (size_t i = 0; i < n; ++i) {
        sf += f[i];
        sg += g[i];
        sfg += f[i] * g[i];
    }
    auto cov_without = [&](int skip) {
        double tf = sf, tg = sg, tfg = sfg;
        for (size_t i = static_cast<size_t>(skip) * bs; i < (static_cast<size_t>(skip) + 1) * bs; ++i) {
            tf -= f[i];
            tg -= g[i];
            tfg -= f[i] * g[i];
        }
        double m = static_cast<double>(n - bs);
        return tfg / m - (tf / m) * (tg / m);
    };
    double full = sfg / static_cast<double>(n) - (sf / static_cast<double>(n)) * (sg / static_cast<double>(n));
    double mean_j = 0;
    std::vector<double> jk(static_cast<size_t>(nb));
    for (int b = 0; b < nb; ++b) {
        jk[static_cast<size_t>(b)] = cov_without(b);
        mean_j += jk[static_cast<size_t>(b)];
    }
    mean_j /= nb;
    double var = 0;
    for (int b = 0; b < nb; ++b) var += (jk[static_cast<size_t>(b)] - mean_j) * (jk[static_cast<size_t>(b)] - mean_j);
    var *= static_cast<double>(nb - 1) / static_cast<double>(nb);
    out.cov = full;
    out.err = std::sqrt(std::max(0.0, var));
    return out;
}

double pairwise_sum(const std::vector<double>& xs) {
    if (xs.empty()) return 0;
    std::vector<double> cur = xs;
    while (cur.size() > 1) {
        std::vector<double> nxt((cur.size() + 1) / 2);
        for (size_t i = 0; i + 1 < cur.size(); i += 2) nxt[i / 2] = cur[i] + cur[i + 1];
        if (cur.size() % 2) nxt.back() = cur.back();
        cur = std::move(nxt);
    }
    return cur[0];
}

} // namespace lgt
