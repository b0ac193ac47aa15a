#pragma once

#include <vector>

namespace lgt {

// y ~ X b with per-point standard deviations; normal equations (few columns)
struct LinearFit {
    std::vector<double> coef;
    std::vector<double> coef_err;
    std::vector<double> cov; // row-major covariance of coefficients
    double chi2 = 0;
    long ndof = 0;
    bool valid = false;
};

LinearFit weighted_least_squares(const std::vector<std::vector<double>>& rows, const std::vector<double>& y,
                                 const std::vector<double>& sigma);

// covariance of two series with a jackknife error over contiguous blocks
struct CovEstimate {
    double cov = 0;
    double err = 0;
};
CovEstimate jackknife_covariance(const std::vector<double>& f, const std::vector<double>& g, int blocks = 50);

double pairwise_sum(const std::vector<double>& xs);

} // namespace lgt
