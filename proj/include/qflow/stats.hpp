#pragma once

#include <vector>

namespace qflow {

// Two-sample Kolmogorov-Smirnov statistic: sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Upper critical value of the chi-square distribution (Wilson-Hilferty
// approximation); alpha is the tail probability, e.g. 0.01.
double chi_square_critical(int dof, double alpha);

struct MeanStderr {
    double mean = 0.0;
    double se = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& xs);

}  // namespace qflow
