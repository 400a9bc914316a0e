#include "qflow/igso3.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qflow {

namespace {

void check_config(const IgsoConfig& cfg) {
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("IgsoConfig: epsilon must be > 0");
    if (cfg.series_terms < 1) throw std::invalid_argument("IgsoConfig: series_terms must be >= 1");
    if (cfg.grid_size < 2) throw std::invalid_argument("IgsoConfig: grid_size must be >= 2");
}

}  // namespace

double igso3_angle_density(double phi, const IgsoConfig& cfg) {
    check_config(cfg);
    if (!(phi >= 0.0 && phi <= kPi)) throw std::domain_error("igso3_angle_density: phi outside [0, pi]");

    const double eps2 = cfg.epsilon * cfg.epsilon;
    const double sin_half = std::sin(0.5 * phi);
    double series = 0.0;
    for (int l = 0; l < cfg.series_terms; ++l) {
        const double w = (2.0 * l + 1.0) * std::exp(-l * (l + 1.0) * eps2);
        if (w < 1e-18 && l > 0) break;  // fully converged at double precision
        // sin((l+1/2) phi)/sin(phi/2) -> 2l+1 as phi -> 0
        const double ratio = phi < 1e-9 ? 2.0 * l + 1.0 : std::sin((l + 0.5) * phi) / sin_half;
        series += w * ratio;
    }
    const double f = (1.0 - std::cos(phi)) / kPi * series;
    return f < 0.0 ? 0.0 : f;
}

Vec3 sample_gaussian_r3(Rng& rng) {
    const double a = rng.gaussian();
    const double b = rng.gaussian();
    const double c = rng.gaussian();
    return {a, b, c};
}

Vec3 sample_unit_axis(Rng& rng) {
    for (;;) {
        const Vec3 g = sample_gaussian_r3(rng);
        const double n = g.norm();
        if (n > 1e-6) return g / n;
    }
}

UnitQuat sample_uniform_so3(Rng& rng) {
    for (;;) {
        const double s = rng.gaussian();
        const Vec3 u = sample_gaussian_r3(rng);
        const Quat q{s, u};
        if (q.norm() > 1e-6) return UnitQuat::normalize(q);
    }
}

IgsoSampler::IgsoSampler(IgsoConfig cfg) : cfg_(cfg) {
    check_config(cfg_);
    const int n = cfg_.grid_size;
    phi_.resize(n);
    cdf_.resize(n);
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) {
        phi_[i] = kPi * static_cast<double>(i) / (n - 1);
        f[i] = igso3_angle_density(phi_[i], cfg_);
    }
    // cumulative trapezoid, normalized so the table ends at exactly 1
    cdf_[0] = 0.0;
    for (int i = 1; i < n; ++i) {
        cdf_[i] = cdf_[i - 1] + 0.5 * (f[i] + f[i - 1]) * (phi_[i] - phi_[i - 1]);
    }
    const double total = cdf_.back();
    if (!(total > 0.0)) throw std::runtime_error("IgsoSampler: degenerate density (zero mass)");
    for (double& c : cdf_) c /= total;
    cdf_.back() = 1.0;
}

double IgsoSampler::sample_angle(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    const int hi = std::min<int>(static_cast<int>(it - cdf_.begin()), static_cast<int>(cdf_.size()) - 1);
    if (hi == 0) return phi_[0];
    const int lo = hi - 1;
    const double den = cdf_[hi] - cdf_[lo];
    if (den <= 0.0) return phi_[hi];
    const double w = (u - cdf_[lo]) / den;
    return phi_[lo] + w * (phi_[hi] - phi_[lo]);
}

UnitQuat IgsoSampler::sample(Rng& rng) const {
    const Vec3 axis = sample_unit_axis(rng);
    const double angle = sample_angle(rng);
    return exp_map(axis * angle);
}

}  // namespace qflow
