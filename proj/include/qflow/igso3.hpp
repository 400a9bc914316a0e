#pragma once

#include <vector>

#include "qflow/quat.hpp"
#include "qflow/rng.hpp"

namespace qflow {

// Noise prior on rotations: isotropic Gaussian on SO(3), axis uniform on the
// sphere, angle from the truncated heat-kernel series.
struct IgsoConfig {
    double epsilon = 1.5;    // concentration of the rotation noise prior
    int series_terms = 2000; // truncation of the l-series
    int grid_size = 8192;    // CDF table resolution
};

// Angle density f(phi) on [0, pi]. Throws std::domain_error outside the range.
// Tiny negatives from truncation are clamped to 0.
double igso3_angle_density(double phi, const IgsoConfig& cfg);

Vec3 sample_gaussian_r3(Rng& rng);
Vec3 sample_unit_axis(Rng& rng);

// 4 standard Gaussians normalized: uniform on S^3.
UnitQuat sample_uniform_so3(Rng& rng);

// Precomputes the inverse-CDF table once; immutable afterwards and shareable
// across threads.
class IgsoSampler {
public:
    explicit IgsoSampler(IgsoConfig cfg = {});

    double sample_angle(Rng& rng) const;
    UnitQuat sample(Rng& rng) const;

    const IgsoConfig& config() const { return cfg_; }
    const std::vector<double>& grid() const { return phi_; }
    const std::vector<double>& cdf() const { return cdf_; }

private:
    IgsoConfig cfg_;
    std::vector<double> phi_;
    std::vector<double> cdf_;
};

}  // namespace qflow
