#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qflow/frames.hpp"
#include "qflow/igso3.hpp"
#include "qflow/interpolants.hpp"
#include "qflow/rng.hpp"
#include "qflow/solvers.hpp"

namespace qflow {

// Small per-frame MLP endpoint predictor: input is
// [x_t (3), q_t (4), t (1)], output is [x1 (3), raw q1 (4)]. The raw
// quaternion head is normalized; an exactly-zero raw vector maps to identity.
struct ModelArch {
    std::vector<int> widths{8, 64, 64, 7};

    bool operator==(const ModelArch&) const = default;
};

void validate_arch(const ModelArch& arch);

// Layout of values: per layer, weight matrix row-major [out][in], then bias.
struct ModelParams {
    ModelArch arch;
    std::vector<double> values;
};

std::size_t param_count(const ModelArch& arch);
ModelParams zero_params(const ModelArch& arch);
ModelParams init_params(const ModelArch& arch, Rng& rng);

std::pair<Vec3, UnitQuat> model_forward(const ModelParams& params, const Vec3& x_t, const UnitQuat& q_t,
                                        double t);

// Wraps params (by value) as a solver-facing endpoint predictor.
EndpointModel make_endpoint_model(ModelParams params);

// One training item: a chain (length >= 1) observed at a shared time t.
struct TrainingItem {
    std::vector<InterpolantSample> state;
    std::vector<FrameTransform> target;
    double t = 0.0;
};

struct LossOptions {
    double aux_weight = 0.0;      // alpha; 0 disables the auxiliary term
    double aux_threshold = 0.5;   // zeta; aux applies only when t < zeta
    double min_t = kInterpolantMinT;
    IdealResidue ideal{};
};

// Mean over all frames of |v - v_theta|^2 + |omega - omega_theta|^2, plus the
// chain auxiliary loss when enabled. Throws std::runtime_error (naming the
// offending item) if the loss goes non-finite.
double flow_loss(const ModelParams& params, const std::vector<TrainingItem>& batch,
                 const LossOptions& opt = {});

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;  // congruent to ModelParams::values
};

// Exact reverse-mode gradient of flow_loss, differentiated through the
// quaternion normalization, Hamilton products and the log map (including its
// small-angle branch).
LossGrad loss_gradient(const ModelParams& params, const std::vector<TrainingItem>& batch,
                       const LossOptions& opt = {});

enum class Optimizer { Adam, Sgd };

struct TrainConfig {
    int epochs = 500;
    int batch_size = 128;
    double learning_rate = 1e-3;
    // The 1/(1-t) factor in the velocity targets makes gradients heavy-tailed:
    // Adam plus norm clipping handles that; plain gradient descent (with
    // optional momentum) stays available but needs far smaller rates.
    Optimizer optimizer = Optimizer::Adam;
    double momentum = 0.0;     // SGD only
    double grad_clip = 1.0;    // global L2 norm ceiling; <= 0 disables
    double lr_final_fraction = 1.0;  // < 1: cosine-decay to learning_rate * fraction
    double aux_weight = 0.0;
    double aux_threshold = 0.5;
    double min_t = kInterpolantMinT;
    uint64_t seed = 0;
    IgsoConfig igso{};
    ModelArch arch{};
};

struct TrainResult {
    ModelParams params;
    std::vector<double> loss_trace;  // mean batch loss per epoch
};

// Algorithm-1 training on a dataset of chains (single frames are chains of
// length 1): per visit, draw t ~ U[min_t, 1-min_t], fresh noise from the
// priors, interpolate, and take a gradient step. Datasets smaller than the
// batch size are drawn with replacement so each step still sees a full batch.
TrainResult train_qflow(const std::vector<std::vector<FrameTransform>>& dataset, const TrainConfig& cfg,
                        Rng& rng);
TrainResult train_qflow(const std::vector<FrameTransform>& dataset, const TrainConfig& cfg, Rng& rng);

// Warm-start continuation used by rectification and checkpoint resume.
TrainResult train_qflow_from(ModelParams params, const std::vector<std::vector<FrameTransform>>& dataset,
                             const TrainConfig& cfg, Rng& rng);

struct CouplingPair {
    FrameTransform t0;
    FrameTransform t1;
};

// Draws noise from the priors and integrates it to a sample, keeping the
// exact noise used (Algorithm 3, pair creation).
std::vector<CouplingPair> generate_pairs(const ModelParams& params, int count, const SolverConfig& solver,
                                         const IgsoConfig& igso, Rng& rng);

struct FilterStats {
    int kept = 0;
    int dropped = 0;
};

std::vector<CouplingPair> filter_pairs(const std::vector<CouplingPair>& pairs,
                                       const std::function<bool(const FrameTransform&)>& keep,
                                       FilterStats* stats = nullptr);

// Continues training from params on the fixed couplings (the only difference
// from Algorithm 1). An empty pair list is a no-op returning params unchanged.
TrainResult rectify(const ModelParams& params, const std::vector<CouplingPair>& pairs,
                    const TrainConfig& cfg, Rng& rng);

// --- checkpoint io ---------------------------------------------------------

struct TrainMeta {
    uint64_t seed = 0;
    int epochs = 0;
    std::vector<double> loss_trace;
};

void save_checkpoint(const std::string& path, const ModelParams& params, const TrainMeta& meta);

struct Checkpoint {
    ModelParams params;
    TrainMeta meta;
};

Checkpoint load_checkpoint(const std::string& path);

// --- built-in toy tasks ----------------------------------------------------

// Four well-separated frame modes; the seeded desk-scale training target.
std::vector<FrameTransform> toy_four_mode_dataset();

// The seeded 4-mode toy distribution: a fixed sample spread around the four
// mode centers (per_mode frames each, translation sigma / rotation tangent
// sigma as given). Continuous marginals make the distribution-level checks
// meaningful at finite training quality.
std::vector<FrameTransform> toy_four_mode_cloud(int per_mode = 16, double sigma_x = 0.4,
                                                double sigma_rot = 0.25, uint64_t seed = 424242);

// Two antipodal translation clusters with two distinct rotations: independent
// noise-data coupling necessarily crosses, making the transport-cost drop
// after rectification visible.
std::vector<FrameTransform> toy_crossing_dataset();

// Distance from a frame to the nearest mode of a dataset: translation
// distance plus rotation geodesic angle.
double nearest_mode_distance(const FrameTransform& frame, const std::vector<FrameTransform>& modes);

}  // namespace qflow
