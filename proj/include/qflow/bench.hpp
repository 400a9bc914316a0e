#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qflow/model.hpp"
#include "qflow/stats.hpp"

namespace qflow {

// --- round-trip stability (axis-angle -> representation -> axis-angle) ------

double roundtrip_quat(const Vec3& omega);
double roundtrip_matrix(const Vec3& omega);

struct RoundTripRecord {
    double delta = 0.0;  // phi = pi - delta
    double phi = 0.0;
    double quat_err = 0.0;    // mean L2 round-trip error over the trials
    double matrix_err = 0.0;
    int trials = 0;
};

struct RoundTripReport {
    std::vector<RoundTripRecord> records;

    bool quat_beats_matrix() const;
    double max_quat_err() const;
};

RoundTripReport run_roundtrip_bench(const std::vector<double>& angle_offsets, int trials_per_angle,
                                    Rng& rng);

void write_roundtrip_csv(std::ostream& os, const RoundTripReport& report);

// --- interpolant finiteness probe -------------------------------------------

struct NanProbeRow {
    double phi = 0.0;
    bool exp_finite = false;
    bool additive_finite = false;
};

// Evaluates both SLERP formats at t = 0.5 for pairs separated by phi
// (identity base, fixed axis, so the additive denominator is deterministic).
std::vector<NanProbeRow> probe_small_angle_nan(const std::vector<double>& phis);

void write_nan_probe_csv(std::ostream& os, const std::vector<NanProbeRow>& rows);

// --- rectification property checks --------------------------------------------

struct KsRecord {
    double t = 0.0;
    double ks_rotation = 0.0;     // rotation angle from identity
    double ks_translation = 0.0;  // translation norm
};

// Samples paths from both models over the same noise draws and compares state
// marginals at each requested t. Thresholds belong to the caller. Note that
// two successive flows only share their t = 0 and t = 1 marginals exactly;
// interior-t gaps reflect how much the rectified flow straightened the paths.
std::vector<KsRecord> verify_marginal_preservation(const ModelParams& model_before,
                                                   const ModelParams& model_after, int sample_count,
                                                   const std::vector<double>& time_grid,
                                                   const SolverConfig& solver, const IgsoConfig& igso,
                                                   Rng& rng);

// The marginal-preservation statement in its literal form: the interpolant
// process of `pairs` (the coupling a model was trained on) against the model's
// ODE started from the same pair noises, compared at each t. Valid at every t
// including 1. Use an unscheduled solver; the scheduler reparameterizes
// rotation time and shifts interior marginals by construction.
std::vector<KsRecord> verify_marginal_vs_interpolant(const ModelParams& model,
                                                     const std::vector<CouplingPair>& pairs,
                                                     const std::vector<double>& time_grid,
                                                     const SolverConfig& solver);

enum class CostKind { SquaredNorm, Norm };

const char* cost_kind_name(CostKind kind);

struct CostBreakdown {
    MeanStderr rotation;     // c(2 log(q0^-1 (x) q1))
    MeanStderr translation;  // c(x1 - x0)
    MeanStderr combined;
    int count = 0;
};

CostBreakdown transport_cost(const std::vector<CouplingPair>& pairs, CostKind kind);

struct TransportReport {
    CostBreakdown before;
    CostBreakdown after;
    CostKind kind = CostKind::SquaredNorm;

    // cost_after <= cost_before within two combined standard errors
    bool reduced_or_equal() const;
};

TransportReport verify_cost_reduction(const std::vector<CouplingPair>& pairs_before,
                                      const std::vector<CouplingPair>& pairs_after, CostKind kind);

// Nonconstant-speed variant: same comparison, but the caller generated pairs_after with
// scheduled (nonconstant-speed) integration.
TransportReport verify_scheduler_cost(const SchedulerConfig& cfg,
                                      const std::vector<CouplingPair>& pairs_before,
                                      const std::vector<CouplingPair>& pairs_after, CostKind kind);

void write_ks_csv(std::ostream& os, const std::vector<KsRecord>& records);
void write_transport_csv(std::ostream& os, const std::vector<TransportReport>& reports);

}  // namespace qflow
