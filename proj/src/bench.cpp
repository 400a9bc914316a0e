#include "qflow/bench.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace qflow {

double roundtrip_quat(const Vec3& omega) { return (omega - log_map(exp_map(omega))).norm(); }

double roundtrip_matrix(const Vec3& omega) { return (omega - mat_log(mat_exp(omega))).norm(); }

bool RoundTripReport::quat_beats_matrix() const {
    for (const RoundTripRecord& r : records)
        if (!(r.quat_err < r.matrix_err)) return false;
    return !records.empty();
}

double RoundTripReport::max_quat_err() const {
    double m = 0.0;
    for (const RoundTripRecord& r : records) m = std::max(m, r.quat_err);
    return m;
}

RoundTripReport run_roundtrip_bench(const std::vector<double>& angle_offsets, int trials_per_angle,
                                    Rng& rng) {
    if (trials_per_angle < 1) throw std::invalid_argument("run_roundtrip_bench: trials must be >= 1");
    RoundTripReport report;
    report.records.reserve(angle_offsets.size());
    for (double delta : angle_offsets) {
        const double phi = kPi - delta;
        if (!(phi > 0.0 && phi < kPi))
            throw std::invalid_argument("run_roundtrip_bench: offset must keep phi inside (0, pi)");
        RoundTripRecord rec;
        rec.delta = delta;
        rec.phi = phi;
        rec.trials = trials_per_angle;
        for (int i = 0; i < trials_per_angle; ++i) {
            const Vec3 omega = sample_unit_axis(rng) * phi;
            rec.quat_err += roundtrip_quat(omega);
            rec.matrix_err += roundtrip_matrix(omega);
        }
        rec.quat_err /= trials_per_angle;
        rec.matrix_err /= trials_per_angle;
        report.records.push_back(rec);
    }
    return report;
}

void write_roundtrip_csv(std::ostream& os, const RoundTripReport& report) {
    os << "delta,phi,quat_err_mean,matrix_err_mean,trials\n";
    char buf[160];
    for (const RoundTripRecord& r : report.records) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%d\n", r.delta, r.phi, r.quat_err,
                      r.matrix_err, r.trials);
        os << buf;
    }
}

std::vector<NanProbeRow> probe_small_angle_nan(const std::vector<double>& phis) {
    std::vector<NanProbeRow> rows;
    rows.reserve(phis.size());
    const UnitQuat q0 = UnitQuat::identity();
    const Vec3 axis{0.0, 0.0, 1.0};
    for (double phi : phis) {
        const UnitQuat q1 = exp_map(axis * phi);
        NanProbeRow row;
        row.phi = phi;
        row.exp_finite = is_finite(slerp_exp(q0, q1, 0.5).quat());
        row.additive_finite = is_finite(slerp_additive(q0, q1, 0.5));
        rows.push_back(row);
    }
    return rows;
}

void write_nan_probe_csv(std::ostream& os, const std::vector<NanProbeRow>& rows) {
    os << "phi,exp_format_finite,additive_format_finite\n";
    char buf[96];
    for (const NanProbeRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%d,%d\n", r.phi, r.exp_finite ? 1 : 0,
                      r.additive_finite ? 1 : 0);
        os << buf;
    }
}

std::vector<KsRecord> verify_marginal_preservation(const ModelParams& model_before,
                                                   const ModelParams& model_after, int sample_count,
                                                   const std::vector<double>& time_grid,
                                                   const SolverConfig& solver, const IgsoConfig& igso_cfg,
                                                   Rng& rng) {
    if (sample_count < 2) throw std::invalid_argument("verify_marginal_preservation: need >= 2 samples");
    validate_solver_config(solver);
    const IgsoSampler igso(igso_cfg);
    const EndpointModel before = make_endpoint_model(model_before);
    const EndpointModel after = make_endpoint_model(model_after);

    // grid times snap to solver steps
    std::vector<int> grid_steps;
    grid_steps.reserve(time_grid.size());
    for (double t : time_grid) {
        if (!(t >= 0.0 && t <= 1.0))
            throw std::invalid_argument("verify_marginal_preservation: grid t outside [0, 1]");
        grid_steps.push_back(static_cast<int>(std::lround(t * solver.steps)));
    }

    const std::size_t nt = time_grid.size();
    std::vector<std::vector<double>> angle_a(nt), angle_b(nt), trans_a(nt), trans_b(nt);
    const UnitQuat id = UnitQuat::identity();
    for (int i = 0; i < sample_count; ++i) {
        const FrameTransform t0{sample_gaussian_r3(rng), igso.sample(rng)};
        const auto trace_a = integrate_path_trace(before, t0, solver);
        const auto trace_b = integrate_path_trace(after, t0, solver);
        for (std::size_t k = 0; k < nt; ++k) {
            const FrameTransform& sa = trace_a[grid_steps[k]];
            const FrameTransform& sb = trace_b[grid_steps[k]];
            angle_a[k].push_back(geodesic_distance(id, sa.q));
            angle_b[k].push_back(geodesic_distance(id, sb.q));
            trans_a[k].push_back(sa.x.norm());
            trans_b[k].push_back(sb.x.norm());
        }
    }

    std::vector<KsRecord> out;
    out.reserve(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        KsRecord rec;
        rec.t = time_grid[k];
        rec.ks_rotation = ks_statistic(angle_a[k], angle_b[k]);
        rec.ks_translation = ks_statistic(trans_a[k], trans_b[k]);
        out.push_back(rec);
    }
    return out;
}

std::vector<KsRecord> verify_marginal_vs_interpolant(const ModelParams& model,
                                                     const std::vector<CouplingPair>& pairs,
                                                     const std::vector<double>& time_grid,
                                                     const SolverConfig& solver) {
    if (pairs.size() < 2) throw std::invalid_argument("verify_marginal_vs_interpolant: need >= 2 pairs");
    validate_solver_config(solver);
    const EndpointModel fn = make_endpoint_model(model);

    std::vector<int> grid_steps;
    grid_steps.reserve(time_grid.size());
    for (double t : time_grid) {
        if (!(t >= 0.0 && t <= 1.0))
            throw std::invalid_argument("verify_marginal_vs_interpolant: grid t outside [0, 1]");
        grid_steps.push_back(static_cast<int>(std::lround(t * solver.steps)));
    }

    const std::size_t nt = time_grid.size();
    std::vector<std::vector<double>> interp_ang(nt), interp_trans(nt), ode_ang(nt), ode_trans(nt);
    const UnitQuat id = UnitQuat::identity();
    for (const CouplingPair& p : pairs) {
        const auto trace = integrate_path_trace(fn, p.t0, solver);
        for (std::size_t k = 0; k < nt; ++k) {
            const double t = time_grid[k];
            interp_ang[k].push_back(geodesic_distance(id, slerp_exp(p.t0.q, p.t1.q, t)));
            interp_trans[k].push_back(lerp_translation(p.t0.x, p.t1.x, t).x_t.norm());
            const FrameTransform& s = trace[grid_steps[k]];
            ode_ang[k].push_back(geodesic_distance(id, s.q));
            ode_trans[k].push_back(s.x.norm());
        }
    }

    std::vector<KsRecord> out;
    out.reserve(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        out.push_back({time_grid[k], ks_statistic(interp_ang[k], ode_ang[k]),
                       ks_statistic(interp_trans[k], ode_trans[k])});
    }
    return out;
}

const char* cost_kind_name(CostKind kind) {
    return kind == CostKind::SquaredNorm ? "squared_norm" : "norm";
}

namespace {

double apply_cost(CostKind kind, const Vec3& v) {
    return kind == CostKind::SquaredNorm ? v.norm2() : v.norm();
}

}  // namespace

CostBreakdown transport_cost(const std::vector<CouplingPair>& pairs, CostKind kind) {
    if (pairs.empty()) throw std::invalid_argument("transport_cost: empty pair list");
    std::vector<double> rot, trans, comb;
    rot.reserve(pairs.size());
    trans.reserve(pairs.size());
    comb.reserve(pairs.size());
    for (const CouplingPair& p : pairs) {
        const Vec3 omega = log_map(hamilton(inverse(p.t0.q), align_hemisphere(p.t0.q, p.t1.q)));
        const double cr = apply_cost(kind, omega);
        const double ct = apply_cost(kind, p.t1.x - p.t0.x);
        rot.push_back(cr);
        trans.push_back(ct);
        comb.push_back(cr + ct);
    }
    CostBreakdown b;
    b.rotation = mean_stderr(rot);
    b.translation = mean_stderr(trans);
    b.combined = mean_stderr(comb);
    b.count = static_cast<int>(pairs.size());
    return b;
}

bool TransportReport::reduced_or_equal() const {
    const double slack = 2.0 * std::sqrt(before.combined.se * before.combined.se +
                                         after.combined.se * after.combined.se);
    return after.combined.mean <= before.combined.mean + slack;
}

TransportReport verify_cost_reduction(const std::vector<CouplingPair>& pairs_before,
                                      const std::vector<CouplingPair>& pairs_after, CostKind kind) {
    TransportReport r;
    r.before = transport_cost(pairs_before, kind);
    r.after = transport_cost(pairs_after, kind);
    r.kind = kind;
    return r;
}

TransportReport verify_scheduler_cost(const SchedulerConfig&, const std::vector<CouplingPair>& pairs_before,
                                      const std::vector<CouplingPair>& pairs_after, CostKind kind) {
    return verify_cost_reduction(pairs_before, pairs_after, kind);
}

void write_ks_csv(std::ostream& os, const std::vector<KsRecord>& records) {
    os << "t,ks_rotation,ks_translation\n";
    char buf[120];
    for (const KsRecord& r : records) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", r.t, r.ks_rotation, r.ks_translation);
        os << buf;
    }
}

void write_transport_csv(std::ostream& os, const std::vector<TransportReport>& reports) {
    os << "cost,side,rotation_mean,rotation_se,translation_mean,translation_se,combined_mean,combined_se,"
          "count\n";
    char buf[320];
    for (const TransportReport& r : reports) {
        const CostBreakdown* sides[2] = {&r.before, &r.after};
        const char* names[2] = {"before", "after"};
        for (int i = 0; i < 2; ++i) {
            std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                          cost_kind_name(r.kind), names[i], sides[i]->rotation.mean, sides[i]->rotation.se,
                          sides[i]->translation.mean, sides[i]->translation.se, sides[i]->combined.mean,
                          sides[i]->combined.se, sides[i]->count);
            os << buf;
        }
    }
}

}  // namespace qflow
