#include "qflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qflow/autodiff.hpp"

namespace qflow {

void validate_arch(const ModelArch& arch) {
    if (arch.widths.size() < 2) throw std::invalid_argument("ModelArch: need at least input and output widths");
    if (arch.widths.front() != 8) throw std::invalid_argument("ModelArch: input width must be 8");
    if (arch.widths.back() != 7) throw std::invalid_argument("ModelArch: output width must be 7");
    for (int w : arch.widths)
        if (w < 1) throw std::invalid_argument("ModelArch: widths must be positive");
}

std::size_t param_count(const ModelArch& arch) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < arch.widths.size(); ++l)
        n += static_cast<std::size_t>(arch.widths[l]) * arch.widths[l + 1] + arch.widths[l + 1];
    return n;
}

ModelParams zero_params(const ModelArch& arch) {
    validate_arch(arch);
    return {arch, std::vector<double>(param_count(arch), 0.0)};
}

ModelParams init_params(const ModelArch& arch, Rng& rng) {
    validate_arch(arch);
    ModelParams p{arch, {}};
    p.values.reserve(param_count(arch));
    for (std::size_t l = 0; l + 1 < arch.widths.size(); ++l) {
        const int nin = arch.widths[l];
        const int nout = arch.widths[l + 1];
        const double a = std::sqrt(6.0 / (nin + nout));
        for (int i = 0; i < nin * nout; ++i) p.values.push_back(rng.uniform(-a, a));
        for (int i = 0; i < nout; ++i) p.values.push_back(0.0);
    }
    return p;
}

namespace {

// Raw MLP evaluation; hidden layers tanh, output linear.
void mlp_forward_raw(const ModelParams& p, const double* in, double* out) {
    const auto& w = p.arch.widths;
    std::vector<double> cur(in, in + w.front());
    std::vector<double> next;
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        const int nin = w[l];
        const int nout = w[l + 1];
        next.assign(nout, 0.0);
        const bool hidden = l + 2 < w.size();
        for (int o = 0; o < nout; ++o) {
            double acc = 0.0;
            const double* row = p.values.data() + off + static_cast<std::size_t>(o) * nin;
            for (int i = 0; i < nin; ++i) acc += row[i] * cur[i];
            acc += p.values[off + static_cast<std::size_t>(nin) * nout + o];
            next[o] = hidden ? std::tanh(acc) : acc;
        }
        off += static_cast<std::size_t>(nin) * nout + nout;
        cur.swap(next);
    }
    std::copy(cur.begin(), cur.end(), out);
}

// Translation features are compressed so typical states stay in the tanh
// units' responsive range; quaternion components are already in [-1, 1].
constexpr double kTranslationFeatureScale = 0.5;

void build_features(const Vec3& x_t, const UnitQuat& q_t, double t, double feat[8]) {
    // canonical-hemisphere input so the model sees one representative per rotation
    Quat q = q_t.quat();
    if (q.s < 0.0) q = -q;
    feat[0] = x_t.x * kTranslationFeatureScale;
    feat[1] = x_t.y * kTranslationFeatureScale;
    feat[2] = x_t.z * kTranslationFeatureScale;
    feat[3] = q.s;
    feat[4] = q.u.x;
    feat[5] = q.u.y;
    feat[6] = q.u.z;
    feat[7] = t;
}

constexpr double kZeroRawQuat = 1e-30;

}  // namespace

std::pair<Vec3, UnitQuat> model_forward(const ModelParams& params, const Vec3& x_t, const UnitQuat& q_t,
                                        double t) {
    validate_arch(params.arch);
    if (params.values.size() != param_count(params.arch))
        throw std::invalid_argument("model_forward: parameter vector does not match architecture");
    double feat[8];
    build_features(x_t, q_t, t, feat);
    double out[7];
    mlp_forward_raw(params, feat, out);
    const Vec3 x1{out[0], out[1], out[2]};
    const Quat raw{out[3], {out[4], out[5], out[6]}};
    const UnitQuat q1 = raw.norm2() < kZeroRawQuat ? UnitQuat::identity() : UnitQuat::normalize(raw);
    return {x1, q1};
}

EndpointModel make_endpoint_model(ModelParams params) {
    return [p = std::move(params)](const FrameTransform& f, double t) {
        return model_forward(p, f.x, f.q, t);
    };
}

// --- loss, double path -------------------------------------------------------

namespace {

double item_velocity_loss(const ModelParams& params, const TrainingItem& item, const LossOptions& opt) {
    double acc = 0.0;
    for (const InterpolantSample& s : item.state) {
        const auto [x1p, q1p] = model_forward(params, s.x_t, s.q_t, item.t);
        const Velocities vel = endpoint_velocities(s.x_t, s.q_t, x1p, q1p, item.t, opt.min_t);
        acc += (s.v_target - vel.v).norm2() + (s.omega_target - vel.omega).norm2();
    }
    return acc;
}

double item_aux_loss(const ModelParams& params, const TrainingItem& item, const LossOptions& opt) {
    std::vector<FrameTransform> pred;
    pred.reserve(item.state.size());
    for (const InterpolantSample& s : item.state) {
        const auto [x1p, q1p] = model_forward(params, s.x_t, s.q_t, item.t);
        pred.push_back({x1p, q1p});
    }
    const BackboneChain pred_chain = realize_chain(pred, opt.ideal);
    const BackboneChain true_chain = realize_chain(item.target, opt.ideal);
    return aux_loss(pred_chain, true_chain).total;
}

bool aux_applies(const TrainingItem& item, const LossOptions& opt) {
    return opt.aux_weight > 0.0 && item.t < opt.aux_threshold && item.state.size() >= 2;
}

}  // namespace

double flow_loss(const ModelParams& params, const std::vector<TrainingItem>& batch, const LossOptions& opt) {
    if (batch.empty()) throw std::invalid_argument("flow_loss: empty batch");
    std::size_t total_frames = 0;
    double vel_sum = 0.0;
    double aux_sum = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const TrainingItem& item = batch[i];
        if (item.state.empty() || item.state.size() != item.target.size())
            throw std::invalid_argument("flow_loss: malformed batch item " + std::to_string(i));
        total_frames += item.state.size();
        vel_sum += item_velocity_loss(params, item, opt);
        if (aux_applies(item, opt)) aux_sum += opt.aux_weight * item_aux_loss(params, item, opt);
        if (!std::isfinite(vel_sum) || !std::isfinite(aux_sum))
            throw std::runtime_error("flow_loss: non-finite loss at batch item " + std::to_string(i));
    }
    return vel_sum / static_cast<double>(total_frames) + aux_sum / static_cast<double>(batch.size());
}

// --- loss, tape path ---------------------------------------------------------

namespace {

using ad::Tape;
using ad::Var;

struct VVec3 {
    Var x, y, z;
};

struct VQuat {
    Var s;
    VVec3 u;
};

VVec3 vconst(Tape& tp, const Vec3& v) { return {tp.constant(v.x), tp.constant(v.y), tp.constant(v.z)}; }
VQuat vconst(Tape& tp, const Quat& q) { return {tp.constant(q.s), vconst(tp, q.u)}; }

VVec3 vadd(VVec3 a, VVec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
VVec3 vsub(VVec3 a, VVec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
VVec3 vneg(VVec3 a) { return {-a.x, -a.y, -a.z}; }
VVec3 vscale(VVec3 a, Var k) { return {a.x * k, a.y * k, a.z * k}; }
VVec3 vscale(VVec3 a, double k) { return {a.x * k, a.y * k, a.z * k}; }
Var vdot(VVec3 a, VVec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
VVec3 vcross(VVec3 a, VVec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
Var vnorm2(VVec3 a) { return vdot(a, a); }

VQuat vneg(VQuat q) { return {-q.s, vneg(q.u)}; }
VQuat vconj(VQuat q) { return {q.s, vneg(q.u)}; }

VQuat vhamilton(VQuat a, VQuat b) {
    return {a.s * b.s - vdot(a.u, b.u), vadd(vadd(vscale(b.u, a.s), vscale(a.u, b.s)), vcross(a.u, b.u))};
}

Var vqnorm2(VQuat q) { return q.s * q.s + vnorm2(q.u); }

// Mirrors qflow::log_map: canonical hemisphere, then atan2 with the same
// small-angle series branch.
VVec3 vlog_map(Tape& tp, VQuat q) {
    if (tp.val(q.s) < 0.0) q = vneg(q);
    const Var n2 = vnorm2(q.u);
    const Var n = ad::sqrt(n2);
    if (tp.val(n) < kSmallAngle) {
        const Var k = (2.0 / q.s) * (1.0 - n2 / (3.0 * (q.s * q.s)));
        return vscale(q.u, k);
    }
    const Var k = 2.0 * ad::atan2(n, q.s) / n;
    return vscale(q.u, k);
}

VVec3 vrotate(VQuat q, VVec3 v) {
    const VQuat pure{v.x.tape->constant(0.0), v};
    const VQuat r = vhamilton(vhamilton(q, pure), vconj(q));
    return r.u;
}

struct TapeMlp {
    std::vector<Var> params;  // same layout as ModelParams::values
};

std::array<Var, 7> mlp_forward_tape(Tape& tp, const TapeMlp& mlp, const ModelArch& arch,
                                    const double feat[8]) {
    const auto& w = arch.widths;
    std::vector<Var> cur(w.front());
    for (int i = 0; i < w.front(); ++i) cur[i] = tp.constant(feat[i]);
    std::vector<Var> next;
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        const int nin = w[l];
        const int nout = w[l + 1];
        next.resize(nout);
        const bool hidden = l + 2 < w.size();
        for (int o = 0; o < nout; ++o) {
            Var acc = mlp.params[off + static_cast<std::size_t>(o) * nin] * cur[0];
            for (int i = 1; i < nin; ++i)
                acc = tp.mul_add(acc, mlp.params[off + static_cast<std::size_t>(o) * nin + i], cur[i]);
            acc = acc + mlp.params[off + static_cast<std::size_t>(nin) * nout + o];
            next[o] = hidden ? ad::tanh(acc) : acc;
        }
        off += static_cast<std::size_t>(nin) * nout + nout;
        cur.swap(next);
    }
    return {cur[0], cur[1], cur[2], cur[3], cur[4], cur[5], cur[6]};
}

struct TapePrediction {
    VVec3 x1;
    VQuat q1;  // normalized
};

TapePrediction predict_tape(Tape& tp, const TapeMlp& mlp, const ModelArch& arch,
                            const InterpolantSample& s, double t) {
    double feat[8];
    build_features(s.x_t, s.q_t, t, feat);
    const auto out = mlp_forward_tape(tp, mlp, arch, feat);
    const VVec3 x1{out[0], out[1], out[2]};
    VQuat raw{out[3], {out[4], out[5], out[6]}};
    const Var n2 = vqnorm2(raw);
    if (tp.val(n2) < kZeroRawQuat) {
        // zero raw head maps to identity; no gradient through this corner
        return {x1, vconst(tp, Quat{1.0, {}})};
    }
    const Var inv_n = 1.0 / ad::sqrt(n2);
    return {x1, {raw.s * inv_n, vscale(raw.u, inv_n)}};
}

Var item_velocity_loss_tape(Tape& tp, const TapeMlp& mlp, const ModelParams& params,
                            const TrainingItem& item) {
    Var acc = tp.constant(0.0);
    const double inv = 1.0 / (1.0 - item.t);
    for (const InterpolantSample& s : item.state) {
        const TapePrediction pred = predict_tape(tp, mlp, params.arch, s, item.t);
        // v_theta = (x1_pred - x_t)/(1 - t)
        const VVec3 v_theta = vscale(vsub(pred.x1, vconst(tp, s.x_t)), inv);
        // omega_theta = log(q_t^-1 (x) q1_pred)/(1 - t), hemisphere-aligned
        VQuat q1 = pred.q1;
        const VQuat qt_const = vconst(tp, s.q_t.quat());
        const Var align_dot = qt_const.s * q1.s + vdot(qt_const.u, q1.u);
        if (tp.val(align_dot) < 0.0) q1 = vneg(q1);
        const VVec3 omega_theta = vscale(vlog_map(tp, vhamilton(vconj(qt_const), q1)), inv);

        const VVec3 dv = vsub(vconst(tp, s.v_target), v_theta);
        const VVec3 dw = vsub(vconst(tp, s.omega_target), omega_theta);
        acc = acc + (vnorm2(dv) + vnorm2(dw));
    }
    return acc;
}

Var item_aux_loss_tape(Tape& tp, const TapeMlp& mlp, const ModelParams& params, const TrainingItem& item,
                       const LossOptions& opt) {
    const std::size_t n = item.state.size();
    const BackboneChain true_chain = realize_chain(item.target, opt.ideal);

    // predicted atoms via the frame action on the ideal residue
    std::vector<std::array<VVec3, 4>> pred_atoms(n);
    const Vec3 locals[4] = {opt.ideal.n, opt.ideal.ca, opt.ideal.c, opt.ideal.o};
    for (std::size_t i = 0; i < n; ++i) {
        const TapePrediction pred = predict_tape(tp, mlp, params.arch, item.state[i], item.t);
        for (int a = 0; a < 4; ++a)
            pred_atoms[i][a] = vadd(pred.x1, vrotate(pred.q1, vconst(tp, locals[a])));
    }

    constexpr double kAngstromPerNm = 10.0;
    constexpr double kCutoffNm = 0.6;

    Var bb = tp.constant(0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < 4; ++a) {
            const VVec3 d = vscale(vsub(vconst(tp, true_chain.atoms[i][a]), pred_atoms[i][a]),
                                   1.0 / kAngstromPerNm);
            bb = bb + vnorm2(d);
        }
    bb = bb / static_cast<double>(4 * n);

    long inside = 0;
    Var dis = tp.constant(0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < 4; ++a)
            for (std::size_t j = 0; j < n; ++j)
                for (int b = 0; b < 4; ++b) {
                    const double d_true =
                        (true_chain.atoms[i][a] - true_chain.atoms[j][b]).norm() / kAngstromPerNm;
                    if (d_true >= kCutoffNm) continue;
                    ++inside;
                    if (i == j && a == b) continue;  // identical atoms: zero distance on both sides
                    const VVec3 dvec = vscale(vsub(pred_atoms[i][a], pred_atoms[j][b]), 1.0 / kAngstromPerNm);
                    const Var d_pred = ad::sqrt(vnorm2(dvec));
                    dis = dis + ad::square(d_true - d_pred);
                }
    const double z = static_cast<double>(inside) - static_cast<double>(n);
    if (!(z > 0.0)) throw std::invalid_argument("aux_loss: degenerate chain, Z <= 0");
    dis = dis / z;
    return bb + dis;
}

}  // namespace

LossGrad loss_gradient(const ModelParams& params, const std::vector<TrainingItem>& batch,
                       const LossOptions& opt) {
    if (batch.empty()) throw std::invalid_argument("loss_gradient: empty batch");
    validate_arch(params.arch);
    if (params.values.size() != param_count(params.arch))
        throw std::invalid_argument("loss_gradient: parameter vector does not match architecture");

    thread_local Tape tp;
    tp.reset();

    TapeMlp mlp;
    mlp.params.reserve(params.values.size());
    for (double v : params.values) mlp.params.push_back(tp.input(v));

    std::size_t total_frames = 0;
    Var vel_sum = tp.constant(0.0);
    Var aux_sum = tp.constant(0.0);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const TrainingItem& item = batch[i];
        if (item.state.empty() || item.state.size() != item.target.size())
            throw std::invalid_argument("loss_gradient: malformed batch item " + std::to_string(i));
        if (1.0 - item.t < opt.min_t)
            throw std::domain_error("loss_gradient: item t within min_t of 1");
        total_frames += item.state.size();
        vel_sum = vel_sum + item_velocity_loss_tape(tp, mlp, params, item);
        if (aux_applies(item, opt))
            aux_sum = aux_sum + opt.aux_weight * item_aux_loss_tape(tp, mlp, params, item, opt);
        if (!std::isfinite(tp.val(vel_sum)) || !std::isfinite(tp.val(aux_sum)))
            throw std::runtime_error("loss_gradient: non-finite loss at batch item " + std::to_string(i));
    }
    const Var loss =
        vel_sum / static_cast<double>(total_frames) + aux_sum / static_cast<double>(batch.size());

    tp.backward(loss);

    LossGrad out;
    out.loss = tp.val(loss);
    out.grad.reserve(params.values.size());
    for (const Var& v : mlp.params) out.grad.push_back(tp.grad(v));
    return out;
}

// --- training ----------------------------------------------------------------

namespace {

// Chain with an optional fixed noise coupling (used by rectification).
struct CoupledChain {
    std::vector<FrameTransform> t1;
    std::vector<FrameTransform> t0;  // empty: draw fresh noise per visit
};

TrainingItem build_item(const CoupledChain& chain, double t, const IgsoSampler& igso, Rng& rng) {
    TrainingItem item;
    item.t = t;
    item.state.reserve(chain.t1.size());
    item.target = chain.t1;
    for (std::size_t i = 0; i < chain.t1.size(); ++i) {
        const FrameTransform t0 = chain.t0.empty()
                                      ? FrameTransform{sample_gaussian_r3(rng), igso.sample(rng)}
                                      : chain.t0[i];
        item.state.push_back(make_interpolant_sample(t0, chain.t1[i], t));
    }
    return item;
}

void check_train_config(const TrainConfig& cfg) {
    if (cfg.epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
    if (cfg.batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (!(cfg.aux_threshold >= 0.0 && cfg.aux_threshold <= 1.0))
        throw std::invalid_argument("TrainConfig: aux_threshold must lie in [0, 1]");
    if (!(cfg.min_t > 0.0 && cfg.min_t < 0.5))
        throw std::invalid_argument("TrainConfig: min_t must lie in (0, 0.5)");
}

TrainResult run_training(ModelParams params, const std::vector<CoupledChain>& dataset,
                         const TrainConfig& cfg, Rng& rng) {
    check_train_config(cfg);
    validate_arch(params.arch);
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");

    const IgsoSampler igso(cfg.igso);
    LossOptions opt;
    opt.aux_weight = cfg.aux_weight;
    opt.aux_threshold = cfg.aux_threshold;
    opt.min_t = cfg.min_t;

    const std::size_t d = dataset.size();
    const std::size_t b = static_cast<std::size_t>(cfg.batch_size);
    std::vector<double> m1(params.values.size(), 0.0);  // SGD momentum / Adam first moment
    std::vector<double> m2;                              // Adam second moment
    if (cfg.optimizer == Optimizer::Adam) m2.assign(params.values.size(), 0.0);
    long adam_t = 0;
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;

    TrainResult result;
    result.loss_trace.reserve(cfg.epochs);

    std::vector<TrainingItem> batch;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        std::size_t batches = 0;

        double lr = cfg.learning_rate;
        if (cfg.lr_final_fraction < 1.0 && cfg.epochs > 1) {
            const double progress = static_cast<double>(epoch) / (cfg.epochs - 1);
            const double lo = cfg.learning_rate * cfg.lr_final_fraction;
            lr = lo + 0.5 * (cfg.learning_rate - lo) * (1.0 + std::cos(kPi * progress));
        }

        auto step = [&](const std::vector<TrainingItem>& items) {
            LossGrad lg = loss_gradient(params, items, opt);
            if (cfg.grad_clip > 0.0) {
                double norm2 = 0.0;
                for (double g : lg.grad) norm2 += g * g;
                const double norm = std::sqrt(norm2);
                if (norm > cfg.grad_clip) {
                    const double scale = cfg.grad_clip / norm;
                    for (double& g : lg.grad) g *= scale;
                }
            }
            if (cfg.optimizer == Optimizer::Adam) {
                constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
                ++adam_t;
                const double c1 = 1.0 - std::pow(beta1, adam_t);
                const double c2 = 1.0 - std::pow(beta2, adam_t);
                for (std::size_t i = 0; i < params.values.size(); ++i) {
                    m1[i] = beta1 * m1[i] + (1.0 - beta1) * lg.grad[i];
                    m2[i] = beta2 * m2[i] + (1.0 - beta2) * lg.grad[i] * lg.grad[i];
                    params.values[i] -= lr * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + eps);
                }
            } else {
                for (std::size_t i = 0; i < params.values.size(); ++i) {
                    m1[i] = cfg.momentum * m1[i] - lr * lg.grad[i];
                    params.values[i] += m1[i];
                }
            }
            epoch_loss += lg.loss;
            ++batches;
        };

        if (d >= b) {
            // shuffled partition (Fisher-Yates)
            for (std::size_t i = d - 1; i > 0; --i) {
                const std::size_t j = rng.next_u64() % (i + 1);
                std::swap(order[i], order[j]);
            }
            for (std::size_t pos = 0; pos < d; pos += b) {
                batch.clear();
                const std::size_t end = std::min(pos + b, d);
                for (std::size_t k = pos; k < end; ++k)
                    batch.push_back(
                        build_item(dataset[order[k]], rng.uniform(cfg.min_t, 1.0 - cfg.min_t), igso, rng));
                step(batch);
            }
        } else {
            // tiny dataset: one batch of draws with replacement keeps full batches
            batch.clear();
            for (std::size_t k = 0; k < b; ++k)
                batch.push_back(build_item(dataset[rng.next_u64() % d],
                                           rng.uniform(cfg.min_t, 1.0 - cfg.min_t), igso, rng));
            step(batch);
        }

        for (double v : params.values)
            if (!std::isfinite(v))
                throw std::runtime_error("train: non-finite parameter after epoch " +
                                         std::to_string(epoch));
        result.loss_trace.push_back(epoch_loss / static_cast<double>(batches));
    }
    result.params = std::move(params);
    return result;
}

std::vector<CoupledChain> wrap_chains(const std::vector<std::vector<FrameTransform>>& dataset) {
    std::vector<CoupledChain> out;
    out.reserve(dataset.size());
    for (const auto& chain : dataset) out.push_back({chain, {}});
    return out;
}

}  // namespace

TrainResult train_qflow_from(ModelParams params, const std::vector<std::vector<FrameTransform>>& dataset,
                             const TrainConfig& cfg, Rng& rng) {
    return run_training(std::move(params), wrap_chains(dataset), cfg, rng);
}

TrainResult train_qflow(const std::vector<std::vector<FrameTransform>>& dataset, const TrainConfig& cfg,
                        Rng& rng) {
    Rng init_rng = rng.split(0x1217);
    return train_qflow_from(init_params(cfg.arch, init_rng), dataset, cfg, rng);
}

TrainResult train_qflow(const std::vector<FrameTransform>& dataset, const TrainConfig& cfg, Rng& rng) {
    std::vector<std::vector<FrameTransform>> chains;
    chains.reserve(dataset.size());
    for (const FrameTransform& f : dataset) chains.push_back({f});
    return train_qflow(chains, cfg, rng);
}

std::vector<CouplingPair> generate_pairs(const ModelParams& params, int count, const SolverConfig& solver,
                                         const IgsoConfig& igso_cfg, Rng& rng) {
    if (count < 0) throw std::invalid_argument("generate_pairs: count must be >= 0");
    validate_solver_config(solver);
    const IgsoSampler igso(igso_cfg);
    const EndpointModel model = make_endpoint_model(params);
    std::vector<CouplingPair> pairs;
    pairs.reserve(count);
    for (int i = 0; i < count; ++i) {
        const FrameTransform t0{sample_gaussian_r3(rng), igso.sample(rng)};
        pairs.push_back({t0, integrate_path(model, t0, solver)});
    }
    return pairs;
}

std::vector<CouplingPair> filter_pairs(const std::vector<CouplingPair>& pairs,
                                       const std::function<bool(const FrameTransform&)>& keep,
                                       FilterStats* stats) {
    std::vector<CouplingPair> out;
    out.reserve(pairs.size());
    FilterStats local;
    for (const CouplingPair& p : pairs) {
        if (keep(p.t1)) {
            out.push_back(p);
            ++local.kept;
        } else {
            ++local.dropped;
        }
    }
    if (stats) *stats = local;
    return out;
}

TrainResult rectify(const ModelParams& params, const std::vector<CouplingPair>& pairs,
                    const TrainConfig& cfg, Rng& rng) {
    if (pairs.empty()) return {params, {}};  // warm-start contract: no pairs, no update
    std::vector<CoupledChain> dataset;
    dataset.reserve(pairs.size());
    for (const CouplingPair& p : pairs) dataset.push_back({{p.t1}, {p.t0}});
    return run_training(params, dataset, cfg, rng);
}

// --- toy tasks ---------------------------------------------------------------

std::vector<FrameTransform> toy_four_mode_dataset() {
    // distinct translation norms and rotation angles so the angle/radius
    // marginals used by the verification harness separate the modes
    const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
    return {
        {{+1.5, 0.0, 0.0}, exp_map({0.5, 0.0, 0.0})},
        {{0.0, +2.5, 0.0}, exp_map({0.0, 1.2, 0.0})},
        {{-2.4, 0.0, +2.4}, exp_map({0.0, 0.0, 2.0})},
        {{+2.6, +2.6, -2.6}, exp_map(Vec3{inv_sqrt3, inv_sqrt3, inv_sqrt3} * 2.6)},
    };
}

std::vector<FrameTransform> toy_four_mode_cloud(int per_mode, double sigma_x, double sigma_rot,
                                                uint64_t seed) {
    if (per_mode < 1) throw std::invalid_argument("toy_four_mode_cloud: per_mode must be >= 1");
    const std::vector<FrameTransform> centers = toy_four_mode_dataset();
    Rng rng(seed);
    std::vector<FrameTransform> frames;
    frames.reserve(centers.size() * per_mode);
    for (const FrameTransform& c : centers)
        for (int i = 0; i < per_mode; ++i) {
            const Vec3 dx = sample_gaussian_r3(rng) * sigma_x;
            const Vec3 dw = sample_gaussian_r3(rng) * sigma_rot;
            frames.push_back({c.x + dx, hamilton(c.q, exp_map(dw))});
        }
    return frames;
}

std::vector<FrameTransform> toy_crossing_dataset() {
    return {
        {{+2.0, 0.0, 0.0}, exp_map({0.0, 0.0, +1.2})},
        {{-2.0, 0.0, 0.0}, exp_map({0.0, 0.0, -1.2})},
    };
}

double nearest_mode_distance(const FrameTransform& frame, const std::vector<FrameTransform>& modes) {
    if (modes.empty()) throw std::invalid_argument("nearest_mode_distance: empty mode list");
    double best = std::numeric_limits<double>::infinity();
    for (const FrameTransform& m : modes)
        best = std::min(best, (frame.x - m.x).norm() + geodesic_distance(frame.q, m.q));
    return best;
}

}  // namespace qflow
