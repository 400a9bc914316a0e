// Command-line front end: benchmarks, training, rectification, sampling and
// verification as reproducible runs. Every command resolves its RunConfig
// (file + flag overrides), echoes it into the output directory before doing
// any work, and writes only inside that directory. Exit codes: 0 = success /
// all checks passed, 1 = a verified property failed, 2 = usage or I/O error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qflow/bench.hpp"
#include "qflow/dataset.hpp"
#include "qflow/frames.hpp"
#include "qflow/model.hpp"
#include "qflow/run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

// rng stream ids, one per purpose, so commands stay order-independent
enum Stream : uint64_t
{
    kStreamTrain = 1,
    kStreamPairs = 2,
    kStreamRectify = 3,
    kStreamSample = 4,
    kStreamBench = 5,
    kStreamVerify = 6,
};

struct CommonFlags {
    std::string config;
    std::string out;
    std::string checkpoint;
    uint64_t seed = 0;
    int steps = 0;
    double gamma = 0.0;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* steps_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f, bool with_checkpoint) {
    cmd->add_option("--config", f.config, "run configuration file (key = value sections)");
    f.seed_opt = cmd->add_option("--seed", f.seed, "override run.seed");
    f.steps_opt = cmd->add_option("--steps", f.steps, "override solver.steps");
    f.gamma_opt = cmd->add_option("--gamma", f.gamma, "override solver.gamma");
    f.out_opt = cmd->add_option("--out", f.out, "output directory");
    if (with_checkpoint)
        cmd->add_option("--checkpoint", f.checkpoint, "model checkpoint path")->required();
}

RunConfig resolve_config(const CommonFlags& f, const std::string& command) {
    RunConfig cfg = f.config.empty() ? RunConfig{} : RunConfig::from_file(f.config);
    if (f.seed_opt && f.seed_opt->count()) cfg.set("run.seed", std::to_string(f.seed));
    if (f.steps_opt && f.steps_opt->count()) cfg.set("solver.steps", std::to_string(f.steps));
    if (f.gamma_opt && f.gamma_opt->count()) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", f.gamma);
        cfg.set("solver.gamma", buf);
    }
    if (f.out_opt && f.out_opt->count()) cfg.set("run.out", f.out);
    if (cfg.out.empty()) {
        const char* root = std::getenv("QFLOW_OUT_ROOT");
        cfg.out = (fs::path(root ? root : ".") / ("qflow-" + command)).string();
    }
    return cfg;
}

// creates the output directory and echoes the resolved config into it
void prepare_out_dir(const RunConfig& cfg) {
    fs::create_directories(cfg.out);
    std::ofstream os(fs::path(cfg.out) / "config.resolved.ini");
    if (!os) throw std::runtime_error("cannot write config echo in " + cfg.out);
    cfg.echo(os);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << content;
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

std::vector<FrameTransform> flatten(const std::vector<std::vector<FrameTransform>>& chains) {
    std::vector<FrameTransform> out;
    for (const auto& c : chains) out.insert(out.end(), c.begin(), c.end());
    return out;
}

// --- bench-roundtrip ---------------------------------------------------------

int cmd_bench_roundtrip(const RunConfig& cfg) {
    prepare_out_dir(cfg);
    const std::vector<double> offsets{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
    Rng rng(cfg.seed, kStreamBench);
    const RoundTripReport report = run_roundtrip_bench(offsets, 100, rng);

    std::ostringstream csv;
    write_roundtrip_csv(csv, report);
    write_file(fs::path(cfg.out) / "roundtrip.csv", csv.str());

    const bool ordering = report.quat_beats_matrix();
    const bool quat_tight = report.max_quat_err() < 1e-8;
    json summary;
    summary["command"] = "bench-roundtrip";
    summary["seed"] = cfg.seed;
    summary["trials_per_angle"] = 100;
    summary["quat_beats_matrix"] = ordering;
    summary["max_quat_err"] = report.max_quat_err();
    summary["pass"] = ordering && quat_tight;
    write_json(fs::path(cfg.out) / "summary.json", summary);

    std::cout << (ordering && quat_tight ? "bench-roundtrip: PASS" : "bench-roundtrip: FAIL") << "\n";
    return (ordering && quat_tight) ? kExitOk : kExitCheckFailed;
}

// --- train -------------------------------------------------------------------

std::string loss_trace_csv(const std::vector<double>& trace) {
    std::ostringstream os;
    os << "epoch,loss\n";
    char buf[64];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, trace[i]);
        os << buf;
    }
    return os.str();
}

int cmd_train(const RunConfig& cfg_in, const std::string& resume) {
    RunConfig cfg = cfg_in;
    cfg.train.arch = cfg.arch();

    // validate inputs before any output exists
    const auto chains = load_dataset(cfg.dataset);
    Checkpoint warm;
    const bool resuming = !resume.empty();
    if (resuming) {
        warm = load_checkpoint(resume);
        cfg.train.arch = warm.params.arch;
    }

    prepare_out_dir(cfg);
    Rng rng(cfg.seed, kStreamTrain);
    const TrainResult res = resuming ? train_qflow_from(warm.params, chains, cfg.train, rng)
                                     : train_qflow(chains, cfg.train, rng);

    TrainMeta meta;
    meta.seed = cfg.seed;
    meta.epochs = cfg.train.epochs + (resuming ? warm.meta.epochs : 0);
    if (resuming) meta.loss_trace = warm.meta.loss_trace;
    meta.loss_trace.insert(meta.loss_trace.end(), res.loss_trace.begin(), res.loss_trace.end());

    save_checkpoint((fs::path(cfg.out) / "checkpoint.json").string(), res.params, meta);
    write_file(fs::path(cfg.out) / "loss_trace.csv", loss_trace_csv(meta.loss_trace));

    if (!res.loss_trace.empty())
        std::cout << "train: epochs " << res.loss_trace.size() << ", first loss "
                  << res.loss_trace.front() << ", final loss " << res.loss_trace.back() << "\n";
    return kExitOk;
}

// --- sample ------------------------------------------------------------------

int cmd_sample(const RunConfig& cfg, const std::string& checkpoint) {
    const Checkpoint ck = load_checkpoint(checkpoint);
    validate_solver_config(cfg.solver);
    if (cfg.sample_count < 1) throw std::invalid_argument("sample.count must be >= 1");

    prepare_out_dir(cfg);
    Rng rng(cfg.seed, kStreamSample);
    const IgsoSampler igso(cfg.train.igso);
    const EndpointModel model = make_endpoint_model(ck.params);

    std::vector<FrameTransform> frames;
    frames.reserve(cfg.sample_count);
    for (int i = 0; i < cfg.sample_count; ++i) {
        const FrameTransform noise{sample_gaussian_r3(rng), igso.sample(rng)};
        frames.push_back(integrate_path(model, noise, cfg.solver));
    }

    std::ostringstream ss;
    ss << "# qflow samples: x y z qs qx qy qz\n";
    for (const FrameTransform& f : frames) write_frame_line(ss, f);
    write_file(fs::path(cfg.out) / "samples.txt", ss.str());

    json manifest;
    manifest["command"] = "sample";
    manifest["seed"] = cfg.seed;
    manifest["count"] = cfg.sample_count;
    manifest["steps"] = cfg.solver.steps;
    manifest["gamma"] = cfg.solver.scheduler.gamma;
    manifest["scheduler"] = cfg.solver.scheduler_enabled;
    manifest["checkpoint"] = checkpoint;
    manifest["outputs"] = json::array({"samples.txt"});

    if (cfg.sample_chains) {
        // realize the sampled frames as one backbone chain for visualization
        const BackboneChain chain = realize_chain(frames, IdealResidue::standard());
        const BackboneChain with_o = frames.size() >= 2 ? impute_oxygen(chain) : chain;
        write_file(fs::path(cfg.out) / "chain.txt", chain_to_text(with_o));
        manifest["outputs"].push_back("chain.txt");
    }
    write_json(fs::path(cfg.out) / "manifest.json", manifest);

    std::cout << "sample: wrote " << frames.size() << " frames\n";
    return kExitOk;
}

// --- rectify -----------------------------------------------------------------

int cmd_rectify(const RunConfig& cfg_in, const std::string& checkpoint) {
    RunConfig cfg = cfg_in;
    const Checkpoint ck = load_checkpoint(checkpoint);
    cfg.train.arch = ck.params.arch;
    validate_solver_config(cfg.solver);
    const auto keep = filter_by_name(cfg.rectify_filter);

    prepare_out_dir(cfg);
    Rng pair_rng(cfg.seed, kStreamPairs);
    const auto pairs = generate_pairs(ck.params, cfg.rectify_pairs, cfg.solver, cfg.train.igso, pair_rng);
    FilterStats stats;
    const auto kept = filter_pairs(pairs, keep, &stats);

    json manifest;
    manifest["command"] = "rectify";
    manifest["seed"] = cfg.seed;
    manifest["filter"] = cfg.rectify_filter;
    manifest["pairs_requested"] = cfg.rectify_pairs;
    manifest["pairs_kept"] = stats.kept;
    manifest["pairs_dropped"] = stats.dropped;
    write_json(fs::path(cfg.out) / "pairs_manifest.json", manifest);

    if (kept.empty()) {
        std::cerr << "rectify: no pairs survive filter '" << cfg.rectify_filter << "' ("
                  << stats.dropped << " dropped of " << pairs.size() << ")\n";
        return kExitError;
    }

    Rng train_rng(cfg.seed, kStreamRectify);
    const TrainConfig rcfg = cfg.rectify_train();
    const TrainResult res = rectify(ck.params, kept, rcfg, train_rng);

    TrainMeta meta;
    meta.seed = cfg.seed;
    meta.epochs = rcfg.epochs;
    meta.loss_trace = res.loss_trace;
    save_checkpoint((fs::path(cfg.out) / "checkpoint_rectified.json").string(), res.params, meta);
    write_file(fs::path(cfg.out) / "loss_trace.csv", loss_trace_csv(meta.loss_trace));

    std::cout << "rectify: " << stats.kept << " pairs kept, " << stats.dropped << " dropped\n";
    return kExitOk;
}

// --- verify ------------------------------------------------------------------

int cmd_verify(const RunConfig& cfg, const std::string& checkpoint, const std::string& rectified) {
    const Checkpoint ck_q = load_checkpoint(checkpoint);
    const Checkpoint ck_r = load_checkpoint(rectified);
    validate_solver_config(cfg.solver);
    const auto dataset = flatten(load_dataset(cfg.dataset));
    if (dataset.empty()) throw std::runtime_error("verify: empty dataset");

    prepare_out_dir(cfg);
    const int n = cfg.verify_samples;
    json checks = json::array();
    bool all_pass = true;
    auto record = [&](const std::string& name, bool pass, json detail) {
        all_pass = all_pass && pass;
        json c;
        c["name"] = name;
        c["pass"] = pass;
        c["detail"] = std::move(detail);
        checks.push_back(c);
        std::cout << "verify: " << name << (pass ? " PASS" : " FAIL") << "\n";
    };

    // 1. interpolant finiteness probe
    {
        const auto rows = probe_small_angle_nan({0.0, 1e-9, 1e-6, 1e-3, kPi - 1e-3, kPi});
        std::ostringstream csv;
        write_nan_probe_csv(csv, rows);
        write_file(fs::path(cfg.out) / "nan_probe.csv", csv.str());
        bool exp_all_finite = true;
        for (const auto& r : rows) exp_all_finite = exp_all_finite && r.exp_finite;
        const bool additive_fails_small = !rows[0].additive_finite && !rows[1].additive_finite;
        const bool additive_ok_moderate = rows[3].additive_finite;
        record("nan_probe", exp_all_finite && additive_fails_small && additive_ok_moderate,
               {{"exp_all_finite", exp_all_finite},
                {"additive_nonfinite_below_1e6", additive_fails_small},
                {"additive_finite_at_1e3", additive_ok_moderate}});
    }

    // 2. marginal preservation. A rectified flow reproduces the per-t
    // marginals of the interpolant process of its own training coupling, so
    // that is what gets compared, for both rectification rounds;
    // interior t only for round 1, whose t = 1 interpolant marginal is the
    // discrete dataset. The endpoint coupling across rectification is checked
    // sampler-vs-sampler under the generation settings.
    {
        SolverConfig plain = cfg.solver;
        plain.scheduler_enabled = false;
        const IgsoSampler igso(cfg.train.igso);

        Rng rng_indep(cfg.seed, kStreamVerify);
        std::vector<CouplingPair> indep;
        indep.reserve(n);
        for (int i = 0; i < n; ++i) {
            const FrameTransform noise{sample_gaussian_r3(rng_indep), igso.sample(rng_indep)};
            indep.push_back({noise, dataset[rng_indep.next_u64() % dataset.size()]});
        }
        const auto round1 =
            verify_marginal_vs_interpolant(ck_q.params, indep, {0.25, 0.5, 0.75}, plain);

        Rng rng_pairs(cfg.seed, kStreamVerify + 4);
        const auto flow_pairs = generate_pairs(ck_q.params, n, cfg.solver, cfg.train.igso, rng_pairs);
        const auto round2 =
            verify_marginal_vs_interpolant(ck_r.params, flow_pairs, {0.25, 0.5, 0.75, 1.0}, plain);

        std::vector<KsRecord> records = round1;
        records.insert(records.end(), round2.begin(), round2.end());
        std::ostringstream csv;
        write_ks_csv(csv, records);
        write_file(fs::path(cfg.out) / "marginal_ks.csv", csv.str());

        bool pass = true;
        double worst = 0.0;
        for (const auto& r : records) {
            worst = std::max({worst, r.ks_rotation, r.ks_translation});
            pass = pass && r.ks_rotation < 0.1 && r.ks_translation < 0.1;
        }

        Rng rng_ep(cfg.seed, kStreamVerify + 5);
        const auto ep = verify_marginal_preservation(ck_q.params, ck_r.params, n, {1.0}, cfg.solver,
                                                     cfg.train.igso, rng_ep);
        const bool ep_pass = ep[0].ks_rotation < 0.15 && ep[0].ks_translation < 0.15;
        pass = pass && ep_pass;
        record("marginal_ks", pass,
               {{"samples", n},
                {"worst_interpolant_ks", worst},
                {"threshold", 0.1},
                {"endpoint_ks_rotation", ep[0].ks_rotation},
                {"endpoint_ks_translation", ep[0].ks_translation},
                {"endpoint_threshold", 0.15}});
    }

    // 3 + 4. transport costs, constant-speed and scheduled pair generation
    {
        Rng rng(cfg.seed, kStreamVerify + 1);
        std::vector<CouplingPair> before;  // the independent coupling QFlow trained on
        before.reserve(n);
        const IgsoSampler igso(cfg.train.igso);
        for (int i = 0; i < n; ++i) {
            const FrameTransform noise{sample_gaussian_r3(rng), igso.sample(rng)};
            before.push_back({noise, dataset[rng.next_u64() % dataset.size()]});
        }
        SolverConfig plain = cfg.solver;
        plain.scheduler_enabled = false;
        Rng rng_after(cfg.seed, kStreamVerify + 2);
        const auto after = generate_pairs(ck_r.params, n, plain, cfg.train.igso, rng_after);
        SolverConfig sched = cfg.solver;
        sched.scheduler_enabled = true;
        Rng rng_sched(cfg.seed, kStreamVerify + 3);
        const auto after_sched = generate_pairs(ck_r.params, n, sched, cfg.train.igso, rng_sched);

        std::vector<TransportReport> reports;
        bool cost_pass = true;
        for (const CostKind kind : {CostKind::SquaredNorm, CostKind::Norm}) {
            const TransportReport r = verify_cost_reduction(before, after, kind);
            cost_pass = cost_pass && r.reduced_or_equal();
            reports.push_back(r);
        }
        bool sched_pass = true;
        for (const CostKind kind : {CostKind::SquaredNorm, CostKind::Norm}) {
            const TransportReport r = verify_scheduler_cost(sched.scheduler, before, after_sched, kind);
            sched_pass = sched_pass && r.reduced_or_equal();
            reports.push_back(r);
        }
        std::ostringstream csv;
        write_transport_csv(csv, reports);
        write_file(fs::path(cfg.out) / "transport.csv", csv.str());
        record("cost_reduction", cost_pass,
               {{"samples", n},
                {"sq_before", reports[0].before.combined.mean},
                {"sq_after", reports[0].after.combined.mean},
                {"norm_before", reports[1].before.combined.mean},
                {"norm_after", reports[1].after.combined.mean}});
        record("scheduler_cost", sched_pass,
               {{"gamma", sched.scheduler.gamma},
                {"sq_after", reports[2].after.combined.mean},
                {"norm_after", reports[3].after.combined.mean}});
    }

    json verdicts;
    verdicts["command"] = "verify";
    verdicts["seed"] = cfg.seed;
    verdicts["checks"] = checks;
    verdicts["all_pass"] = all_pass;
    write_json(fs::path(cfg.out) / "verdicts.json", verdicts);

    std::cout << "verify: " << (all_pass ? "ALL PASS" : "FAILURES") << "\n";
    return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quaternion flow matching on SE(3) frames: benchmarks, training, rectification"};
    app.require_subcommand(1);

    CommonFlags bench_f, train_f, sample_f, rectify_f, verify_f;
    std::string resume, rectified, dataset_override, filter_override;

    CLI::App* bench = app.add_subcommand("bench-roundtrip", "axis-angle round-trip stability benchmark");
    add_common_flags(bench, bench_f, false);

    CLI::App* train = app.add_subcommand("train", "train a flow model on a toy or file dataset");
    add_common_flags(train, train_f, false);
    train->add_option("--resume", resume, "continue training from a checkpoint");
    CLI::Option* dataset_opt =
        train->add_option("--dataset", dataset_override, "dataset: toy4 | crossing | frames file");

    CLI::App* sample = app.add_subcommand("sample", "integrate sampling paths from a checkpoint");
    add_common_flags(sample, sample_f, true);
    int sample_count = -1;
    CLI::Option* count_opt = sample->add_option("--count", sample_count, "number of samples");
    bool chains_flag = false;
    sample->add_flag("--chains", chains_flag, "also realize samples as a backbone chain");

    CLI::App* rect = app.add_subcommand("rectify", "generate pairs and retrain (flow rectification)");
    add_common_flags(rect, rectify_f, true);
    int pairs_override = -1;
    CLI::Option* pairs_opt = rect->add_option("--pairs", pairs_override, "coupling pairs to generate");
    CLI::Option* filter_opt = rect->add_option("--filter", filter_override, "pair filter name");

    CLI::App* verify = app.add_subcommand("verify", "marginal / transport-cost / stability checks");
    add_common_flags(verify, verify_f, true);
    verify->add_option("--rectified", rectified, "rectified checkpoint path")->required();
    int samples_override = -1;
    CLI::Option* samples_opt =
        verify->add_option("--samples", samples_override, "monte carlo sample count");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed()) return cmd_bench_roundtrip(resolve_config(bench_f, "bench-roundtrip"));
        if (train->parsed()) {
            RunConfig cfg = resolve_config(train_f, "train");
            if (dataset_opt->count()) cfg.set("train.dataset", dataset_override);
            return cmd_train(cfg, resume);
        }
        if (sample->parsed()) {
            RunConfig cfg = resolve_config(sample_f, "sample");
            if (count_opt->count()) cfg.set("sample.count", std::to_string(sample_count));
            if (chains_flag) cfg.set("sample.chains", "true");
            return cmd_sample(cfg, sample_f.checkpoint);
        }
        if (rect->parsed()) {
            RunConfig cfg = resolve_config(rectify_f, "rectify");
            if (pairs_opt->count()) cfg.set("rectify.pairs", std::to_string(pairs_override));
            if (filter_opt->count()) cfg.set("rectify.filter", filter_override);
            return cmd_rectify(cfg, rectify_f.checkpoint);
        }
        if (verify->parsed()) {
            RunConfig cfg = resolve_config(verify_f, "verify");
            if (samples_opt->count()) cfg.set("verify.samples", std::to_string(samples_override));
            return cmd_verify(cfg, verify_f.checkpoint, rectified);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
