#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "qflow/model.hpp"

namespace qflow {

namespace {
constexpr const char* kFormat = "qflow-checkpoint";
constexpr int kVersion = 1;
}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params, const TrainMeta& meta) {
    validate_arch(params.arch);
    if (params.values.size() != param_count(params.arch))
        throw std::invalid_argument("save_checkpoint: parameter vector does not match architecture");
    nlohmann::json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["arch"]["widths"] = params.arch.widths;
    j["params"] = params.values;
    j["meta"]["seed"] = meta.seed;
    j["meta"]["epochs"] = meta.epochs;
    j["meta"]["loss_trace"] = meta.loss_trace;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("save_checkpoint: write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_checkpoint: malformed JSON in " + path + ": " + e.what());
    }
    if (j.value("format", "") != kFormat)
        throw std::runtime_error("load_checkpoint: not a qflow checkpoint: " + path);
    if (j.value("version", -1) != kVersion)
        throw std::runtime_error("load_checkpoint: unsupported checkpoint version in " + path);

    Checkpoint ck;
    ck.params.arch.widths = j.at("arch").at("widths").get<std::vector<int>>();
    validate_arch(ck.params.arch);
    ck.params.values = j.at("params").get<std::vector<double>>();
    if (ck.params.values.size() != param_count(ck.params.arch))
        throw std::runtime_error("load_checkpoint: parameter count does not match architecture in " + path);
    const auto& meta = j.at("meta");
    ck.meta.seed = meta.at("seed").get<uint64_t>();
    ck.meta.epochs = meta.at("epochs").get<int>();
    ck.meta.loss_trace = meta.at("loss_trace").get<std::vector<double>>();
    return ck;
}

}  // namespace qflow
