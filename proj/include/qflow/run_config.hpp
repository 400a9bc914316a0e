#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qflow/model.hpp"
#include "qflow/solvers.hpp"

namespace qflow {

// Resolved run settings: flat key = value sections from a config file, with
// command-line flags applied on top. Unknown keys and malformed values are
// errors naming the offending field.
struct RunConfig {
    uint64_t seed = 0;
    std::string out;

    SolverConfig solver{};

    TrainConfig train{};
    std::vector<int> hidden{64, 64};
    std::string dataset = "toy4";  // toy4 | crossing | <frames file>

    int sample_count = 10;
    bool sample_chains = false;

    int rectify_pairs = 512;
    std::string rectify_filter = "none";
    // rectification training settings; negative values fall back to [train]
    int rectify_epochs = -1;
    int rectify_batch_size = -1;
    double rectify_learning_rate = -1.0;

    // train config with the rectify overrides applied
    TrainConfig rectify_train() const;

    int verify_samples = 1000;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_text(const std::string& text, const std::string& origin = "<config>");

    // Applies one "section.key=value" override (used for flag passthrough).
    void set(const std::string& key, const std::string& value);

    // Deterministic echo of every resolved value, parseable by from_text.
    void echo(std::ostream& os) const;

    ModelArch arch() const;
};

}  // namespace qflow
