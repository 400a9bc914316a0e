#include "qflow/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qflow {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw std::invalid_argument("config: invalid boolean for " + key + ": " + v);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: invalid number for " + key + ": " + v);
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: invalid integer for " + key + ": " + v);
    }
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long i = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: invalid unsigned integer for " + key + ": " + v);
    }
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (part.empty()) throw std::invalid_argument("config: empty list entry for " + key);
        out.push_back(static_cast<int>(parse_int(key, part)));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "run.seed") {
        seed = parse_u64(key, v);
        train.seed = seed;
    } else if (key == "run.out") {
        out = v;
    } else if (key == "solver.steps") {
        solver.steps = static_cast<int>(parse_int(key, v));
    } else if (key == "solver.gamma") {
        solver.scheduler.gamma = parse_double(key, v);
    } else if (key == "solver.scheduler") {
        solver.scheduler_enabled = parse_bool(key, v);
    } else if (key == "solver.min_t") {
        solver.min_t = parse_double(key, v);
    } else if (key == "train.epochs") {
        train.epochs = static_cast<int>(parse_int(key, v));
    } else if (key == "train.batch_size") {
        train.batch_size = static_cast<int>(parse_int(key, v));
    } else if (key == "train.learning_rate") {
        train.learning_rate = parse_double(key, v);
    } else if (key == "train.momentum") {
        train.momentum = parse_double(key, v);
    } else if (key == "train.optimizer") {
        if (v == "adam")
            train.optimizer = Optimizer::Adam;
        else if (v == "sgd")
            train.optimizer = Optimizer::Sgd;
        else
            throw std::invalid_argument("config: train.optimizer must be adam or sgd, got " + v);
    } else if (key == "train.grad_clip") {
        train.grad_clip = parse_double(key, v);
    } else if (key == "train.lr_final_fraction") {
        train.lr_final_fraction = parse_double(key, v);
    } else if (key == "train.aux_weight") {
        train.aux_weight = parse_double(key, v);
    } else if (key == "train.aux_threshold") {
        train.aux_threshold = parse_double(key, v);
    } else if (key == "train.min_t") {
        train.min_t = parse_double(key, v);
    } else if (key == "train.dataset") {
        dataset = v;
    } else if (key == "train.hidden") {
        hidden = parse_int_list(key, v);
    } else if (key == "igso3.epsilon") {
        train.igso.epsilon = parse_double(key, v);
    } else if (key == "igso3.series_terms") {
        train.igso.series_terms = static_cast<int>(parse_int(key, v));
    } else if (key == "igso3.grid_size") {
        train.igso.grid_size = static_cast<int>(parse_int(key, v));
    } else if (key == "sample.count") {
        sample_count = static_cast<int>(parse_int(key, v));
    } else if (key == "sample.chains") {
        sample_chains = parse_bool(key, v);
    } else if (key == "rectify.pairs") {
        rectify_pairs = static_cast<int>(parse_int(key, v));
    } else if (key == "rectify.filter") {
        rectify_filter = v;
    } else if (key == "rectify.epochs") {
        rectify_epochs = static_cast<int>(parse_int(key, v));
    } else if (key == "rectify.batch_size") {
        rectify_batch_size = static_cast<int>(parse_int(key, v));
    } else if (key == "rectify.learning_rate") {
        rectify_learning_rate = parse_double(key, v);
    } else if (key == "verify.samples") {
        verify_samples = static_cast<int>(parse_int(key, v));
    } else {
        throw std::invalid_argument("config: unknown key: " + key);
    }
}

RunConfig RunConfig::from_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream iss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(iss, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (section.empty())
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": key outside a section");
        try {
            cfg.set(section + "." + key, value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str(), path);
}

void RunConfig::echo(std::ostream& os) const {
    os << "[run]\n";
    os << "seed = " << seed << "\n";
    os << "out = " << out << "\n";
    os << "\n[solver]\n";
    os << "steps = " << solver.steps << "\n";
    os << "gamma = " << fmt(solver.scheduler.gamma) << "\n";
    os << "scheduler = " << (solver.scheduler_enabled ? "true" : "false") << "\n";
    os << "min_t = " << fmt(solver.min_t) << "\n";
    os << "\n[train]\n";
    os << "epochs = " << train.epochs << "\n";
    os << "batch_size = " << train.batch_size << "\n";
    os << "learning_rate = " << fmt(train.learning_rate) << "\n";
    os << "momentum = " << fmt(train.momentum) << "\n";
    os << "optimizer = " << (train.optimizer == Optimizer::Adam ? "adam" : "sgd") << "\n";
    os << "grad_clip = " << fmt(train.grad_clip) << "\n";
    os << "lr_final_fraction = " << fmt(train.lr_final_fraction) << "\n";
    os << "aux_weight = " << fmt(train.aux_weight) << "\n";
    os << "aux_threshold = " << fmt(train.aux_threshold) << "\n";
    os << "min_t = " << fmt(train.min_t) << "\n";
    os << "dataset = " << dataset << "\n";
    os << "hidden = ";
    for (std::size_t i = 0; i < hidden.size(); ++i) os << (i ? "," : "") << hidden[i];
    os << "\n";
    os << "\n[igso3]\n";
    os << "epsilon = " << fmt(train.igso.epsilon) << "\n";
    os << "series_terms = " << train.igso.series_terms << "\n";
    os << "grid_size = " << train.igso.grid_size << "\n";
    os << "\n[sample]\n";
    os << "count = " << sample_count << "\n";
    os << "chains = " << (sample_chains ? "true" : "false") << "\n";
    os << "\n[rectify]\n";
    os << "pairs = " << rectify_pairs << "\n";
    os << "filter = " << rectify_filter << "\n";
    os << "epochs = " << (rectify_epochs < 0 ? train.epochs : rectify_epochs) << "\n";
    os << "batch_size = " << (rectify_batch_size < 0 ? train.batch_size : rectify_batch_size) << "\n";
    os << "learning_rate = "
       << fmt(rectify_learning_rate < 0 ? train.learning_rate : rectify_learning_rate) << "\n";
    os << "\n[verify]\n";
    os << "samples = " << verify_samples << "\n";
}

TrainConfig RunConfig::rectify_train() const {
    TrainConfig t = train;
    if (rectify_epochs >= 0) t.epochs = rectify_epochs;
    if (rectify_batch_size > 0) t.batch_size = rectify_batch_size;
    if (rectify_learning_rate > 0.0) t.learning_rate = rectify_learning_rate;
    return t;
}

ModelArch RunConfig::arch() const {
    ModelArch a;
    a.widths.clear();
    a.widths.push_back(8);
    for (int h : hidden) a.widths.push_back(h);
    a.widths.push_back(7);
    return a;
}

}  // namespace qflow
