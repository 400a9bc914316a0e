#include "qflow/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qflow/model.hpp"

namespace qflow {

std::vector<std::vector<FrameTransform>> read_chain_frames(std::istream& is, const std::string& origin) {
    std::vector<std::vector<FrameTransform>> chains;
    std::vector<FrameTransform> current;
    std::string line;
    int lineno = 0;
    auto flush = [&] {
        if (!current.empty()) {
            chains.push_back(current);
            current.clear();
        }
    };
    while (std::getline(is, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            flush();
            continue;
        }
        if (line[first] == '#') continue;
        std::istringstream ls(line);
        Vec3 x;
        Quat q;
        if (!(ls >> x.x >> x.y >> x.z >> q.s >> q.u.x >> q.u.y >> q.u.z))
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected 'x y z qs qx qy qz'");
        try {
            current.push_back({x, UnitQuat::from_unit(q)});
        } catch (const std::invalid_argument&) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": quaternion is not unit within tolerance");
        }
    }
    flush();
    return chains;
}

std::vector<std::vector<FrameTransform>> read_chain_frames_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("frames: cannot open: " + path);
    return read_chain_frames(in, path);
}

void write_frame_line(std::ostream& os, const FrameTransform& frame) {
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", frame.x.x, frame.x.y,
                  frame.x.z, frame.q.s(), frame.q.u().x, frame.q.u().y, frame.q.u().z);
    os << buf;
}

void write_chain_frames(std::ostream& os, const std::vector<std::vector<FrameTransform>>& chains) {
    for (std::size_t c = 0; c < chains.size(); ++c) {
        if (c) os << "\n";
        for (const FrameTransform& f : chains[c]) write_frame_line(os, f);
    }
}

std::function<bool(const FrameTransform&)> filter_by_name(const std::string& name) {
    if (name == "none") return [](const FrameTransform&) { return true; };
    if (name == "rotation_below_half_pi")
        return [](const FrameTransform& f) {
            return geodesic_distance(UnitQuat::identity(), f.q) < kPi / 2.0;
        };
    if (name == "translation_below_4")
        return [](const FrameTransform& f) { return f.x.norm() < 4.0; };
    std::string known;
    for (const std::string& n : filter_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown rectification filter '" + name + "' (known: " + known + ")");
}

std::vector<std::string> filter_names() { return {"none", "rotation_below_half_pi", "translation_below_4"}; }

std::vector<std::vector<FrameTransform>> load_dataset(const std::string& name) {
    if (name == "toy4") {
        std::vector<std::vector<FrameTransform>> chains;
        for (const FrameTransform& f : toy_four_mode_dataset()) chains.push_back({f});
        return chains;
    }
    if (name == "toy4-cloud") {
        std::vector<std::vector<FrameTransform>> chains;
        for (const FrameTransform& f : toy_four_mode_cloud()) chains.push_back({f});
        return chains;
    }
    if (name == "crossing") {
        std::vector<std::vector<FrameTransform>> chains;
        for (const FrameTransform& f : toy_crossing_dataset()) chains.push_back({f});
        return chains;
    }
    return read_chain_frames_file(name);
}

}  // namespace qflow
