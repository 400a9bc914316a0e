#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qflow/frame.hpp"

namespace qflow {

// Frames text format: one frame per line, "x y z qs qx qy qz"; blank lines
// separate chains; '#' starts a comment. A file of single-line chains is a
// per-frame dataset.
std::vector<std::vector<FrameTransform>> read_chain_frames(std::istream& is,
                                                           const std::string& origin = "<frames>");
std::vector<std::vector<FrameTransform>> read_chain_frames_file(const std::string& path);

void write_frame_line(std::ostream& os, const FrameTransform& frame);
void write_chain_frames(std::ostream& os, const std::vector<std::vector<FrameTransform>>& chains);

// Built-in rectification filters, selected by name. Unknown names throw with
// the list of valid ones.
std::function<bool(const FrameTransform&)> filter_by_name(const std::string& name);
std::vector<std::string> filter_names();

// Named toy datasets ("toy4", "crossing") or a frames file path.
std::vector<std::vector<FrameTransform>> load_dataset(const std::string& name);

}  // namespace qflow
