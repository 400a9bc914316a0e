#pragma once

#include "qflow/linalg.hpp"
#include "qflow/quat.hpp"

namespace qflow {

// One residue's rigid transform T = (x, q).
struct FrameTransform {
    Vec3 x{};
    UnitQuat q{};
};

}  // namespace qflow
