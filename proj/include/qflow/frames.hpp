#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "qflow/frame.hpp"

namespace qflow {

// Idealized residue template, coordinates in Angstrom with CA at the origin.
// The numbers are configuration (Engh-Huber-derived defaults); tests assert
// the geometric invariants, not these particular values.
struct IdealResidue {
    Vec3 n{-0.525, 1.363, 0.0};
    Vec3 ca{0.0, 0.0, 0.0};
    Vec3 c{1.526, 0.0, 0.0};
    Vec3 o{2.153, -1.062, 0.0};

    static IdealResidue standard() { return {}; }
    double co_bond_length() const { return (o - c).norm(); }
};

// Realized backbone: per-residue frames plus the four placed heavy atoms
// [N, CA, C, O], all in Angstrom.
struct BackboneChain {
    std::vector<FrameTransform> frames;
    std::vector<std::array<Vec3, 4>> atoms;

    std::size_t size() const { return atoms.size(); }
};

// x + q * local: the frame action on an idealized coordinate.
Vec3 apply_frame(const FrameTransform& frame, const Vec3& local);

BackboneChain realize_chain(const std::vector<FrameTransform>& frames, const IdealResidue& ideal);

// Rebuilds each non-terminal residue's O in the plane of CA(i), C(i), N(i+1):
// the O-C direction opposes the in-plane bisector of C->CA and C->N(i+1), at
// the ideal C=O bond length. The terminal residue keeps its frame-derived O.
BackboneChain impute_oxygen(const BackboneChain& chain, const IdealResidue& ideal = {});

struct AuxLossResult {
    double bb = 0.0;   // mean squared atom deviation, nm^2
    double dis = 0.0;  // local pairwise-distance term, nm^2
    double total = 0.0;
};

// Backbone auxiliary loss. Positions are in Angstrom; the losses are
// computed in nanometers, and the 0.6 nm neighborhood indicator is evaluated
// on the TRUE distances only. Throws on length mismatch or when the
// normalizer Z = (#pairs inside the cutoff) - N is not positive.
AuxLossResult aux_loss(const BackboneChain& pred, const BackboneChain& truth);

// Text export: "# chain residues=<N>" then one atom per line,
// "<residue_index> <atom_name> <x> <y> <z>" in Angstrom.
void write_chain_text(std::ostream& os, const BackboneChain& chain);
std::string chain_to_text(const BackboneChain& chain);

// Parses atom records produced by write_chain_text (frames are not recoverable).
std::vector<std::array<Vec3, 4>> parse_chain_text(const std::string& text);

}  // namespace qflow
