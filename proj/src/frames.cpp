#include "qflow/frames.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qflow {

namespace {
constexpr double kAngstromPerNm = 10.0;
constexpr double kDisCutoffNm = 0.6;
constexpr const char* kAtomNames[4] = {"N", "CA", "C", "O"};
}  // namespace

Vec3 apply_frame(const FrameTransform& frame, const Vec3& local) {
    return frame.x + rotate_vector(frame.q, local);
}

BackboneChain realize_chain(const std::vector<FrameTransform>& frames, const IdealResidue& ideal) {
    if (frames.empty()) throw std::invalid_argument("realize_chain: empty frame list");
    BackboneChain chain;
    chain.frames = frames;
    chain.atoms.reserve(frames.size());
    for (const FrameTransform& f : frames) {
        chain.atoms.push_back({apply_frame(f, ideal.n), apply_frame(f, ideal.ca), apply_frame(f, ideal.c),
                               apply_frame(f, ideal.o)});
    }
    return chain;
}

BackboneChain impute_oxygen(const BackboneChain& chain, const IdealResidue& ideal) {
    if (chain.size() < 2) throw std::invalid_argument("impute_oxygen: chain needs >= 2 residues");
    BackboneChain out = chain;
    const double bond = ideal.co_bond_length();
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        const Vec3& ca = out.atoms[i][1];
        const Vec3& c = out.atoms[i][2];
        const Vec3& n_next = out.atoms[i + 1][0];
        const Vec3 dir = -normalized(normalized(ca - c) + normalized(n_next - c));
        out.atoms[i][3] = c + dir * bond;
    }
    return out;
}

AuxLossResult aux_loss(const BackboneChain& pred, const BackboneChain& truth) {
    const std::size_t n = truth.size();
    if (pred.size() != n) throw std::invalid_argument("aux_loss: chain length mismatch");
    if (n == 0) throw std::invalid_argument("aux_loss: empty chains");

    AuxLossResult r;
    for (std::size_t i = 0; i < n; ++i) {
        for (int a = 0; a < 4; ++a) {
            const Vec3 d = (truth.atoms[i][a] - pred.atoms[i][a]) / kAngstromPerNm;
            r.bb += d.norm2();
        }
    }
    r.bb /= static_cast<double>(4 * n);

    // ordered pairs over (residue, atom) x (residue, atom); indicator on true distances
    long inside = 0;
    double dis_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < 4; ++a)
            for (std::size_t j = 0; j < n; ++j)
                for (int b = 0; b < 4; ++b) {
                    const double d_true = (truth.atoms[i][a] - truth.atoms[j][b]).norm() / kAngstromPerNm;
                    if (d_true >= kDisCutoffNm) continue;
                    ++inside;
                    const double d_pred = (pred.atoms[i][a] - pred.atoms[j][b]).norm() / kAngstromPerNm;
                    dis_sum += (d_true - d_pred) * (d_true - d_pred);
                }
    const double z = static_cast<double>(inside) - static_cast<double>(n);
    if (!(z > 0.0)) throw std::invalid_argument("aux_loss: degenerate chain, Z <= 0");
    r.dis = dis_sum / z;
    r.total = r.bb + r.dis;
    return r;
}

void write_chain_text(std::ostream& os, const BackboneChain& chain) {
    os << "# chain residues=" << chain.size() << "\n";
    char buf[160];
    for (std::size_t i = 0; i < chain.size(); ++i)
        for (int a = 0; a < 4; ++a) {
            const Vec3& p = chain.atoms[i][a];
            std::snprintf(buf, sizeof(buf), "%zu %s %.17g %.17g %.17g\n", i + 1, kAtomNames[a], p.x, p.y,
                          p.z);
            os << buf;
        }
}

std::string chain_to_text(const BackboneChain& chain) {
    std::ostringstream oss;
    write_chain_text(oss, chain);
    return oss.str();
}

std::vector<std::array<Vec3, 4>> parse_chain_text(const std::string& text) {
    std::vector<std::array<Vec3, 4>> atoms;
    std::istringstream iss(text);
    std::string line;
    while (std::getline(iss, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::size_t resi;
        std::string name;
        Vec3 p;
        if (!(ls >> resi >> name >> p.x >> p.y >> p.z))
            throw std::runtime_error("parse_chain_text: malformed atom record: " + line);
        if (resi == 0) throw std::runtime_error("parse_chain_text: residue indices are 1-based");
        if (atoms.size() < resi) atoms.resize(resi);
        int a = -1;
        for (int k = 0; k < 4; ++k)
            if (name == kAtomNames[k]) a = k;
        if (a < 0) throw std::runtime_error("parse_chain_text: unknown atom name: " + name);
        atoms[resi - 1][a] = p;
    }
    return atoms;
}

}  // namespace qflow
