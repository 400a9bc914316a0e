#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qflow/frames.hpp"
#include "qflow/igso3.hpp"

using namespace qflow;

namespace {

std::vector<FrameTransform> random_frames(int n, Rng& rng, double spread = 4.0) {
    std::vector<FrameTransform> frames;
    frames.reserve(n);
    for (int i = 0; i < n; ++i)
        frames.push_back({sample_gaussian_r3(rng) * spread + Vec3{3.8 * i, 0.0, 0.0},
                          sample_uniform_so3(rng)});
    return frames;
}

// Independent brute-force evaluation of the auxiliary loss, written as plain
// loop nests over the formula; the oracle the module is checked against.
struct BruteAux {
    double bb, dis;
};

BruteAux brute_force_aux(const BackboneChain& pred, const BackboneChain& truth) {
    const std::size_t n = truth.size();
    double bb = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < 4; ++a) {
            const double dx = (truth.atoms[i][a].x - pred.atoms[i][a].x) / 10.0;
            const double dy = (truth.atoms[i][a].y - pred.atoms[i][a].y) / 10.0;
            const double dz = (truth.atoms[i][a].z - pred.atoms[i][a].z) / 10.0;
            bb += dx * dx + dy * dy + dz * dz;
        }
    bb /= 4.0 * n;

    double dis = 0.0;
    long count = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < 4; ++a)
            for (std::size_t j = 0; j < n; ++j)
                for (int b = 0; b < 4; ++b) {
                    const double dt = (truth.atoms[i][a] - truth.atoms[j][b]).norm() / 10.0;
                    if (dt < 0.6) {
                        ++count;
                        const double dp = (pred.atoms[i][a] - pred.atoms[j][b]).norm() / 10.0;
                        dis += (dt - dp) * (dt - dp);
                    }
                }
    dis /= static_cast<double>(count - static_cast<long>(n));
    return {bb, dis};
}

}  // namespace

TEST_CASE("apply_frame") {
    CHECK((apply_frame({{0, 0, 0}, UnitQuat::identity()}, {1.0, 2.0, 3.0}) - Vec3{1, 2, 3}).norm() == 0.0);
    CHECK((apply_frame({{1, 0, 0}, UnitQuat::identity()}, {0, 0, 0}) - Vec3{1, 0, 0}).norm() == 0.0);

    // frame action is rigid: all ideal-atom pairwise distances preserved
    Rng rng(61);
    const IdealResidue ideal;
    const Vec3 locals[4] = {ideal.n, ideal.ca, ideal.c, ideal.o};
    for (int trial = 0; trial < 200; ++trial) {
        const FrameTransform f{sample_gaussian_r3(rng) * 5.0, sample_uniform_so3(rng)};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const double before = (locals[a] - locals[b]).norm();
                const double after = (apply_frame(f, locals[a]) - apply_frame(f, locals[b])).norm();
                CHECK(std::abs(before - after) < 1e-10);
            }
    }
}

TEST_CASE("realize_chain") {
    const IdealResidue ideal;
    CHECK(ideal.ca.norm() == 0.0);  // CA anchored at the origin

    // identity frame reproduces the ideal coordinates
    const BackboneChain one = realize_chain({FrameTransform{}}, ideal);
    REQUIRE(one.size() == 1);
    CHECK((one.atoms[0][0] - ideal.n).norm() == 0.0);
    CHECK((one.atoms[0][3] - ideal.o).norm() == 0.0);

    // translation-only frames shift the ideal coordinates
    const Vec3 off{2.0, -1.0, 3.0};
    const BackboneChain shifted = realize_chain({FrameTransform{off, UnitQuat::identity()}}, ideal);
    CHECK((shifted.atoms[0][2] - (ideal.c + off)).norm() == 0.0);

    // random frames keep per-residue internal geometry identical to the ideal
    Rng rng(62);
    const auto frames = random_frames(8, rng);
    const BackboneChain chain = realize_chain(frames, ideal);
    const Vec3 locals[4] = {ideal.n, ideal.ca, ideal.c, ideal.o};
    for (std::size_t i = 0; i < chain.size(); ++i)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const double want = (locals[a] - locals[b]).norm();
                const double got = (chain.atoms[i][a] - chain.atoms[i][b]).norm();
                CHECK(std::abs(want - got) < 1e-10);
            }

    CHECK_THROWS_AS(realize_chain({}, ideal), std::invalid_argument);
}

TEST_CASE("impute_oxygen geometry") {
    Rng rng(63);
    const IdealResidue ideal;
    const auto frames = random_frames(6, rng);
    const BackboneChain chain = realize_chain(frames, ideal);
    const BackboneChain imputed = impute_oxygen(chain, ideal);

    for (std::size_t i = 0; i + 1 < imputed.size(); ++i) {
        const Vec3& ca = imputed.atoms[i][1];
        const Vec3& c = imputed.atoms[i][2];
        const Vec3& o = imputed.atoms[i][3];
        const Vec3& n_next = imputed.atoms[i + 1][0];

        // bond length equals the configured ideal C=O length
        CHECK(std::abs((o - c).norm() - ideal.co_bond_length()) < 1e-9);

        // O lies in the CA(i)-C(i)-N(i+1) plane
        const Vec3 normal = cross(ca - c, n_next - c);
        CHECK(std::abs(dot(normalized(normal), o - c)) < 1e-9);
    }

    // terminal residue keeps its frame-derived O
    CHECK((imputed.atoms.back()[3] - chain.atoms.back()[3]).norm() == 0.0);

    // idempotence
    const BackboneChain twice = impute_oxygen(imputed, ideal);
    for (std::size_t i = 0; i < twice.size(); ++i)
        CHECK((twice.atoms[i][3] - imputed.atoms[i][3]).norm() < 1e-12);

    CHECK_THROWS_AS(impute_oxygen(realize_chain({FrameTransform{}}, ideal), ideal),
                    std::invalid_argument);
}

TEST_CASE("aux_loss trivial values") {
    Rng rng(64);
    const IdealResidue ideal;
    const auto frames = random_frames(4, rng);
    const BackboneChain truth = realize_chain(frames, ideal);

    // identical chains: exactly zero
    const AuxLossResult zero = aux_loss(truth, truth);
    CHECK(zero.bb == 0.0);
    CHECK(zero.dis == 0.0);
    CHECK(zero.total == 0.0);

    // uniform translation: bb = |delta_nm|^2, dis = 0
    const Vec3 delta{1.2, -0.4, 0.9};  // Angstrom
    BackboneChain moved = truth;
    for (auto& res : moved.atoms)
        for (auto& atom : res) atom += delta;
    const AuxLossResult shifted = aux_loss(moved, truth);
    CHECK(shifted.bb == doctest::Approx((delta / 10.0).norm2()).epsilon(1e-12));
    CHECK(shifted.dis < 1e-15);

    // mismatched lengths are rejected
    BackboneChain shorter = truth;
    shorter.atoms.pop_back();
    CHECK_THROWS_AS(aux_loss(shorter, truth), std::invalid_argument);
}

TEST_CASE("aux_loss matches the brute-force double-sum oracle") {
    Rng rng(65);
    const IdealResidue ideal;
    for (int n = 2; n <= 5; ++n) {
        const auto frames = random_frames(n, rng, 1.0);
        const BackboneChain truth = realize_chain(frames, ideal);
        // perturb a single atom plus a mild global wobble
        BackboneChain pred = truth;
        pred.atoms[n / 2][2] += Vec3{0.4, -0.2, 0.3};
        for (auto& res : pred.atoms)
            for (auto& atom : res) atom += sample_gaussian_r3(rng) * 0.05;

        const AuxLossResult got = aux_loss(pred, truth);
        const BruteAux want = brute_force_aux(pred, truth);
        CHECK(std::abs(got.bb - want.bb) < 1e-10);
        CHECK(std::abs(got.dis - want.dis) < 1e-10);
        CHECK(std::abs(got.total - (want.bb + want.dis)) < 1e-10);
    }
}

TEST_CASE("aux_loss distance term is rigid-motion invariant, bb is not") {
    Rng rng(66);
    const IdealResidue ideal;
    const auto frames = random_frames(5, rng, 1.5);
    const BackboneChain truth = realize_chain(frames, ideal);
    BackboneChain pred = truth;
    for (auto& res : pred.atoms)
        for (auto& atom : res) atom += sample_gaussian_r3(rng) * 0.3;

    const AuxLossResult base = aux_loss(pred, truth);

    // apply a global rigid motion to the prediction
    const UnitQuat rot = sample_uniform_so3(rng);
    const Vec3 shift{5.0, -2.0, 1.0};
    BackboneChain moved = pred;
    for (auto& res : moved.atoms)
        for (auto& atom : res) atom = rotate_vector(rot, atom) + shift;

    const AuxLossResult rigid = aux_loss(moved, truth);
    CHECK(std::abs(rigid.dis - base.dis) < 1e-10);
    CHECK(std::abs(rigid.bb - base.bb) > 1e-6);
}

TEST_CASE("unit conversion uses nanometers with a known pair") {
    // two residues 3.8 Angstrom apart: a 1 Angstrom prediction error on one CA
    // shows up as 0.1 nm in the distance term's units
    const IdealResidue ideal;
    const std::vector<FrameTransform> frames{{{0, 0, 0}, UnitQuat::identity()},
                                             {{3.8, 0, 0}, UnitQuat::identity()}};
    const BackboneChain truth = realize_chain(frames, ideal);
    BackboneChain pred = truth;
    pred.atoms[0][1] += Vec3{1.0, 0.0, 0.0};  // 1 Angstrom = 0.1 nm
    const AuxLossResult r = aux_loss(pred, truth);
    CHECK(r.bb == doctest::Approx(0.1 * 0.1 / 8.0).epsilon(1e-12));  // one of 8 atoms moved by 0.1 nm
}

TEST_CASE("chain text export round-trips") {
    Rng rng(67);
    const IdealResidue ideal;
    const BackboneChain chain = realize_chain(random_frames(3, rng), ideal);
    const std::string text = chain_to_text(chain);
    const auto parsed = parse_chain_text(text);
    REQUIRE(parsed.size() == chain.size());
    for (std::size_t i = 0; i < chain.size(); ++i)
        for (int a = 0; a < 4; ++a) CHECK((parsed[i][a] - chain.atoms[i][a]).norm() == 0.0);

    CHECK_THROWS(parse_chain_text("1 N not-a-number 0 0\n"));
    CHECK_THROWS(parse_chain_text("1 XX 0 0 0\n"));
}
