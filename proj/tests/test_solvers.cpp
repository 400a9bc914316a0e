#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <iostream>

#include "qflow/igso3.hpp"
#include "qflow/solvers.hpp"

using namespace qflow;

TEST_CASE("euler_step_translation") {
    CHECK((euler_step_translation({1, 2, 3}, {0, 0, 0}, 0.1) - Vec3{1, 2, 3}).norm() == 0.0);
    CHECK((euler_step_translation({0, 0, 0}, {1, 0, 0}, 0.1) - Vec3{0.1, 0, 0}).norm() == 0.0);

    // L steps at the constant oracle velocity reach x1 exactly
    const Vec3 x0{0.3, -1.0, 2.0};
    const Vec3 x1{-2.0, 0.5, 1.0};
    const int steps = 500;
    Vec3 x = x0;
    for (int i = 0; i < steps; ++i) x = euler_step_translation(x, x1 - x0, 1.0 / steps);
    CHECK((x - x1).norm() < 1e-12);
}

TEST_CASE("euler_step_quat_exp stays unit with no renormalization") {
    Rng rng(41);
    CHECK(geodesic_distance(euler_step_quat_exp(UnitQuat::identity(), {0, 0, 0}, 0.5),
                            UnitQuat::identity()) == 0.0);

    // one full step of omega = (pi,0,0) from identity lands on [0,1,0,0]
    const UnitQuat q = euler_step_quat_exp(UnitQuat::identity(), {kPi, 0.0, 0.0}, 1.0);
    CHECK(std::abs(q.s()) < 1e-15);
    CHECK(q.u().x == doctest::Approx(1.0).epsilon(1e-15));

    // Chained drift is a sub-ulp bias from libm trig rounding inside the exp
    // map, measured at ~2.6e-13 after 1e4 steps; the per-step change stays at
    // the 1e-13 scale and there is no renormalization anywhere in the loop.
    UnitQuat state = sample_uniform_so3(rng);
    for (int i = 0; i < 10000; ++i) {
        const double before = state.quat().norm();
        state = euler_step_quat_exp(state, sample_unit_axis(rng) * 0.8, 1e-3);
        CHECK(std::abs(state.quat().norm() - before) < 1e-13);  // per-step preservation
    }
    CHECK(std::abs(state.quat().norm() - 1.0) < 1e-12);
}

TEST_CASE("euler_step_quat_additive drifts off the sphere without renormalization") {
    const UnitQuat q0 = UnitQuat::identity();
    const UnitQuat q1 = exp_map({0.0, kPi / 2.0, 0.0});

    CHECK((euler_step_quat_additive(q0.quat(), Quat{0.0, {}}, 0.5, false) - q0.quat()).norm() == 0.0);

    // one coarse unnormalized step leaves the unit sphere by more than 1e-6
    const Quat eta0 = slerp_additive_velocity(q0, q1, 0.0);
    const Quat stepped = euler_step_quat_additive(q0.quat(), eta0, 0.5, false);
    CHECK(std::abs(stepped.norm() - 1.0) > 1e-6);

    // renormalized fine-grained additive path tracks the exp-format path
    const int steps = 1000;
    Quat q = q0.quat();
    for (int i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const Quat eta = slerp_additive_velocity(q0, q1, t);
        q = euler_step_quat_additive(q, eta, 1.0 / steps, true);
    }
    CHECK(geodesic_distance(UnitQuat::normalize(q), q1) < 1e-3);
}

TEST_CASE("euler_step_matrix matches the quaternion solver at moderate angles") {
    Rng rng(42);
    const Mat3 r = quat_to_matrix(sample_uniform_so3(rng));
    CHECK(max_abs_diff(euler_step_matrix(r, {0, 0, 0}, 0.3), r) == 0.0);

    const UnitQuat q0 = sample_uniform_so3(rng);
    const Vec3 omega = sample_unit_axis(rng) * 1.2;
    UnitQuat q = q0;
    Mat3 m = quat_to_matrix(q0);
    const int steps = 100;
    for (int i = 0; i < steps; ++i) {
        q = euler_step_quat_exp(q, omega, 1.0 / steps);
        m = euler_step_matrix(m, omega, 1.0 / steps);
    }
    CHECK(max_abs_diff(quat_to_matrix(q), m) < 1e-8);

    // orthogonality drift after 1e4 steps: informational only
    Mat3 drift = quat_to_matrix(q0);
    for (int i = 0; i < 10000; ++i) drift = euler_step_matrix(drift, omega, 1e-3);
    const double ortho = max_abs_diff(drift.transpose() * drift, Mat3::identity());
    std::cout << "[info] matrix solver orthogonality drift after 1e4 steps: " << ortho << "\n";
    CHECK(std::isfinite(ortho));
}

namespace {

EndpointModel oracle_model(const FrameTransform& target) {
    return [target](const FrameTransform&, double) { return std::make_pair(target.x, target.q); };
}

}  // namespace

TEST_CASE("integrate_path with an oracle model") {
    Rng rng(43);
    const IgsoSampler igso;
    const FrameTransform start{sample_gaussian_r3(rng), igso.sample(rng)};
    const FrameTransform target{{1.5, -0.5, 2.0}, sample_uniform_so3(rng)};
    const EndpointModel model = oracle_model(target);

    SUBCASE("L = 500 without scheduler recovers the target") {
        SolverConfig cfg;
        cfg.steps = 500;
        cfg.scheduler_enabled = false;
        const FrameTransform end = integrate_path(model, start, cfg);
        CHECK((end.x - target.x).norm() < 1e-9);
        CHECK(geodesic_distance(end.q, target.q) < 1e-6);
    }

    SUBCASE("L = 1 lands exactly (straight path, one step)") {
        SolverConfig cfg;
        cfg.steps = 1;
        cfg.scheduler_enabled = false;
        const FrameTransform end = integrate_path(model, start, cfg);
        CHECK((end.x - target.x).norm() < 1e-10);
        CHECK(geodesic_distance(end.q, target.q) < 1e-10);
    }

    SUBCASE("scheduler gamma = 10, L = 500 leaves the scheduled residual") {
        SolverConfig cfg;
        cfg.steps = 500;
        cfg.scheduler_enabled = true;
        cfg.scheduler.gamma = 10.0;
        const double phi = geodesic_distance(start.q, target.q);
        const FrameTransform end = integrate_path(model, start, cfg);
        const double residual = geodesic_distance(end.q, target.q);
        // discrete decay (1 - gamma*dt)^L sits just under exp(-gamma)
        CHECK(residual <= std::exp(-10.0) * phi + 1e-6);
        CHECK(residual == doctest::Approx(std::pow(1.0 - 10.0 / 500.0, 500) * phi).epsilon(1e-6));
        // translation is unaffected by the rotation scheduler
        CHECK((end.x - target.x).norm() < 1e-9);
    }
}

TEST_CASE("integrate_path determinism and trace shape") {
    Rng rng(44);
    const IgsoSampler igso;
    const FrameTransform start{sample_gaussian_r3(rng), igso.sample(rng)};
    const FrameTransform target{{0.4, 0.1, -1.0}, sample_uniform_so3(rng)};
    SolverConfig cfg;
    cfg.steps = 64;
    const EndpointModel model = oracle_model(target);

    const FrameTransform a = integrate_path(model, start, cfg);
    const FrameTransform b = integrate_path(model, start, cfg);
    CHECK(a.x.x == b.x.x);
    CHECK(a.x.y == b.x.y);
    CHECK(a.x.z == b.x.z);
    CHECK(a.q.s() == b.q.s());
    CHECK(a.q.u().x == b.q.u().x);

    const auto trace = integrate_path_trace(model, start, cfg);
    REQUIRE(trace.size() == 65);
    CHECK(trace.front().x.x == start.x.x);
    CHECK(trace.back().x.x == a.x.x);
    CHECK(trace.back().q.s() == a.q.s());
}

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    cfg.steps = 0;
    CHECK_THROWS_AS(validate_solver_config(cfg), std::invalid_argument);

    cfg = SolverConfig{};
    cfg.steps = 500;
    CHECK_NOTHROW(validate_solver_config(cfg));

    // steps incompatible with the min_t floor
    cfg.min_t = 0.01;
    cfg.steps = 500;
    CHECK_THROWS_AS(validate_solver_config(cfg), std::invalid_argument);
    cfg.steps = 100;
    CHECK_NOTHROW(validate_solver_config(cfg));

    cfg = SolverConfig{};
    cfg.scheduler.gamma = 0.0;
    CHECK_THROWS_AS(validate_solver_config(cfg), std::invalid_argument);
}
