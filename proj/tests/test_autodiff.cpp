#include <doctest.h>

#include <cmath>

#include "qflow/autodiff.hpp"

using namespace qflow;
using ad::Tape;
using ad::Var;

TEST_CASE("tape evaluates and differentiates elementary compositions") {
    Tape tp;
    Var x = tp.input(0.7);
    Var y = tp.input(-1.3);
    // f = tanh(x*y) + sqrt(x + 2) / y
    Var f = ad::tanh(x * y) + ad::sqrt(x + 2.0) / y;
    tp.backward(f);

    const double fx = std::tanh(0.7 * -1.3) + std::sqrt(2.7) / -1.3;
    CHECK(tp.val(f) == doctest::Approx(fx).epsilon(1e-15));

    // central differences
    auto eval = [](double xv, double yv) { return std::tanh(xv * yv) + std::sqrt(xv + 2.0) / yv; };
    const double h = 1e-6;
    const double gx = (eval(0.7 + h, -1.3) - eval(0.7 - h, -1.3)) / (2 * h);
    const double gy = (eval(0.7, -1.3 + h) - eval(0.7, -1.3 - h)) / (2 * h);
    CHECK(tp.grad(x) == doctest::Approx(gx).epsilon(1e-7));
    CHECK(tp.grad(y) == doctest::Approx(gy).epsilon(1e-7));
}

TEST_CASE("atan2 gradients") {
    auto eval = [](double yv, double xv) { return std::atan2(yv, xv) * std::atan2(yv, xv); };
    for (const auto& [yv, xv] : {std::pair{0.3, 0.9}, std::pair{-0.5, 0.2}, std::pair{0.8, -0.6}}) {
        Tape tp;
        Var y = tp.input(yv);
        Var x = tp.input(xv);
        Var f = ad::square(ad::atan2(y, x));
        tp.backward(f);
        const double h = 1e-6;
        CHECK(tp.grad(y) ==
              doctest::Approx((eval(yv + h, xv) - eval(yv - h, xv)) / (2 * h)).epsilon(1e-6));
        CHECK(tp.grad(x) ==
              doctest::Approx((eval(yv, xv + h) - eval(yv, xv - h)) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("fan-out accumulates adjoints") {
    Tape tp;
    Var x = tp.input(1.5);
    Var f = x * x + x * 3.0 + 2.0 / x;
    tp.backward(f);
    // f'(x) = 2x + 3 - 2/x^2
    CHECK(tp.grad(x) == doctest::Approx(2 * 1.5 + 3 - 2.0 / (1.5 * 1.5)).epsilon(1e-14));
}

TEST_CASE("reset reuses storage") {
    Tape tp;
    Var a = tp.input(2.0);
    Var b = a * a;
    tp.backward(b);
    CHECK(tp.grad(a) == 4.0);
    tp.reset();
    CHECK(tp.size() == 0);
    Var c = tp.input(3.0);
    Var d = c * c * c;
    tp.backward(d);
    CHECK(tp.val(d) == 27.0);
    CHECK(tp.grad(c) == doctest::Approx(27.0).epsilon(1e-15));
}

TEST_CASE("constants carry no gradient") {
    Tape tp;
    Var x = tp.input(0.4);
    Var c = tp.constant(5.0);
    Var f = x * c;
    tp.backward(f);
    CHECK(tp.grad(x) == 5.0);
    CHECK(tp.grad(c) == 0.4);  // adjoint exists but is never extracted for constants
}
