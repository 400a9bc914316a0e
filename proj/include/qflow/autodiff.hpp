#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qflow::ad {

class Tape;

// Handle into a Tape; cheap to copy.
struct Var {
    Tape* tape = nullptr;
    int32_t id = -1;
};

// Flat reverse-mode tape over scalar doubles. Nodes are appended in forward
// order; backward() runs one adjoint sweep in reverse insertion order, which
// is already a topological order. reset() keeps the allocation for reuse
// across training steps.
class Tape {
public:
    Var input(double value) { return push(Op::Input, -1, -1, 0.0, value); }
    Var constant(double value) { return push(Op::Const, -1, -1, 0.0, value); }

    double val(Var v) const { return nodes_[v.id].x; }
    double grad(Var v) const { return nodes_[v.id].g; }

    void backward(Var root);
    void reset() { nodes_.clear(); }
    std::size_t size() const { return nodes_.size(); }
    void reserve(std::size_t n) { nodes_.reserve(n); }

    Var add(Var a, Var b) { return push(Op::Add, a.id, b.id, 0.0, x(a) + x(b)); }
    Var sub(Var a, Var b) { return push(Op::Sub, a.id, b.id, 0.0, x(a) - x(b)); }
    Var mul(Var a, Var b) { return push(Op::Mul, a.id, b.id, 0.0, x(a) * x(b)); }
    Var div(Var a, Var b) { return push(Op::Div, a.id, b.id, 0.0, x(a) / x(b)); }
    Var neg(Var a) { return push(Op::Neg, a.id, -1, 0.0, -x(a)); }
    Var add_c(Var a, double c) { return push(Op::AddC, a.id, -1, c, x(a) + c); }
    Var mul_c(Var a, double c) { return push(Op::MulC, a.id, -1, c, x(a) * c); }
    // addend + w * f in one node; rounds exactly like mul followed by add
    Var mul_add(Var addend, Var w, Var f) {
        return push_c(Op::MulAdd, addend.id, w.id, f.id, x(addend) + x(w) * x(f));
    }
    Var tanh_(Var a);
    Var sqrt_(Var a);
    Var atan2_(Var y, Var x);

private:
    enum class Op : uint8_t { Const, Input, Add, Sub, Mul, Div, Neg, AddC, MulC, MulAdd, Tanh, Sqrt, Atan2 };

    struct Node {
        Op op;
        int32_t a = -1, b = -1, c = -1;
        double aux = 0.0;
        double x = 0.0;
        double g = 0.0;
    };

    double x(Var v) const { return nodes_[v.id].x; }
    Var push(Op op, int32_t a, int32_t b, double aux, double value);
    Var push_c(Op op, int32_t a, int32_t b, int32_t c, double value);

    std::vector<Node> nodes_;
};

inline Var operator+(Var a, Var b) { return a.tape->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape->sub(a, b); }
inline Var operator*(Var a, Var b) { return a.tape->mul(a, b); }
inline Var operator/(Var a, Var b) { return a.tape->div(a, b); }
inline Var operator-(Var a) { return a.tape->neg(a); }

inline Var operator+(Var a, double c) { return a.tape->add_c(a, c); }
inline Var operator+(double c, Var a) { return a.tape->add_c(a, c); }
inline Var operator-(Var a, double c) { return a.tape->add_c(a, -c); }
inline Var operator-(double c, Var a) { return a.tape->add_c(a.tape->neg(a), c); }
inline Var operator*(Var a, double c) { return a.tape->mul_c(a, c); }
inline Var operator*(double c, Var a) { return a.tape->mul_c(a, c); }
inline Var operator/(Var a, double c) { return a.tape->mul_c(a, 1.0 / c); }
inline Var operator/(double c, Var a) { return a.tape->div(a.tape->constant(c), a); }

inline Var tanh(Var a) { return a.tape->tanh_(a); }
inline Var sqrt(Var a) { return a.tape->sqrt_(a); }
inline Var atan2(Var y, Var x) { return y.tape->atan2_(y, x); }
inline Var square(Var a) { return a.tape->mul(a, a); }

}  // namespace qflow::ad
