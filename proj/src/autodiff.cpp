#include "qflow/autodiff.hpp"

#include <cmath>

namespace qflow::ad {

Var Tape::push(Op op, int32_t a, int32_t b, double aux, double value) {
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    n.aux = aux;
    n.x = value;
    nodes_.push_back(n);
    return {this, static_cast<int32_t>(nodes_.size() - 1)};
}

Var Tape::push_c(Op op, int32_t a, int32_t b, int32_t c, double value) {
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    n.c = c;
    n.x = value;
    nodes_.push_back(n);
    return {this, static_cast<int32_t>(nodes_.size() - 1)};
}

Var Tape::tanh_(Var a) { return push(Op::Tanh, a.id, -1, 0.0, std::tanh(x(a))); }

Var Tape::sqrt_(Var a) { return push(Op::Sqrt, a.id, -1, 0.0, std::sqrt(x(a))); }

Var Tape::atan2_(Var y, Var x_) { return push(Op::Atan2, y.id, x_.id, 0.0, std::atan2(x(y), x(x_))); }

void Tape::backward(Var root) {
    for (Node& n : nodes_) n.g = 0.0;
    nodes_[root.id].g = 1.0;
    for (int32_t i = root.id; i >= 0; --i) {
        const Node& n = nodes_[i];
        const double g = n.g;
        if (g == 0.0) continue;
        switch (n.op) {
            case Op::Const:
            case Op::Input:
                break;
            case Op::Add:
                nodes_[n.a].g += g;
                nodes_[n.b].g += g;
                break;
            case Op::Sub:
                nodes_[n.a].g += g;
                nodes_[n.b].g -= g;
                break;
            case Op::Mul:
                nodes_[n.a].g += g * nodes_[n.b].x;
                nodes_[n.b].g += g * nodes_[n.a].x;
                break;
            case Op::Div:
                nodes_[n.a].g += g / nodes_[n.b].x;
                nodes_[n.b].g -= g * n.x / nodes_[n.b].x;
                break;
            case Op::Neg:
                nodes_[n.a].g -= g;
                break;
            case Op::AddC:
                nodes_[n.a].g += g;
                break;
            case Op::MulC:
                nodes_[n.a].g += g * n.aux;
                break;
            case Op::MulAdd:
                nodes_[n.a].g += g;
                nodes_[n.b].g += g * nodes_[n.c].x;
                nodes_[n.c].g += g * nodes_[n.b].x;
                break;
            case Op::Tanh:
                nodes_[n.a].g += g * (1.0 - n.x * n.x);
                break;
            case Op::Sqrt:
                nodes_[n.a].g += g * 0.5 / n.x;
                break;
            case Op::Atan2: {
                const double yy = nodes_[n.a].x;
                const double xx = nodes_[n.b].x;
                const double d = xx * xx + yy * yy;
                nodes_[n.a].g += g * xx / d;
                nodes_[n.b].g -= g * yy / d;
                break;
            }
        }
    }
}

}  // namespace qflow::ad
