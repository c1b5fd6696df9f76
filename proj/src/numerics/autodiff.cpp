#include "schemaqa/numerics/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "schemaqa/numerics/nn.hpp"

namespace schemaqa::numerics {

namespace {
constexpr double kBceClamp = 1e-12;
}

Tape::Var Tape::push(Tensor value, Op op, std::initializer_list<Var> parents) {
    std::vector<Var> p(parents);
    return push(std::move(value), op, std::span<const Var>(p));
}

Tape::Var Tape::push(Tensor value, Op op, std::span<const Var> parents) {
    Node n;
    n.value = std::move(value);
    n.op = op;
    n.parent_offset = static_cast<std::uint32_t>(parents_.size());
    n.parent_count = static_cast<std::uint32_t>(parents.size());
    for (Var p : parents) {
        if (p < 0 || static_cast<std::size_t>(p) >= nodes_.size()) {
            throw Error("tape: parent var out of range");
        }
        parents_.push_back(p);
    }
    nodes_.push_back(std::move(n));
    return static_cast<Var>(nodes_.size() - 1);
}

Tape::Var Tape::input(Tensor v) { return push(std::move(v), Op::leaf, {}); }
Tape::Var Tape::constant(Tensor v) { return push(std::move(v), Op::leaf, {}); }

Tape::Var Tape::add(Var a, Var b) {
    return push(numerics::add(value(a), value(b)), Op::add, {a, b});
}

Tape::Var Tape::mul(Var a, Var b) {
    return push(numerics::mul(value(a), value(b)), Op::mul, {a, b});
}

Tape::Var Tape::scale(Var a, double k) {
    Var v = push(numerics::scale(value(a), k), Op::scale, {a});
    nodes_.back().auxd = k;
    return v;
}

Tape::Var Tape::scale_by(Var a, Var s) {
    if (value(s).size() != 1) throw Error("tape scale_by: scalar operand must have size 1");
    return push(numerics::scale(value(a), value(s)[0]), Op::scale_by, {a, s});
}

Tape::Var Tape::vecmat(Var v, Var m) {
    return push(numerics::vecmat(value(v), value(m)), Op::vecmat, {v, m});
}

Tape::Var Tape::dot(Var a, Var b) {
    return push(Tensor::scalar(numerics::dot(value(a), value(b))), Op::dot, {a, b});
}

Tape::Var Tape::concat(Var a, Var b) {
    return push(numerics::concat(value(a), value(b)), Op::concat, {a, b});
}

Tape::Var Tape::slice(Var a, std::size_t offset, std::size_t len) {
    const Tensor& t = value(a);
    if (t.rank() != 1 || offset + len > t.size()) throw Error("tape slice: out of range");
    std::vector<double> vals(t.data.begin() + static_cast<std::ptrdiff_t>(offset),
                             t.data.begin() + static_cast<std::ptrdiff_t>(offset + len));
    Var v = push(Tensor::vector(std::move(vals)), Op::slice, {a});
    nodes_.back().aux0 = offset;
    return v;
}

Tape::Var Tape::row(Var m, std::size_t r) {
    const Tensor& t = value(m);
    if (t.rank() != 2 || r >= t.rows()) throw Error("tape row: index out of range");
    std::vector<double> vals(t.data.begin() + static_cast<std::ptrdiff_t>(r * t.cols()),
                             t.data.begin() + static_cast<std::ptrdiff_t>((r + 1) * t.cols()));
    Var v = push(Tensor::vector(std::move(vals)), Op::row, {m});
    nodes_.back().aux0 = r;
    return v;
}

Tape::Var Tape::relu(Var a) { return push(numerics::relu(value(a)), Op::relu, {a}); }

Tape::Var Tape::tanh_fn(Var a) {
    Tensor out = value(a);
    for (auto& x : out.data) x = std::tanh(x);
    return push(std::move(out), Op::tanh_fn, {a});
}

Tape::Var Tape::sigmoid_fn(Var a) {
    Tensor out = value(a);
    for (auto& x : out.data) x = sigmoid(x);
    return push(std::move(out), Op::sigmoid_fn, {a});
}

Tape::Var Tape::softmax_fn(Var a) {
    return push(numerics::softmax(value(a)), Op::softmax_fn, {a});
}

Tape::Var Tape::stack(std::span<const Var> scalars) {
    if (scalars.empty()) throw Error("tape stack: empty input");
    std::vector<double> vals;
    vals.reserve(scalars.size());
    for (Var s : scalars) {
        if (value(s).size() != 1) throw Error("tape stack: operands must be scalars");
        vals.push_back(value(s)[0]);
    }
    return push(Tensor::vector(std::move(vals)), Op::stack, scalars);
}

Tape::Var Tape::pick(Var v, std::size_t i) {
    const Tensor& t = value(v);
    if (t.rank() != 1 || i >= t.size()) throw Error("tape pick: index out of range");
    Var out = push(Tensor::scalar(t[i]), Op::pick, {v});
    nodes_.back().aux0 = i;
    return out;
}

Tape::Var Tape::sum_of(std::span<const Var> items) {
    if (items.empty()) throw Error("tape sum_of: empty input");
    Tensor acc = value(items[0]);
    for (std::size_t i = 1; i < items.size(); ++i) add_inplace(acc, value(items[i]));
    return push(std::move(acc), Op::sum_of, items);
}

Tape::Var Tape::mean_of(std::span<const Var> items) {
    if (items.empty()) throw Error("tape mean_of: empty input");
    Tensor acc = value(items[0]);
    for (std::size_t i = 1; i < items.size(); ++i) add_inplace(acc, value(items[i]));
    double inv = 1.0 / static_cast<double>(items.size());
    for (auto& x : acc.data) x *= inv;
    return push(std::move(acc), Op::mean_of, items);
}

Tape::Var Tape::bce(Var p, double target) {
    if (value(p).size() != 1) throw Error("tape bce: probability must be a scalar");
    if (target != 0.0 && target != 1.0) throw Error("tape bce: target must be 0 or 1");
    double raw = value(p)[0];
    double clamped = std::min(1.0 - kBceClamp, std::max(kBceClamp, raw));
    double loss = -(target * std::log(clamped) + (1.0 - target) * std::log(1.0 - clamped));
    Var v = push(Tensor::scalar(loss), Op::bce, {p});
    nodes_.back().auxd = target;
    nodes_.back().aux0 = (raw == clamped) ? 1 : 0;
    return v;
}

void Tape::backward(Var root, const Tensor& upstream) {
    std::size_t r = static_cast<std::size_t>(root);
    if (r >= nodes_.size()) throw Error("tape backward: root out of range");
    if (!upstream.same_shape(nodes_[r].value)) {
        throw Error("tape backward: upstream gradient shape mismatch");
    }
    for (auto& n : nodes_) {
        n.grad = Tensor::zeros(n.value.shape);
    }
    nodes_[r].grad = upstream;
    for (std::size_t i = r + 1; i-- > 0;) {
        backprop_node(i);
    }
}

void Tape::backprop_node(std::size_t i) {
    Node& n = nodes_[i];
    if (n.op == Op::leaf) return;
    const Var* par = parents_of(n);
    const Tensor& g = n.grad;
    switch (n.op) {
        case Op::add:
            add_inplace(grad_of(par[0]), g);
            add_inplace(grad_of(par[1]), g);
            break;
        case Op::mul: {
            Tensor& ga = grad_of(par[0]);
            Tensor& gb = grad_of(par[1]);
            const Tensor& a = value(par[0]);
            const Tensor& b = value(par[1]);
            for (std::size_t k = 0; k < g.size(); ++k) {
                ga[k] += g[k] * b[k];
                gb[k] += g[k] * a[k];
            }
            break;
        }
        case Op::scale:
            add_scaled_inplace(grad_of(par[0]), g, n.auxd);
            break;
        case Op::scale_by: {
            const Tensor& a = value(par[0]);
            double s = value(par[1])[0];
            add_scaled_inplace(grad_of(par[0]), g, s);
            double ds = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) ds += g[k] * a[k];
            grad_of(par[1])[0] += ds;
            break;
        }
        case Op::vecmat: {
            const Tensor& v = value(par[0]);
            const Tensor& m = value(par[1]);
            Tensor& gv = grad_of(par[0]);
            Tensor& gm = grad_of(par[1]);
            for (std::size_t k = 0; k < m.rows(); ++k) {
                double acc = 0.0;
                for (std::size_t j = 0; j < m.cols(); ++j) {
                    acc += m.at(k, j) * g[j];
                    gm.at(k, j) += v[k] * g[j];
                }
                gv[k] += acc;
            }
            break;
        }
        case Op::dot: {
            double g0 = g[0];
            add_scaled_inplace(grad_of(par[0]), value(par[1]), g0);
            add_scaled_inplace(grad_of(par[1]), value(par[0]), g0);
            break;
        }
        case Op::concat: {
            Tensor& ga = grad_of(par[0]);
            Tensor& gb = grad_of(par[1]);
            for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += g[k];
            for (std::size_t k = 0; k < gb.size(); ++k) gb[k] += g[ga.size() + k];
            break;
        }
        case Op::slice: {
            Tensor& ga = grad_of(par[0]);
            for (std::size_t k = 0; k < g.size(); ++k) ga[n.aux0 + k] += g[k];
            break;
        }
        case Op::row: {
            Tensor& gm = grad_of(par[0]);
            std::size_t cols = value(par[0]).cols();
            for (std::size_t k = 0; k < g.size(); ++k) gm.data[n.aux0 * cols + k] += g[k];
            break;
        }
        case Op::relu: {
            Tensor& ga = grad_of(par[0]);
            const Tensor& y = n.value;
            for (std::size_t k = 0; k < g.size(); ++k) {
                if (y[k] > 0.0) ga[k] += g[k];
            }
            break;
        }
        case Op::tanh_fn: {
            Tensor& ga = grad_of(par[0]);
            const Tensor& y = n.value;
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * (1.0 - y[k] * y[k]);
            break;
        }
        case Op::sigmoid_fn: {
            Tensor& ga = grad_of(par[0]);
            const Tensor& y = n.value;
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * y[k] * (1.0 - y[k]);
            break;
        }
        case Op::softmax_fn: {
            Tensor& ga = grad_of(par[0]);
            const Tensor& y = n.value;
            double gy = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) gy += g[k] * y[k];
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += y[k] * (g[k] - gy);
            break;
        }
        case Op::stack:
            for (std::uint32_t k = 0; k < n.parent_count; ++k) grad_of(par[k])[0] += g[k];
            break;
        case Op::pick:
            grad_of(par[0])[n.aux0] += g[0];
            break;
        case Op::sum_of:
            for (std::uint32_t k = 0; k < n.parent_count; ++k) add_inplace(grad_of(par[k]), g);
            break;
        case Op::mean_of: {
            double inv = 1.0 / static_cast<double>(n.parent_count);
            for (std::uint32_t k = 0; k < n.parent_count; ++k) {
                add_scaled_inplace(grad_of(par[k]), g, inv);
            }
            break;
        }
        case Op::bce: {
            if (n.aux0 == 0) break;  // clamped: flat in p
            double p = value(par[0])[0];
            double y = n.auxd;
            grad_of(par[0])[0] += g[0] * (-y / p + (1.0 - y) / (1.0 - p));
            break;
        }
        case Op::leaf:
            break;
    }
}

}  // namespace schemaqa::numerics
