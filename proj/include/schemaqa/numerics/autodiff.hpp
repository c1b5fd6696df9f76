#pragma once
// Small reverse-mode tape over tensors. A tape is built per forward pass and
// discarded; backward walks the nodes in reverse creation order. Row-vector
// convention throughout: x' = x * W with W shaped [in, out].

#include <cstdint>
#include <span>
#include <vector>

#include "schemaqa/numerics/tensor.hpp"

namespace schemaqa::numerics {

class Tape {
public:
    using Var = std::int32_t;

    // Leaves. Both participate in backward; "constant" only documents intent.
    Var input(Tensor v);
    Var constant(Tensor v);

    Var add(Var a, Var b);
    Var mul(Var a, Var b);                      // elementwise
    Var scale(Var a, double k);
    Var scale_by(Var a, Var s);                 // s is a [1] scalar
    Var vecmat(Var v, Var m);                   // [k] x [k,c] -> [c]
    Var dot(Var a, Var b);                      // -> [1]
    Var concat(Var a, Var b);
    Var slice(Var a, std::size_t offset, std::size_t len);
    Var row(Var m, std::size_t r);              // matrix row as a vector
    Var relu(Var a);
    Var tanh_fn(Var a);
    Var sigmoid_fn(Var a);
    Var softmax_fn(Var a);
    Var stack(std::span<const Var> scalars);    // n scalars -> [n]
    Var pick(Var v, std::size_t i);             // component as a [1] scalar
    Var sum_of(std::span<const Var> items);     // elementwise sum, same shapes
    Var mean_of(std::span<const Var> items);
    // Binary cross entropy against a fixed 0/1 target, input clamped to
    // [1e-12, 1 - 1e-12] first.
    Var bce(Var p, double target);

    const Tensor& value(Var v) const { return nodes_[static_cast<std::size_t>(v)].value; }
    const Tensor& grad(Var v) const { return nodes_[static_cast<std::size_t>(v)].grad; }

    // Seeds d(root) with upstream (shape of root's value) and accumulates
    // gradients into every node reachable from it.
    void backward(Var root, const Tensor& upstream);

    std::size_t size() const { return nodes_.size(); }

private:
    enum class Op : std::uint8_t {
        leaf,
        add,
        mul,
        scale,
        scale_by,
        vecmat,
        dot,
        concat,
        slice,
        row,
        relu,
        tanh_fn,
        sigmoid_fn,
        softmax_fn,
        stack,
        pick,
        sum_of,
        mean_of,
        bce,
    };

    struct Node {
        Tensor value;
        Tensor grad;
        Op op = Op::leaf;
        std::uint32_t parent_offset = 0;
        std::uint32_t parent_count = 0;
        std::size_t aux0 = 0;   // slice offset / row / pick index
        double auxd = 0.0;      // scale factor / bce target / clamped input
    };

    Var push(Tensor value, Op op, std::initializer_list<Var> parents);
    Var push(Tensor value, Op op, std::span<const Var> parents);
    void backprop_node(std::size_t i);
    Tensor& grad_of(Var v) { return nodes_[static_cast<std::size_t>(v)].grad; }
    const Var* parents_of(const Node& n) const { return parents_.data() + n.parent_offset; }

    std::vector<Node> nodes_;
    std::vector<Var> parents_;
};

}  // namespace schemaqa::numerics
