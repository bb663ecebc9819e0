#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "meshattn/graph.hpp"
#include "meshattn/tensor.hpp"

namespace meshattn {

enum class AttentionMode {
    NeighborhoodSoftmax,  // softmax over each row's mask support; the default
    DenseLiteral,         // full N x N softmax, then Hadamard with the mask (verification only)
};

/// Reverse-mode tape over exactly the ops the model needs. Ops append nodes
/// in creation order; backward replays them in reverse. Gradients accumulate
/// additively across fan-out. Single-writer: one tape per forward/backward.
///
/// Masks passed to masked_attention are captured by pointer and must outlive
/// the backward pass.
class Tape {
public:
    struct Var {
        int id = -1;
        bool valid() const { return id >= 0; }
    };

    /// When set, every op output is checked for NaN/Inf.
    bool debug_checks = false;

    Var leaf(Tensor value, bool requires_grad = false);

    const Tensor& value(Var v) const { return nodes_[v.id].value; }
    const Tensor& grad(Var v) const { return nodes_[v.id].grad; }
    double scalar_value(Var v) const { return nodes_[v.id].value.data[0]; }

    Var add(Var a, Var b);
    Var matmul(Var x, Var w);            // X (N x a) * W (a x b)
    Var linear(Var x, Var w, Var bias);  // X * W + bias broadcast over rows
    Var gelu(Var x);                     // exact Gaussian-CDF form x * Phi(x)
    Var rmsnorm(Var x, Var gain, double eps);
    Var hadamard(Var a, Var b);
    Var masked_attention(Var q, Var k, Var v, const SparseMask& mask, AttentionMode mode);
    Var slice_cols(Var x, std::size_t col0, std::size_t width);
    Var concat_cols(const std::vector<Var>& parts);
    /// Rows flagged in row_mask get columns [col0, col0+len(token)) replaced by
    /// the (learnable) token vector.
    Var apply_mask_token(Var x, Var token, const std::vector<std::uint8_t>& row_mask,
                         std::size_t col0);
    Var sum(Var x);            // scalar
    Var scale(Var x, double c);
    Var mse(Var pred, const Tensor& target);  // mean over all entries
    /// Mean squared error restricted to the flagged rows.
    Var mse_rows(Var pred, const Tensor& target, const std::vector<std::uint8_t>& row_mask);

    /// Seeds d(loss)/d(loss) = 1 and runs all recorded ops in reverse order.
    void backward(Var scalar_loss);

    std::size_t num_nodes() const { return nodes_.size(); }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool requires_grad = false;
        std::function<void(Tape&)> back;
    };

    std::vector<Node> nodes_;

    Var push(Tensor value, bool requires_grad, std::function<void(Tape&)> back);
    Tensor& grad_ref(int id) { return nodes_[id].grad; }
    bool needs(int id) const { return nodes_[id].requires_grad; }
    void check_finite(const Tensor& t, const char* op) const;
};

}  // namespace meshattn
