#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qac/tensor.hpp"

namespace qac {

// Running statistics for batch normalization. Train-mode nodes update these
// by exponential moving average as a forward side effect.
struct BatchNormState {
  Tensor running_mean;
  Tensor running_var;
  double eps = 1e-5;
  double momentum = 0.9;

  BatchNormState() = default;
  explicit BatchNormState(int dim) : running_mean(dim, 1), running_var(dim, 1) {
    running_var.fill(real(1));
  }
};

// Reverse-mode tape. Values are computed eagerly as nodes are recorded;
// backward() replays the recording in reverse, which is a reverse
// topological order because parents always precede children.
//
// Tensors are copied into a flat arena on entry, so reset() makes the tape
// reusable across minibatches without reallocating.
class Tape {
 public:
  using Id = int;

  Tape() = default;

  // When enabled, every forward value is checked and a non-finite value
  // raises immediately instead of corrupting the training run.
  void set_check_finite(bool on) { check_finite_ = on; }

  void reset();
  size_t node_count() const { return nodes_.size(); }

  // Leaves.
  Id leaf(const Tensor& t, bool requires_grad);
  Id constant(const Tensor& t) { return leaf(t, false); }
  Id constant_scalar(double x);

  // Primitives (forward + backward).
  Id matvec(Id w, Id x);
  Id matmul(Id a, Id b);
  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  Id mul(Id a, Id b);
  // a*x + b*y + c for matrices a (R x C), b (R x K) and vectors x, y, c.
  Id affine2(Id a, Id x, Id b, Id y, Id c);
  Id sigmoid(Id a);
  Id tanh(Id a);
  Id exp(Id a);
  Id concat(Id a, Id b);
  Id slice(Id a, int start, int len);
  Id row(Id m, int r);
  Id stack_rows(std::span<const Id> rows);
  Id max_pool_time(Id m);
  Id hinge(Id s);  // max(0, s) for a scalar; subgradient 0 at the kink
  Id dot(Id u, Id v);
  Id scale(Id s, Id x);  // scalar node times tensor node
  Id scale_const(Id x, double k);
  Id add_n(std::span<const Id> xs);
  Id max_scalars(std::span<const Id> xs);  // ties go to the earliest input
  Id cosine(Id u, Id v);
  Id batch_norm_train(Id x, Id gamma, Id beta, BatchNormState& state);
  Id batch_norm_infer(Id x, Id gamma, Id beta, const BatchNormState& state);

  // Access.
  int rows(Id id) const { return nodes_[id].rows; }
  int cols(Id id) const { return nodes_[id].cols; }
  std::span<const real> val(Id id) const;
  std::span<const real> grad(Id id) const;
  double scalar(Id id) const;
  Tensor tensor(Id id) const;
  Tensor grad_tensor(Id id) const;

  // Populates d(loss)/d(leaf) for every grad-requiring leaf; leaves the loss
  // does not depend on get zero gradient. Errors on a non-scalar loss.
  void backward(Id loss);

 private:
  enum class Op : uint8_t {
    kLeaf,
    kMatVec,
    kMatMul,
    kAdd,
    kSub,
    kMul,
    kAffine2,
    kSigmoid,
    kTanh,
    kExp,
    kConcat,
    kSlice,
    kRow,
    kStackRows,
    kMaxPoolTime,
    kHinge,
    kDot,
    kScale,
    kScaleConst,
    kAddN,
    kMaxScalars,
    kCosine,
    kBnTrain,
    kBnInfer,
  };

  struct Node {
    Op op;
    bool needs_grad;
    int rows, cols;
    size_t off;           // into val_ / grad_
    int args_off, args_n; // into args_
    int i0 = 0, i1 = 0;   // op-specific
    double x0 = 0.0;
    int iaux = -1;        // argmax storage
    int raux = -1;        // saved statistics (batch norm)
  };

  Id push(Op op, int rows, int cols, std::initializer_list<Id> parents);
  Id push(Op op, int rows, int cols, std::span<const Id> parents);
  std::span<real> mut_val(Id id);
  std::span<real> mut_grad(Id id);
  void check_node_finite(Id id);
  const Node& node(Id id) const { return nodes_[id]; }

  std::vector<Node> nodes_;
  std::vector<int> args_;
  std::vector<real> val_;
  std::vector<real> grad_;
  std::vector<int> iaux_;
  std::vector<real> raux_;
  bool check_finite_ = false;
};

// Finite-difference gradient checking. The builder constructs a scalar loss
// from leaves bound to `params` on a fresh tape; analytic gradients from
// backward() are compared against central differences coordinatewise.
// Coordinates where the two one-sided differences disagree (a hinge kink
// under the probe) are skipped and counted rather than failed.
struct GradCheckResult {
  double max_rel_err = 0.0;
  int checked = 0;
  int skipped = 0;
};

using GraphBuilder = std::function<Tape::Id(Tape&, const std::vector<Tape::Id>&)>;

GradCheckResult gradient_check(const GraphBuilder& build, const std::vector<Tensor>& params,
                               double eps = 1e-5, double kink_tol = 1e-3);

}  // namespace qac
