#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lanmsff/core.hpp"

namespace lanmsff {

namespace detail {

struct TensorStorage {
  Shape shape;
  std::vector<real> data;
  std::vector<real> grad;
  bool requires_grad = false;
  bool retain_grad = false;
  bool produced_by_op = false;
};

}  // namespace detail

/// Dense row-major N-dimensional array. Copies share storage (handle
/// semantics, as the computation graph needs); use clone() for a deep copy.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(Shape shape, real fill = real(0)) : s_(std::make_shared<detail::TensorStorage>()) {
    s_->data.assign(shape_numel(shape), fill);
    s_->shape = std::move(shape);
  }

  Tensor(Shape shape, std::vector<real> data) : s_(std::make_shared<detail::TensorStorage>()) {
    require(shape_numel(shape) == data.size(), ErrorKind::ShapeMismatch, "tensor shape ", shape_str(shape),
            " needs ", shape_numel(shape), " values, got ", data.size());
    s_->shape = std::move(shape);
    s_->data = std::move(data);
  }

  static Tensor scalar(real v) { return Tensor(Shape{1}, std::vector<real>{v}); }

  bool defined() const { return static_cast<bool>(s_); }
  const Shape& shape() const { return s_->shape; }
  std::size_t rank() const { return s_->shape.size(); }
  std::size_t dim(std::size_t i) const { return s_->shape.at(i); }
  std::size_t numel() const { return s_->data.size(); }

  std::span<real> data() { return s_->data; }
  std::span<const real> data() const { return s_->data; }
  real* ptr() { return s_->data.data(); }
  const real* ptr() const { return s_->data.data(); }
  real& operator[](std::size_t i) { return s_->data[i]; }
  real operator[](std::size_t i) const { return s_->data[i]; }

  real item() const {
    require(numel() == 1, ErrorKind::ShapeMismatch, "item() on tensor of shape ", shape_str(shape()));
    return s_->data[0];
  }

  /// NCHW element access.
  real& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    const auto& sh = s_->shape;
    return s_->data[((n * sh[1] + c) * sh[2] + h) * sh[3] + w];
  }
  real at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    const auto& sh = s_->shape;
    return s_->data[((n * sh[1] + c) * sh[2] + h) * sh[3] + w];
  }

  bool requires_grad() const { return s_->requires_grad; }
  Tensor& set_requires_grad(bool on = true) {
    s_->requires_grad = on;
    return *this;
  }
  /// Keep this tensor's gradient after backward even if it is an intermediate.
  Tensor& retain_grad() {
    s_->retain_grad = true;
    return *this;
  }
  bool retains_grad() const { return s_->retain_grad || !s_->produced_by_op; }

  bool has_grad() const { return !s_->grad.empty(); }
  std::span<real> grad() {
    ensure_grad();
    return s_->grad;
  }
  std::span<const real> grad() const { return s_->grad; }
  void ensure_grad() {
    if (s_->grad.empty()) s_->grad.assign(s_->data.size(), real(0));
  }
  void zero_grad() { std::fill(s_->grad.begin(), s_->grad.end(), real(0)); }
  void release_grad() { std::vector<real>().swap(s_->grad); }

  Tensor clone() const {
    Tensor t(s_->shape, s_->data);
    return t;
  }
  /// Same values, fresh storage, no gradient tracking.
  Tensor detach() const { return clone(); }

  bool same_storage(const Tensor& other) const { return s_ == other.s_; }

 private:
  friend class Tape;
  friend Tensor record_node(std::string_view, std::vector<Tensor>, Tensor, std::function<void(std::span<const real>)>);
  std::shared_ptr<detail::TensorStorage> s_;
};

using BackwardFn = std::function<void(std::span<const real> grad_out)>;

/// One recorded operation: what it consumed, what it produced, and how to
/// push an output gradient back to the inputs. Saved context lives in the
/// backward closure.
struct GraphNode {
  std::string op;
  std::vector<Tensor> inputs;
  Tensor output;
  BackwardFn backward;
};

class Tape {
 public:
  void append(GraphNode node) { nodes_.push_back(std::move(node)); }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<GraphNode>& nodes() const { return nodes_; }
  void clear() { nodes_.clear(); }

  /// Reverse sweep from a scalar loss. Gradients accumulate additively into
  /// every requires_grad tensor reachable from the loss; intermediate
  /// gradients are released as soon as they have been propagated unless the
  /// tensor asked to retain them. The tape is cleared afterwards.
  void backward(Tensor loss) {
    require(loss.numel() == 1, ErrorKind::ShapeMismatch, "backward needs a scalar loss, got shape ",
            shape_str(loss.shape()));
    require(!nodes_.empty(), ErrorKind::InvalidArgument, "backward called on an empty tape");
    require(loss.requires_grad(), ErrorKind::InvalidArgument, "loss does not depend on any requires_grad tensor");
    loss.ensure_grad();
    loss.s_->grad[0] += real(1);
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
      auto& out = it->output;
      if (!out.has_grad()) continue;
      it->backward(std::span<const real>(out.s_->grad));
      if (!out.retains_grad()) out.release_grad();
    }
    nodes_.clear();
  }

 private:
  std::vector<GraphNode> nodes_;
};

namespace detail {
inline thread_local Tape* active_tape = nullptr;
}

inline Tape* active_tape() { return detail::active_tape; }

/// Makes `tape` the recording target on this thread for the scope's lifetime.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape) : prev_(detail::active_tape) { detail::active_tape = &tape; }
  ~TapeScope() { detail::active_tape = prev_; }
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* prev_;
};

/// Disables recording for the scope's lifetime.
class NoGradScope {
 public:
  NoGradScope() : prev_(detail::active_tape) { detail::active_tape = nullptr; }
  ~NoGradScope() { detail::active_tape = prev_; }
  NoGradScope(const NoGradScope&) = delete;
  NoGradScope& operator=(const NoGradScope&) = delete;

 private:
  Tape* prev_;
};

inline Tensor record_node(std::string_view op, std::vector<Tensor> inputs, Tensor output, BackwardFn backward) {
  Tape* tape = detail::active_tape;
  if (!tape) return output;
  const bool any = std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) { return t.requires_grad(); });
  if (!any) return output;
  output.s_->requires_grad = true;
  output.s_->produced_by_op = true;
  tape->append(GraphNode{std::string(op), std::move(inputs), output, std::move(backward)});
  return output;
}

/// Runs `forward`, and if any input requires a gradient and a tape is
/// active, appends a node so `backward` can later be replayed.
template <typename Forward>
Tensor record(std::string_view op, std::vector<Tensor> inputs, Forward&& forward, BackwardFn backward) {
  Tensor out = std::forward<Forward>(forward)();
  return record_node(op, std::move(inputs), std::move(out), std::move(backward));
}

/// Returns the gradient buffer of `t` if it participates in differentiation,
/// otherwise an empty span; backward closures skip empty targets.
inline std::span<real> grad_target(Tensor& t) {
  if (!t.requires_grad()) return {};
  return t.grad();
}

// ---------------------------------------------------------------------------
// Non-differentiable branch tracking. Ops with kinks (ReLU, max, median
// selection) report each discrete decision here while a monitor is active;
// the gradient checker compares signatures to detect branch changes.

namespace detail {
struct KinkState {
  bool active = false;
  std::uint64_t signature = 0xcbf29ce484222325ULL;
};
inline thread_local KinkState kink_state;
}  // namespace detail

inline bool kink_monitoring() { return detail::kink_state.active; }

inline void note_kink(std::uint64_t decision) {
  auto& st = detail::kink_state;
  st.signature ^= decision + 0x9e3779b97f4a7c15ULL + (st.signature << 6) + (st.signature >> 2);
}

class KinkMonitor {
 public:
  KinkMonitor() : prev_(detail::kink_state) { detail::kink_state = detail::KinkState{true, 0xcbf29ce484222325ULL}; }
  ~KinkMonitor() { detail::kink_state = prev_; }
  std::uint64_t signature() const { return detail::kink_state.signature; }
  KinkMonitor(const KinkMonitor&) = delete;
  KinkMonitor& operator=(const KinkMonitor&) = delete;

 private:
  detail::KinkState prev_;
};

// ---------------------------------------------------------------------------

struct Parameter {
  std::string name;
  Tensor value;
  bool trainable = true;
};

/// Ordered, name-unique parameter collection. The order is the
/// serialization order.
class ParameterList {
 public:
  Tensor add(std::string name, Shape shape, bool trainable = true, real fill = real(0)) {
    require(!contains(name), ErrorKind::InvalidConfig, "duplicate parameter name '", name, "'");
    Tensor t(std::move(shape), fill);
    t.set_requires_grad(trainable);
    index_.emplace(name, params_.size());
    params_.push_back(Parameter{std::move(name), t, trainable});
    return t;
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const Parameter& get(const std::string& name) const {
    auto it = index_.find(name);
    require(it != index_.end(), ErrorKind::InvalidArgument, "no parameter named '", name, "'");
    return params_[it->second];
  }

  std::size_t size() const { return params_.size(); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  Parameter& operator[](std::size_t i) { return params_[i]; }

  std::size_t count(bool trainable_only = false) const {
    std::size_t n = 0;
    for (const auto& p : params_)
      if (!trainable_only || p.trainable) n += p.value.numel();
    return n;
  }

  void zero_grad() {
    for (auto& p : params_)
      if (p.value.has_grad()) p.value.zero_grad();
  }

 private:
  std::vector<Parameter> params_;
  std::map<std::string, std::size_t> index_;
};

using GradientMap = std::map<std::string, std::vector<real>>;

/// Backward sweep followed by collection of each trainable parameter's gradient.
inline GradientMap backward(Tape& tape, const Tensor& loss, ParameterList& params) {
  tape.backward(loss);
  GradientMap out;
  for (auto& p : params) {
    if (!p.trainable) continue;
    auto g = p.value.grad();
    out.emplace(p.name, std::vector<real>(g.begin(), g.end()));
  }
  return out;
}

}  // namespace lanmsff
