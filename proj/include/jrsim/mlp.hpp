#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "jrsim/rng.hpp"

namespace jrsim {

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Fully connected network: tanh hidden layers, linear output.
///
/// All weights and biases live in one flat vector so optimizers, target
/// averaging and finite differences work on a single array. Layer l owns a
/// (out x in) column-major weight block followed by its bias.
class Mlp {
 public:
  Mlp() = default;
  /// Zero-initialized network.
  explicit Mlp(std::vector<int> sizes);
  /// Glorot-uniform weights, zero biases.
  static Mlp glorot(std::vector<int> sizes, Rng& rng);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  Eigen::Index param_count() const { return params_.size(); }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  Eigen::Map<Eigen::MatrixXd> weight(int l);
  Eigen::Map<const Eigen::MatrixXd> weight(int l) const;
  Eigen::Map<Eigen::VectorXd> bias(int l);
  Eigen::Map<const Eigen::VectorXd> bias(int l) const;

  /// Activations of every layer for a batch (one sample per column).
  struct Tape {
    std::vector<Eigen::MatrixXd> act;  // act[0] = input, act[L] = output
  };

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& X) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& X, Tape& tape) const;

  /// Gradient of sum_b <dY_b, f(X_b)> with respect to the parameters, summed
  /// over the batch. If dX is given it receives the input gradient.
  Eigen::VectorXd backward(const Tape& tape, const Eigen::MatrixXd& dY,
                           Eigen::MatrixXd* dX = nullptr) const;
  /// Single-sample convenience form.
  Eigen::VectorXd backward(const Eigen::VectorXd& x, const Eigen::VectorXd& upstream,
                           Eigen::VectorXd* dx = nullptr) const;

  bool operator==(const Mlp& o) const { return sizes_ == o.sizes_ && params_ == o.params_; }

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::Index> w_off_, b_off_;
  Eigen::VectorXd params_;
};

/// Adaptive-moment optimizer over a flat parameter vector.
struct Adam {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Eigen::VectorXd m, v;
  long long t = 0;

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr);
};

/// Plain gradient descent, p -= lr * g.
void sgd_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr);

/// Inverse-time decay lr_t = lr0 / (1 + kappa t)^power.
struct LrSchedule {
  double lr0 = 1e-4;
  double kappa = 0.0;
  double power = 1.0;

  double at(long long t) const;
};

/// Problems with a two-timescale actor/critic schedule pair: each must be
/// non-increasing with sum lr = inf and sum lr^2 < inf (power in (0.5, 1],
/// kappa > 0), and actor/critic must vanish (actor power > critic power).
std::vector<std::string> check_schedules(const LrSchedule& actor, const LrSchedule& critic);

/// Binary checkpoint: "JRMLP001", uint32 layer-size count, uint32 sizes,
/// then per layer row-major weights and the bias, as little-endian doubles.
void save_checkpoint(const Mlp& net, std::ostream& out);
void save_checkpoint(const Mlp& net, const std::filesystem::path& path);
Mlp load_checkpoint(std::istream& in);
Mlp load_checkpoint(const std::filesystem::path& path);
/// CSV rows "layer,kind,row,col,value" (kind is W or b).
void export_csv(const Mlp& net, std::ostream& out);

struct GradCheck {
  double max_rel_error = 0.0;  // parameters and inputs
  double max_abs_error = 0.0;
};

/// Central differences of <upstream, f(x)> against backward(). Entries whose
/// analytic and numeric values are both below `floor` are compared absolutely.
GradCheck gradcheck(const Mlp& net, const Eigen::VectorXd& x, const Eigen::VectorXd& upstream,
                    double h = 1e-5, double floor = 1e-8);

}  // namespace jrsim
