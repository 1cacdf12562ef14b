#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "jrsim/rng.hpp"

namespace jrsim {

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
};

/// Column-per-sample view of a sampled minibatch.
struct Batch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd next_states;
  std::vector<std::size_t> indices;

  Eigen::Index size() const { return rewards.size(); }
};

/// Fixed-capacity ring buffer; the oldest transition is overwritten first.
class ReplayMemory {
 public:
  ReplayMemory(std::size_t capacity, Eigen::Index state_dim, Eigen::Index action_dim);

  void push(const Transition& t);
  void push(const Eigen::VectorXd& s, const Eigen::VectorXd& a, double r,
            const Eigen::VectorXd& s2);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t total_pushed() const { return pushed_; }

  /// Uniform sample of n distinct stored transitions (n <= size()).
  Batch sample(std::size_t n, Rng& rng) const;
  Transition at(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  std::size_t pushed_ = 0;
  Eigen::MatrixXd s_, a_, s2_;
  Eigen::VectorXd r_;
};

/// n distinct indices drawn uniformly from [0, population), in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t n,
                                                    Rng& rng);

}  // namespace jrsim
