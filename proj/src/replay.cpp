#include "jrsim/replay.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace jrsim {

ReplayMemory::ReplayMemory(std::size_t capacity, Eigen::Index state_dim, Eigen::Index action_dim)
    : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  // Grow lazily: a full 1e5 buffer is allocated only if it is used.
  s_.resize(state_dim, 0);
  a_.resize(action_dim, 0);
  s2_.resize(state_dim, 0);
}

void ReplayMemory::push(const Eigen::VectorXd& s, const Eigen::VectorXd& a, double r,
                        const Eigen::VectorXd& s2) {
  if (s.size() != s_.rows() || s2.size() != s_.rows() || a.size() != a_.rows())
    throw std::invalid_argument("transition shape does not match the replay memory");
  if (next_ >= static_cast<std::size_t>(s_.cols())) {
    const Eigen::Index grown = static_cast<Eigen::Index>(
        std::min(capacity_, std::max<std::size_t>(1024, 2 * static_cast<std::size_t>(s_.cols()))));
    s_.conservativeResize(Eigen::NoChange, grown);
    a_.conservativeResize(Eigen::NoChange, grown);
    s2_.conservativeResize(Eigen::NoChange, grown);
    r_.conservativeResize(grown);
  }
  const auto c = static_cast<Eigen::Index>(next_);
  s_.col(c) = s;
  a_.col(c) = a;
  s2_.col(c) = s2;
  r_[c] = r;
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
  ++pushed_;
}

void ReplayMemory::push(const Transition& t) { push(t.state, t.action, t.reward, t.next_state); }

Transition ReplayMemory::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay index");
  const auto c = static_cast<Eigen::Index>(i);
  return {s_.col(c), a_.col(c), r_[c], s2_.col(c)};
}

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t n,
                                                    Rng& rng) {
  if (n > population) throw std::invalid_argument("sample larger than population");
  std::vector<std::size_t> out;
  out.reserve(n);
  std::unordered_set<std::size_t> taken;
  // Floyd's algorithm: exactly n draws, each subset equally likely.
  for (std::size_t j = population - n; j < population; ++j) {
    const std::size_t t = static_cast<std::size_t>(rng.below(j + 1));
    if (taken.insert(t).second)
      out.push_back(t);
    else {
      taken.insert(j);
      out.push_back(j);
    }
  }
  return out;
}

Batch ReplayMemory::sample(std::size_t n, Rng& rng) const {
  if (n == 0 || n > size_) throw std::invalid_argument("cannot sample that many transitions");
  Batch b;
  b.indices = sample_without_replacement(size_, n, rng);
  const auto m = static_cast<Eigen::Index>(n);
  b.states.resize(s_.rows(), m);
  b.actions.resize(a_.rows(), m);
  b.next_states.resize(s_.rows(), m);
  b.rewards.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto c = static_cast<Eigen::Index>(b.indices[static_cast<std::size_t>(i)]);
    b.states.col(i) = s_.col(c);
    b.actions.col(i) = a_.col(c);
    b.next_states.col(i) = s2_.col(c);
    b.rewards[i] = r_[c];
  }
  return b;
}

}  // namespace jrsim
