#include "jrsim/mlp.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

namespace jrsim {

namespace {

// Hidden-layer tanh through the packet exp: tanh|x| = (1 - e) / (1 + e) with
// e = exp(-2|x|). Absolute error stays at a few ulp of 1.
void tanh_in_place(Eigen::MatrixXd& z) {
  auto a = z.array();
  const Eigen::ArrayXXd e = (-2.0 * a.abs()).exp();
  a = a.sign() * (1.0 - e) / (1.0 + e);
}

}  // namespace

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw ShapeError("an MLP needs at least input and output sizes");
  Eigen::Index off = 0;
  for (int l = 0; l + 1 < static_cast<int>(sizes_.size()); ++l) {
    if (sizes_[l] <= 0 || sizes_[l + 1] <= 0) throw ShapeError("layer sizes must be positive");
    w_off_.push_back(off);
    off += static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1];
    b_off_.push_back(off);
    off += sizes_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(off);
}

Mlp Mlp::glorot(std::vector<int> sizes, Rng& rng) {
  Mlp net(std::move(sizes));
  for (int l = 0; l < net.num_layers(); ++l) {
    const double limit = std::sqrt(6.0 / (net.sizes_[l] + net.sizes_[l + 1]));
    auto w = net.weight(l);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-limit, limit);
  }
  return net;
}

Eigen::Map<Eigen::MatrixXd> Mlp::weight(int l) {
  return {params_.data() + w_off_[l], sizes_[l + 1], sizes_[l]};
}
Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int l) const {
  return {params_.data() + w_off_[l], sizes_[l + 1], sizes_[l]};
}
Eigen::Map<Eigen::VectorXd> Mlp::bias(int l) { return {params_.data() + b_off_[l], sizes_[l + 1]}; }
Eigen::Map<const Eigen::VectorXd> Mlp::bias(int l) const {
  return {params_.data() + b_off_[l], sizes_[l + 1]};
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  return forward(Eigen::MatrixXd(x)).col(0);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& X) const {
  Tape tape;
  return forward(X, tape);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& X, Tape& tape) const {
  if (X.rows() != input_size())
    throw ShapeError("input has " + std::to_string(X.rows()) + " rows, network expects " +
                     std::to_string(input_size()));
  tape.act.resize(sizes_.size());
  tape.act[0] = X;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * tape.act[l];
    z.colwise() += bias(l);
    if (l + 1 < num_layers()) tanh_in_place(z);
    tape.act[l + 1] = std::move(z);
  }
  return tape.act.back();
}

Eigen::VectorXd Mlp::backward(const Tape& tape, const Eigen::MatrixXd& dY,
                              Eigen::MatrixXd* dX) const {
  if (dY.rows() != output_size() || dY.cols() != tape.act.back().cols())
    throw ShapeError("upstream gradient shape does not match the forward batch");
  Eigen::VectorXd grad(params_.size());
  Eigen::MatrixXd delta = dY;
  for (int l = num_layers() - 1; l >= 0; --l) {
    if (l + 1 < num_layers())
      delta = (delta.array() * (1.0 - tape.act[l + 1].array().square())).matrix();
    Eigen::Map<Eigen::MatrixXd>(grad.data() + w_off_[l], sizes_[l + 1], sizes_[l]) =
        delta * tape.act[l].transpose();
    Eigen::Map<Eigen::VectorXd>(grad.data() + b_off_[l], sizes_[l + 1]) = delta.rowwise().sum();
    if (l > 0 || dX) delta = weight(l).transpose() * delta;
  }
  if (dX) *dX = std::move(delta);
  return grad;
}

Eigen::VectorXd Mlp::backward(const Eigen::VectorXd& x, const Eigen::VectorXd& upstream,
                              Eigen::VectorXd* dx) const {
  Tape tape;
  forward(Eigen::MatrixXd(x), tape);
  Eigen::MatrixXd dX;
  Eigen::VectorXd g = backward(tape, Eigen::MatrixXd(upstream), dx ? &dX : nullptr);
  if (dx) *dx = dX.col(0);
  return g;
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
  if (grad.size() != params.size()) throw ShapeError("gradient and parameter sizes differ");
  if (m.size() != params.size()) {
    m = Eigen::VectorXd::Zero(params.size());
    v = Eigen::VectorXd::Zero(params.size());
  }
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

void sgd_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
  if (grad.size() != params.size()) throw ShapeError("gradient and parameter sizes differ");
  params -= lr * grad;
}

double LrSchedule::at(long long t) const {
  return lr0 / std::pow(1.0 + kappa * static_cast<double>(t), power);
}

std::vector<std::string> check_schedules(const LrSchedule& actor, const LrSchedule& critic) {
  std::vector<std::string> issues;
  auto check = [&](const LrSchedule& s, const char* who) {
    const std::string w = who;
    if (!(s.lr0 > 0.0)) issues.push_back(w + " lr0 must be positive");
    if (!(s.kappa > 0.0)) issues.push_back(w + " kappa must be positive for a decaying schedule");
    if (!(s.power > 0.5 && s.power <= 1.0))
      issues.push_back(w + " power must lie in (0.5, 1] so sum lr diverges and sum lr^2 converges");
  };
  check(actor, "actor");
  check(critic, "critic");
  if (!(actor.power > critic.power))
    issues.push_back("actor/critic ratio does not vanish: actor power must exceed critic power");
  if (actor.lr0 > critic.lr0) issues.push_back("actor lr0 exceeds critic lr0");
  return issues;
}

namespace {

constexpr char kMagic[8] = {'J', 'R', 'M', 'L', 'P', '0', '0', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "checkpoint writer assumes LE");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
    throw std::runtime_error("checkpoint truncated");
  return value;
}

}  // namespace

void save_checkpoint(const Mlp& net, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(net.sizes().size()));
  for (int s : net.sizes()) put<std::uint32_t>(out, static_cast<std::uint32_t>(s));
  for (int l = 0; l < net.num_layers(); ++l) {
    const auto w = net.weight(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) put<double>(out, w(r, c));
    const auto b = net.bias(l);
    for (Eigen::Index r = 0; r < b.size(); ++r) put<double>(out, b[r]);
  }
}

void save_checkpoint(const Mlp& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  save_checkpoint(net, out);
}

Mlp load_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not an MLP checkpoint");
  const auto n = get<std::uint32_t>(in);
  if (n < 2 || n > 64) throw std::runtime_error("checkpoint has implausible layer count");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < n; ++i) sizes.push_back(static_cast<int>(get<std::uint32_t>(in)));
  Mlp net(sizes);
  for (int l = 0; l < net.num_layers(); ++l) {
    auto w = net.weight(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = get<double>(in);
    auto b = net.bias(l);
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = get<double>(in);
  }
  return net;
}

Mlp load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return load_checkpoint(in);
}

void export_csv(const Mlp& net, std::ostream& out) {
  out << "layer,kind,row,col,value\n" << std::setprecision(17);
  for (int l = 0; l < net.num_layers(); ++l) {
    const auto w = net.weight(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        out << l << ",W," << r << ',' << c << ',' << w(r, c) << '\n';
    const auto b = net.bias(l);
    for (Eigen::Index r = 0; r < b.size(); ++r) out << l << ",b," << r << ",0," << b[r] << '\n';
  }
}

GradCheck gradcheck(const Mlp& net, const Eigen::VectorXd& x, const Eigen::VectorXd& upstream,
                    double h, double floor) {
  Eigen::VectorXd dx;
  const Eigen::VectorXd g = net.backward(x, upstream, &dx);
  GradCheck out;
  auto compare = [&](double analytic, double numeric) {
    const double err = std::abs(analytic - numeric);
    out.max_abs_error = std::max(out.max_abs_error, err);
    const double mag = std::max(std::abs(analytic), std::abs(numeric));
    out.max_rel_error = std::max(out.max_rel_error, mag < floor ? err : err / mag);
  };
  Mlp probe = net;
  for (Eigen::Index i = 0; i < probe.param_count(); ++i) {
    const double keep = probe.params()[i];
    probe.params()[i] = keep + h;
    const double up = upstream.dot(probe.forward(x));
    probe.params()[i] = keep - h;
    const double down = upstream.dot(probe.forward(x));
    probe.params()[i] = keep;
    compare(g[i], (up - down) / (2.0 * h));
  }
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    const double up = upstream.dot(net.forward(xp));
    xp[i] = x[i] - h;
    const double down = upstream.dot(net.forward(xp));
    xp[i] = x[i];
    compare(dx[i], (up - down) / (2.0 * h));
  }
  return out;
}

}  // namespace jrsim
