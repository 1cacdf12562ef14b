#include "jrsim/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace jrsim {

void validate_sweep(const SweepSpec& spec) {
  static const std::vector<std::string> known = {"num_users", "rate_min", "latency_max", "mu2"};
  if (std::find(known.begin(), known.end(), spec.variable) == known.end())
    throw std::invalid_argument("variable: unknown sweep variable '" + spec.variable + "'");
  if (spec.values.empty()) throw std::invalid_argument("values: empty");
  if (spec.methods.empty()) throw std::invalid_argument("methods: empty");
  if (spec.seeds.empty()) throw std::invalid_argument("seeds: empty");
  if (spec.episodes <= 0) throw std::invalid_argument("episodes: must be positive");
}

NetworkConfig apply_sweep_value(const NetworkConfig& cfg, const std::string& variable,
                                double value) {
  NetworkConfig out = cfg;
  if (variable == "num_users") {
    if (value != std::floor(value) || value < 1)
      throw std::invalid_argument("num_users must be a positive integer");
    out.num_users = static_cast<int>(value);
    out.user_requests = round_robin_requests(out.num_users, out.num_bs, out.services);
  } else if (variable == "rate_min") {
    for (auto& s : out.services) s.rate_min = value;
  } else if (variable == "latency_max") {
    for (auto& s : out.services) s.latency_max = value;
  } else if (variable == "mu2") {
    out.mu2 = value;
  } else {
    throw std::invalid_argument("variable: unknown sweep variable '" + variable + "'");
  }
  const auto report = validate_config(out);
  if (!report.empty())
    throw ConfigError(variable + " = " + format_double(value) + ": " + report.front().field +
                      " " + report.front().message);
  return out;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const NetworkConfig& cfg,
                                const AgentHyper& hyper, int jobs) {
  validate_sweep(spec);
  std::vector<SweepRow> rows;
  for (double v : spec.values)
    for (Method m : spec.methods)
      for (auto seed : spec.seeds) rows.push_back({spec.variable, v, m, seed, 0.0, 0.0, "ok"});

  const auto n = static_cast<long long>(rows.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, jobs))
  for (long long i = 0; i < n; ++i) {
    SweepRow& row = rows[static_cast<std::size_t>(i)];
    try {
      Environment env(apply_sweep_value(cfg, row.variable, row.value));
      const TrainResult r = train(row.method, env, hyper, spec.episodes, row.seed);
      row.final_ee = r.final_eval.mean_ee;
      row.mean_reward = r.final_eval.mean_reward;
    } catch (const std::exception& e) {
      row.status = std::string("failed: ") + e.what();
    }
  }
  return rows;
}

namespace {
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}
}  // namespace

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "variable,value,method,seed,final_ee,mean_reward,status\n";
  for (const auto& r : rows)
    out << r.variable << ',' << format_double(r.value) << ',' << method_name(r.method) << ','
        << r.seed << ',' << format_double(r.final_ee) << ',' << format_double(r.mean_reward)
        << ',' << csv_field(r.status) << '\n';
}

void write_curve_csv(const std::vector<CurveRow>& curve, std::ostream& out) {
  out << "episode,mean_reward,mean_ee,critic_loss,actor_loss,admitted_users\n";
  for (const auto& c : curve)
    out << c.episode << ',' << format_double(c.mean_reward) << ',' << format_double(c.mean_ee)
        << ',' << format_double(c.critic_loss) << ',' << format_double(c.actor_loss) << ','
        << format_double(c.admitted) << '\n';
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

namespace {
std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}
}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman needs paired data");
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<std::pair<double, double>> median_ee_by_value(const std::vector<SweepRow>& rows,
                                                          Method method) {
  std::map<double, std::vector<double>> by;
  for (const auto& r : rows)
    if (r.method == method && r.status == "ok") by[r.value].push_back(r.final_ee);
  std::vector<std::pair<double, double>> out;
  for (auto& [v, ee] : by) out.emplace_back(v, median(ee));
  return out;
}

Overhead signaling_overhead(int num_bs, int num_subcarriers, int num_users, Method method) {
  constexpr std::uint64_t kWord = 16;
  Overhead o;
  o.requested_rate = kWord;
  const std::uint64_t channel = kWord * static_cast<std::uint64_t>(std::max(0, num_bs)) *
                                static_cast<std::uint64_t>(std::max(0, num_subcarriers)) *
                                static_cast<std::uint64_t>(std::max(0, num_users));
  switch (method) {
    case Method::sac:
    case Method::ddpg:
      o.radio_link = channel;
      o.core_link = channel;
      break;
    case Method::maddpg:
      o.radio_link = kWord;
      o.core_link = kWord;
      break;
    case Method::disjoint:
    case Method::random:
      break;
  }
  return o;
}

Overhead signaling_overhead(const NetworkConfig& cfg, Method method) {
  return signaling_overhead(cfg.num_bs, cfg.num_subcarriers, cfg.num_users, method);
}

TrainingOutput run_training(const NetworkConfig& cfg, Method method, std::uint64_t seed,
                            int episodes, const AgentHyper& hyper,
                            const std::filesystem::path& out_dir, std::ostream* trace) {
  std::filesystem::create_directories(out_dir);
  Environment env(cfg);
  env.set_trace(trace);
  TrainingOutput out;
  out.result = train(method, env, hyper, episodes, seed);
  const auto curve_path = out_dir / "curve.csv";
  {
    std::ofstream f(curve_path);
    if (!f) throw std::runtime_error("cannot write " + curve_path.string());
    write_curve_csv(out.result.curve, f);
  }
  out.files.push_back(curve_path);
  for (const auto& [name, net] : out.result.networks) {
    const auto p = out_dir / (name + ".ckpt");
    save_checkpoint(net, p);
    out.files.push_back(p);
  }
  return out;
}

nlohmann::json make_manifest(const std::vector<std::string>& args, const NetworkConfig& cfg,
                             const std::vector<std::uint64_t>& seeds) {
  nlohmann::json m;
  m["version"] = kVersion;
  m["args"] = args;
  std::ostringstream digest;
  digest << std::hex << std::setw(16) << std::setfill('0') << config_digest(cfg);
  m["config_digest"] = digest.str();
  m["config"] = save_config(cfg);
  m["seeds"] = seeds;
  return m;
}

void write_manifest(const nlohmann::json& manifest, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << manifest.dump(2) << '\n';
}

}  // namespace jrsim
