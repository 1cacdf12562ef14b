// Command-line front end: simulate, train, sweep, oracle, overhead.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "jrsim/experiments.hpp"
#include "jrsim/oracle.hpp"
#include "jrsim/presets.hpp"

using namespace jrsim;

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::uint64_t seed = 0;
  int episodes = 0;
  std::string method;
  std::string out;
  int jobs = 1;
  std::string trace;
};

struct HyperFlags {
  std::string hidden;
  std::optional<double> lambda, actor_lr, critic_lr, lr_decay;
  std::optional<std::size_t> warmup, batch;
  std::optional<int> grad_steps, eval_episodes;

  void attach(CLI::App* app) {
    app->add_option("--hidden", hidden, "Hidden layer sizes, e.g. 64,64");
    app->add_option("--lambda", lambda, "Entropy temperature");
    app->add_option("--actor-lr", actor_lr, "Initial actor learning rate");
    app->add_option("--critic-lr", critic_lr, "Initial critic learning rate");
    app->add_option("--lr-decay", lr_decay, "Inverse-time decay constant kappa");
    app->add_option("--warmup", warmup, "Random steps before the first update");
    app->add_option("--batch", batch, "Minibatch size");
    app->add_option("--grad-steps", grad_steps, "Gradient steps per environment step");
    app->add_option("--eval-episodes", eval_episodes, "Evaluation episodes after training");
  }

  AgentHyper apply(AgentHyper h) const {
    if (!hidden.empty()) {
      h.hidden.clear();
      std::stringstream ss(hidden);
      for (std::string tok; std::getline(ss, tok, ',');) h.hidden.push_back(std::stoi(tok));
    }
    if (lambda) h.lambda = *lambda;
    if (actor_lr) h.actor_lr.lr0 = *actor_lr;
    if (critic_lr) h.critic_lr.lr0 = *critic_lr;
    if (lr_decay) h.actor_lr.kappa = h.critic_lr.kappa = *lr_decay;
    if (warmup) h.warmup = *warmup;
    if (batch) h.batch = *batch;
    if (grad_steps) h.grad_steps = *grad_steps;
    if (eval_episodes) h.eval_episodes = *eval_episodes;
    return h;
  }
};

NetworkConfig resolve_config(const Common& c, const std::optional<NetworkConfig>& forced) {
  if (forced) return *forced;
  if (!c.config.empty()) return load_config(c.config);
  if (c.preset == "tiny") return tiny_config();
  if (c.preset == "builtin") return builtin_config();
  throw CLI::ValidationError("--preset", "expected builtin or tiny");
}

template <typename T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    std::istringstream is(tok);
    T v{};
    if (!(is >> v)) throw CLI::ValidationError("list", "cannot parse '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

void open_trace(const std::string& path, std::ofstream& file) {
  file.open(path);
  if (!file) throw std::runtime_error("cannot write trace " + path);
}

int run(std::vector<std::string> args, const std::optional<NetworkConfig>& forced) {
  CLI::App app{"Joint radio and NFV-core resource allocation simulator"};
  app.require_subcommand(1);
  Common c;
  HyperFlags hf;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config, "Scenario file (key = value format)");
    sub->add_option("--preset", c.preset, "Built-in scenario when --config is absent: builtin or tiny");
    sub->add_option("--seed", c.seed, "Random seed");
  };

  auto* sim = app.add_subcommand("simulate", "Run a policy-free environment rollout");
  add_common(sim);
  std::string sim_policy = "random";
  c.episodes = 1;
  sim->add_option("--episodes", c.episodes, "Episodes to roll out");
  sim->add_option("--method", sim_policy, "Action source: random or zero");
  sim->add_option("--out", c.out, "Per-step CSV (stdout if omitted)");
  sim->add_option("--trace", c.trace, "JSON-lines step trace");

  auto* tr = app.add_subcommand("train", "Train one method and write its learning curve");
  add_common(tr);
  std::string train_method = "sac";
  tr->add_option("--method", train_method, "sac, ddpg, maddpg, disjoint or random");
  tr->add_option("--episodes", c.episodes, "Training episodes")->required();
  tr->add_option("--out", c.out, "Output directory")->required();
  tr->add_option("--trace", c.trace, "JSON-lines step trace");
  hf.attach(tr);

  auto* sw = app.add_subcommand("sweep", "Sweep one scenario variable across methods and seeds");
  add_common(sw);
  std::string variable, values, methods = "sac", seeds = "0,1,2,3,4";
  sw->add_option("--variable", variable, "num_users, rate_min, latency_max or mu2")->required();
  sw->add_option("--values", values, "Comma-separated values (mu2 defaults to 0.1,0.5,1,2,5)");
  sw->add_option("--method", methods, "Comma-separated methods");
  sw->add_option("--seeds", seeds, "Comma-separated seeds");
  sw->add_option("--episodes", c.episodes, "Training episodes per cell")->required();
  sw->add_option("--jobs", c.jobs, "Concurrent cells");
  sw->add_option("--out", c.out, "Sweep CSV")->required();
  hf.attach(sw);

  auto* orc = app.add_subcommand("oracle", "Exhaustive optimum of a tiny instance");
  add_common(orc);
  int verify = 0;
  orc->add_option("--out", c.out, "JSON result (stdout if omitted)");
  orc->add_option("--verify", verify, "Also compare env and oracle on N random decisions");

  auto* ovh = app.add_subcommand("overhead", "Signaling overhead per method");
  add_common(ovh);
  std::optional<int> bs, sub_n, users;
  ovh->add_option("--bs", bs, "Override the number of BSs");
  ovh->add_option("--subcarriers", sub_n, "Override the number of subcarriers");
  ovh->add_option("--users", users, "Override the number of users");
  ovh->add_option("--method", c.method, "One method (all if omitted)");
  ovh->add_option("--out", c.out, "CSV (stdout if omitted)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (c.preset.empty()) c.preset = *orc ? "tiny" : "builtin";
  const NetworkConfig cfg = resolve_config(c, forced);
  const auto manifest = make_manifest(args, cfg, {c.seed});

  if (*sim) {
    Environment env(cfg);
    std::ofstream trace_file;
    if (!c.trace.empty()) {
      open_trace(c.trace, trace_file);
      env.set_trace(&trace_file);
    }
    std::ofstream f;
    std::ostream& out = open_out(c.out, f);
    out << "episode,step,reward,ee,admitted,energy_radio,energy_cpu\n";
    Rng rng(mix_seed(c.seed, 0x51A));
    for (int e = 0; e < c.episodes; ++e) {
      env.reset(mix_seed(c.seed, static_cast<std::uint64_t>(e)));
      for (int t = 0; t < env.episode_length(); ++t) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(env.action_size()));
        if (sim_policy == "random")
          for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = rng.uniform(-1.0, 1.0);
        else if (sim_policy != "zero")
          throw CLI::ValidationError("--method", "simulate accepts random or zero");
        const auto o = env.step(a);
        out << e << ',' << t << ',' << format_double(o.reward) << ',' << format_double(o.info.ee)
            << ',' << o.info.admitted_count() << ',' << format_double(o.info.energy.radio) << ','
            << format_double(o.info.energy.cpu) << '\n';
      }
    }
    if (!c.out.empty() && c.out != "-") write_manifest(manifest, c.out + ".manifest.json");
    return 0;
  }

  if (*tr) {
    const AgentHyper h = hf.apply(AgentHyper{});
    const Method m = parse_method(train_method);
    try {
      std::ofstream trace_file;
      if (!c.trace.empty()) open_trace(c.trace, trace_file);
      const auto res = run_training(cfg, m, c.seed, c.episodes, h, c.out,
                                    c.trace.empty() ? nullptr : &trace_file);
      write_manifest(manifest, std::filesystem::path(c.out) / "manifest.json");
      std::cout << "final_ee " << format_double(res.result.final_eval.mean_ee) << "\n";
    } catch (const DivergenceError& e) {
      std::cerr << "training diverged: " << e.what() << '\n';
      return 3;
    }
    return 0;
  }

  if (*sw) {
    SweepSpec spec;
    spec.variable = variable;
    if (values.empty() && variable == "mu2") values = "0.1,0.5,1,2,5";
    spec.values = parse_list<double>(values);
    for (const auto& m : parse_list<std::string>(methods)) spec.methods.push_back(parse_method(m));
    spec.seeds = parse_list<std::uint64_t>(seeds);
    spec.episodes = c.episodes;
    const auto rows = run_sweep(spec, cfg, hf.apply(AgentHyper{}), c.jobs);
    std::ofstream f(c.out);
    if (!f) throw std::runtime_error("cannot write " + c.out);
    write_sweep_csv(rows, f);
    auto man = make_manifest(args, cfg, spec.seeds);
    write_manifest(man, c.out + ".manifest.json");
    return 0;
  }

  if (*orc) {
    TinyInstance inst{cfg, TinyInstance::reference().power_levels};
    const ChannelState ch = sample_channel(cfg, c.seed);
    const OracleResult best = enumerate_best(inst, ch);
    nlohmann::json j;
    std::ostringstream digest;
    digest << std::hex << instance_digest(inst);
    j["instance_digest"] = digest.str();
    j["seed"] = c.seed;
    j["best_ee"] = best.best_ee;
    j["best_index"] = best.best_index;
    j["evaluated"] = best.evaluated;
    j["decision"] = nlohmann::json::parse(grid_to_json(best.best));
    if (verify > 0) {
      const auto rep = verify_env(inst, ch, verify, c.seed);
      j["verify"] = {{"samples", rep.samples},
                     {"mismatches", rep.mismatches.size()},
                     {"max_rel_error", rep.max_rel_error}};
    }
    std::ofstream f;
    open_out(c.out, f) << j.dump(2) << '\n';
    return 0;
  }

  if (*ovh) {
    const int J = bs.value_or(cfg.num_bs), K = sub_n.value_or(cfg.num_subcarriers),
              U = users.value_or(cfg.num_users);
    std::vector<Method> ms;
    if (c.method.empty())
      ms = {Method::sac, Method::ddpg, Method::maddpg, Method::disjoint};
    else
      ms = {parse_method(c.method)};
    std::ofstream f;
    std::ostream& out = open_out(c.out, f);
    out << "method,requested_rate_bits,radio_link_bits,core_link_bits,total_bits\n";
    for (Method m : ms) {
      const Overhead o = signaling_overhead(J, K, U, m);
      out << method_name(m) << ',' << o.requested_rate << ',' << o.radio_link << ','
          << o.core_link << ',' << o.total() << '\n';
    }
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    // jrsim --replay run.manifest.json re-executes the recorded command with
    // the recorded scenario text.
    if (args.size() == 2 && args[0] == "--replay") {
      std::ifstream f(args[1]);
      if (!f) throw std::runtime_error("cannot read " + args[1]);
      const auto man = nlohmann::json::parse(f);
      return run(man.at("args").get<std::vector<std::string>>(),
                 parse_config(man.at("config").get<std::string>()));
    }
    return run(args, std::nullopt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
