#include "jrsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "jrsim/rng.hpp"

namespace jrsim {

const VnfSpec& NetworkConfig::vnf(const std::string& name) const {
  for (const auto& v : vnf_catalog)
    if (v.name == name) return v;
  throw ConfigError("unknown VNF '" + name + "'");
}

const ServiceSpec& NetworkConfig::service(const std::string& name) const {
  for (const auto& s : services)
    if (s.name == name) return s;
  throw ConfigError("unknown service '" + name + "'");
}

const ServiceSpec& NetworkConfig::service_of(int user) const {
  return service(user_requests.at(static_cast<std::size_t>(user)).service);
}

double NetworkConfig::nf_rate(const std::string& vnf_name) const {
  return q_base / vnf(vnf_name).pi_user;
}

double NetworkConfig::noise_power_watts() const {
  // noise_dbm is a spectral density; integrate over one subcarrier.
  return std::pow(10.0, noise_dbm / 10.0) * 1e-3 * subcarrier_bandwidth;
}

bool NetworkConfig::vm_capable(int vm, const std::string& vnf_name) const {
  const auto& cap = vms.at(static_cast<std::size_t>(vm)).capability;
  return std::find(cap.begin(), cap.end(), vnf_name) != cap.end();
}

double NetworkConfig::link_bandwidth(int n, int n2) const {
  if (n == n2) return std::numeric_limits<double>::infinity();
  return std::min(servers.at(static_cast<std::size_t>(n)).link_bandwidth,
                  servers.at(static_cast<std::size_t>(n2)).link_bandwidth);
}

double NetworkConfig::nf_storage_bytes(int user) const {
  if (nf_storage >= 0.0) return nf_storage;
  return service_of(user).packet_bits / 8.0;
}

std::pair<std::vector<VnfSpec>, std::vector<ServiceSpec>> builtin_catalog() {
  std::vector<VnfSpec> vnfs = {
      {"NAT", 0.00092}, {"FW", 0.0009},   {"TM", 0.0133},
      {"WOC", 0.0054},  {"IDPS", 0.0107}, {"VOC", 0.0054},
  };
  // packet_bits = bandwidth * time unit (1 s); rate_min is the downlink floor of 1 bit/s/Hz.
  std::vector<ServiceSpec> services = {
      {"WebService", {"NAT", "FW", "TM", "WOC", "IDPS"}, 0.500, 1.0, 100e3},
      {"VoIP", {"NAT", "FW", "TM", "FW", "NAT"}, 0.100, 1.0, 64e3},
      {"VideoStreaming", {"NAT", "FW", "TM", "VOC", "IDPS"}, 0.100, 1.0, 4e6},
  };
  return {std::move(vnfs), std::move(services)};
}

std::vector<UserRequest> round_robin_requests(int num_users, int num_bs,
                                              const std::vector<ServiceSpec>& services) {
  std::vector<UserRequest> out;
  if (services.empty() || num_bs <= 0) return out;
  for (int u = 0; u < num_users; ++u)
    out.push_back({u % num_bs, services[static_cast<std::size_t>(u) % services.size()].name});
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

// ---------------------------------------------------------------- validation

namespace {

void require(ValidationReport& r, bool ok, std::string field, const std::string& what,
             double value) {
  if (!ok) r.push_back({std::move(field), what + " (got " + format_double(value) + ")"});
}

}  // namespace

ValidationReport validate_config(const NetworkConfig& cfg) {
  ValidationReport r;
  require(r, cfg.num_bs > 0, "num_bs", "must be > 0", cfg.num_bs);
  require(r, cfg.num_users > 0, "num_users", "must be > 0", cfg.num_users);
  require(r, cfg.num_subcarriers > 0, "num_subcarriers", "must be > 0", cfg.num_subcarriers);
  require(r, cfg.subcarrier_bandwidth > 0, "subcarrier_bandwidth", "must be > 0",
          cfg.subcarrier_bandwidth);
  require(r, cfg.max_power_per_bs > 0, "max_power_per_bs", "must be > 0", cfg.max_power_per_bs);
  require(r, std::isfinite(cfg.noise_dbm), "noise_dbm", "must be finite", cfg.noise_dbm);
  require(r, cfg.area_side > 0, "area_side", "must be > 0", cfg.area_side);
  require(r, cfg.circuit_power_per_bs >= 0, "circuit_power_per_bs", "must be >= 0",
          cfg.circuit_power_per_bs);
  require(r, cfg.min_distance > 0, "min_distance", "must be > 0", cfg.min_distance);
  require(r, cfg.max_nfs_per_vm > 0, "max_nfs_per_vm", "must be > 0", cfg.max_nfs_per_vm);
  require(r, cfg.q_base > 0, "q_base", "must be > 0", cfg.q_base);
  require(r, cfg.mu1 >= 0, "mu1", "must be >= 0", cfg.mu1);
  require(r, cfg.mu2 >= 0, "mu2", "must be >= 0", cfg.mu2);
  require(r, cfg.mu1 + cfg.mu2 > 0, "mu1", "mu1 + mu2 must be > 0", cfg.mu1 + cfg.mu2);
  require(r, cfg.time_unit > 0, "time_unit", "must be > 0", cfg.time_unit);
  require(r, cfg.reward_scale > 0, "reward_scale", "must be > 0", cfg.reward_scale);
  require(r, cfg.rejection_penalty >= 0, "rejection_penalty", "must be >= 0",
          cfg.rejection_penalty);
  require(r, cfg.episode_length > 0, "episode_length", "must be > 0", cfg.episode_length);

  std::set<std::string> vnf_names;
  for (std::size_t i = 0; i < cfg.vnf_catalog.size(); ++i) {
    const auto& v = cfg.vnf_catalog[i];
    const std::string f = "vnf." + v.name;
    require(r, v.pi_user > 0, f + ".pi_user", "must be > 0", v.pi_user);
    if (!vnf_names.insert(v.name).second) r.push_back({f, "duplicate VNF name"});
  }
  if (cfg.vnf_catalog.empty()) r.push_back({"vnf", "catalog is empty"});

  std::set<std::string> svc_names;
  for (const auto& s : cfg.services) {
    const std::string f = "service." + s.name;
    if (!svc_names.insert(s.name).second) r.push_back({f, "duplicate service name"});
    if (s.chain.empty()) r.push_back({f + ".chain", "chain is empty"});
    for (const auto& name : s.chain)
      if (!vnf_names.count(name)) r.push_back({f + ".chain", "unknown VNF '" + name + "'"});
    require(r, s.latency_max > 0, f + ".latency_max", "must be > 0", s.latency_max);
    require(r, s.rate_min >= 0, f + ".rate_min", "must be >= 0", s.rate_min);
    require(r, s.packet_bits > 0, f + ".packet_bits", "must be > 0", s.packet_bits);
  }
  if (cfg.services.empty()) r.push_back({"service", "no services defined"});

  if (cfg.servers.empty()) r.push_back({"server", "no servers defined"});
  for (std::size_t n = 0; n < cfg.servers.size(); ++n) {
    const auto& s = cfg.servers[n];
    const std::string f = "server." + std::to_string(n);
    require(r, s.cpu_capacity > 0, f + ".cpu_capacity", "must be > 0", s.cpu_capacity);
    require(r, s.storage_capacity > 0, f + ".storage_capacity", "must be > 0",
            s.storage_capacity);
    require(r, s.power_active_cpu > 0, f + ".power_active_cpu", "must be > 0",
            s.power_active_cpu);
    require(r, s.power_idle_cpu > 0, f + ".power_idle_cpu", "must be > 0", s.power_idle_cpu);
    require(r, s.link_bandwidth > 0, f + ".link_bandwidth", "must be > 0", s.link_bandwidth);
  }

  if (cfg.vms.empty()) r.push_back({"vm", "no VMs defined"});
  for (std::size_t v = 0; v < cfg.vms.size(); ++v) {
    const auto& vm = cfg.vms[v];
    const std::string f = "vm." + std::to_string(v);
    require(r, vm.host_server >= 0 && vm.host_server < cfg.num_servers(), f + ".host_server",
            "must name an existing server", vm.host_server);
    require(r, vm.cpu_overhead >= 0, f + ".cpu_overhead", "must be >= 0", vm.cpu_overhead);
    require(r, vm.storage_overhead >= 0, f + ".storage_overhead", "must be >= 0",
            vm.storage_overhead);
    if (vm.capability.empty()) r.push_back({f + ".capability", "capability is empty"});
    if (static_cast<int>(vm.capability.size()) > cfg.max_nfs_per_vm)
      r.push_back({f + ".capability", "more VNF types than max_nfs_per_vm"});
    for (const auto& name : vm.capability)
      if (!vnf_names.count(name)) r.push_back({f + ".capability", "unknown VNF '" + name + "'"});
  }

  if (static_cast<int>(cfg.user_requests.size()) != cfg.num_users)
    r.push_back({"num_users", "does not match number of user requests (" +
                                  std::to_string(cfg.user_requests.size()) + ")"});
  for (std::size_t u = 0; u < cfg.user_requests.size(); ++u) {
    const auto& q = cfg.user_requests[u];
    const std::string f = "user." + std::to_string(u);
    require(r, q.bs >= 0 && q.bs < cfg.num_bs, f + ".bs", "must name an existing BS", q.bs);
    if (!svc_names.count(q.service)) r.push_back({f + ".service", "unknown service '" + q.service + "'"});
  }
  return r;
}

// ------------------------------------------------------------------- parsing

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Section {
  std::string kind;  // "", server, vm, vnf, service, user
  std::string id;
  int line = 0;
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<int> lines;
};

double to_double(const std::string& key, const std::string& value, int line) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [p, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || p != last)
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects a number, got '" +
                      value + "'");
  return out;
}

int to_int(const std::string& key, const std::string& value, int line) {
  int out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [p, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || p != last)
    throw ConfigError("line " + std::to_string(line) + ": '" + key +
                      "' expects an integer, got '" + value + "'");
  return out;
}

std::vector<std::string> to_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

[[noreturn]] void unknown_key(const Section& s, const std::string& key, int line) {
  const std::string where = s.kind.empty() ? "top level" : "[" + s.kind + "." + s.id + "]";
  throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "' in " + where);
}

std::vector<Section> split_sections(const std::string& text) {
  std::vector<Section> sections(1);
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      const auto dot = name.find('.');
      if (dot == std::string::npos || dot == 0 || dot + 1 == name.size())
        throw ConfigError("line " + std::to_string(line_no) + ": section must be [kind.id]");
      Section s;
      s.kind = name.substr(0, dot);
      s.id = name.substr(dot + 1);
      s.line = line_no;
      static const std::set<std::string> kinds = {"server", "vm", "vnf", "service", "user"};
      if (!kinds.count(s.kind))
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section kind '" +
                          s.kind + "'");
      sections.push_back(std::move(s));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    for (const auto& [k, v] : sections.back().entries)
      if (k == key)
        throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    sections.back().entries.emplace_back(std::move(key), std::move(value));
    sections.back().lines.push_back(line_no);
  }
  return sections;
}

/// Indexed sections must be numbered 0..n-1 without gaps.
template <typename T>
std::vector<T> collect_indexed(const std::vector<Section>& sections, const std::string& kind,
                               T (*build)(const Section&)) {
  std::map<int, T> by_index;
  for (const auto& s : sections) {
    if (s.kind != kind) continue;
    const int idx = to_int(kind + " index", s.id, s.line);
    if (idx < 0 || by_index.count(idx))
      throw ConfigError("line " + std::to_string(s.line) + ": bad or duplicate index [" + kind +
                        "." + s.id + "]");
    by_index.emplace(idx, build(s));
  }
  std::vector<T> out;
  for (auto& [idx, v] : by_index) {
    if (idx != static_cast<int>(out.size()))
      throw ConfigError("[" + kind + ".N] sections must be numbered 0.." +
                        std::to_string(by_index.size() - 1));
    out.push_back(std::move(v));
  }
  return out;
}

ServerSpec build_server(const Section& s) {
  ServerSpec out;
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const auto& [k, v] = s.entries[i];
    const int ln = s.lines[i];
    if (k == "cpu_capacity") out.cpu_capacity = to_double(k, v, ln);
    else if (k == "storage_capacity") out.storage_capacity = to_double(k, v, ln);
    else if (k == "power_active_cpu") out.power_active_cpu = to_double(k, v, ln);
    else if (k == "power_idle_cpu") out.power_idle_cpu = to_double(k, v, ln);
    else if (k == "link_bandwidth") out.link_bandwidth = to_double(k, v, ln);
    else unknown_key(s, k, ln);
  }
  return out;
}

VmSpec build_vm(const Section& s) {
  VmSpec out;
  bool has_host = false;
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const auto& [k, v] = s.entries[i];
    const int ln = s.lines[i];
    if (k == "host_server") {
      out.host_server = to_int(k, v, ln);
      has_host = true;
    } else if (k == "cpu_overhead") out.cpu_overhead = to_double(k, v, ln);
    else if (k == "storage_overhead") out.storage_overhead = to_double(k, v, ln);
    else if (k == "capability") out.capability = to_list(v);
    else unknown_key(s, k, ln);
  }
  if (!has_host)
    throw ConfigError("[vm." + s.id + "] is missing host_server");
  return out;
}

UserRequest build_user(const Section& s) {
  UserRequest out;
  bool has_bs = false, has_service = false;
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const auto& [k, v] = s.entries[i];
    const int ln = s.lines[i];
    if (k == "bs") {
      out.bs = to_int(k, v, ln);
      has_bs = true;
    } else if (k == "service") {
      out.service = v;
      has_service = true;
    } else unknown_key(s, k, ln);
  }
  if (!has_bs || !has_service)
    throw ConfigError("[user." + s.id + "] needs both bs and service");
  return out;
}

std::string c5_name(C5Mode m) { return m == C5Mode::literal ? "literal" : "cycles"; }

}  // namespace

NetworkConfig parse_config(const std::string& text) {
  const auto sections = split_sections(text);
  NetworkConfig cfg;
  int num_servers = 4;
  int vms_per_server = 6;
  bool users_given = false;

  const Section& top = sections.front();
  for (std::size_t i = 0; i < top.entries.size(); ++i) {
    const auto& [k, v] = top.entries[i];
    const int ln = top.lines[i];
    if (k == "num_bs") cfg.num_bs = to_int(k, v, ln);
    else if (k == "num_users") {
      cfg.num_users = to_int(k, v, ln);
      users_given = true;
    } else if (k == "num_subcarriers") cfg.num_subcarriers = to_int(k, v, ln);
    else if (k == "subcarrier_bandwidth") cfg.subcarrier_bandwidth = to_double(k, v, ln);
    else if (k == "max_power_per_bs") cfg.max_power_per_bs = to_double(k, v, ln);
    else if (k == "noise_dbm") cfg.noise_dbm = to_double(k, v, ln);
    else if (k == "area_side") cfg.area_side = to_double(k, v, ln);
    else if (k == "circuit_power_per_bs") cfg.circuit_power_per_bs = to_double(k, v, ln);
    else if (k == "path_loss_intercept") cfg.path_loss_intercept = to_double(k, v, ln);
    else if (k == "path_loss_slope") cfg.path_loss_slope = to_double(k, v, ln);
    else if (k == "min_distance") cfg.min_distance = to_double(k, v, ln);
    else if (k == "max_nfs_per_vm") cfg.max_nfs_per_vm = to_int(k, v, ln);
    else if (k == "q_base") cfg.q_base = to_double(k, v, ln);
    else if (k == "nf_storage") cfg.nf_storage = to_double(k, v, ln);
    else if (k == "c5_interpretation") {
      if (v == "literal") cfg.c5_mode = C5Mode::literal;
      else if (v == "cycles") cfg.c5_mode = C5Mode::cycles;
      else throw ConfigError("line " + std::to_string(ln) +
                             ": c5_interpretation must be literal|cycles");
    } else if (k == "mu1") cfg.mu1 = to_double(k, v, ln);
    else if (k == "mu2") cfg.mu2 = to_double(k, v, ln);
    else if (k == "time_unit") cfg.time_unit = to_double(k, v, ln);
    else if (k == "reward_scale") cfg.reward_scale = to_double(k, v, ln);
    else if (k == "rejection_penalty") cfg.rejection_penalty = to_double(k, v, ln);
    else if (k == "episode_length") cfg.episode_length = to_int(k, v, ln);
    else if (k == "num_servers") num_servers = to_int(k, v, ln);
    else if (k == "vms_per_server") vms_per_server = to_int(k, v, ln);
    else unknown_key(top, k, ln);
  }

  // VNF and service catalogs: keyed by name, in file order.
  for (const auto& s : sections) {
    if (s.kind == "vnf") {
      VnfSpec vnf{s.id, 0.0};
      bool has_pi = false;
      for (std::size_t i = 0; i < s.entries.size(); ++i) {
        const auto& [k, v] = s.entries[i];
        if (k == "pi_user") {
          vnf.pi_user = to_double(k, v, s.lines[i]);
          has_pi = true;
        } else unknown_key(s, k, s.lines[i]);
      }
      if (!has_pi) throw ConfigError("[vnf." + s.id + "] is missing pi_user");
      cfg.vnf_catalog.push_back(std::move(vnf));
    } else if (s.kind == "service") {
      ServiceSpec svc;
      svc.name = s.id;
      for (std::size_t i = 0; i < s.entries.size(); ++i) {
        const auto& [k, v] = s.entries[i];
        const int ln = s.lines[i];
        if (k == "chain") svc.chain = to_list(v);
        else if (k == "latency_max") svc.latency_max = to_double(k, v, ln);
        else if (k == "rate_min") svc.rate_min = to_double(k, v, ln);
        else if (k == "packet_bits") svc.packet_bits = to_double(k, v, ln);
        else unknown_key(s, k, ln);
      }
      cfg.services.push_back(std::move(svc));
    }
  }
  auto [vnfs, services] = builtin_catalog();
  if (cfg.vnf_catalog.empty()) cfg.vnf_catalog = std::move(vnfs);
  if (cfg.services.empty()) cfg.services = std::move(services);

  cfg.servers = collect_indexed<ServerSpec>(sections, "server", &build_server);
  if (cfg.servers.empty() && num_servers > 0) cfg.servers.assign(static_cast<std::size_t>(num_servers), ServerSpec{});

  cfg.vms = collect_indexed<VmSpec>(sections, "vm", &build_vm);
  if (cfg.vms.empty()) {
    std::vector<std::string> all;
    for (const auto& v : cfg.vnf_catalog) all.push_back(v.name);
    if (static_cast<int>(all.size()) > cfg.max_nfs_per_vm) all.resize(static_cast<std::size_t>(cfg.max_nfs_per_vm));
    for (int n = 0; n < cfg.num_servers(); ++n)
      for (int v = 0; v < vms_per_server; ++v) cfg.vms.push_back({n, 0.0, 0.0, all});
  }

  cfg.user_requests = collect_indexed<UserRequest>(sections, "user", &build_user);
  if (cfg.user_requests.empty()) {
    cfg.user_requests = round_robin_requests(cfg.num_users, cfg.num_bs, cfg.services);
  } else if (!users_given) {
    cfg.num_users = static_cast<int>(cfg.user_requests.size());
  }

  const auto report = validate_config(cfg);
  if (!report.empty()) {
    std::string msg = "invalid config:";
    for (const auto& issue : report) msg += " " + issue.field + ": " + issue.message + ";";
    throw ConfigError(msg);
  }
  return cfg;
}

NetworkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string save_config(const NetworkConfig& cfg) {
  std::ostringstream o;
  auto kv = [&o](const std::string& k, const std::string& v) { o << k << " = " << v << '\n'; };
  auto kd = [&kv](const std::string& k, double v) { kv(k, format_double(v)); };
  auto join = [](const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i];
    return out;
  };

  o << "# jrsim scenario\n";
  kv("num_bs", std::to_string(cfg.num_bs));
  kv("num_users", std::to_string(cfg.num_users));
  kv("num_subcarriers", std::to_string(cfg.num_subcarriers));
  kd("subcarrier_bandwidth", cfg.subcarrier_bandwidth);
  kd("max_power_per_bs", cfg.max_power_per_bs);
  kd("noise_dbm", cfg.noise_dbm);
  kd("area_side", cfg.area_side);
  kd("circuit_power_per_bs", cfg.circuit_power_per_bs);
  kd("path_loss_intercept", cfg.path_loss_intercept);
  kd("path_loss_slope", cfg.path_loss_slope);
  kd("min_distance", cfg.min_distance);
  kv("max_nfs_per_vm", std::to_string(cfg.max_nfs_per_vm));
  kd("q_base", cfg.q_base);
  kd("nf_storage", cfg.nf_storage);
  kv("c5_interpretation", c5_name(cfg.c5_mode));
  kd("mu1", cfg.mu1);
  kd("mu2", cfg.mu2);
  kd("time_unit", cfg.time_unit);
  kd("reward_scale", cfg.reward_scale);
  kd("rejection_penalty", cfg.rejection_penalty);
  kv("episode_length", std::to_string(cfg.episode_length));

  for (const auto& v : cfg.vnf_catalog) {
    o << "\n[vnf." << v.name << "]\n";
    kd("pi_user", v.pi_user);
  }
  for (const auto& s : cfg.services) {
    o << "\n[service." << s.name << "]\n";
    kv("chain", join(s.chain));
    kd("latency_max", s.latency_max);
    kd("rate_min", s.rate_min);
    kd("packet_bits", s.packet_bits);
  }
  for (std::size_t n = 0; n < cfg.servers.size(); ++n) {
    const auto& s = cfg.servers[n];
    o << "\n[server." << n << "]\n";
    kd("cpu_capacity", s.cpu_capacity);
    kd("storage_capacity", s.storage_capacity);
    kd("power_active_cpu", s.power_active_cpu);
    kd("power_idle_cpu", s.power_idle_cpu);
    kd("link_bandwidth", s.link_bandwidth);
  }
  for (std::size_t v = 0; v < cfg.vms.size(); ++v) {
    const auto& vm = cfg.vms[v];
    o << "\n[vm." << v << "]\n";
    kv("host_server", std::to_string(vm.host_server));
    kd("cpu_overhead", vm.cpu_overhead);
    kd("storage_overhead", vm.storage_overhead);
    kv("capability", join(vm.capability));
  }
  for (std::size_t u = 0; u < cfg.user_requests.size(); ++u) {
    o << "\n[user." << u << "]\n";
    kv("bs", std::to_string(cfg.user_requests[u].bs));
    kv("service", cfg.user_requests[u].service);
  }
  return o.str();
}

void save_config(const NetworkConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path.string());
  out << save_config(cfg);
}

std::uint64_t config_digest(const NetworkConfig& cfg) {
  const std::string text = save_config(cfg);
  return fnv1a(text.data(), text.size());
}

}  // namespace jrsim
