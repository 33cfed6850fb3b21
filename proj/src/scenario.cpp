#include "sdaas/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <unordered_set>

namespace sdaas {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// independent deterministic streams per concern
std::uint64_t network_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x6e65740aULL); }
std::uint64_t request_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x7265710aULL); }

}  // namespace

Scenario generate_scenario(const GeneratorConfig& gen) {
  if (gen.n_nodes < 2) throw ValidationError("generator needs at least 2 nodes");
  if (gen.requests < 1) throw ValidationError("generator needs at least 1 request");
  if (gen.pad_min < 0 || gen.pad_max < gen.pad_min)
    throw ValidationError("bad pad range");

  std::mt19937_64 rng(network_seed(gen.seed));
  std::uniform_real_distribution<double> coord(0.0, gen.area);
  std::uniform_int_distribution<int> pads(gen.pad_min, gen.pad_max);

  // random geometric graph: radius a bit above the connectivity threshold,
  // grown on every failed attempt
  double base_radius =
      1.25 * gen.area * std::sqrt(std::log(static_cast<double>(gen.n_nodes)) /
                                  (3.141592653589793 * gen.n_nodes));

  Scenario scenario;
  bool connected = false;
  for (int attempt = 0; attempt < 40 && !connected; ++attempt) {
    double radius = base_radius * (1.0 + 0.15 * attempt);
    std::vector<Node> nodes;
    for (int i = 0; i < gen.n_nodes; ++i)
      nodes.push_back({i, coord(rng), coord(rng), pads(rng)});
    std::vector<Segment> segments;
    for (int i = 0; i < gen.n_nodes; ++i)
      for (int j = i + 1; j < gen.n_nodes; ++j) {
        double d = std::hypot(nodes[i].x - nodes[j].x, nodes[i].y - nodes[j].y);
        if (d > 0 && d <= radius) segments.push_back({i, j, d});
      }
    try {
      scenario.network = SkywayNetwork(std::move(nodes), std::move(segments));
      connected = true;
    } catch (const ValidationError&) {
      // disconnected draw; try again with fresh points and a wider radius
    }
  }
  if (!connected)
    throw InfeasibleError("no connected network after 40 attempts; grow the area density");

  scenario.seed = gen.seed;
  scenario.generator = gen;
  scenario.provider.fleet_size = gen.fleet_size;
  scenario.provider.source = 0;
  scenario.provider.max_swarm_size = gen.max_swarm_size;
  scenario.provider.max_package_weight = gen.max_package_weight;
  scenario.provider.day_length = gen.windows * gen.window_seconds;
  scenario.requests =
      generate_requests(scenario.network, gen, gen.requests, scenario.provider.source);
  return scenario;
}

std::vector<Request> generate_requests(const SkywayNetwork& net, const GeneratorConfig& gen,
                                       int count, NodeId source) {
  std::vector<NodeId> targets;
  for (const Node& n : net.nodes())
    if (n.id != source) targets.push_back(n.id);
  std::sort(targets.begin(), targets.end());
  if (targets.empty()) throw ValidationError("network has no destination candidates");

  std::mt19937_64 rng(request_seed(gen.seed));
  std::uniform_int_distribution<std::size_t> dest(0, targets.size() - 1);
  std::uniform_int_distribution<int> package_count(1, gen.max_swarm_size);
  std::uniform_real_distribution<double> weight_u(0.0, 1.0);
  std::uniform_int_distribution<int> window_idx(0, gen.windows - 1);

  // draws are strictly sequential, so the first k requests of a longer batch
  // match a batch of k exactly
  std::vector<Request> requests;
  for (int i = 0; i < count; ++i) {
    Request r;
    r.id = i;
    r.dest = targets[dest(rng)];
    int k = package_count(rng);
    for (int p = 0; p < k; ++p)
      r.packages.push_back((1.0 - weight_u(rng)) * gen.max_package_weight);  // (0, max]
    double st = window_idx(rng) * gen.window_seconds;
    r.window = {st, st + gen.window_seconds};
    requests.push_back(std::move(r));
  }
  return requests;
}

namespace {

using nlohmann::json;

json provider_json(const ProviderConfig& p) {
  return {{"fleet_size", p.fleet_size},
          {"source", p.source},
          {"max_swarm_size", p.max_swarm_size},
          {"day_length", p.day_length},
          {"max_package_weight", p.max_package_weight},
          {"congestion", p.congestion}};
}

json energy_json(const EnergyParams& e) {
  return {{"rate_empty", e.rate_empty},
          {"payload_factor", e.payload_factor},
          {"full_charge_time", e.full_charge_time},
          {"speed", e.speed},
          {"payload_capacity", e.payload_capacity},
          {"reserve", e.reserve}};
}

json pricing_json(const PricingParams& p) {
  return {{"revenue_per_package", p.revenue_per_package},
          {"cost_per_drone_second", p.cost_per_drone_second}};
}

json rl_json(const RlParams& r) {
  return {{"alpha", r.alpha},
          {"gamma", r.gamma},
          {"epsilon_start", r.epsilon_start},
          {"epsilon_end", r.epsilon_end},
          {"epsilon_decay_fraction", r.epsilon_decay_fraction},
          {"episodes", r.episodes},
          {"slot_granularity", r.slot_granularity},
          {"state_encoder", r.state_encoder},
          {"profit_bin_width", r.profit_bin_width}};
}

json generator_json(const GeneratorConfig& g) {
  return {{"n_nodes", g.n_nodes},
          {"requests", g.requests},
          {"fleet_size", g.fleet_size},
          {"seed", g.seed},
          {"area", g.area},
          {"pad_min", g.pad_min},
          {"pad_max", g.pad_max},
          {"windows", g.windows},
          {"window_seconds", g.window_seconds},
          {"max_swarm_size", g.max_swarm_size},
          {"max_package_weight", g.max_package_weight}};
}

template <typename T>
void read_into(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

ProviderConfig provider_from(const json& j) {
  ProviderConfig p;
  read_into(j, "fleet_size", p.fleet_size);
  read_into(j, "source", p.source);
  read_into(j, "max_swarm_size", p.max_swarm_size);
  read_into(j, "day_length", p.day_length);
  read_into(j, "max_package_weight", p.max_package_weight);
  read_into(j, "congestion", p.congestion);
  return p;
}

EnergyParams energy_from(const json& j) {
  EnergyParams e;
  read_into(j, "rate_empty", e.rate_empty);
  read_into(j, "payload_factor", e.payload_factor);
  read_into(j, "full_charge_time", e.full_charge_time);
  read_into(j, "speed", e.speed);
  read_into(j, "payload_capacity", e.payload_capacity);
  read_into(j, "reserve", e.reserve);
  return e;
}

PricingParams pricing_from(const json& j) {
  PricingParams p;
  read_into(j, "revenue_per_package", p.revenue_per_package);
  read_into(j, "cost_per_drone_second", p.cost_per_drone_second);
  return p;
}

RlParams rl_from(const json& j) {
  RlParams r;
  read_into(j, "alpha", r.alpha);
  read_into(j, "gamma", r.gamma);
  read_into(j, "epsilon_start", r.epsilon_start);
  read_into(j, "epsilon_end", r.epsilon_end);
  read_into(j, "epsilon_decay_fraction", r.epsilon_decay_fraction);
  read_into(j, "episodes", r.episodes);
  read_into(j, "slot_granularity", r.slot_granularity);
  read_into(j, "state_encoder", r.state_encoder);
  read_into(j, "profit_bin_width", r.profit_bin_width);
  return r;
}

GeneratorConfig generator_from(const json& j) {
  GeneratorConfig g;
  read_into(j, "n_nodes", g.n_nodes);
  read_into(j, "requests", g.requests);
  read_into(j, "fleet_size", g.fleet_size);
  read_into(j, "seed", g.seed);
  read_into(j, "area", g.area);
  read_into(j, "pad_min", g.pad_min);
  read_into(j, "pad_max", g.pad_max);
  read_into(j, "windows", g.windows);
  read_into(j, "window_seconds", g.window_seconds);
  read_into(j, "max_swarm_size", g.max_swarm_size);
  read_into(j, "max_package_weight", g.max_package_weight);
  return g;
}

}  // namespace

void save_scenario(const Scenario& scenario, const std::string& path) {
  json nodes = json::array();
  for (const Node& n : scenario.network.nodes())
    nodes.push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}, {"pads", n.pads}});
  json segments = json::array();
  for (const Segment& s : scenario.network.segments())
    segments.push_back({{"from", s.from}, {"to", s.to}, {"dist", s.dist}});
  json requests = json::array();
  for (const Request& r : scenario.requests)
    requests.push_back({{"id", r.id},
                        {"dest", r.dest},
                        {"packages", r.packages},
                        {"window", {{"st", r.window.st}, {"et", r.window.et}}}});

  json j{{"seed", scenario.seed},
         {"provider", provider_json(scenario.provider)},
         {"energy", energy_json(scenario.energy)},
         {"pricing", pricing_json(scenario.pricing)},
         {"rl", rl_json(scenario.rl)},
         {"network", {{"nodes", nodes}, {"segments", segments}}},
         {"requests", requests}};
  if (scenario.generator) j["generator"] = generator_json(*scenario.generator);

  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << j.dump(2) << '\n';
  out.close();
  if (out.fail()) throw ParseError("failed writing " + path);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }

  Scenario scenario;
  try {
    read_into(j, "seed", scenario.seed);
    if (j.contains("provider")) scenario.provider = provider_from(j.at("provider"));
    if (j.contains("energy")) scenario.energy = energy_from(j.at("energy"));
    if (j.contains("pricing")) scenario.pricing = pricing_from(j.at("pricing"));
    if (j.contains("rl")) scenario.rl = rl_from(j.at("rl"));
    if (j.contains("generator")) scenario.generator = generator_from(j.at("generator"));

    const json& net = j.at("network");
    std::vector<Node> nodes;
    for (const json& n : net.at("nodes"))
      nodes.push_back({n.at("id").get<NodeId>(), n.at("x").get<double>(),
                       n.at("y").get<double>(), n.at("pads").get<int>()});
    std::vector<Segment> segments;
    for (const json& s : net.at("segments"))
      segments.push_back({s.at("from").get<NodeId>(), s.at("to").get<NodeId>(),
                          s.at("dist").get<double>()});
    scenario.network = SkywayNetwork(std::move(nodes), std::move(segments));

    for (const json& r : j.at("requests")) {
      Request req;
      req.id = r.at("id").get<RequestId>();
      req.dest = r.at("dest").get<NodeId>();
      req.packages = r.at("packages").get<std::vector<double>>();
      req.window = {r.at("window").at("st").get<double>(),
                    r.at("window").at("et").get<double>()};
      scenario.requests.push_back(std::move(req));
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return scenario;
}

std::vector<Violation> validate_scenario(const Scenario& scenario) {
  std::vector<Violation> out;
  const ProviderConfig& p = scenario.provider;

  if (scenario.network.size() == 0) {
    out.push_back({"network", "scenario carries no network"});
    return out;
  }
  if (p.max_swarm_size < 1)
    out.push_back({"provider", "max_swarm_size must be at least 1"});
  if (p.fleet_size < p.max_swarm_size)
    out.push_back({"provider", "fleet smaller than the maximum swarm"});
  if (!scenario.network.contains(p.source))
    out.push_back({"provider", "source node " + std::to_string(p.source) + " is unknown"});
  if (!(p.day_length > 0)) out.push_back({"provider", "day_length must be positive"});
  if (!(p.max_package_weight > 0))
    out.push_back({"provider", "max_package_weight must be positive"});

  try {
    validate_energy(scenario.energy, scenario.network);
  } catch (const ValidationError& e) {
    out.push_back({"energy", e.what()});
  }

  if (scenario.pricing.revenue_per_package < 0)
    out.push_back({"pricing", "negative revenue_per_package"});
  if (scenario.pricing.cost_per_drone_second < 0)
    out.push_back({"pricing", "negative cost_per_drone_second"});

  const RlParams& r = scenario.rl;
  if (!(r.alpha > 0) || r.alpha > 1) out.push_back({"rl", "alpha must lie in (0, 1]"});
  if (r.gamma < 0 || r.gamma > 1) out.push_back({"rl", "gamma must lie in [0, 1]"});
  if (r.epsilon_start < 0 || r.epsilon_start > 1 || r.epsilon_end < 0 || r.epsilon_end > 1)
    out.push_back({"rl", "epsilon bounds must lie in [0, 1]"});
  if (r.epsilon_decay_fraction < 0 || r.epsilon_decay_fraction > 1)
    out.push_back({"rl", "epsilon_decay_fraction must lie in [0, 1]"});
  if (r.episodes < 1) out.push_back({"rl", "episodes must be at least 1"});
  if (!(r.slot_granularity > 0)) out.push_back({"rl", "slot_granularity must be positive"});
  if (r.state_encoder != "auto" && r.state_encoder != "bitmask" &&
      r.state_encoder != "profit_bins")
    out.push_back({"rl", "unknown state encoder '" + r.state_encoder + "'"});
  if (r.profit_bin_width < 0) out.push_back({"rl", "negative profit_bin_width"});

  std::unordered_set<RequestId> ids;
  for (const Request& req : scenario.requests) {
    if (!ids.insert(req.id).second)
      out.push_back({"duplicate_request", "request id " + std::to_string(req.id) +
                                              " appears twice"});
    for (const Violation& v : validate_request(req, scenario.network, p)) out.push_back(v);
  }
  return out;
}

}  // namespace sdaas
