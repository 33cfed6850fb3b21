#include "sdaas/network.hpp"

#include "sdaas/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace sdaas {

SkywayNetwork::SkywayNetwork(std::vector<Node> nodes, std::vector<Segment> segments)
    : nodes_(std::move(nodes)), segments_(std::move(segments)) {
  if (nodes_.empty()) throw ValidationError("network has no nodes");

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (!std::isfinite(n.x) || !std::isfinite(n.y))
      throw ValidationError("node " + std::to_string(n.id) + " has non-finite coordinates");
    if (n.pads < 0)
      throw ValidationError("node " + std::to_string(n.id) + " has negative pads");
    if (!index_.emplace(n.id, static_cast<int>(i)).second)
      throw ValidationError("duplicate node id " + std::to_string(n.id));
  }

  adj_.resize(nodes_.size());
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const Segment& s : segments_) {
    if (s.from == s.to)
      throw ValidationError("self-loop at node " + std::to_string(s.from));
    auto fi = index_.find(s.from);
    auto ti = index_.find(s.to);
    if (fi == index_.end() || ti == index_.end())
      throw ValidationError("segment " + std::to_string(s.from) + "-" +
                            std::to_string(s.to) + " references an unknown node");
    if (!(s.dist > 0) || !std::isfinite(s.dist))
      throw ValidationError("segment " + std::to_string(s.from) + "-" +
                            std::to_string(s.to) + " has non-positive length");
    auto key = std::minmax(s.from, s.to);
    if (!seen.insert(key).second)
      throw ValidationError("duplicate segment " + std::to_string(s.from) + "-" +
                            std::to_string(s.to));
    adj_[fi->second].push_back({ti->second, s.dist});
    adj_[ti->second].push_back({fi->second, s.dist});
    longest_edge_ = std::max(longest_edge_, s.dist);
  }

  // canonical neighbor order: ascending node id
  for (auto& neighbors : adj_)
    std::sort(neighbors.begin(), neighbors.end(), [this](const Adjacent& a, const Adjacent& b) {
      return nodes_[a.node].id < nodes_[b.node].id;
    });

  // connectivity: every node reachable from the first
  std::vector<char> visited(nodes_.size(), 0);
  std::queue<int> frontier;
  frontier.push(0);
  visited[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop();
    for (const Adjacent& a : adj_[u])
      if (!visited[a.node]) {
        visited[a.node] = 1;
        ++reached;
        frontier.push(a.node);
      }
  }
  if (reached != nodes_.size())
    throw ValidationError("network is disconnected (" + std::to_string(reached) + " of " +
                          std::to_string(nodes_.size()) + " nodes reachable)");
}

int SkywayNetwork::index_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("unknown node id " + std::to_string(id));
  return it->second;
}

DistanceTable shortest_path_table(const SkywayNetwork& net, NodeId target) {
  DistanceTable table;
  table.net = &net;
  table.target = net.index_of(target);

  const double inf = std::numeric_limits<double>::infinity();
  table.dist.assign(net.size(), inf);
  table.next_hop.assign(net.size(), -1);
  table.dist[table.target] = 0;

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.push({0, table.target});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > table.dist[u]) continue;
    for (const Adjacent& a : net.neighbors(u)) {
      double nd = d + a.dist;
      if (nd < table.dist[a.node]) {
        table.dist[a.node] = nd;
        heap.push({nd, a.node});
      }
    }
  }

  // canonical first hop: argmin of edge + remaining distance, lowest
  // neighbor id on ties (neighbors are already id-sorted)
  for (int u = 0; u < net.size(); ++u) {
    if (u == table.target || table.dist[u] == inf) continue;
    int best = -1;
    double best_cost = inf;
    for (const Adjacent& a : net.neighbors(u)) {
      double cost = a.dist + table.dist[a.node];
      if (cost < best_cost) {
        best_cost = cost;
        best = a.node;
      }
    }
    table.next_hop[u] = best;
  }
  return table;
}

std::vector<int> shortest_path_from(const DistanceTable& table, int from) {
  if (table.dist[from] == std::numeric_limits<double>::infinity())
    throw ValidationError("no path to target from dense index " + std::to_string(from));
  std::vector<int> path{from};
  int u = from;
  while (u != table.target) {
    u = table.next_hop[u];
    path.push_back(u);
  }
  return path;
}

SkywayNetwork load_network(const std::string& nodes_csv, const std::string& edges_csv) {
  std::vector<Node> nodes;
  for (const auto& row : csv::read_rows(nodes_csv, "id,x,y,pads")) {
    if (row.size() != 4) throw ParseError(nodes_csv + ": expected 4 fields per row");
    Node n;
    n.id = csv::to_int(row[0], nodes_csv);
    n.x = csv::to_double(row[1], nodes_csv);
    n.y = csv::to_double(row[2], nodes_csv);
    n.pads = static_cast<int>(csv::to_int(row[3], nodes_csv));
    nodes.push_back(n);
  }

  // the edge file may or may not carry explicit distances
  std::ifstream probe(edges_csv);
  if (!probe) throw ParseError("cannot open " + edges_csv);
  std::string header_line;
  while (std::getline(probe, header_line)) {
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
    if (!header_line.empty() && header_line[0] != '#') break;
  }
  bool has_dist;
  if (header_line == "from,to,dist")
    has_dist = true;
  else if (header_line == "from,to")
    has_dist = false;
  else
    throw ParseError(edges_csv + ": expected header 'from,to[,dist]', got '" + header_line +
                     "'");

  std::unordered_map<NodeId, const Node*> by_id;
  for (const Node& n : nodes) by_id[n.id] = &n;
  auto euclid = [&](NodeId a, NodeId b) {
    auto ia = by_id.find(a);
    auto ib = by_id.find(b);
    if (ia == by_id.end() || ib == by_id.end())
      throw ValidationError("segment " + std::to_string(a) + "-" + std::to_string(b) +
                            " references an unknown node");
    double dx = ia->second->x - ib->second->x;
    double dy = ia->second->y - ib->second->y;
    return std::hypot(dx, dy);
  };

  std::vector<Segment> segments;
  for (const auto& row : csv::read_rows(edges_csv, header_line)) {
    if (row.size() != (has_dist ? 3u : 2u))
      throw ParseError(edges_csv + ": wrong field count in a row");
    Segment s;
    s.from = csv::to_int(row[0], edges_csv);
    s.to = csv::to_int(row[1], edges_csv);
    if (has_dist && !row[2].empty())
      s.dist = csv::to_double(row[2], edges_csv);
    else
      s.dist = euclid(s.from, s.to);
    segments.push_back(s);
  }
  return SkywayNetwork(std::move(nodes), std::move(segments));
}

void save_network(const SkywayNetwork& net, const std::string& nodes_csv,
                  const std::string& edges_csv) {
  csv::Writer nodes(nodes_csv);
  nodes.row({"id", "x", "y", "pads"});
  for (const Node& n : net.nodes())
    nodes.row({std::to_string(n.id), csv::num(n.x), csv::num(n.y), std::to_string(n.pads)});
  nodes.close();

  csv::Writer edges(edges_csv);
  edges.row({"from", "to", "dist"});
  for (const Segment& s : net.segments())
    edges.row({std::to_string(s.from), std::to_string(s.to), csv::num(s.dist)});
  edges.close();
}

std::vector<Violation> validate_request(const Request& req, const SkywayNetwork& net,
                                        const ProviderConfig& cfg) {
  std::vector<Violation> out;
  std::string rid = "request " + std::to_string(req.id);

  if (!net.contains(req.dest))
    out.push_back({"unknown_dest", rid + " targets unknown node " + std::to_string(req.dest)});
  else if (req.dest == cfg.source)
    out.push_back({"dest_is_source", rid + " targets the source node"});

  if (req.packages.empty())
    out.push_back({"no_packages", rid + " carries no packages"});
  if (static_cast<int>(req.packages.size()) > cfg.max_swarm_size)
    out.push_back({"too_many_packages",
                   rid + " needs " + std::to_string(req.packages.size()) +
                       " drones but the cap is " + std::to_string(cfg.max_swarm_size)});
  for (double w : req.packages) {
    if (!(w > 0)) {
      out.push_back({"bad_package_weight", rid + " has a non-positive package weight"});
      break;
    }
    if (w > cfg.max_package_weight) {
      out.push_back({"package_too_heavy", rid + " has a package over " +
                                              csv::num(cfg.max_package_weight) + " kg"});
      break;
    }
  }

  if (!(req.window.et > req.window.st))
    out.push_back({"bad_window", rid + " has an empty delivery window"});
  else if (req.window.st < 0 || req.window.et > cfg.day_length)
    out.push_back({"window_outside_day", rid + " window leaves the working day"});

  return out;
}

}  // namespace sdaas
