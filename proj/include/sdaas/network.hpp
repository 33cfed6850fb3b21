#pragma once

#include "sdaas/types.hpp"

#include <unordered_map>
#include <vector>

namespace sdaas {

/// Adjacency record: dense neighbor index plus segment length in meters.
struct Adjacent {
  int node = 0;
  double dist = 0;
};

/// Validated, connected skyway graph. Nodes keep their file ids; internally
/// everything runs on dense indices.
class SkywayNetwork {
public:
  SkywayNetwork() = default;  // empty placeholder; real graphs use the ctor below
  SkywayNetwork(std::vector<Node> nodes, std::vector<Segment> segments);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Segment>& segments() const { return segments_; }

  bool contains(NodeId id) const { return index_.count(id) > 0; }
  int index_of(NodeId id) const;
  const Node& node(NodeId id) const { return nodes_[index_of(id)]; }
  const Node& node_at(int index) const { return nodes_[index]; }

  const std::vector<Adjacent>& neighbors(int index) const { return adj_[index]; }
  double longest_edge() const { return longest_edge_; }

private:
  std::vector<Node> nodes_;
  std::vector<Segment> segments_;
  std::unordered_map<NodeId, int> index_;
  std::vector<std::vector<Adjacent>> adj_;
  double longest_edge_ = 0;
};

/// Exact shortest-path distances from every node to one target, with the
/// first hop of a canonical (lowest-neighbor-id tie break) shortest path.
struct DistanceTable {
  const SkywayNetwork* net = nullptr;
  int target = 0;                // dense index
  std::vector<double> dist;      // meters, by dense index
  std::vector<int> next_hop;     // dense index toward target; -1 at target

  double meters_at(int index) const { return dist[index]; }
  double meters(NodeId id) const { return dist[net->index_of(id)]; }
};

DistanceTable shortest_path_table(const SkywayNetwork& net, NodeId target);

/// Node sequence (dense indices) from `from` to the table's target along
/// the canonical shortest path.
std::vector<int> shortest_path_from(const DistanceTable& table, int from);

/// Loads `nodes.csv` (id,x,y,pads) and `edges.csv` (from,to[,dist]).
/// Missing distances are filled with the Euclidean gap between endpoints.
SkywayNetwork load_network(const std::string& nodes_csv, const std::string& edges_csv);
void save_network(const SkywayNetwork& net, const std::string& nodes_csv,
                  const std::string& edges_csv);

std::vector<Violation> validate_request(const Request& req, const SkywayNetwork& net,
                                        const ProviderConfig& cfg);

}  // namespace sdaas
