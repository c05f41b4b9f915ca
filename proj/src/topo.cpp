#include "gta/topo.hpp"

#include "gta/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace gta {

void MemoryConfig::validate() const {
  if (!(delta_merge > 0.0)) throw ValidationError("delta_merge must be positive");
  if (tau_loop <= 0) throw ValidationError("tau_loop must be positive");
  if (!(delta_h > 0.0)) throw ValidationError("delta_h must be positive");
}

const char* to_string(VerticalStatus s) {
  switch (s) {
    case VerticalStatus::Upstairs: return "Upstairs";
    case VerticalStatus::Downstairs: return "Downstairs";
    default: return "Level";
  }
}

VerticalStatus vertical_status(double now, double ref, const MemoryConfig& config) {
  const double dh = now - ref;
  if (dh > config.delta_h) return VerticalStatus::Upstairs;
  if (dh < -config.delta_h) return VerticalStatus::Downstairs;
  return VerticalStatus::Level;
}

Observation TopoGraph::observe_pose(const Vec3& pose, const MemoryConfig& config) {
  if (!pose.allFinite()) throw ValidationError("observe_pose: non-finite pose");
  height_prev_ = nodes_.empty() ? pose.z() : height_now_;
  height_now_ = pose.z();
  const Vec2 p = pose.head<2>();

  int nearest = -1;
  double d_min = std::numeric_limits<double>::infinity();
  for (const auto& n : nodes_) {
    const double d = (n.position - p).norm();
    if (d < d_min) {
      d_min = d;
      nearest = n.id;
    }
  }

  Observation obs;
  if (nearest >= 0 && d_min < config.delta_merge) {
    obs.node = nearest;
    if (*current_ != nearest) {
      ++nodes_[nearest].visit_count;
      edges_.emplace(std::min(*current_, nearest), std::max(*current_, nearest));
      current_ = nearest;
      obs.arrived = true;
    }
    return obs;
  }

  TopoNode node;
  node.id = static_cast<int>(nodes_.size());
  node.position = p;
  node.floor_height = pose.z();
  nodes_.push_back(node);
  if (current_) edges_.emplace(std::min(*current_, node.id), std::max(*current_, node.id));
  current_ = node.id;
  obs.node = node.id;
  obs.created = true;
  obs.arrived = true;
  return obs;
}

const TopoNode& TopoGraph::current() const {
  if (!current_) throw ValidationError("topological graph is empty");
  return nodes_[*current_];
}

bool TopoGraph::has_edge(int a, int b) const {
  return edges_.count({std::min(a, b), std::max(a, b)}) > 0;
}

std::vector<int> TopoGraph::neighbors(int id) const {
  std::vector<int> out;
  for (const auto& [a, b] : edges_) {
    if (a == id) out.push_back(b);
    if (b == id) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string TopoGraph::serialize() const {
  std::ostringstream out;
  out << "gta-topo 1\n";
  out << "heights " << fmt(height_now_) << ' ' << fmt(height_prev_) << '\n';
  for (const auto& n : nodes_) {
    out << "node " << n.id << ' ' << fmt(n.position.x()) << ' ' << fmt(n.position.y()) << ' '
        << fmt(n.floor_height) << ' ' << n.visit_count << '\n';
  }
  for (const auto& [a, b] : edges_) out << "edge " << a << ' ' << b << '\n';
  if (current_) out << "current " << *current_ << '\n';
  return out.str();
}

TopoGraph TopoGraph::deserialize(const std::string& text) {
  TopoGraph g;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw ParseError("topo graph line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (line_no == 1) {
      int version = 0;
      if (tag != "gta-topo" || !(ls >> version) || version != 1) fail("expected header 'gta-topo 1'");
    } else if (tag == "heights") {
      if (!(ls >> g.height_now_ >> g.height_prev_)) fail("malformed heights");
    } else if (tag == "node") {
      TopoNode n;
      double x = 0, y = 0;
      if (!(ls >> n.id >> x >> y >> n.floor_height >> n.visit_count)) fail("malformed node");
      if (n.id != static_cast<int>(g.nodes_.size())) fail("node ids must be dense and ordered");
      if (n.visit_count < 1) fail("visit count must be >= 1");
      n.position = {x, y};
      g.nodes_.push_back(n);
    } else if (tag == "edge") {
      int a = 0, b = 0;
      if (!(ls >> a >> b)) fail("malformed edge");
      const int n = static_cast<int>(g.nodes_.size());
      if (a < 0 || b < 0 || a >= n || b >= n || a == b) fail("edge references unknown node");
      g.edges_.emplace(std::min(a, b), std::max(a, b));
    } else if (tag == "current") {
      int c = 0;
      if (!(ls >> c) || c < 0 || c >= static_cast<int>(g.nodes_.size())) fail("bad current node");
      g.current_ = c;
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  if (line_no == 0) throw ParseError("topo graph: empty input");
  if (!g.nodes_.empty() && !g.current_) throw ParseError("topo graph: missing current node");
  return g;
}

bool TopoGraph::operator==(const TopoGraph& o) const {
  if (nodes_.size() != o.nodes_.size() || edges_ != o.edges_ || current_ != o.current_) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto &a = nodes_[i], &b = o.nodes_[i];
    if (a.id != b.id || a.position != b.position || a.visit_count != b.visit_count ||
        a.floor_height != b.floor_height)
      return false;
  }
  return height_now_ == o.height_now_ && height_prev_ == o.height_prev_;
}

std::optional<std::string> detect_loop(const TopoGraph& graph, const MemoryConfig& config) {
  if (graph.current().visit_count > config.tau_loop) return std::string(kLoopAlert);
  return std::nullopt;
}

std::string state_summary(const TopoGraph& graph, const MemoryConfig& config) {
  const auto& cur = graph.current();
  std::ostringstream out;
  out << "current_node: " << cur.id << '\n';
  out << "visit_count: " << cur.visit_count << '\n';
  out << "neighbors: " << graph.neighbors(cur.id).size() << '\n';
  out << "nodes_total: " << graph.nodes().size() << '\n';
  out << "vertical: " << to_string(vertical_status(graph.height_now(), graph.height_prev(), config)) << '\n';
  if (const auto alert = detect_loop(graph, config)) out << "safety: " << *alert << '\n';
  return out.str();
}

}  // namespace gta
