#include "causalbias/graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "causalbias/errors.hpp"

namespace causalbias {

NodeRole node_role_from_string(const std::string& s) {
  if (s == "sensitive") return NodeRole::Sensitive;
  if (s == "outcome") return NodeRole::Outcome;
  if (s == "covariate") return NodeRole::Covariate;
  if (s == "proxy") return NodeRole::Proxy;
  throw std::invalid_argument("unknown role: " + s);
}

std::string to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Sensitive: return "sensitive";
    case NodeRole::Outcome: return "outcome";
    case NodeRole::Covariate: return "covariate";
    case NodeRole::Proxy: return "proxy";
  }
  return "?";
}

void CausalGraph::add_node(GraphNode node) { nodes_.push_back(std::move(node)); }
void CausalGraph::add_edge(GraphEdge edge) { edges_.push_back(std::move(edge)); }

bool CausalGraph::has_node(const std::string& name) const {
  for (const auto& n : nodes_)
    if (n.name == name) return true;
  return false;
}

const GraphNode& CausalGraph::node(const std::string& name) const {
  for (const auto& n : nodes_)
    if (n.name == name) return n;
  throw std::invalid_argument("unknown node: " + name);
}

std::size_t CausalGraph::node_index(const std::string& name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].name == name) return i;
  throw std::invalid_argument("unknown node: " + name);
}

std::vector<std::vector<std::size_t>> CausalGraph::parent_lists() const {
  std::vector<std::vector<std::size_t>> parents(nodes_.size());
  for (const auto& e : edges_) parents[node_index(e.to)].push_back(node_index(e.from));
  return parents;
}

std::vector<std::vector<std::size_t>> CausalGraph::child_lists() const {
  std::vector<std::vector<std::size_t>> children(nodes_.size());
  for (const auto& e : edges_) children[node_index(e.from)].push_back(node_index(e.to));
  return children;
}

std::vector<std::string> CausalGraph::parents(const std::string& name) const {
  std::vector<std::string> out;
  for (const auto& e : edges_)
    if (e.to == name) out.push_back(e.from);
  return out;
}

std::vector<std::string> CausalGraph::children(const std::string& name) const {
  std::vector<std::string> out;
  for (const auto& e : edges_)
    if (e.from == name) out.push_back(e.to);
  return out;
}

std::optional<std::vector<std::size_t>> CausalGraph::topological_order() const {
  const std::size_t n = nodes_.size();
  std::vector<std::size_t> indegree(n, 0);
  auto children = child_lists();
  for (const auto& e : edges_) indegree[node_index(e.to)]++;
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push_back(i);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::size_t v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (std::size_t c : children[v])
      if (--indegree[c] == 0) ready.push_back(c);
  }
  if (order.size() != n) return std::nullopt;  // cycle
  return order;
}

ValidationReport CausalGraph::validate() const {
  ValidationReport report;
  std::set<std::string> seen;
  for (const auto& n : nodes_)
    if (!seen.insert(n.name).second)
      report.violations.push_back({"duplicate name", "node declared twice: " + n.name});

  bool dangling = false;
  for (const auto& e : edges_) {
    for (const auto& end : {e.from, e.to}) {
      if (!seen.count(end)) {
        report.violations.push_back({"dangling edge", "edge references undeclared node: " + end});
        dangling = true;
      }
    }
  }

  if (!dangling && !topological_order())
    report.violations.push_back({"cycle", "edge relation contains a cycle"});

  std::size_t with_coef = 0;
  for (const auto& e : edges_)
    if (e.coefficient) ++with_coef;
  if (with_coef != 0 && with_coef != edges_.size())
    report.violations.push_back(
        {"mixed coefficients", "either all edges carry a coefficient or none"});
  return report;
}

bool CausalGraph::fully_linear() const {
  if (edges_.empty()) return false;
  for (const auto& e : edges_)
    if (!e.coefficient) return false;
  return true;
}

bool CausalGraph::d_separated(const std::string& x, const std::string& y,
                              const std::vector<std::string>& given) const {
  if (x == y) throw std::invalid_argument("d-separation needs distinct endpoints");
  std::size_t xi = node_index(x), yi = node_index(y);
  std::vector<bool> in_z(nodes_.size(), false);
  for (const auto& g : given) {
    std::size_t gi = node_index(g);
    if (gi == xi || gi == yi)
      throw std::invalid_argument("conditioning set contains an endpoint: " + g);
    in_z[gi] = true;
  }

  auto parents = parent_lists();
  auto children = child_lists();

  // Ancestors of the conditioning set (inclusive): colliders open only there.
  std::vector<bool> anc_z = in_z;
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (in_z[i]) queue.push_back(i);
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t p : parents[v])
      if (!anc_z[p]) {
        anc_z[p] = true;
        queue.push_back(p);
      }
  }

  // Reachability over (node, arrival direction) states; arriving "up" means the
  // trail entered from a child, "down" from a parent.
  enum Dir { kUp = 0, kDown = 1 };
  std::vector<std::array<bool, 2>> visited(nodes_.size(), {false, false});
  std::deque<std::pair<std::size_t, Dir>> frontier;
  frontier.push_back({xi, kUp});
  while (!frontier.empty()) {
    auto [v, dir] = frontier.front();
    frontier.pop_front();
    if (visited[v][dir]) continue;
    visited[v][dir] = true;
    if (v == yi) return false;  // active trail reached y
    if (dir == kUp) {
      if (!in_z[v]) {
        for (std::size_t p : parents[v]) frontier.push_back({p, kUp});
        for (std::size_t c : children[v]) frontier.push_back({c, kDown});
      }
    } else {
      if (!in_z[v])
        for (std::size_t c : children[v]) frontier.push_back({c, kDown});
      if (anc_z[v])  // collider (or its ancestor chain) opened by conditioning
        for (std::size_t p : parents[v]) frontier.push_back({p, kUp});
    }
  }
  return true;
}

CovMatrix CausalGraph::model_covariance() const {
  if (!fully_linear()) throw StructureError("model covariance requires a fully linear graph");
  auto order = topological_order();
  if (!order) throw StructureError("graph has a cycle");
  const std::size_t n = nodes_.size();

  // Coefficient and noise-variance lookup.
  std::vector<std::vector<std::pair<std::size_t, double>>> coef_parents(n);
  for (const auto& e : edges_)
    coef_parents[node_index(e.to)].push_back({node_index(e.from), *e.coefficient});
  std::vector<double> noise(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    if (nodes_[i].variance) noise[i] = *nodes_[i].variance;

  // Forward accumulation: cov(v,u) = sum_p c_p cov(p,u) for u before v,
  // cov(v,v) = sum_{p,q} c_p c_q cov(p,q) + noise_v.
  std::vector<double> cov(n * n, 0.0);
  std::vector<bool> done(n, false);
  for (std::size_t v : *order) {
    for (std::size_t u = 0; u < n; ++u) {
      if (!done[u] || u == v) continue;
      double s = 0.0;
      for (const auto& [p, c] : coef_parents[v]) s += c * cov[p * n + u];
      cov[v * n + u] = s;
      cov[u * n + v] = s;
    }
    double s = noise[v];
    for (const auto& [p, cp] : coef_parents[v])
      for (const auto& [q, cq] : coef_parents[v]) s += cp * cq * cov[p * n + q];
    cov[v * n + v] = s;
    done[v] = true;
  }

  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = nodes_[i].name;
  return CovMatrix(std::move(names), std::move(cov), std::vector<double>(n, 0.0));
}

double CausalGraph::wright_covariance(const std::string& x, const std::string& y) const {
  if (!fully_linear())
    throw StructureError("Wright covariance requires coefficients on every edge");
  if (nodes_.size() > 12)
    throw StructureError("path enumeration bounded at 12 nodes");
  if (x == y) throw std::invalid_argument("wright_covariance needs distinct variables");
  std::size_t xi = node_index(x), yi = node_index(y);

  CovMatrix model = model_covariance();  // full variances for path roots
  const std::size_t n = nodes_.size();

  // Undirected adjacency with direction tags.
  struct Arc {
    std::size_t to;
    double coef;
    bool forward;  // true: edge points towards `to`
  };
  std::vector<std::vector<Arc>> adj(n);
  for (const auto& e : edges_) {
    std::size_t f = node_index(e.from), t = node_index(e.to);
    adj[f].push_back({t, *e.coefficient, true});
    adj[t].push_back({f, *e.coefficient, false});
  }

  double total = 0.0;
  std::vector<bool> on_path(n, false);
  std::vector<Arc> trail;

  // DFS over simple undirected paths x..y. Node sequence is x = v0 .. vk = y
  // with arc i between v_i and v_{i+1}; arc.forward means v_i -> v_{i+1}.
  // A path contributes when it has no collider (-> v <-), and then carries the
  // product of its coefficients times the full variance of its unique root
  // (the node both adjacent arcs leave, or the source endpoint of a directed path).
  std::function<void(std::size_t)> dfs = [&](std::size_t v) {
    if (v == yi) {
      double prod = 1.0;
      for (const auto& a : trail) prod *= a.coef;
      int root_seq = -1;
      for (std::size_t i = 0; i + 1 < trail.size(); ++i) {
        bool in_left = trail[i].forward;        // arc i points into v_{i+1}
        bool out_right = trail[i + 1].forward;  // arc i+1 leaves v_{i+1}
        if (in_left && !out_right) return;      // collider at v_{i+1}
        if (!in_left && out_right) root_seq = static_cast<int>(i + 1);
      }
      std::size_t root_node;
      if (root_seq > 0)
        root_node = trail[static_cast<std::size_t>(root_seq) - 1].to;
      else if (trail.front().forward)
        root_node = xi;  // x -> ... -> y
      else
        root_node = yi;  // x <- ... <- y
      total += prod * model.at(root_node, root_node);
      return;
    }
    for (const auto& a : adj[v]) {
      if (on_path[a.to]) continue;
      on_path[a.to] = true;
      trail.push_back(a);
      dfs(a.to);
      trail.pop_back();
      on_path[a.to] = false;
    }
  };

  on_path[xi] = true;
  dfs(xi);
  return total;
}

StructureTags CausalGraph::classify_structure(const std::string& a, const std::string& y) const {
  const GraphNode& na = node(a);
  const GraphNode& ny = node(y);
  if (na.role != NodeRole::Sensitive)
    throw StructureError(a + " does not have role sensitive");
  if (ny.role != NodeRole::Outcome)
    throw StructureError(y + " does not have role outcome");

  const std::size_t n = nodes_.size();
  auto children = child_lists();
  std::size_t ai = node_index(a), yi = node_index(y);

  // descendants[v] = set of nodes reachable from v by directed paths.
  auto reach_from = [&](std::size_t start) {
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> q{start};
    seen[start] = true;
    while (!q.empty()) {
      std::size_t v = q.front();
      q.pop_front();
      for (std::size_t c : children[v])
        if (!seen[c]) {
          seen[c] = true;
          q.push_back(c);
        }
    }
    return seen;
  };
  // Directed reachability avoiding one node.
  auto reaches_avoiding = [&](std::size_t from, std::size_t to, std::size_t avoid) {
    if (from == avoid) return false;
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> q{from};
    seen[from] = true;
    while (!q.empty()) {
      std::size_t v = q.front();
      q.pop_front();
      if (v == to) return true;
      for (std::size_t c : children[v])
        if (!seen[c] && c != avoid) {
          seen[c] = true;
          q.push_back(c);
        }
    }
    return false;
  };

  StructureTags tags;
  std::vector<bool> from_a = reach_from(ai), from_y = reach_from(yi);
  for (std::size_t v = 0; v < n; ++v) {
    if (v == ai || v == yi) continue;
    // confounder: causes a (not through y) and causes y (not through a)
    if (reaches_avoiding(v, ai, yi) && reaches_avoiding(v, yi, ai))
      tags.confounders.push_back(nodes_[v].name);
    // conditioned collider: common descendant of a and y, boxed
    if (nodes_[v].conditioned && from_a[v] && from_y[v])
      tags.conditioned_colliders.push_back(nodes_[v].name);
    if (nodes_[v].role == NodeRole::Sensitive) tags.second_sensitive.push_back(nodes_[v].name);
  }
  // proxies: role=proxy children of latent confounders
  for (std::size_t v = 0; v < n; ++v) {
    if (nodes_[v].role != NodeRole::Proxy) continue;
    for (const auto& p : parents(nodes_[v].name)) {
      const GraphNode& pn = node(p);
      bool p_is_conf = std::find(tags.confounders.begin(), tags.confounders.end(), p) !=
                       tags.confounders.end();
      if (pn.latent && p_is_conf) {
        tags.proxies.push_back(nodes_[v].name);
        break;
      }
    }
  }
  return tags;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') break;
    tokens.push_back(tok);
  }
  return tokens;
}

double parse_double(const std::string& s, const std::string& source, int line) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(source, line, "bad number: " + s);
  }
}

}  // namespace

CausalGraph CausalGraph::parse(std::istream& in, const std::string& source_name) {
  CausalGraph graph;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "node") {
      if (tokens.size() < 3) throw ParseError(source_name, lineno, "node needs a name and role");
      GraphNode node;
      node.name = tokens[1];
      bool have_role = false;
      for (std::size_t i = 2; i < tokens.size(); ++i) {
        const std::string& t = tokens[i];
        if (t.rfind("role=", 0) == 0) {
          try {
            node.role = node_role_from_string(t.substr(5));
          } catch (const std::invalid_argument& e) {
            throw ParseError(source_name, lineno, e.what());
          }
          have_role = true;
        } else if (t == "latent") {
          node.latent = true;
        } else if (t == "conditioned") {
          node.conditioned = true;
        } else if (t.rfind("var=", 0) == 0) {
          double v = parse_double(t.substr(4), source_name, lineno);
          if (!(v > 0.0)) throw ParseError(source_name, lineno, "var must be positive");
          node.variance = v;
        } else {
          throw ParseError(source_name, lineno, "unknown node attribute: " + t);
        }
      }
      if (!have_role) throw ParseError(source_name, lineno, "node needs role=<...>");
      graph.add_node(std::move(node));
    } else if (tokens[0] == "edge") {
      if (tokens.size() < 4 || tokens[2] != "->")
        throw ParseError(source_name, lineno, "expected: edge <from> -> <to> [coef=<float>]");
      GraphEdge edge;
      edge.from = tokens[1];
      edge.to = tokens[3];
      for (std::size_t i = 4; i < tokens.size(); ++i) {
        const std::string& t = tokens[i];
        if (t.rfind("coef=", 0) == 0)
          edge.coefficient = parse_double(t.substr(5), source_name, lineno);
        else
          throw ParseError(source_name, lineno, "unknown edge attribute: " + t);
      }
      graph.add_edge(std::move(edge));
    } else {
      throw ParseError(source_name, lineno, "expected 'node' or 'edge', got: " + tokens[0]);
    }
  }
  return graph;
}

CausalGraph CausalGraph::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse(in, path);
}

CausalGraph CausalGraph::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in, "<string>");
}

}  // namespace causalbias
