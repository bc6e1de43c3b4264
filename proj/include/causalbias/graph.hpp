#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "causalbias/linear.hpp"

namespace causalbias {

enum class NodeRole { Sensitive, Outcome, Covariate, Proxy };

NodeRole node_role_from_string(const std::string& s);
std::string to_string(NodeRole role);

struct GraphNode {
  std::string name;
  NodeRole role = NodeRole::Covariate;
  bool latent = false;
  bool conditioned = false;  // boxed variable: data is generated conditioning on it
  std::optional<double> variance;  // exogenous noise variance; defaults to 1.0
};

struct GraphEdge {
  std::string from;
  std::string to;
  std::optional<double> coefficient;
};

struct Violation {
  std::string kind;  // "cycle", "dangling edge", "duplicate name", "mixed coefficients"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Variables grouped by their role relative to a sensitive/outcome pair.
struct StructureTags {
  std::vector<std::string> confounders;
  std::vector<std::string> conditioned_colliders;
  std::vector<std::string> proxies;           // children of latent confounders with role proxy
  std::vector<std::string> second_sensitive;  // sensitive variables other than the queried one
};

/// Labeled causal DAG with roles, optional linear path coefficients and
/// selection (conditioned) flags. Immutable intent: build with add_node/add_edge,
/// then treat as read-only; every query is const and pure.
class CausalGraph {
 public:
  void add_node(GraphNode node);
  void add_edge(GraphEdge edge);

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  bool has_node(const std::string& name) const;
  const GraphNode& node(const std::string& name) const;

  std::vector<std::string> parents(const std::string& name) const;
  std::vector<std::string> children(const std::string& name) const;

  /// Structural diagnostics; returns violations instead of throwing.
  ValidationReport validate() const;

  /// True when every edge carries a coefficient (and there is at least one edge).
  bool fully_linear() const;

  /// d-separation of x and y given the conditioning set, by standard reachability
  /// with collider opening on conditioned ancestors. `given` is the whole
  /// conditioning set; node-level `conditioned` flags are classification
  /// metadata and are not implicitly added here.
  bool d_separated(const std::string& x, const std::string& y,
                   const std::vector<std::string>& given) const;

  /// Model-implied covariance of x and y by Wright's rule: sum over simple
  /// collider-free paths of the product of edge coefficients times the full
  /// variance of the path's root variable. Requires a fully linear graph with
  /// at most 12 nodes (explicit path enumeration).
  double wright_covariance(const std::string& x, const std::string& y) const;

  /// Full model-implied covariance matrix (fully linear graphs), computed by
  /// forward accumulation in topological order. Independent of the path
  /// enumeration above; used to source root variances and as a cross-check.
  CovMatrix model_covariance() const;

  /// Routes an audit of (a, y) to the applicable bias structures.
  StructureTags classify_structure(const std::string& a, const std::string& y) const;

  /// Line-based text format:
  ///   node <name> role=<sensitive|outcome|covariate|proxy> [latent] [conditioned] [var=<float>]
  ///   edge <from> -> <to> [coef=<float>]
  /// '#' starts a comment. Parse errors report the line number.
  static CausalGraph parse(std::istream& in, const std::string& source_name);
  static CausalGraph parse_file(const std::string& path);
  static CausalGraph parse_string(const std::string& text);

 private:
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;

  std::size_t node_index(const std::string& name) const;
  std::vector<std::vector<std::size_t>> parent_lists() const;
  std::vector<std::vector<std::size_t>> child_lists() const;
  std::optional<std::vector<std::size_t>> topological_order() const;
};

}  // namespace causalbias
