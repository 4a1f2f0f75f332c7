#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace anmdisc {

using Node = int;

inline constexpr int kMaxNodes = 64;

// Set of node indices backed by a 64-bit mask.
class NodeSet {
public:
    NodeSet() = default;
    NodeSet(std::initializer_list<Node> nodes);

    static NodeSet from_mask(std::uint64_t mask) {
        NodeSet s;
        s.mask_ = mask;
        return s;
    }
    static NodeSet range(int n);

    bool contains(Node i) const { return (mask_ >> i) & 1u; }
    void insert(Node i);
    void erase(Node i);
    NodeSet with(Node i) const { NodeSet s = *this; s.insert(i); return s; }
    NodeSet without(Node i) const { NodeSet s = *this; s.erase(i); return s; }

    bool empty() const { return mask_ == 0; }
    int size() const { return __builtin_popcountll(mask_); }
    std::uint64_t mask() const { return mask_; }
    std::vector<Node> to_vector() const;

    bool intersects(NodeSet other) const { return (mask_ & other.mask_) != 0; }
    NodeSet operator|(NodeSet o) const { return from_mask(mask_ | o.mask_); }
    NodeSet operator&(NodeSet o) const { return from_mask(mask_ & o.mask_); }
    NodeSet operator-(NodeSet o) const { return from_mask(mask_ & ~o.mask_); }

    friend bool operator==(NodeSet a, NodeSet b) = default;
    friend auto operator<=>(NodeSet a, NodeSet b) { return a.mask_ <=> b.mask_; }

private:
    std::uint64_t mask_ = 0;
};

struct Edge {
    Node parent;
    Node child;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed acyclic graph over nodes [0, num_nodes).
///
/// Edges are kept sorted, so two Dags compare equal iff their edge sets do.
/// Construction rejects self-loops, duplicate edges, out-of-range nodes and cycles.
class Dag {
public:
    explicit Dag(int num_nodes, std::vector<Edge> edges = {});

    int num_nodes() const { return num_nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    bool has_edge(Node parent, Node child) const;
    bool adjacent(Node a, Node b) const { return has_edge(a, b) || has_edge(b, a); }

    NodeSet parents(Node i) const;
    NodeSet children(Node i) const;
    NodeSet ancestors_of(NodeSet nodes) const;  // includes the nodes themselves
    NodeSet descendants(Node i) const;          // includes i
    std::vector<Node> topological_order() const;

    friend bool operator==(const Dag& a, const Dag& b) {
        return a.num_nodes_ == b.num_nodes_ && a.edges_ == b.edges_;
    }
    friend bool operator<(const Dag& a, const Dag& b) {
        if (a.num_nodes_ != b.num_nodes_) return a.num_nodes_ < b.num_nodes_;
        return a.edges_ < b.edges_;
    }

private:
    void check_node(Node i) const;

    int num_nodes_;
    std::vector<Edge> edges_;
    std::vector<std::uint64_t> parent_mask_;
    std::vector<std::uint64_t> child_mask_;
};

/// True iff edges form no directed cycle.
bool is_acyclic(int num_nodes, const std::vector<Edge>& edges);

NodeSet parents(const Dag& dag, Node i);

/// d-separation of A and B given S, by reachability in the moralized ancestral graph.
/// Throws std::invalid_argument if the sets overlap or A/B is empty.
bool d_separated(const Dag& dag, NodeSet a, NodeSet b, NodeSet s);

/// Unordered non-adjacent pairs (a, c) with a common child b: a -> b <- c.
struct Immorality {
    Node left;    // smaller endpoint
    Node collider;
    Node right;
    friend auto operator<=>(const Immorality&, const Immorality&) = default;
};
std::vector<std::pair<Node, Node>> skeleton(const Dag& dag);
std::vector<Immorality> immoralities(const Dag& dag);

/// Verma-Pearl: same skeleton and same immoralities.
bool markov_equivalent(const Dag& g1, const Dag& g2);

inline constexpr int kMaxEnumerationNodes = 6;

/// All DAGs Markov equivalent to `dag`, sorted. Requires num_nodes <= 6.
std::vector<Dag> markov_equivalence_class(const Dag& dag);

/// Every DAG on `num_nodes` nodes, sorted. Requires num_nodes <= 6.
std::vector<Dag> all_dags(int num_nodes);

/// Sublist of `dags` with the minimum edge count, in input order.
std::vector<Dag> minimal_edge_dags(const std::vector<Dag>& dags);

// Text forms use column names; one "parent -> child" line per edge.
std::string to_edge_list(const Dag& dag, const std::vector<std::string>& names);
std::string to_dot(const Dag& dag, const std::vector<std::string>& names);
Dag parse_edge_list(const std::string& text, const std::vector<std::string>& names);

}  // namespace anmdisc
