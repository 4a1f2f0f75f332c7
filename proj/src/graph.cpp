#include "anmdisc/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace anmdisc {

NodeSet::NodeSet(std::initializer_list<Node> nodes) {
    for (Node i : nodes) insert(i);
}

NodeSet NodeSet::range(int n) {
    if (n < 0 || n > kMaxNodes) throw std::out_of_range("NodeSet::range: bad size");
    return from_mask(n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
}

void NodeSet::insert(Node i) {
    if (i < 0 || i >= kMaxNodes) throw std::out_of_range("node index out of range");
    mask_ |= std::uint64_t{1} << i;
}

void NodeSet::erase(Node i) {
    if (i < 0 || i >= kMaxNodes) throw std::out_of_range("node index out of range");
    mask_ &= ~(std::uint64_t{1} << i);
}

std::vector<Node> NodeSet::to_vector() const {
    std::vector<Node> out;
    out.reserve(size());
    for (std::uint64_t m = mask_; m; m &= m - 1) out.push_back(__builtin_ctzll(m));
    return out;
}

bool is_acyclic(int num_nodes, const std::vector<Edge>& edges) {
    std::vector<int> indegree(num_nodes, 0);
    std::vector<std::vector<Node>> out(num_nodes);
    for (const auto& e : edges) {
        out[e.parent].push_back(e.child);
        ++indegree[e.child];
    }
    std::vector<Node> stack;
    for (Node i = 0; i < num_nodes; ++i)
        if (indegree[i] == 0) stack.push_back(i);
    int seen = 0;
    while (!stack.empty()) {
        Node v = stack.back();
        stack.pop_back();
        ++seen;
        for (Node c : out[v])
            if (--indegree[c] == 0) stack.push_back(c);
    }
    return seen == num_nodes;
}

Dag::Dag(int num_nodes, std::vector<Edge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)),
      parent_mask_(num_nodes, 0), child_mask_(num_nodes, 0) {
    if (num_nodes < 1 || num_nodes > kMaxNodes)
        throw std::invalid_argument("Dag: num_nodes must be in [1, 64]");
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        throw std::invalid_argument("Dag: duplicate edge");
    for (const auto& e : edges_) {
        check_node(e.parent);
        check_node(e.child);
        if (e.parent == e.child) throw std::invalid_argument("Dag: self-loop");
        parent_mask_[e.child] |= std::uint64_t{1} << e.parent;
        child_mask_[e.parent] |= std::uint64_t{1} << e.child;
    }
    if (!is_acyclic(num_nodes_, edges_)) throw std::invalid_argument("Dag: edges contain a cycle");
}

void Dag::check_node(Node i) const {
    if (i < 0 || i >= num_nodes_)
        throw std::out_of_range("node index " + std::to_string(i) + " out of range");
}

bool Dag::has_edge(Node parent, Node child) const {
    check_node(parent);
    check_node(child);
    return (parent_mask_[child] >> parent) & 1u;
}

NodeSet Dag::parents(Node i) const {
    check_node(i);
    return NodeSet::from_mask(parent_mask_[i]);
}

NodeSet Dag::children(Node i) const {
    check_node(i);
    return NodeSet::from_mask(child_mask_[i]);
}

NodeSet Dag::ancestors_of(NodeSet nodes) const {
    std::uint64_t result = nodes.mask();
    std::uint64_t frontier = result;
    while (frontier) {
        std::uint64_t next = 0;
        for (std::uint64_t m = frontier; m; m &= m - 1) next |= parent_mask_[__builtin_ctzll(m)];
        frontier = next & ~result;
        result |= next;
    }
    return NodeSet::from_mask(result);
}

NodeSet Dag::descendants(Node i) const {
    check_node(i);
    std::uint64_t result = std::uint64_t{1} << i;
    std::uint64_t frontier = result;
    while (frontier) {
        std::uint64_t next = 0;
        for (std::uint64_t m = frontier; m; m &= m - 1) next |= child_mask_[__builtin_ctzll(m)];
        frontier = next & ~result;
        result |= next;
    }
    return NodeSet::from_mask(result);
}

std::vector<Node> Dag::topological_order() const {
    std::vector<Node> order;
    order.reserve(num_nodes_);
    std::uint64_t placed = 0;
    while (static_cast<int>(order.size()) < num_nodes_) {
        for (Node i = 0; i < num_nodes_; ++i) {
            if ((placed >> i) & 1u) continue;
            if ((parent_mask_[i] & ~placed) == 0) {
                order.push_back(i);
                placed |= std::uint64_t{1} << i;
                break;
            }
        }
    }
    return order;
}

NodeSet parents(const Dag& dag, Node i) { return dag.parents(i); }

bool d_separated(const Dag& dag, NodeSet a, NodeSet b, NodeSet s) {
    if (a.empty() || b.empty()) throw std::invalid_argument("d_separated: A and B must be nonempty");
    if (a.intersects(b) || a.intersects(s) || b.intersects(s))
        throw std::invalid_argument("d_separated: A, B, S must be pairwise disjoint");
    const NodeSet all = NodeSet::range(dag.num_nodes());
    if (!((a | b | s) - all).empty()) throw std::out_of_range("d_separated: node out of range");

    // Moral graph of the ancestral set of A u B u S.
    const NodeSet anc = dag.ancestors_of(a | b | s);
    std::vector<std::uint64_t> nbr(dag.num_nodes(), 0);
    for (Node v : anc.to_vector()) {
        const std::vector<Node> pa = dag.parents(v).to_vector();
        for (Node p : pa) {
            nbr[p] |= std::uint64_t{1} << v;
            nbr[v] |= std::uint64_t{1} << p;
        }
        for (std::size_t x = 0; x < pa.size(); ++x)
            for (std::size_t y = x + 1; y < pa.size(); ++y) {
                nbr[pa[x]] |= std::uint64_t{1} << pa[y];
                nbr[pa[y]] |= std::uint64_t{1} << pa[x];
            }
    }

    const std::uint64_t allowed = anc.mask() & ~s.mask();
    std::uint64_t reached = a.mask();
    std::uint64_t frontier = reached;
    while (frontier) {
        std::uint64_t next = 0;
        for (std::uint64_t m = frontier; m; m &= m - 1) next |= nbr[__builtin_ctzll(m)];
        next &= allowed & ~reached;
        if (next & b.mask()) return false;
        reached |= next;
        frontier = next;
    }
    return true;
}

std::vector<std::pair<Node, Node>> skeleton(const Dag& dag) {
    std::vector<std::pair<Node, Node>> out;
    for (const auto& e : dag.edges()) out.emplace_back(std::min(e.parent, e.child), std::max(e.parent, e.child));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Immorality> immoralities(const Dag& dag) {
    std::vector<Immorality> out;
    for (Node c = 0; c < dag.num_nodes(); ++c) {
        const std::vector<Node> pa = dag.parents(c).to_vector();
        for (std::size_t x = 0; x < pa.size(); ++x)
            for (std::size_t y = x + 1; y < pa.size(); ++y)
                if (!dag.adjacent(pa[x], pa[y])) out.push_back({pa[x], c, pa[y]});
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool markov_equivalent(const Dag& g1, const Dag& g2) {
    if (g1.num_nodes() != g2.num_nodes())
        throw std::invalid_argument("markov_equivalent: node counts differ");
    return skeleton(g1) == skeleton(g2) && immoralities(g1) == immoralities(g2);
}

std::vector<Dag> markov_equivalence_class(const Dag& dag) {
    if (dag.num_nodes() > kMaxEnumerationNodes)
        throw std::invalid_argument("markov_equivalence_class: at most 6 nodes supported");
    // Equivalent DAGs share the skeleton, so only its orientations need checking.
    const auto skel = skeleton(dag);
    const auto target = immoralities(dag);
    std::vector<Dag> out;
    const std::size_t m = skel.size();
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
        std::vector<Edge> edges;
        edges.reserve(m);
        for (std::size_t k = 0; k < m; ++k) {
            const auto [u, v] = skel[k];
            edges.push_back((bits >> k) & 1u ? Edge{v, u} : Edge{u, v});
        }
        if (!is_acyclic(dag.num_nodes(), edges)) continue;
        Dag candidate(dag.num_nodes(), std::move(edges));
        if (immoralities(candidate) == target) out.push_back(std::move(candidate));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Dag> all_dags(int num_nodes) {
    if (num_nodes < 1 || num_nodes > kMaxEnumerationNodes)
        throw std::invalid_argument("all_dags: num_nodes must be in [1, 6]");
    std::vector<std::pair<Node, Node>> pairs;
    for (Node u = 0; u < num_nodes; ++u)
        for (Node v = u + 1; v < num_nodes; ++v) pairs.emplace_back(u, v);
    std::size_t total = 1;
    for (std::size_t k = 0; k < pairs.size(); ++k) total *= 3;

    std::vector<Dag> out;
    std::vector<Edge> edges;
    for (std::size_t code = 0; code < total; ++code) {
        edges.clear();
        std::size_t c = code;
        for (const auto& [u, v] : pairs) {
            switch (c % 3) {
                case 1: edges.push_back({u, v}); break;
                case 2: edges.push_back({v, u}); break;
                default: break;
            }
            c /= 3;
        }
        if (is_acyclic(num_nodes, edges)) out.emplace_back(num_nodes, edges);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Dag> minimal_edge_dags(const std::vector<Dag>& dags) {
    if (dags.empty()) throw std::invalid_argument("minimal_edge_dags: empty list");
    int best = dags.front().num_edges();
    for (const auto& g : dags) best = std::min(best, g.num_edges());
    std::vector<Dag> out;
    for (const auto& g : dags)
        if (g.num_edges() == best) out.push_back(g);
    return out;
}

namespace {

const std::string& name_of(const std::vector<std::string>& names, Node i) {
    if (i < 0 || static_cast<std::size_t>(i) >= names.size())
        throw std::out_of_range("missing name for node " + std::to_string(i));
    return names[i];
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string to_edge_list(const Dag& dag, const std::vector<std::string>& names) {
    std::ostringstream out;
    for (const auto& e : dag.edges()) out << name_of(names, e.parent) << " -> " << name_of(names, e.child) << '\n';
    return out.str();
}

std::string to_dot(const Dag& dag, const std::vector<std::string>& names) {
    std::ostringstream out;
    out << "digraph G {\n";
    for (Node i = 0; i < dag.num_nodes(); ++i) out << "  \"" << name_of(names, i) << "\";\n";
    for (const auto& e : dag.edges())
        out << "  \"" << name_of(names, e.parent) << "\" -> \"" << name_of(names, e.child) << "\";\n";
    out << "}\n";
    return out.str();
}

Dag parse_edge_list(const std::string& text, const std::vector<std::string>& names) {
    auto index_of = [&](const std::string& name, int line_no) {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end())
            throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown node '" + name + "'");
        return static_cast<Node>(it - names.begin());
    };
    std::vector<Edge> edges;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto arrow = line.find("->");
        if (arrow == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'parent -> child'");
        edges.push_back({index_of(trim(line.substr(0, arrow)), line_no),
                         index_of(trim(line.substr(arrow + 2)), line_no)});
    }
    return Dag(static_cast<int>(names.size()), std::move(edges));
}

}  // namespace anmdisc
