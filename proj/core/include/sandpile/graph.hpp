#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sandpile/matrix.hpp"

namespace sandpile {

class GraphParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A finite multigraph with one designated sink. Ordinary vertices are
// indexed 0..N-1; only edge multiplicities matter, so parallel edges are
// stored as counts.
struct SinkedGraph {
    // per-vertex list of (neighbor, multiplicity); symmetric, zero diagonal
    std::vector<std::vector<std::pair<int, int>>> adjacency;
    // per-vertex count of edges to the sink
    std::vector<int> sink_multiplicity;

    int vertex_count() const { return static_cast<int>(adjacency.size()); }

    int degree(int v) const {
        int deg = sink_multiplicity[v];
        for (auto [u, m] : adjacency[v]) {
            (void)u;
            deg += m;
        }
        return deg;
    }

    int edge_multiplicity(int u, int v) const {
        for (auto [w, m] : adjacency[u])
            if (w == v) return m;
        return 0;
    }

    // Every ordinary vertex must reach the sink.
    bool connected_to_sink() const;
};

// BFS coordinates of the d-regular tree of depth h: root at index 0,
// children of a vertex occupy contiguous increasing indices.
struct TreeCoordinates {
    int d = 0;
    int h = 0;
    std::vector<int> parent;  // parent[0] == -1
    std::vector<int> depth;
    std::vector<std::vector<int>> children;

    int vertex_count() const { return static_cast<int>(parent.size()); }

    // vertices at distance exactly n from the root
    std::vector<int> sphere(int n) const;
    // vertices at distance <= n
    std::vector<int> ball(int n) const;
    // descendants of v (including v) at depth exactly q
    std::vector<int> descendants_at_depth(int v, int q) const;
};

struct Tree {
    SinkedGraph graph;
    TreeCoordinates coords;
};

// A generating vertex set of size (d-1)^h; contains the root iff h is even.
struct FSet {
    std::vector<int> members;
    int d = 0;
    int h = 0;
};

// T^(d,h): the tree on the radius-h ball with every leaf joined to the sink
// by d-1 edges, so every ordinary vertex has degree d. Rejects d < 3, h < 1.
Tree build_tree(int d, int h);

// Description of a finite connected induced subgraph of the infinite
// d-regular tree: an explicit vertex count and edge list.
struct SubgraphDescription {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;
};

// Joins every vertex to the sink by d - deg(v) edges.
SinkedGraph augment_subset(int d, const SubgraphDescription& subgraph);

// N x N symmetric matrix: diagonal = total degree, off-diagonal = -multiplicity.
IntegerMatrix reduced_laplacian(const SinkedGraph& g);

// F(d,h) with m_i fixed as the smallest-index child of i.
FSet f_set(const TreeCoordinates& coords);

// Plain-text format: a `sink` header line, then `u v m` edges between
// ordinary vertices and `u sink m` sink edges. `#` comments and blank
// lines are ignored.
SinkedGraph parse_graph(std::istream& in);
SinkedGraph parse_graph_file(const std::string& path);

std::string to_dot(const SinkedGraph& g);

}  // namespace sandpile
