#include "sandpile/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

namespace sandpile {

bool SinkedGraph::connected_to_sink() const {
    const int n = vertex_count();
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::deque<int> queue;
    for (int v = 0; v < n; ++v)
        if (sink_multiplicity[v] > 0) {
            seen[v] = 1;
            queue.push_back(v);
        }
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (auto [u, m] : adjacency[v]) {
            (void)m;
            if (!seen[u]) {
                seen[u] = 1;
                queue.push_back(u);
            }
        }
    }
    for (int v = 0; v < n; ++v)
        if (!seen[v]) return false;
    return true;
}

std::vector<int> TreeCoordinates::sphere(int n) const {
    std::vector<int> out;
    for (int v = 0; v < vertex_count(); ++v)
        if (depth[v] == n) out.push_back(v);
    return out;
}

std::vector<int> TreeCoordinates::ball(int n) const {
    std::vector<int> out;
    for (int v = 0; v < vertex_count(); ++v)
        if (depth[v] <= n) out.push_back(v);
    return out;
}

std::vector<int> TreeCoordinates::descendants_at_depth(int v, int q) const {
    std::vector<int> frontier{v};
    for (int dep = depth[v]; dep < q; ++dep) {
        std::vector<int> next;
        for (int u : frontier)
            for (int c : children[u]) next.push_back(c);
        frontier = std::move(next);
    }
    return depth[v] <= q ? frontier : std::vector<int>{};
}

Tree build_tree(int d, int h) {
    if (d < 3) throw std::invalid_argument("build_tree: d must be >= 3");
    if (h < 1) throw std::invalid_argument("build_tree: h must be >= 1");

    TreeCoordinates coords;
    coords.d = d;
    coords.h = h;
    coords.parent = {-1};
    coords.depth = {0};
    std::vector<int> frontier{0};
    int next = 1;
    for (int dep = 1; dep <= h; ++dep) {
        std::vector<int> layer;
        for (int p : frontier) {
            int nch = (p == 0) ? d : d - 1;
            for (int c = 0; c < nch; ++c) {
                coords.parent.push_back(p);
                coords.depth.push_back(dep);
                layer.push_back(next++);
            }
        }
        frontier = std::move(layer);
    }
    const int n = coords.vertex_count();
    coords.children.assign(n, {});
    for (int v = 1; v < n; ++v) coords.children[coords.parent[v]].push_back(v);

    SinkedGraph g;
    g.adjacency.assign(n, {});
    g.sink_multiplicity.assign(n, 0);
    for (int v = 1; v < n; ++v) {
        g.adjacency[v].emplace_back(coords.parent[v], 1);
        g.adjacency[coords.parent[v]].emplace_back(v, 1);
    }
    for (int v = 0; v < n; ++v)
        if (coords.depth[v] == h) g.sink_multiplicity[v] = d - 1;
    return {std::move(g), std::move(coords)};
}

SinkedGraph augment_subset(int d, const SubgraphDescription& subgraph) {
    if (d < 3) throw std::invalid_argument("augment_subset: d must be >= 3");
    const int n = subgraph.vertex_count;
    if (n < 1) throw std::invalid_argument("augment_subset: empty vertex set");

    std::vector<std::map<int, int>> mult(n);
    for (auto [u, v] : subgraph.edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw std::invalid_argument("augment_subset: edge endpoint out of range");
        if (u == v) throw std::invalid_argument("augment_subset: self-loop is not a tree subgraph");
        if (mult[u].count(v))
            throw std::invalid_argument("augment_subset: parallel edge is not a tree subgraph");
        mult[u][v] = 1;
        mult[v][u] = 1;
    }
    // a connected induced subgraph of a tree is itself a tree
    if (static_cast<int>(subgraph.edges.size()) != n - 1)
        throw std::invalid_argument("augment_subset: subgraph is disconnected or has a cycle");

    SinkedGraph g;
    g.adjacency.assign(n, {});
    g.sink_multiplicity.assign(n, 0);
    for (int v = 0; v < n; ++v) {
        int deg = 0;
        for (auto [u, m] : mult[v]) {
            g.adjacency[v].emplace_back(u, m);
            deg += m;
        }
        if (deg > d) throw std::invalid_argument("augment_subset: vertex degree exceeds d");
        g.sink_multiplicity[v] = d - deg;
    }
    if (!g.connected_to_sink())
        throw std::invalid_argument("augment_subset: subgraph is disconnected");
    return g;
}

IntegerMatrix reduced_laplacian(const SinkedGraph& g) {
    const int n = g.vertex_count();
    IntegerMatrix m(n, n);
    for (int v = 0; v < n; ++v) {
        m(v, v) = g.degree(v);
        for (auto [u, mult] : g.adjacency[v]) m(v, u) = -mult;
    }
    return m;
}

FSet f_set(const TreeCoordinates& coords) {
    const int d = coords.d;
    const int h = coords.h;
    FSet f;
    f.d = d;
    f.h = h;
    // J_i = children of i minus the smallest-index child m_i
    auto add_j = [&](int i) {
        const auto& ch = coords.children[i];
        for (std::size_t k = 1; k < ch.size(); ++k) f.members.push_back(ch[k]);
    };
    if (h % 2 == 0) {
        f.members.push_back(0);
        for (int q = 0; q <= (h - 2) / 2; ++q)
            for (int i : coords.sphere(2 * q + 1)) add_j(i);
    } else {
        for (int q = 0; q <= (h - 1) / 2; ++q)
            for (int i : coords.sphere(2 * q)) add_j(i);
    }
    std::sort(f.members.begin(), f.members.end());
    return f;
}

SinkedGraph parse_graph(std::istream& in) {
    std::string line;
    bool header_seen = false;
    std::map<int, std::map<int, int>> adj;
    std::map<int, int> sink;
    int max_id = -1;

    auto note_vertex = [&](int v) {
        if (v < 0) throw GraphParseError("negative vertex id");
        if (v > max_id) max_id = v;
        adj.try_emplace(v);
    };

    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;  // blank or comment-only line
        if (!header_seen) {
            if (first != "sink")
                throw GraphParseError("line " + std::to_string(lineno) + ": expected `sink` header");
            std::string rest;
            if (ls >> rest)
                throw GraphParseError("line " + std::to_string(lineno) + ": trailing tokens after header");
            header_seen = true;
            continue;
        }
        int u;
        try {
            u = std::stoi(first);
        } catch (const std::exception&) {
            throw GraphParseError("line " + std::to_string(lineno) + ": bad vertex id `" + first + "`");
        }
        std::string second;
        long long m;
        if (!(ls >> second >> m))
            throw GraphParseError("line " + std::to_string(lineno) + ": expected `u v m` or `u sink m`");
        if (m < 0) throw GraphParseError("line " + std::to_string(lineno) + ": negative multiplicity");
        note_vertex(u);
        if (second == "sink") {
            sink[u] += static_cast<int>(m);
        } else {
            int v;
            try {
                v = std::stoi(second);
            } catch (const std::exception&) {
                throw GraphParseError("line " + std::to_string(lineno) + ": bad vertex id `" + second + "`");
            }
            if (u == v) throw GraphParseError("line " + std::to_string(lineno) + ": self-loop");
            note_vertex(v);
            adj[u][v] += static_cast<int>(m);
            adj[v][u] += static_cast<int>(m);
        }
    }
    if (!header_seen) throw GraphParseError("missing `sink` header line");
    if (max_id < 0) throw GraphParseError("graph has no vertices");

    SinkedGraph g;
    g.adjacency.assign(max_id + 1, {});
    g.sink_multiplicity.assign(max_id + 1, 0);
    for (auto& [v, nbrs] : adj)
        for (auto [u, m] : nbrs)
            if (m > 0) g.adjacency[v].emplace_back(u, m);
    for (auto [v, m] : sink) g.sink_multiplicity[v] = m;
    if (!g.connected_to_sink()) throw GraphParseError("graph is not connected to the sink");
    return g;
}

SinkedGraph parse_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GraphParseError("cannot open `" + path + "`");
    return parse_graph(in);
}

std::string to_dot(const SinkedGraph& g) {
    std::ostringstream os;
    os << "graph sandpile {\n  sink [shape=box];\n";
    for (int v = 0; v < g.vertex_count(); ++v) {
        for (auto [u, m] : g.adjacency[v])
            if (u > v)
                for (int k = 0; k < m; ++k) os << "  " << v << " -- " << u << ";\n";
        for (int k = 0; k < g.sink_multiplicity[v]; ++k) os << "  " << v << " -- sink;\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace sandpile
