#include "sandpile/dynamics.hpp"

#include <deque>
#include <limits>
#include <random>
#include <stdexcept>

namespace sandpile {

namespace {

constexpr long long kGrainLimit = 1LL << 61;  // overflow guard for heights

void validate_configuration(const SinkedGraph& g, const Configuration& c) {
    if (static_cast<int>(c.size()) != g.vertex_count())
        throw std::invalid_argument("configuration size does not match graph");
    long long total = 0;
    for (long long hgt : c) {
        if (hgt < 0) throw std::invalid_argument("configuration has negative height");
        if (hgt > kGrainLimit || (total += hgt) > kGrainLimit)
            throw std::invalid_argument("configuration exceeds the grain limit");
    }
}

std::vector<int> degrees(const SinkedGraph& g) {
    std::vector<int> deg(g.vertex_count());
    for (int v = 0; v < g.vertex_count(); ++v) deg[v] = g.degree(v);
    return deg;
}

}  // namespace

bool is_stable(const SinkedGraph& g, const Configuration& c) {
    validate_configuration(g, c);
    for (int v = 0; v < g.vertex_count(); ++v)
        if (c[v] >= g.degree(v)) return false;
    return true;
}

StabilizationResult stabilize(const SinkedGraph& g, const Configuration& c) {
    validate_configuration(g, c);
    const int n = g.vertex_count();
    const std::vector<int> deg = degrees(g);

    StabilizationResult res;
    res.stable = c;
    res.odometer.assign(n, 0);

    std::deque<int> queue;
    std::vector<char> queued(n, 0);
    for (int v = 0; v < n; ++v)
        if (res.stable[v] >= deg[v]) {
            queue.push_back(v);
            queued[v] = 1;
        }
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        queued[v] = 0;
        if (res.stable[v] < deg[v]) continue;
        // batch toppling: fire v as many times as currently possible
        long long k = res.stable[v] / deg[v];
        res.odometer[v] += k;
        res.stable[v] -= k * deg[v];
        res.grains_to_sink += k * g.sink_multiplicity[v];
        for (auto [u, m] : g.adjacency[v]) {
            res.stable[u] += k * m;
            if (res.stable[u] >= deg[u] && !queued[u]) {
                queue.push_back(u);
                queued[u] = 1;
            }
        }
    }
    return res;
}

StabilizationResult stabilize_random(const SinkedGraph& g, const Configuration& c, std::uint64_t seed) {
    validate_configuration(g, c);
    const int n = g.vertex_count();
    const std::vector<int> deg = degrees(g);
    std::mt19937_64 rng(seed);

    StabilizationResult res;
    res.stable = c;
    res.odometer.assign(n, 0);

    std::vector<int> unstable;
    std::vector<char> listed(n, 0);
    for (int v = 0; v < n; ++v)
        if (res.stable[v] >= deg[v]) {
            unstable.push_back(v);
            listed[v] = 1;
        }
    while (!unstable.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, unstable.size() - 1);
        std::size_t idx = pick(rng);
        int v = unstable[idx];
        if (res.stable[v] < deg[v]) {
            unstable[idx] = unstable.back();
            unstable.pop_back();
            listed[v] = 0;
            continue;
        }
        // single toppling per draw so that distinct seeds explore distinct schedules
        res.odometer[v] += 1;
        res.stable[v] -= deg[v];
        res.grains_to_sink += g.sink_multiplicity[v];
        for (auto [u, m] : g.adjacency[v]) {
            res.stable[u] += m;
            if (res.stable[u] >= deg[u] && !listed[u]) {
                unstable.push_back(u);
                listed[u] = 1;
            }
        }
        if (res.stable[v] < deg[v]) {
            unstable[idx] = unstable.back();
            unstable.pop_back();
            listed[v] = 0;
        }
    }
    return res;
}

Configuration apply_operator(const SinkedGraph& g, int vertex, const Configuration& c) {
    if (vertex < 0 || vertex >= g.vertex_count())
        throw std::invalid_argument("apply_operator: vertex out of range");
    if (!is_stable(g, c)) throw std::invalid_argument("apply_operator: configuration not stable");
    Configuration next = c;
    next[vertex] += 1;
    return stabilize(g, next).stable;
}

bool is_recurrent(const SinkedGraph& g, const Configuration& c) {
    if (!is_stable(g, c)) throw std::invalid_argument("is_recurrent: configuration not stable");
    const int n = g.vertex_count();
    // Dhar's burning test: the sink's edges ignite; vertex v burns once its
    // burnt-edge count exceeds deg(v) - 1 - heights[v]. Recurrent iff all burn.
    std::vector<long long> burnt_edges(n, 0);
    std::vector<char> burnt(n, 0);
    std::deque<int> queue;
    for (int v = 0; v < n; ++v) {
        burnt_edges[v] = g.sink_multiplicity[v];
        if (c[v] + burnt_edges[v] >= g.degree(v)) {
            burnt[v] = 1;
            queue.push_back(v);
        }
    }
    int burned = 0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        ++burned;
        for (auto [u, m] : g.adjacency[v]) {
            if (burnt[u]) continue;
            burnt_edges[u] += m;
            if (c[u] + burnt_edges[u] >= g.degree(u)) {
                burnt[u] = 1;
                queue.push_back(u);
            }
        }
    }
    return burned == n;
}

Configuration recurrent_add(const SinkedGraph& g, const Configuration& a, const Configuration& b) {
    if (!is_recurrent(g, a) || !is_recurrent(g, b))
        throw std::invalid_argument("recurrent_add: inputs must be recurrent");
    Configuration sum(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) sum[i] = a[i] + b[i];
    return stabilize(g, sum).stable;
}

Configuration recurrent_identity(const SinkedGraph& g) {
    const int n = g.vertex_count();
    Configuration twice_max(n);
    for (int v = 0; v < n; ++v) twice_max[v] = 2LL * (g.degree(v) - 1);
    Configuration inner = stabilize(g, twice_max).stable;
    Configuration diff(n);
    for (int v = 0; v < n; ++v) diff[v] = twice_max[v] - inner[v];
    Configuration e = stabilize(g, diff).stable;
    // verify the identity law before handing the result out
    if (!is_recurrent(g, e) || recurrent_add(g, e, e) != e)
        throw std::logic_error("recurrent_identity: verification failed");
    return e;
}

bool operator_relation_check(const SinkedGraph& g, int vertex,
                             std::span<const Configuration> recurrents) {
    const int deg = g.degree(vertex);
    for (const Configuration& w : recurrents) {
        Configuration lhs = w;
        for (int k = 0; k < deg; ++k) lhs = apply_operator(g, vertex, lhs);
        Configuration rhs = w;
        for (auto [u, m] : g.adjacency[vertex])
            for (int k = 0; k < m; ++k) rhs = apply_operator(g, u, rhs);
        if (lhs != rhs) return false;
    }
    return true;
}

std::optional<long long> stable_space_size(const SinkedGraph& g, long long guard) {
    long long count = 1;
    for (int v = 0; v < g.vertex_count(); ++v) {
        int deg = g.degree(v);
        if (count > guard / deg) return std::nullopt;
        count *= deg;
    }
    return count;
}

std::vector<Configuration> enumerate_stable(const SinkedGraph& g, long long guard) {
    auto size = stable_space_size(g, guard);
    if (!size)
        throw std::invalid_argument("enumerate_stable: stable space exceeds the guard");
    const int n = g.vertex_count();
    std::vector<Configuration> out;
    out.reserve(static_cast<std::size_t>(*size));
    Configuration c(n, 0);
    for (;;) {
        out.push_back(c);
        int v = n - 1;
        while (v >= 0 && c[v] == g.degree(v) - 1) c[v--] = 0;
        if (v < 0) break;
        ++c[v];
    }
    return out;
}

std::vector<Configuration> enumerate_recurrent(const SinkedGraph& g, long long guard) {
    std::vector<Configuration> out;
    for (Configuration& c : enumerate_stable(g, guard))
        if (is_recurrent(g, c)) out.push_back(std::move(c));
    return out;
}

}  // namespace sandpile
