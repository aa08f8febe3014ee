#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sandpile/graph.hpp"

namespace sandpile {

// Grain heights on ordinary vertices, in BFS vertex order for trees.
using Configuration = std::vector<long long>;

struct StabilizationResult {
    Configuration stable;
    std::vector<long long> odometer;  // per-vertex toppling counts
    long long grains_to_sink = 0;
};

bool is_stable(const SinkedGraph& g, const Configuration& c);

// Topples unstable vertices until the configuration is stable. The result
// is independent of the schedule (abelian property); the default schedule
// is a FIFO queue for deterministic odometer paths.
StabilizationResult stabilize(const SinkedGraph& g, const Configuration& c);

// Same result, seeded random toppling order. Used by the abelianness tests.
StabilizationResult stabilize_random(const SinkedGraph& g, const Configuration& c, std::uint64_t seed);

// alpha_i: add one grain at the vertex and stabilize. Input must be stable.
Configuration apply_operator(const SinkedGraph& g, int vertex, const Configuration& c);

// Dhar's burning test. Input must be stable.
bool is_recurrent(const SinkedGraph& g, const Configuration& c);

// Pointwise sum followed by stabilization; both inputs must be recurrent.
Configuration recurrent_add(const SinkedGraph& g, const Configuration& a, const Configuration& b);

// The unique recurrent e with e + a = a for every recurrent a.
Configuration recurrent_identity(const SinkedGraph& g);

// Checks alpha_i^{deg(i)} = prod_j alpha_j (j over ordinary neighbors of i,
// with multiplicity) on every supplied recurrent configuration.
bool operator_relation_check(const SinkedGraph& g, int vertex,
                             std::span<const Configuration> recurrents);

// All stable configurations, lexicographic. Throws std::invalid_argument if
// their number exceeds the guard.
std::vector<Configuration> enumerate_stable(const SinkedGraph& g, long long guard = 10'000'000);

std::vector<Configuration> enumerate_recurrent(const SinkedGraph& g, long long guard = 10'000'000);

// Number of stable configurations (product of degrees), if it fits the guard.
std::optional<long long> stable_space_size(const SinkedGraph& g, long long guard = 10'000'000);

}  // namespace sandpile
