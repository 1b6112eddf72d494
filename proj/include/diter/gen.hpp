#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diter/sparse.hpp"

// Test-graph generation and edge-list I/O. Text format, 0-based indices:
//
//   n <node-count>
//   <src> <dst> [weight]
//   ...
//
// All generators are deterministic per seed.

namespace diter {

struct Edge {
    csint src = 0;
    csint dst = 0;
    double weight = 1.0;
};

struct EdgeList {
    csint n = 0;
    std::vector<Edge> edges;
    bool has_weights = false;
};

struct DegreeStats {
    double mean = 0.0;
    double stddev = 0.0;
    csint min = 0;
    csint max = 0;
};

// Symmetric random graph: (dst,src) is present whenever (src,dst) is, and
// self-loops are allowed; pairs are sampled without replacement until
// exactly target_links directed entries exist. An odd target forces at
// least one self-loop.
EdgeList uniform_random_graph(csint n, csint target_links, std::uint64_t seed);

// Out-degrees drawn from a power law P(k) ~ k^-exponent truncated to
// [1, n], destinations uniform without replacement per node.
EdgeList power_law_graph(csint n, double exponent, std::uint64_t seed);

EdgeList read_edge_list(const std::string& path,
                        std::optional<csint> induced_first = std::nullopt);
void write_edge_list(const std::string& path, const EdgeList& e);

// Directed entries per node when undirected = false; the undirected
// convention (out-degree counting self-loops once) when true.
DegreeStats degree_stats(const EdgeList& e, bool undirected);

// Column j of the matrix holds the out-links of node j: edge (s, d) becomes
// entry (row=d, col=s).
CscMatrix adjacency_matrix(const EdgeList& e);

}  // namespace diter
