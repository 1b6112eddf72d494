#include "diter/gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace diter {

namespace {

std::string loc(const std::string& path, std::size_t line) {
    return path + ":" + std::to_string(line) + ": ";
}

}  // namespace

EdgeList uniform_random_graph(csint n, csint target_links, std::uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("uniform_random_graph: n must be positive");
    if (target_links < 0 || target_links > n * n) {
        throw std::invalid_argument("uniform_random_graph: infeasible link target");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<csint> pick(0, n - 1);

    std::set<std::pair<csint, csint>> pairs;  // canonical (lo, hi)
    csint count = 0;
    std::int64_t attempts = 0;
    const std::int64_t attempt_cap = 1000 * (target_links + n) + 1000000;
    while (count < target_links) {
        if (++attempts > attempt_cap) {
            throw std::runtime_error("uniform_random_graph: sampling failed to reach target");
        }
        csint i = pick(rng);
        csint j = pick(rng);
        if (i > j) std::swap(i, j);
        const csint need = i == j ? 1 : 2;
        if (count + need > target_links) continue;  // only a self-loop still fits
        if (!pairs.emplace(i, j).second) continue;
        count += need;
    }

    EdgeList e;
    e.n = n;
    e.edges.reserve(static_cast<std::size_t>(target_links));
    for (const auto& [i, j] : pairs) {
        e.edges.push_back({i, j, 1.0});
        if (i != j) e.edges.push_back({j, i, 1.0});
    }
    return e;
}

EdgeList power_law_graph(csint n, double exponent, std::uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("power_law_graph: n must be positive");
    if (!(exponent > 1.0)) {
        throw std::invalid_argument("power_law_graph: exponent must exceed 1");
    }
    std::mt19937_64 rng(seed);

    // Truncated power-law out-degree: P(k) ~ k^-exponent on [1, n].
    std::vector<double> weights(static_cast<std::size_t>(n));
    for (csint k = 1; k <= n; ++k) {
        weights[static_cast<std::size_t>(k - 1)] =
            std::pow(static_cast<double>(k), -exponent);
    }
    std::discrete_distribution<csint> degree_dist(weights.begin(), weights.end());
    std::uniform_int_distribution<csint> pick(0, n - 1);

    EdgeList e;
    e.n = n;
    for (csint v = 0; v < n; ++v) {
        const csint k = degree_dist(rng) + 1;
        if (k > n / 2) {
            // dense row: partial Fisher-Yates over all destinations
            std::vector<csint> dst(static_cast<std::size_t>(n));
            for (csint i = 0; i < n; ++i) dst[static_cast<std::size_t>(i)] = i;
            for (csint i = 0; i < k; ++i) {
                std::uniform_int_distribution<csint> rest(i, n - 1);
                std::swap(dst[static_cast<std::size_t>(i)],
                          dst[static_cast<std::size_t>(rest(rng))]);
                e.edges.push_back({v, dst[static_cast<std::size_t>(i)], 1.0});
            }
        } else {
            std::unordered_set<csint> used;
            while (static_cast<csint>(used.size()) < k) {
                const csint d = pick(rng);
                if (used.insert(d).second) e.edges.push_back({v, d, 1.0});
            }
        }
    }
    return e;
}

EdgeList read_edge_list(const std::string& path, std::optional<csint> induced_first) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_edge_list: cannot open " + path);

    std::string line;
    std::size_t lineno = 0;
    EdgeList e;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        if (!have_header) {
            std::string tag;
            if (!(ss >> tag) ) continue;  // leading blank lines
            csint count = -1;
            std::string extra;
            if (tag != "n" || !(ss >> count) || count < 0 || (ss >> extra)) {
                throw std::runtime_error(loc(path, lineno) +
                                         "expected header line 'n <count>'");
            }
            e.n = count;
            have_header = true;
            continue;
        }
        std::string s_tok, d_tok, w_tok, extra;
        ss >> s_tok;
        if (s_tok.empty()) continue;  // blank line
        if (!(ss >> d_tok)) {
            throw std::runtime_error(loc(path, lineno) + "expected 'src dst [weight]'");
        }
        const bool has_w = static_cast<bool>(ss >> w_tok);
        if (ss >> extra) {
            throw std::runtime_error(loc(path, lineno) + "trailing tokens after edge");
        }
        Edge edge;
        try {
            std::size_t pos = 0;
            edge.src = std::stoll(s_tok, &pos);
            if (pos != s_tok.size()) throw std::invalid_argument("");
            edge.dst = std::stoll(d_tok, &pos);
            if (pos != d_tok.size()) throw std::invalid_argument("");
            if (has_w) {
                edge.weight = std::stod(w_tok, &pos);
                if (pos != w_tok.size()) throw std::invalid_argument("");
            }
        } catch (const std::exception&) {
            throw std::runtime_error(loc(path, lineno) + "malformed edge line '" + line + "'");
        }
        if (edge.src < 0 || edge.src >= e.n || edge.dst < 0 || edge.dst >= e.n) {
            throw std::runtime_error(loc(path, lineno) + "node index out of range");
        }
        if (has_w && !std::isfinite(edge.weight)) {
            throw std::runtime_error(loc(path, lineno) + "non-finite weight");
        }
        e.has_weights = e.has_weights || has_w;
        e.edges.push_back(edge);
    }
    if (!have_header) {
        throw std::runtime_error(path + ": missing header line 'n <count>'");
    }

    if (induced_first) {
        const csint k = *induced_first;
        if (k <= 0) throw std::invalid_argument("read_edge_list: induced subgraph size must be positive");
        if (k < e.n) {
            EdgeList sub;
            sub.n = k;
            sub.has_weights = e.has_weights;
            for (const Edge& ed : e.edges) {
                if (ed.src < k && ed.dst < k) sub.edges.push_back(ed);
            }
            return sub;
        }
    }
    return e;
}

void write_edge_list(const std::string& path, const EdgeList& e) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_edge_list: cannot open " + path);
    out << "n " << e.n << '\n';
    char buf[64];
    for (const Edge& ed : e.edges) {
        if (e.has_weights) {
            std::snprintf(buf, sizeof(buf), "%.17g", ed.weight);
            out << ed.src << ' ' << ed.dst << ' ' << buf << '\n';
        } else {
            out << ed.src << ' ' << ed.dst << '\n';
        }
    }
    if (!out) throw std::runtime_error("write_edge_list: write failed for " + path);
}

DegreeStats degree_stats(const EdgeList& e, bool undirected) {
    std::vector<csint> deg(static_cast<std::size_t>(e.n), 0);
    for (const Edge& ed : e.edges) {
        if (undirected) {
            // in + out, self-loop counted once
            deg[static_cast<std::size_t>(ed.src)] += 1;
            if (ed.dst != ed.src) deg[static_cast<std::size_t>(ed.dst)] += 1;
        } else {
            deg[static_cast<std::size_t>(ed.src)] += 1;
        }
    }
    DegreeStats st;
    if (e.n == 0) return st;
    double sum = 0.0, sq = 0.0;
    st.min = deg[0];
    st.max = deg[0];
    for (csint d : deg) {
        sum += static_cast<double>(d);
        st.min = std::min(st.min, d);
        st.max = std::max(st.max, d);
    }
    st.mean = sum / static_cast<double>(e.n);
    for (csint d : deg) {
        const double dd = static_cast<double>(d) - st.mean;
        sq += dd * dd;
    }
    st.stddev = std::sqrt(sq / static_cast<double>(e.n));
    return st;
}

CscMatrix adjacency_matrix(const EdgeList& e) {
    std::vector<Triplet> trips;
    trips.reserve(e.edges.size());
    for (const Edge& ed : e.edges) {
        trips.push_back({ed.dst, ed.src, ed.weight});
    }
    return csc_from_edges(trips, e.n);
}

}  // namespace diter
