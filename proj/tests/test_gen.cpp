#include <doctest.h>

#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <set>

#include "diter/gen.hpp"
#include "helpers.hpp"

using namespace diter;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("diter_gen_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

bool edge_lists_equal(const EdgeList& a, const EdgeList& b) {
    if (a.n != b.n || a.edges.size() != b.edges.size()) return false;
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        if (a.edges[i].src != b.edges[i].src || a.edges[i].dst != b.edges[i].dst ||
            a.edges[i].weight != b.edges[i].weight) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("uniform_random_graph: exact link count, symmetry, determinism") {
    const EdgeList g = uniform_random_graph(128, 1652, 1);
    CHECK(g.n == 128);
    CHECK(g.edges.size() == 1652);

    std::set<std::pair<csint, csint>> present;
    for (const Edge& e : g.edges) present.emplace(e.src, e.dst);
    CHECK(present.size() == g.edges.size());  // no duplicates
    for (const auto& [s, d] : present) {
        CHECK(present.count({d, s}) == 1);  // transpose-closed
    }

    const EdgeList again = uniform_random_graph(128, 1652, 1);
    CHECK(edge_lists_equal(g, again));
    const EdgeList other = uniform_random_graph(128, 1652, 2);
    CHECK_FALSE(edge_lists_equal(g, other));
}

TEST_CASE("uniform_random_graph: tiny and odd targets") {
    const EdgeList pair = uniform_random_graph(2, 2, 7);
    CHECK(pair.edges.size() == 2);
    // either the symmetric pair or two self-loops
    std::set<std::pair<csint, csint>> got;
    for (const Edge& e : pair.edges) got.emplace(e.src, e.dst);
    const bool sym_pair = got == std::set<std::pair<csint, csint>>{{0, 1}, {1, 0}};
    const bool two_loops = got == std::set<std::pair<csint, csint>>{{0, 0}, {1, 1}};
    CHECK((sym_pair || two_loops));

    // an odd target forces a self-loop
    const EdgeList odd = uniform_random_graph(6, 7, 3);
    CHECK(odd.edges.size() == 7);
    csint loops = 0;
    for (const Edge& e : odd.edges) loops += e.src == e.dst ? 1 : 0;
    CHECK(loops % 2 == 1);

    CHECK_THROWS_AS(uniform_random_graph(2, 5, 1), std::invalid_argument);
    CHECK_THROWS_AS(uniform_random_graph(0, 0, 1), std::invalid_argument);
}

TEST_CASE("uniform_random_graph: degree statistics near the dense-instance figures") {
    const EdgeList g = uniform_random_graph(128, 1652, 1);
    const DegreeStats dir = degree_stats(g, false);
    const DegreeStats und = degree_stats(g, true);
    // 1652 directed entries over 128 nodes
    CHECK(dir.mean == doctest::Approx(1652.0 / 128.0));
    // both-direction counting doubles the mean (self-loops counted once)
    CHECK(und.mean > 2 * dir.mean - 1.0);
    CHECK(und.mean <= 2 * dir.mean);
    CHECK(und.stddev > 2.0);
    CHECK(und.stddev < 9.0);
    CHECK(und.min > 5);
    CHECK(und.max < 50);
}

TEST_CASE("uniform_random_graph produces a symmetric sparsity pattern") {
    const EdgeList g = uniform_random_graph(40, 200, 9);
    const CscMatrix m = adjacency_matrix(g);
    for (csint j = 0; j < m.n; ++j) {
        const ColumnView col = m.column(j);
        for (csint t = 0; t < col.size(); ++t) {
            const csint i = col.rows[static_cast<std::size_t>(t)];
            // entry (i, j) present implies (j, i) present
            const ColumnView back = m.column(i);
            bool found = false;
            for (csint u = 0; u < back.size(); ++u) {
                found = found || back.rows[static_cast<std::size_t>(u)] == j;
            }
            CHECK(found);
        }
    }
}

TEST_CASE("power_law_graph: determinism and heavy tail") {
    const EdgeList tiny = power_law_graph(1, 2.1, 5);
    CHECK(tiny.n == 1);
    CHECK(tiny.edges.size() <= 1);

    const EdgeList g = power_law_graph(10000, 2.1, 11);
    const EdgeList again = power_law_graph(10000, 2.1, 11);
    CHECK(edge_lists_equal(g, again));

    const DegreeStats dir = degree_stats(g, false);
    CHECK(dir.min >= 1);
    // heavy tail: the max out-degree dwarfs the median-scale mean
    CHECK(static_cast<double>(dir.max) > 10.0 * dir.mean);

    CHECK_THROWS_AS(power_law_graph(10, 1.0, 1), std::invalid_argument);
}

TEST_CASE("edge list round trip") {
    TempDir tmp;
    SUBCASE("unweighted") {
        const EdgeList g = uniform_random_graph(20, 60, 4);
        write_edge_list(tmp.file("g.txt"), g);
        const EdgeList back = read_edge_list(tmp.file("g.txt"));
        CHECK(edge_lists_equal(g, back));
    }
    SUBCASE("weighted") {
        EdgeList g;
        g.n = 3;
        g.has_weights = true;
        g.edges = {{0, 1, 0.125}, {2, 0, 1.7500000000000002}};
        write_edge_list(tmp.file("w.txt"), g);
        const EdgeList back = read_edge_list(tmp.file("w.txt"));
        CHECK(back.has_weights);
        CHECK(edge_lists_equal(g, back));
    }
}

TEST_CASE("edge list parsing") {
    TempDir tmp;
    SUBCASE("plain line becomes an edge") {
        std::ofstream(tmp.file("ok.txt")) << "n 8\n3 7\n";
        const EdgeList g = read_edge_list(tmp.file("ok.txt"));
        CHECK(g.n == 8);
        REQUIRE(g.edges.size() == 1);
        CHECK(g.edges[0].src == 3);
        CHECK(g.edges[0].dst == 7);
        CHECK(g.edges[0].weight == 1.0);
        CHECK_FALSE(g.has_weights);
    }
    SUBCASE("malformed lines name the line number") {
        std::ofstream(tmp.file("bad.txt")) << "n 8\n1 2\nthree four\n";
        try {
            read_edge_list(tmp.file("bad.txt"));
            FAIL("expected a parse error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find(":3:") != std::string::npos);
        }
    }
    SUBCASE("missing header") {
        std::ofstream(tmp.file("nohdr.txt")) << "1 2\n";
        CHECK_THROWS_AS(read_edge_list(tmp.file("nohdr.txt")), std::runtime_error);
    }
    SUBCASE("out-of-range index names the line") {
        std::ofstream(tmp.file("oor.txt")) << "n 4\n1 9\n";
        try {
            read_edge_list(tmp.file("oor.txt"));
            FAIL("expected a parse error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find(":2:") != std::string::npos);
        }
    }
    SUBCASE("trailing tokens rejected") {
        std::ofstream(tmp.file("trail.txt")) << "n 4\n1 2 0.5 9\n";
        CHECK_THROWS_AS(read_edge_list(tmp.file("trail.txt")), std::runtime_error);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_edge_list(tmp.file("absent.txt")), std::runtime_error);
    }
}

TEST_CASE("induced subgraph on the first nodes") {
    TempDir tmp;
    std::ofstream(tmp.file("g.txt")) << "n 6\n0 1\n1 5\n5 0\n2 1\n4 3\n";
    const EdgeList sub = read_edge_list(tmp.file("g.txt"), 3);
    CHECK(sub.n == 3);
    REQUIRE(sub.edges.size() == 2);  // 0->1 and 2->1 survive
    CHECK(sub.edges[0].src == 0);
    CHECK(sub.edges[1].src == 2);

    // requesting at least the full size keeps everything
    const EdgeList full = read_edge_list(tmp.file("g.txt"), 6);
    CHECK(full.n == 6);
    CHECK(full.edges.size() == 5);
}

TEST_CASE("adjacency_matrix maps edges to columns") {
    EdgeList g;
    g.n = 3;
    g.edges = {{0, 1, 1.0}, {0, 2, 1.0}, {2, 1, 1.0}};
    const CscMatrix m = adjacency_matrix(g);
    // node 0 has out-links to 1 and 2: column 0 holds rows {1, 2}
    CHECK(out_degrees(m) == std::vector<csint>{2, 0, 1});
    CHECK(m.column(0).rows[0] == 1);
    CHECK(m.column(0).rows[1] == 2);
    CHECK(m.column(2).rows[0] == 1);
}
