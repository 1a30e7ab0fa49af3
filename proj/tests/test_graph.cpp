#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "liamne/graph.hpp"
#include "liamne/rng.hpp"

using namespace liamne;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("tmp_graph_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("load_multiplex parses a small edge file") {
    TempFile f("basic.txt", "0 0 1\n0 1 2\n1 0 2\n");
    MultiplexNetwork net = load_multiplex(f.path);
    CHECK(net.num_nodes() == 3);
    CHECK(net.num_layers() == 2);
    CHECK(net.edges(0).size() == 2);
    CHECK(net.edges(1).size() == 1);
}

TEST_CASE("symmetric duplicates collapse to one stored edge") {
    TempFile f("dup.txt", "0 1 2\n0 2 1\n1 0 1\n");
    MultiplexNetwork net = load_multiplex(f.path);
    CHECK(net.edges(0).size() == 1);
    CHECK(net.edges(0)[0] == Edge{1, 2});
}

TEST_CASE("header and comments are honored") {
    TempFile f("hdr.txt", "# comment\nnodes 10 layers 3\n0 0 1\n1 2 3\n");
    MultiplexNetwork net = load_multiplex(f.path);
    CHECK(net.num_nodes() == 10);
    CHECK(net.num_layers() == 3);
    CHECK(net.edges(2).empty());
}

TEST_CASE("endpoint out of range is rejected with context") {
    TempFile f("oob.txt", "nodes 10 layers 2\n0 0 99\n1 0 1\n");
    CHECK_THROWS_WITH_AS(load_multiplex(f.path),
                         doctest::Contains("endpoint out of range"), std::invalid_argument);
}

TEST_CASE("malformed line reports its line number") {
    TempFile f("bad.txt", "0 0 1\n0 zap 2\n");
    try {
        load_multiplex(f.path);
        FAIL("expected parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
}

TEST_CASE("attribute row count mismatch is rejected") {
    TempFile edges("attr_e.txt", "0 0 1\n1 1 2\n");
    TempFile attrs("attr_a.txt", "0 1.0 2.0\n1 0.5 0.5\n");  // node 2 missing
    CHECK_THROWS(load_multiplex(edges.path, attrs.path));
}

TEST_CASE("self-loops are dropped and counted") {
    std::vector<std::vector<Edge>> layers{{{0, 0}, {0, 1}}, {{2, 2}}};
    MultiplexNetwork net(3, layers);
    CHECK(net.self_loops_dropped() == 2);
    CHECK(net.edges(0).size() == 1);
}

TEST_CASE("imbalance ratio and density reproduce published dataset statistics") {
    // (|E_max|, |E_min|=|E_t|, |V|, expected mu, expected density)
    struct Row {
        std::size_t e_max, e_t, v;
        double mu, density;
    };
    const Row rows[] = {
        {42327, 614, 6407, 4.23, 1.49e-5},    // FFTWYT
        {34192, 240, 4092, 4.95, 1.43e-5},    // Sacch-Pomb
        {109045, 1426, 6570, 4.33, 3.30e-5},  // Sacch-Cere
        {66428, 13788, 3550, 1.57, 109e-5},   // IMDB
        {50484, 811, 3550, 4.13, 6.43e-5},    // IMDB*
        {144783, 90145, 7907, 0.47, 144e-5},  // DBLP
        {109428, 2039, 7907, 3.98, 3.26e-5},  // DBLP*
    };
    for (const Row& r : rows) {
        LayerStats st = stats_from_counts({r.e_max, r.e_t}, r.v, 1);
        CHECK(std::abs(st.imbalance_ratio - r.mu) <= 0.01);
        CHECK(std::abs(st.target_density - r.density) <= 0.02 * r.density);
        CHECK(st.densest == 0);
        CHECK(st.sparsest == 1);
    }
    // The published Rattus ratio (1.54) does not follow from its printed
    // counts under any log base; its density does, so only that is asserted.
    LayerStats rattus = stats_from_counts({3014, 122}, 2640, 1);
    CHECK(std::abs(rattus.target_density - 1.75e-5) <= 0.02 * 1.75e-5);
}

TEST_CASE("equal layer sizes give zero imbalance; empty layer is an error") {
    LayerStats st = stats_from_counts({10, 10}, 5, 0);
    CHECK(st.imbalance_ratio == 0.0);
    CHECK_THROWS_WITH_AS(stats_from_counts({10, 0}, 5, 0),
                         doctest::Contains("imbalance ratio undefined"), std::invalid_argument);
}

TEST_CASE("neighbors are sorted, symmetric, and empty for isolated nodes") {
    std::vector<std::vector<Edge>> layers{{{1, 3}, {1, 2}}, {{0, 1}}};
    MultiplexNetwork net(5, layers);
    CHECK(net.neighbors(1, 0) == std::vector<NodeId>{2, 3});
    CHECK(net.neighbors(2, 0) == std::vector<NodeId>{1});
    CHECK(net.neighbors(4, 0).empty());
}

TEST_CASE("neighbor symmetry holds on random networks") {
    rng::Stream rs(7);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t v = 2 + rs.below(20);
        std::vector<std::vector<Edge>> layers(2);
        for (auto& layer : layers)
            for (int e = 0; e < 30; ++e)
                layer.push_back({static_cast<NodeId>(rs.below(v)), static_cast<NodeId>(rs.below(v))});
        MultiplexNetwork net(v, layers);
        for (LayerId l = 0; l < 2; ++l)
            for (NodeId i = 0; i < v; ++i)
                for (NodeId j : net.neighbors(i, l)) {
                    const auto& back = net.neighbors(j, l);
                    CHECK(std::find(back.begin(), back.end(), i) != back.end());
                }
    }
}

TEST_CASE("save then load round-trips the edge sets") {
    rng::Stream rs(99);
    std::vector<std::vector<Edge>> layers(3);
    for (auto& layer : layers)
        for (int e = 0; e < 40; ++e)
            layer.push_back({static_cast<NodeId>(rs.below(30)), static_cast<NodeId>(rs.below(30))});
    MultiplexNetwork net(30, layers);
    TempFile f("roundtrip.txt", "");
    net.save(f.path);
    MultiplexNetwork back = load_multiplex(f.path);
    REQUIRE(back.num_nodes() == net.num_nodes());
    REQUIRE(back.num_layers() == net.num_layers());
    for (LayerId l = 0; l < net.num_layers(); ++l) CHECK(back.edges(l) == net.edges(l));
}

TEST_CASE("labels load and count classes") {
    TempFile edges("lbl_e.txt", "nodes 4 layers 2\n0 0 1\n1 2 3\n");
    TempFile labs("lbl_l.txt", "0 1\n1 0\n2 1\n");
    MultiplexNetwork net = load_multiplex(edges.path, std::nullopt, labs.path);
    CHECK(net.has_labels());
    CHECK(net.num_classes() == 2);
    CHECK(net.label(3) == -1);
}
