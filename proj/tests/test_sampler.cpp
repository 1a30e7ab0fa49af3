#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "liamne/rng.hpp"
#include "liamne/sampler.hpp"

using namespace liamne;

namespace {

// sim = 1/(1+e^-dot); hand-evaluated oracle values frozen below.
MultiplexNetwork two_layer_net(std::size_t v, std::vector<Edge> target, std::vector<Edge> aux) {
    return MultiplexNetwork(v, {std::move(target), std::move(aux)});
}

std::vector<std::vector<double>> random_embeddings(std::size_t v, std::size_t d,
                                                   std::uint64_t seed, double scale = 1.0) {
    rng::Stream rs(seed);
    std::vector<std::vector<double>> e(v, std::vector<double>(d));
    for (auto& row : e)
        for (double& x : row) x = rs.uniform(-scale, scale);
    return e;
}

}  // namespace

TEST_CASE("similarity is the sigmoid of the dot product") {
    CHECK(similarity({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(0.5));
    // ||x||^2 = 2.1972, oracle: 1/(1+e^-2.1972) = 0.899996...
    std::vector<double> x{std::sqrt(2.1972), 0.0};
    CHECK(similarity(x, x) == doctest::Approx(0.9).epsilon(1e-4));
    // sigma(-z) = 1 - sigma(z)
    std::vector<double> y{-std::sqrt(2.1972), 0.0};
    CHECK(similarity(x, y) == doctest::Approx(0.1).epsilon(1e-4));
    CHECK_THROWS(similarity({1.0}, {1.0, 2.0}));
}

TEST_CASE("alpha=beta=0 keeps every auxiliary edge") {
    auto net = two_layer_net(6, {{0, 1}}, {{0, 2}, {1, 3}, {2, 4}, {3, 5}});
    auto embeds = random_embeddings(6, 4, 1);
    SamplerConfig cfg{0.0, 0.0, 0, 42};
    SampleResult res = undersample(net, embeds, cfg);
    CHECK(res.per_layer_kept[1] == 4);
    CHECK(res.sampled_network->edges(0) == net.edges(0));
}

TEST_CASE("alpha=beta=1 keeps only edges duplicated in the target layer") {
    auto net = two_layer_net(6, {{0, 1}, {2, 3}}, {{0, 1}, {2, 3}, {0, 2}, {4, 5}});
    // Large embeddings so no sim lands exactly on 1.0's band boundary; the
    // logistic never reaches 1 anyway so only the in-target rule can keep.
    auto embeds = random_embeddings(6, 4, 2, 5.0);
    SamplerConfig cfg{1.0, 1.0, 0, 7};
    SampleResult res = undersample(net, embeds, cfg);
    CHECK(res.sampled_network->edges(1) == std::vector<Edge>{{0, 1}, {2, 3}});
}

TEST_CASE("target-layer edges in auxiliary layers survive any thresholds") {
    auto net = two_layer_net(4, {{0, 1}}, {{0, 1}, {2, 3}});
    // strongly negative dot products: sim near 0 everywhere
    std::vector<std::vector<double>> embeds{{10, 0}, {-10, 0}, {10, 0}, {-10, 0}};
    SamplerConfig cfg{0.9, 0.95, 0, 3};
    SampleResult res = undersample(net, embeds, cfg, true);
    CHECK(res.sampled_network->edges(1) == std::vector<Edge>{{0, 1}});
    REQUIRE(res.decisions.size() == 2);
    CHECK(res.decisions[0].verdict == SampleVerdict::kept_in_target);
    CHECK(res.decisions[1].verdict == SampleVerdict::dropped_low);
}

TEST_CASE("probabilistic band keeps roughly sim fraction of edges") {
    // 1000 auxiliary edges, all with sim = 0.5 (orthogonal embeddings).
    std::vector<Edge> aux;
    for (NodeId i = 0; i < 1000; ++i) aux.push_back({2 * i + 2, 2 * i + 3});
    auto net = two_layer_net(2002, {{0, 1}}, aux);
    std::vector<std::vector<double>> embeds(2002, std::vector<double>{0.0, 0.0});
    SamplerConfig cfg{0.2, 0.6, 0, 0};

    // Binomial oracle over repeated seeds: pooled mean ~ Binomial(n, 0.5)/n.
    std::size_t kept_total = 0, n_total = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        cfg.seed = seed;
        SampleResult res = undersample(net, embeds, cfg);
        kept_total += res.per_layer_kept[1];
        n_total += 1000;
    }
    const double phat = static_cast<double>(kept_total) / static_cast<double>(n_total);
    // 5 sigma band around p = 0.5 with n = 10000: 0.5 +- 0.025
    CHECK(std::abs(phat - 0.5) < 0.025);
}

TEST_CASE("determinism: identical inputs give identical results") {
    auto net = two_layer_net(50, {{0, 1}, {2, 3}}, [] {
        std::vector<Edge> e;
        for (NodeId i = 0; i < 48; i += 2) e.push_back({i, i + 1});
        return e;
    }());
    auto embeds = random_embeddings(50, 8, 5);
    SamplerConfig cfg{0.2, 0.6, 0, 123};
    SampleResult a = undersample(net, embeds, cfg, true);
    SampleResult b = undersample(net, embeds, cfg, true);
    CHECK(a.sampled_network->edges(1) == b.sampled_network->edges(1));
    REQUIRE(a.decisions.size() == b.decisions.size());
    for (std::size_t i = 0; i < a.decisions.size(); ++i)
        CHECK(a.decisions[i].verdict == b.decisions[i].verdict);
}

TEST_CASE("randomized properties: subset, monotonicity, node preservation") {
    rng::Stream rs(2024);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t v = 10 + rs.below(30);
        std::vector<Edge> target, aux;
        for (int e = 0; e < 15; ++e)
            target.push_back({static_cast<NodeId>(rs.below(v)), static_cast<NodeId>(rs.below(v))});
        for (int e = 0; e < 60; ++e)
            aux.push_back({static_cast<NodeId>(rs.below(v)), static_cast<NodeId>(rs.below(v))});
        auto net = two_layer_net(v, target, aux);
        auto embeds = random_embeddings(v, 4, rs.next_u64());

        double a1 = rs.uniform01(), b1 = rs.uniform01();
        if (a1 > b1) std::swap(a1, b1);
        const std::uint64_t seed = rs.next_u64();
        SamplerConfig cfg{a1, b1, 0, seed};
        SampleResult res = undersample(net, embeds, cfg);

        const auto& kept = res.sampled_network->edges(1);
        CHECK(res.sampled_network->num_nodes() == v);
        CHECK(res.sampled_network->edges(0) == net.edges(0));
        for (const Edge& e : kept) CHECK(net.has_edge(1, e.u, e.v));

        // raising alpha never keeps more
        SamplerConfig higher_a{std::min(1.0, a1 + 0.2), std::max(b1, std::min(1.0, a1 + 0.2)), 0,
                               seed};
        CHECK(undersample(net, embeds, higher_a).per_layer_kept[1] <= kept.size());
        // raising beta never keeps more
        SamplerConfig higher_b{a1, std::min(1.0, b1 + 0.2), 0, seed};
        CHECK(undersample(net, embeds, higher_b).per_layer_kept[1] <= kept.size());
    }
}

TEST_CASE("invalid thresholds are rejected") {
    CHECK_THROWS(SamplerConfig{0.7, 0.3, 0, 0}.validate());
    CHECK_THROWS(SamplerConfig{-0.1, 0.5, 0, 0}.validate());
    CHECK_THROWS(SamplerConfig{0.2, 1.5, 0, 0}.validate());
}
