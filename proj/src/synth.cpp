#include "liamne/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "liamne/rng.hpp"

namespace liamne {

void SynthConfig::validate() const {
    if (num_nodes < 2) throw std::invalid_argument("synth: need at least 2 nodes");
    if (num_communities < 1 || num_communities > num_nodes)
        throw std::invalid_argument("synth: bad community count");
    if (!(p_in > p_out)) throw std::invalid_argument("synth: p_in must exceed p_out");
    if (!(p_out >= 0.0)) throw std::invalid_argument("synth: p_out must be >= 0");
    const std::size_t max_edges = num_nodes * (num_nodes - 1) / 2;
    if (target_edges == 0 || target_edges > max_edges)
        throw std::invalid_argument("synth: infeasible target edge count");
    for (const AuxLayerSpec& a : aux_layers) {
        if (a.edge_count == 0 || a.edge_count > max_edges)
            throw std::invalid_argument("synth: infeasible auxiliary edge count");
        if (a.relevance < 0.0 || a.relevance > 1.0)
            throw std::invalid_argument("synth: relevance must be in [0, 1]");
    }
}

namespace {

struct Communities {
    std::vector<int> label;                        // per node
    std::vector<std::vector<NodeId>> members;      // per community
};

// Contiguous blocks; every community non-empty (num_communities <= num_nodes).
Communities assign_communities(std::size_t num_nodes, std::size_t num_communities) {
    Communities c;
    c.label.resize(num_nodes);
    c.members.resize(num_communities);
    for (std::size_t i = 0; i < num_nodes; ++i) {
        std::size_t k = i * num_communities / num_nodes;
        c.label[i] = static_cast<int>(k);
        c.members[k].push_back(static_cast<NodeId>(i));
    }
    return c;
}

NodeId pick_other(rng::Stream& rs, const std::vector<NodeId>& pool, NodeId avoid) {
    while (true) {
        NodeId v = pool[rs.below(pool.size())];
        if (v != avoid) return v;
    }
}

// Draws `count` distinct edges from the planted-partition distribution:
// within-community with probability proportional to p_in * (#within pairs),
// between otherwise. Exact count via rejection of duplicates.
std::vector<Edge> planted_partition_edges(const Communities& comm, std::size_t num_nodes,
                                          std::size_t count, double p_in, double p_out,
                                          std::unordered_set<std::uint64_t>& used,
                                          rng::Stream& rs) {
    double within_pairs = 0.0;
    for (const auto& m : comm.members) {
        const double s = static_cast<double>(m.size());
        within_pairs += s * (s - 1.0) / 2.0;
    }
    const double all_pairs =
        static_cast<double>(num_nodes) * (static_cast<double>(num_nodes) - 1.0) / 2.0;
    const double between_pairs = all_pairs - within_pairs;
    const double w_in = p_in * within_pairs;
    const double p_within = w_in / (w_in + p_out * between_pairs);

    std::vector<Edge> out;
    std::size_t attempts = 0;
    const std::size_t max_attempts = std::max<std::size_t>(10000, 300 * count);
    while (out.size() < count) {
        if (++attempts > max_attempts)
            throw std::runtime_error("synth: edge budget infeasible for the community layout");
        NodeId u, v;
        if (rs.uniform01() < p_within) {
            // within-community pair, community chosen by pair mass
            const auto& pool = comm.members[rs.below(comm.members.size())];
            if (pool.size() < 2) continue;
            u = pool[rs.below(pool.size())];
            v = pick_other(rs, pool, u);
        } else {
            u = static_cast<NodeId>(rs.below(num_nodes));
            v = static_cast<NodeId>(rs.below(num_nodes));
            if (u == v || comm.label[u] == comm.label[v]) continue;
        }
        if (u > v) std::swap(u, v);
        if (!used.insert(edge_key(u, v)).second) continue;
        out.push_back({u, v});
    }
    return out;
}

std::vector<Edge> uniform_edges(std::size_t num_nodes, std::size_t count,
                                std::unordered_set<std::uint64_t>& used, rng::Stream& rs) {
    std::vector<Edge> out;
    std::size_t attempts = 0;
    const std::size_t max_attempts = std::max<std::size_t>(10000, 300 * count);
    while (out.size() < count) {
        if (++attempts > max_attempts)
            throw std::runtime_error("synth: uniform edge budget infeasible");
        NodeId u = static_cast<NodeId>(rs.below(num_nodes));
        NodeId v = static_cast<NodeId>(rs.below(num_nodes));
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (!used.insert(edge_key(u, v)).second) continue;
        out.push_back({u, v});
    }
    return out;
}

}  // namespace

MultiplexNetwork generate(const SynthConfig& cfg) {
    cfg.validate();
    Communities comm = assign_communities(cfg.num_nodes, cfg.num_communities);

    std::vector<std::vector<Edge>> layers;
    {
        std::unordered_set<std::uint64_t> used;
        rng::Stream rs(rng::substream(cfg.seed, "synth-target"));
        layers.push_back(planted_partition_edges(comm, cfg.num_nodes, cfg.target_edges, cfg.p_in,
                                                 cfg.p_out, used, rs));
    }
    for (std::size_t a = 0; a < cfg.aux_layers.size(); ++a) {
        const AuxLayerSpec& spec = cfg.aux_layers[a];
        const std::size_t n_signal =
            static_cast<std::size_t>(std::llround(spec.relevance * static_cast<double>(spec.edge_count)));
        std::unordered_set<std::uint64_t> used;  // dedup within the layer only
        rng::Stream rs(rng::substream(cfg.seed, "synth-aux", a));
        std::vector<Edge> edges = planted_partition_edges(comm, cfg.num_nodes, n_signal, cfg.p_in,
                                                          cfg.p_out, used, rs);
        std::vector<Edge> noise =
            uniform_edges(cfg.num_nodes, spec.edge_count - n_signal, used, rs);
        edges.insert(edges.end(), noise.begin(), noise.end());
        layers.push_back(std::move(edges));
    }
    if (layers.size() < 2) throw std::invalid_argument("synth: need at least one auxiliary layer");
    return MultiplexNetwork(cfg.num_nodes, std::move(layers), {}, comm.label);
}

MultiplexNetwork sparsify_target(const MultiplexNetwork& net, LayerId target_layer,
                                 double keep_fraction, std::uint64_t seed) {
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
        throw std::invalid_argument("sparsify_target: keep_fraction must be in (0, 1]");
    std::vector<Edge> edges = net.edges(target_layer);
    const std::size_t keep =
        static_cast<std::size_t>(std::llround(keep_fraction * static_cast<double>(edges.size())));
    if (keep < 10)
        throw std::invalid_argument("sparsify_target: would leave fewer than 10 edges");
    if (keep >= edges.size()) return net;
    rng::Stream rs(rng::substream(seed, "sparsify"));
    rs.shuffle(edges);
    edges.resize(keep);
    return net.with_layer(target_layer, std::move(edges));
}

}  // namespace liamne
