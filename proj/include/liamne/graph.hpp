#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace liamne {

using NodeId = std::uint32_t;
using LayerId = std::uint32_t;

// Undirected edge, normalized so u < v.
struct Edge {
    NodeId u;
    NodeId v;

    bool operator==(const Edge&) const = default;
    bool operator<(const Edge& o) const { return u != o.u ? u < o.u : v < o.v; }
};

inline std::uint64_t edge_key(NodeId u, NodeId v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Immutable multiplex network: one node set, L >= 2 undirected unweighted
// edge layers, optional node attributes and class labels. Safe for
// concurrent reads once constructed.
class MultiplexNetwork {
public:
    // Validates and normalizes: endpoints swapped to u < v, duplicates within
    // a layer collapsed, self-loops dropped (counted). Throws
    // std::invalid_argument on endpoint out of range, fewer than two layers,
    // or attribute row count mismatch.
    MultiplexNetwork(std::size_t num_nodes, std::vector<std::vector<Edge>> layers,
                     std::vector<std::vector<double>> attributes = {},
                     std::vector<int> labels = {});

    std::size_t num_nodes() const { return num_nodes_; }
    std::size_t num_layers() const { return layers_.size(); }

    // Sorted edge list of a layer, each edge stored once with u < v.
    const std::vector<Edge>& edges(LayerId layer) const;

    // Sorted, deduplicated neighbor list; empty for isolated nodes.
    const std::vector<NodeId>& neighbors(NodeId node, LayerId layer) const;

    bool has_edge(LayerId layer, NodeId u, NodeId v) const;

    std::size_t total_edges() const;
    std::size_t self_loops_dropped() const { return self_loops_dropped_; }

    bool has_attributes() const { return !attributes_.empty(); }
    std::size_t attr_dim() const { return attributes_.empty() ? 0 : attributes_[0].size(); }
    const std::vector<double>& attributes(NodeId node) const { return attributes_[node]; }

    bool has_labels() const;
    // -1 means unlabeled.
    int label(NodeId node) const { return labels_.empty() ? -1 : labels_[node]; }
    const std::vector<int>& labels() const { return labels_; }
    std::size_t num_classes() const;

    // Copy with one layer's edge set replaced (validation re-applied).
    MultiplexNetwork with_layer(LayerId layer, std::vector<Edge> edges) const;
    // Copy with several layers replaced at once.
    MultiplexNetwork with_layers(std::vector<std::vector<Edge>> layers) const;

    void save(const std::string& edge_path) const;
    void save_labels(const std::string& label_path) const;

private:
    void check_layer(LayerId layer) const;
    void check_node(NodeId node) const;

    std::size_t num_nodes_;
    std::vector<std::vector<Edge>> layers_;
    std::vector<std::unordered_set<std::uint64_t>> edge_sets_;
    std::vector<std::vector<std::vector<NodeId>>> adjacency_;  // [layer][node]
    std::vector<std::vector<double>> attributes_;
    std::vector<int> labels_;
    std::size_t self_loops_dropped_ = 0;
};

// Layer-imbalance statistics. imbalance_ratio is the natural log of the
// densest-to-sparsest edge-count ratio; target_density = |E_t| / (|V|(|V|-1)).
struct LayerStats {
    std::vector<std::size_t> edges_per_layer;
    LayerId densest = 0;
    LayerId sparsest = 0;
    double imbalance_ratio = 0.0;
    double target_density = 0.0;
};

// Throws std::invalid_argument if any layer is empty (ratio undefined) or
// target_layer is out of range.
LayerStats stats_from_counts(const std::vector<std::size_t>& edges_per_layer,
                             std::size_t num_nodes, LayerId target_layer);

LayerStats compute_stats(const MultiplexNetwork& net, LayerId target_layer);

// Loaders. Edge file: "layer src dst" per line, '#' comments, optional
// header "nodes N layers L" (inferred from max ids otherwise). Attribute
// file: "node v1 .. vd" per line. Label file: "node class" per line.
// Malformed lines are reported with their line number.
MultiplexNetwork load_multiplex(const std::string& edge_path,
                                const std::optional<std::string>& attr_path = std::nullopt,
                                const std::optional<std::string>& label_path = std::nullopt);

}  // namespace liamne
