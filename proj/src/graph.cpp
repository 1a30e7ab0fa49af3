#include "liamne/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace liamne {

MultiplexNetwork::MultiplexNetwork(std::size_t num_nodes, std::vector<std::vector<Edge>> layers,
                                   std::vector<std::vector<double>> attributes,
                                   std::vector<int> labels)
    : num_nodes_(num_nodes),
      layers_(std::move(layers)),
      attributes_(std::move(attributes)),
      labels_(std::move(labels)) {
    if (layers_.size() < 2)
        throw std::invalid_argument("multiplex network requires at least 2 layers, got " +
                                    std::to_string(layers_.size()));
    if (!attributes_.empty() && attributes_.size() != num_nodes_)
        throw std::invalid_argument("attribute row count " + std::to_string(attributes_.size()) +
                                    " does not match node count " + std::to_string(num_nodes_));
    for (std::size_t i = 1; i < attributes_.size(); ++i)
        if (attributes_[i].size() != attributes_[0].size())
            throw std::invalid_argument("ragged attribute rows");
    if (!labels_.empty() && labels_.size() != num_nodes_)
        throw std::invalid_argument("label vector size mismatch");

    edge_sets_.resize(layers_.size());
    adjacency_.assign(layers_.size(), std::vector<std::vector<NodeId>>(num_nodes_));
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        std::vector<Edge> clean;
        clean.reserve(layers_[l].size());
        for (Edge e : layers_[l]) {
            if (e.u >= num_nodes_ || e.v >= num_nodes_)
                throw std::invalid_argument("endpoint out of range: edge (" + std::to_string(e.u) +
                                            "," + std::to_string(e.v) + ") in layer " +
                                            std::to_string(l) + " with " +
                                            std::to_string(num_nodes_) + " nodes");
            if (e.u == e.v) {
                ++self_loops_dropped_;
                continue;
            }
            if (e.u > e.v) std::swap(e.u, e.v);
            if (edge_sets_[l].insert(edge_key(e.u, e.v)).second) clean.push_back(e);
        }
        std::sort(clean.begin(), clean.end());
        for (const Edge& e : clean) {
            adjacency_[l][e.u].push_back(e.v);
            adjacency_[l][e.v].push_back(e.u);
        }
        for (auto& nbrs : adjacency_[l]) std::sort(nbrs.begin(), nbrs.end());
        layers_[l] = std::move(clean);
    }
}

const std::vector<Edge>& MultiplexNetwork::edges(LayerId layer) const {
    check_layer(layer);
    return layers_[layer];
}

const std::vector<NodeId>& MultiplexNetwork::neighbors(NodeId node, LayerId layer) const {
    check_layer(layer);
    check_node(node);
    return adjacency_[layer][node];
}

bool MultiplexNetwork::has_edge(LayerId layer, NodeId u, NodeId v) const {
    check_layer(layer);
    return edge_sets_[layer].count(edge_key(u, v)) > 0;
}

std::size_t MultiplexNetwork::total_edges() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.size();
    return n;
}

bool MultiplexNetwork::has_labels() const {
    for (int v : labels_)
        if (v >= 0) return true;
    return false;
}

std::size_t MultiplexNetwork::num_classes() const {
    int mx = -1;
    for (int v : labels_) mx = std::max(mx, v);
    return static_cast<std::size_t>(mx + 1);
}

MultiplexNetwork MultiplexNetwork::with_layer(LayerId layer, std::vector<Edge> edges) const {
    check_layer(layer);
    auto new_layers = layers_;
    new_layers[layer] = std::move(edges);
    return MultiplexNetwork(num_nodes_, std::move(new_layers), attributes_, labels_);
}

MultiplexNetwork MultiplexNetwork::with_layers(std::vector<std::vector<Edge>> layers) const {
    return MultiplexNetwork(num_nodes_, std::move(layers), attributes_, labels_);
}

void MultiplexNetwork::save(const std::string& edge_path) const {
    std::ofstream out(edge_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + edge_path);
    out << "nodes " << num_nodes_ << " layers " << layers_.size() << "\n";
    for (std::size_t l = 0; l < layers_.size(); ++l)
        for (const Edge& e : layers_[l]) out << l << " " << e.u << " " << e.v << "\n";
}

void MultiplexNetwork::save_labels(const std::string& label_path) const {
    std::ofstream out(label_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + label_path);
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] >= 0) out << i << " " << labels_[i] << "\n";
}

void MultiplexNetwork::check_layer(LayerId layer) const {
    if (layer >= layers_.size())
        throw std::invalid_argument("layer id " + std::to_string(layer) + " out of range");
}

void MultiplexNetwork::check_node(NodeId node) const {
    if (node >= num_nodes_)
        throw std::invalid_argument("node id " + std::to_string(node) + " out of range");
}

LayerStats stats_from_counts(const std::vector<std::size_t>& edges_per_layer,
                             std::size_t num_nodes, LayerId target_layer) {
    if (target_layer >= edges_per_layer.size())
        throw std::invalid_argument("target layer out of range");
    LayerStats st;
    st.edges_per_layer = edges_per_layer;
    for (std::size_t l = 0; l < edges_per_layer.size(); ++l) {
        if (edges_per_layer[l] == 0)
            throw std::invalid_argument("imbalance ratio undefined: layer " + std::to_string(l) +
                                        " is empty");
        if (edges_per_layer[l] > edges_per_layer[st.densest]) st.densest = static_cast<LayerId>(l);
        if (edges_per_layer[l] < edges_per_layer[st.sparsest])
            st.sparsest = static_cast<LayerId>(l);
    }
    st.imbalance_ratio = std::log(static_cast<double>(edges_per_layer[st.densest]) /
                                  static_cast<double>(edges_per_layer[st.sparsest]));
    st.target_density = static_cast<double>(edges_per_layer[target_layer]) /
                        (static_cast<double>(num_nodes) * static_cast<double>(num_nodes - 1));
    return st;
}

LayerStats compute_stats(const MultiplexNetwork& net, LayerId target_layer) {
    std::vector<std::size_t> counts(net.num_layers());
    for (std::size_t l = 0; l < net.num_layers(); ++l)
        counts[l] = net.edges(static_cast<LayerId>(l)).size();
    return stats_from_counts(counts, net.num_nodes(), target_layer);
}

namespace {

[[noreturn]] void malformed(const std::string& path, std::size_t line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

bool skip_line(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;  // blank
}

}  // namespace

MultiplexNetwork load_multiplex(const std::string& edge_path,
                                const std::optional<std::string>& attr_path,
                                const std::optional<std::string>& label_path) {
    std::ifstream in(edge_path);
    if (!in) throw std::runtime_error("cannot open edge file: " + edge_path);

    std::size_t declared_nodes = 0, declared_layers = 0;
    bool have_header = false;
    std::vector<std::vector<Edge>> layers;
    NodeId max_node = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_line(line)) continue;
        std::istringstream ss(line);
        std::string first;
        ss >> first;
        if (first == "nodes") {
            std::string kw;
            if (!(ss >> declared_nodes >> kw >> declared_layers) || kw != "layers")
                malformed(edge_path, line_no, "bad header, expected 'nodes N layers L'");
            have_header = true;
            continue;
        }
        long long layer, src, dst;
        std::istringstream es(line);
        if (!(es >> layer >> src >> dst) || layer < 0 || src < 0 || dst < 0)
            malformed(edge_path, line_no, "expected 'layer_id src_id dst_id'");
        std::string extra;
        if (es >> extra) malformed(edge_path, line_no, "trailing tokens after edge");
        if (static_cast<std::size_t>(layer) >= layers.size())
            layers.resize(static_cast<std::size_t>(layer) + 1);
        Edge e{static_cast<NodeId>(src), static_cast<NodeId>(dst)};
        layers[static_cast<std::size_t>(layer)].push_back(e);
        max_node = std::max({max_node, e.u, e.v});
    }
    std::size_t num_nodes = have_header ? declared_nodes : static_cast<std::size_t>(max_node) + 1;
    if (have_header && layers.size() < declared_layers) layers.resize(declared_layers);

    std::vector<std::vector<double>> attributes;
    if (attr_path) {
        std::ifstream af(*attr_path);
        if (!af) throw std::runtime_error("cannot open attribute file: " + *attr_path);
        attributes.assign(num_nodes, {});
        std::size_t rows = 0, aline = 0;
        while (std::getline(af, line)) {
            ++aline;
            if (skip_line(line)) continue;
            std::istringstream ss(line);
            long long node;
            if (!(ss >> node) || node < 0) malformed(*attr_path, aline, "expected node id");
            if (static_cast<std::size_t>(node) >= num_nodes)
                malformed(*attr_path, aline, "attribute node id out of range");
            std::vector<double> row;
            double v;
            while (ss >> v) row.push_back(v);
            if (row.empty()) malformed(*attr_path, aline, "attribute row has no values");
            attributes[static_cast<std::size_t>(node)] = std::move(row);
            ++rows;
        }
        if (rows != num_nodes)
            throw std::runtime_error(*attr_path + ": attribute row count " + std::to_string(rows) +
                                     " does not match node count " + std::to_string(num_nodes));
    }

    std::vector<int> labels;
    if (label_path) {
        std::ifstream lf(*label_path);
        if (!lf) throw std::runtime_error("cannot open label file: " + *label_path);
        labels.assign(num_nodes, -1);
        std::size_t lline = 0;
        while (std::getline(lf, line)) {
            ++lline;
            if (skip_line(line)) continue;
            std::istringstream ss(line);
            long long node, cls;
            if (!(ss >> node >> cls) || node < 0 || cls < 0)
                malformed(*label_path, lline, "expected 'node_id class_id'");
            if (static_cast<std::size_t>(node) >= num_nodes)
                malformed(*label_path, lline, "label node id out of range");
            labels[static_cast<std::size_t>(node)] = static_cast<int>(cls);
        }
    }

    return MultiplexNetwork(num_nodes, std::move(layers), std::move(attributes),
                            std::move(labels));
}

}  // namespace liamne
