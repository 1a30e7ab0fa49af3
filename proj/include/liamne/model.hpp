#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "liamne/graph.hpp"
#include "liamne/linalg.hpp"

namespace liamne {

struct ModelConfig {
    std::size_t d = 64;    // dimension of both layer and common embeddings
    std::size_t d_a = 0;   // attention hidden size; 0 means use d
    std::size_t hops = 2;  // aggregation depth K

    std::size_t attention_dim() const { return d_a == 0 ? d : d_a; }
    void validate() const;
};

// Trainable parameters. layer_embed and base_neighbor_embed are |V| x L x d
// flat arrays; exactly one of base_neighbor_embed / attr_transform is the
// trainable source of h^(0) (attr_transform when the network has attributes).
struct ModelParams {
    std::size_t num_nodes = 0;
    std::size_t num_layers = 0;
    std::size_t d = 0;
    std::size_t d_a = 0;
    std::size_t hops = 2;
    std::uint64_t seed = 0;

    std::vector<double> layer_embed;           // x~_{i,l}, V*L*d
    std::vector<double> base_neighbor_embed;   // h^(0)_{i,l}, V*L*d (attribute-free nets)
    std::vector<Matrix> attr_transform;        // f_l, per layer d x d_attr (attributed nets)
    std::vector<double> w1;                    // d_a
    Matrix W2;                                 // d_a x d
    Matrix W3;                                 // d x d

    bool attributed() const { return !attr_transform.empty(); }

    double* layer_embed_at(NodeId i, LayerId l) {
        return layer_embed.data() + (static_cast<std::size_t>(i) * num_layers + l) * d;
    }
    const double* layer_embed_at(NodeId i, LayerId l) const {
        return layer_embed.data() + (static_cast<std::size_t>(i) * num_layers + l) * d;
    }
    double* h0_at(NodeId i, LayerId l) {
        return base_neighbor_embed.data() + (static_cast<std::size_t>(i) * num_layers + l) * d;
    }
    const double* h0_at(NodeId i, LayerId l) const {
        return base_neighbor_embed.data() + (static_cast<std::size_t>(i) * num_layers + l) * d;
    }

    bool all_finite() const;
};

// Fresh parameters, all trainable tensors uniform in [-1/sqrt(d), 1/sqrt(d)]
// from the "init" sub-stream of seed. attr_dim > 0 selects the attributed
// variant (h^(0) = f_l(r_i), base_neighbor_embed unused).
ModelParams init_params(std::size_t num_nodes, std::size_t num_layers, const ModelConfig& cfg,
                        std::uint64_t seed, std::size_t attr_dim = 0);

// Per-node forward pass cached for every node: hop-K neighbor aggregations,
// attention weights, and common embeddings.
struct Forward {
    std::size_t num_nodes = 0;
    std::size_t num_layers = 0;
    std::size_t d = 0;
    std::size_t d_a = 0;
    std::size_t hops = 0;

    // h[k] is V*L*d: hop-k neighbor embeddings (h[0] = h^(0)).
    std::vector<std::vector<double>> h;
    std::vector<double> tanh_act;  // V * d_a * L, tanh(W2 H_i)
    std::vector<double> attn;      // V * L, a_i
    std::vector<double> mixed;     // V * d, H_i a_i
    std::vector<double> common;    // V * d, c~_i = W3 H_i a_i

    const double* h_at(std::size_t k, NodeId i, LayerId l) const {
        return h[k].data() + (static_cast<std::size_t>(i) * num_layers + l) * d;
    }
    const double* common_at(NodeId i) const { return common.data() + static_cast<std::size_t>(i) * d; }
    const double* attn_at(NodeId i) const { return attn.data() + static_cast<std::size_t>(i) * num_layers; }
};

// Runs aggregation and attention for all nodes over the given (possibly
// sampled) network. Isolated nodes on a layer use their own previous-hop
// value as the mean.
Forward forward_all(const MultiplexNetwork& net, const ModelParams& params,
                    const ModelConfig& cfg);

// z~_{i,l} = c~_i + x~_{i,l}
std::vector<double> final_embedding(const ModelParams& params, const Forward& fwd, NodeId node,
                                    LayerId layer);

// sigmoid(z_i . z_j); the link score and the sigma inside the losses.
double score_edge(const std::vector<double>& z_i, const std::vector<double>& z_j);

// Single-node convenience entry points (the trainer uses forward_all).
Matrix aggregate_neighbors(const MultiplexNetwork& net, const ModelParams& params,
                           const ModelConfig& cfg, NodeId node);   // d x L
std::vector<double> attention_weights(const ModelParams& params, const Matrix& H_i);
std::vector<double> common_embedding(const ModelParams& params, const Matrix& H_i,
                                     const std::vector<double>& a_i);

// Checkpoint container: dims, seed, and all parameter tensors; binary,
// round-trips bit-exactly. See README for the layout.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace liamne
