#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "liamne/graph.hpp"
#include "liamne/model.hpp"
#include "liamne/sampler.hpp"

namespace liamne {

enum class TrainVariant : std::uint8_t {
    full,             // similarity-based under-sampling
    random_sampling,  // drop the same number of auxiliary edges uniformly at random
    no_sampling,      // never sample
};

TrainVariant parse_variant(const std::string& name);
std::string variant_name(TrainVariant v);

struct TrainConfig {
    std::size_t epochs = 10;
    double learning_rate = 0.025;
    std::size_t neg_ratio = 5;   // negatives per positive edge
    std::size_t batch_size = 0;  // 0 = full batch
    std::uint64_t seed = 0;
    std::size_t sampling_start_epoch = 2;
    bool resample_each_epoch = true;      // re-run sampling from the ORIGINAL aux layers
    bool resample_negatives_each_epoch = true;
    SamplerConfig sampler;                // alpha/beta/target (its seed field is unused here;
                                          // the trainer derives per-epoch sampler seeds)
    TrainVariant variant = TrainVariant::full;

    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double l_pos = 0.0;
    double l_neg = 0.0;
    double l_total = 0.0;
    std::vector<std::size_t> kept_edges;  // active edge count per layer
    double wall_ms = 0.0;
};

struct TrainLog {
    std::vector<EpochRecord> epochs;
    void write_csv(const std::string& path) const;
    std::string to_csv() const;
};

struct TrainEdge {
    LayerId layer;
    NodeId i;
    NodeId j;
};

struct Batch {
    std::vector<TrainEdge> positives;
    std::vector<Edge> negatives;  // pairs on the target layer
    LayerId target = 0;
};

// Gradients mirror the trainable tensors of ModelParams.
struct Gradients {
    std::vector<double> layer_embed;
    std::vector<double> base_neighbor_embed;
    std::vector<Matrix> attr_transform;
    std::vector<double> w1;
    Matrix W2;
    Matrix W3;
};

// L_pos = sum over layers and edges of -log sigmoid(z_i . z_j).
double positive_loss(const MultiplexNetwork& net, const ModelParams& params,
                     const ModelConfig& cfg);

// L_neg = sum over pairs of -log(1 - sigmoid(z_i . z_j)) on the target layer.
double negative_loss(const MultiplexNetwork& net, const ModelParams& params,
                     const ModelConfig& cfg, const std::vector<Edge>& pairs, LayerId target);

// (L_pos, L_neg) restricted to the batch; shares the forward pass.
std::pair<double, double> batch_loss(const MultiplexNetwork& net, const ModelParams& params,
                                     const ModelConfig& cfg, const Batch& batch);

// Uniform unordered non-edges of the target layer, i != j, no duplicates
// within the returned list. Throws after bounded rejection attempts when the
// layer is near-complete.
std::vector<Edge> sample_negatives(const MultiplexNetwork& net, LayerId target_layer,
                                   std::size_t count, std::uint64_t seed);

// Analytic gradients of the batch loss through aggregation, attention, and
// the final-embedding sum, w.r.t. every trainable tensor.
Gradients gradients(const MultiplexNetwork& net, const ModelParams& params,
                    const ModelConfig& cfg, const Batch& batch);

// Thrown when a loss or parameter becomes non-finite.
struct TrainDivergence : std::runtime_error {
    TrainDivergence(std::size_t epoch, std::size_t step, const std::string& what)
        : std::runtime_error("training diverged at epoch " + std::to_string(epoch) + ", step " +
                             std::to_string(step) + ": " + what),
          epoch(epoch),
          step(step) {}
    std::size_t epoch;
    std::size_t step;
};

struct TrainResult {
    ModelParams params;
    TrainLog log;
    // The training graph of the last epoch (under-sampled for the sampling
    // variants, the input network otherwise). Downstream scoring aggregates
    // over this graph so the sampler's effect carries into evaluation.
    MultiplexNetwork final_network;
};

TrainResult train(const MultiplexNetwork& net, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg);

}  // namespace liamne
