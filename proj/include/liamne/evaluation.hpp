#pragma once

#include <cstdint>
#include <vector>

#include "liamne/graph.hpp"
#include "liamne/model.hpp"

namespace liamne {

// 8:1:1 split of target-layer edges plus matched negatives for the held-out
// portions. Training runs on the network with valid/test positives removed.
struct SplitManifest {
    LayerId target_layer = 0;
    std::uint64_t seed = 0;
    std::vector<Edge> train_pos;
    std::vector<Edge> valid_pos;
    std::vector<Edge> test_pos;
    std::vector<Edge> valid_neg;
    std::vector<Edge> test_neg;
};

struct EvalReport {
    double auc = 0.0;
    double valid_auc = 0.0;
    double macro_f1 = 0.0;
    double micro_f1 = 0.0;
    std::size_t train_count = 0;
    std::size_t valid_count = 0;
    std::size_t test_count = 0;
};

struct SplitRatios {
    double train = 0.8;
    double valid = 0.1;
    double test = 0.1;
};

// Valid/test sizes are floor(ratio * n); train takes the remainder. One
// negative (uniform non-edge of E_t) per held-out positive, all negatives
// distinct. Requires |E_t| >= 10.
SplitManifest split_edges(const MultiplexNetwork& net, LayerId target_layer, SplitRatios ratios,
                          std::uint64_t seed);

// The network to train on: valid/test positives removed from the target layer.
MultiplexNetwork training_network(const MultiplexNetwork& net, const SplitManifest& manifest);

// Mann-Whitney rank AUC: P(random positive outscores random negative), ties
// counted one half. Both lists must be non-empty.
double auc(const std::vector<double>& scores_pos, const std::vector<double>& scores_neg);

// Scores held-out pairs with score_edge over z~_{.,t} computed on `net`
// (normally the training network) and fills the auc fields.
EvalReport predict_links(const MultiplexNetwork& net, const ModelParams& params,
                         const ModelConfig& cfg, const SplitManifest& manifest);

// Multinomial logistic regression (in-repo, deterministic) on per-node
// features mean_l z~_{i,l}; 8:1:1 node split; reports test Macro/Micro F1.
EvalReport classify_nodes(const MultiplexNetwork& net, const ModelParams& params,
                          const ModelConfig& cfg, std::uint64_t split_seed);

// Confusion-matrix F1 helpers (also used by tests as oracles' subjects).
double macro_f1(const std::vector<int>& truth, const std::vector<int>& pred,
                std::size_t num_classes);
double micro_f1(const std::vector<int>& truth, const std::vector<int>& pred,
                std::size_t num_classes);

// Softmax regression: full-batch gradient descent with L2 regularization.
// Returns predicted class per row of X_test.
struct LogisticConfig {
    double learning_rate = 0.1;
    double l2 = 1e-4;
    std::size_t steps = 500;
};
std::vector<int> softmax_regression(const std::vector<std::vector<double>>& x_train,
                                    const std::vector<int>& y_train,
                                    const std::vector<std::vector<double>>& x_test,
                                    std::size_t num_classes, const LogisticConfig& cfg = {});

}  // namespace liamne
