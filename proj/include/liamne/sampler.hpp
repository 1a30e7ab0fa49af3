#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "liamne/graph.hpp"

namespace liamne {

struct SamplerConfig {
    double alpha = 0.2;   // drop edges with sim < alpha
    double beta = 0.6;    // keep edges with sim > beta
    LayerId target_layer = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class SampleVerdict : std::uint8_t {
    kept_in_target,   // edge also present in E_t, kept unconditionally
    kept_high,        // sim > beta
    kept_prob,        // sim in [alpha, beta], coin accepted
    dropped_prob,     // sim in [alpha, beta], coin rejected
    dropped_low,      // sim < alpha
};

struct SampleDecision {
    LayerId layer;
    Edge edge;
    double similarity;
    SampleVerdict verdict;
};

struct SampleResult {
    std::optional<MultiplexNetwork> sampled_network;
    std::vector<std::size_t> per_layer_kept;  // kept edges per layer (target = unchanged count)
    std::vector<SampleDecision> decisions;    // populated only when requested
};

// sim(v_i, v_j) = sigmoid(x_i . x_j) over target-layer embeddings.
double similarity(const std::vector<double>& x_i, const std::vector<double>& x_j);

// Rebalance auxiliary layers by target-layer similarity: an auxiliary edge is
// kept unconditionally when it also exists in the target layer; otherwise
// kept when sim > beta, dropped when sim < alpha, and kept with probability
// sim when sim is in [alpha, beta]. The coin for each edge is derived from
// (seed, layer, edge), so the result is deterministic, order-independent,
// and monotone in both thresholds. The target layer is never modified.
//
// layer_embeds holds one target-layer embedding per node (size |V|).
SampleResult undersample(const MultiplexNetwork& net,
                         const std::vector<std::vector<double>>& layer_embeds,
                         const SamplerConfig& cfg, bool record_decisions = false);

}  // namespace liamne
