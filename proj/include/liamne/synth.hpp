#pragma once

#include <cstdint>
#include <vector>

#include "liamne/graph.hpp"

namespace liamne {

// One auxiliary layer: edge_count edges, a fraction `relevance` drawn from
// the same planted-partition distribution as the target layer (signal), the
// rest uniform node pairs (noise).
struct AuxLayerSpec {
    std::size_t edge_count = 0;
    double relevance = 0.5;  // rho in [0, 1]
};

struct SynthConfig {
    std::size_t num_nodes = 1000;
    std::size_t num_communities = 4;
    std::size_t target_edges = 400;
    std::vector<AuxLayerSpec> aux_layers;
    double p_in = 0.9;   // within-community propensity
    double p_out = 0.1;  // between-community propensity
    std::uint64_t seed = 0;

    void validate() const;
};

// Planted-partition multiplex network: layer 0 is the target layer, then one
// layer per aux spec; labels are community ids. Edge counts are exact
// (sampling without replacement); deterministic per seed.
MultiplexNetwork generate(const SynthConfig& cfg);

// Uniformly subsample the target layer to round(keep_fraction * |E_t|)
// edges, other layers untouched. Errors if the result would have < 10 edges.
MultiplexNetwork sparsify_target(const MultiplexNetwork& net, LayerId target_layer,
                                 double keep_fraction, std::uint64_t seed);

}  // namespace liamne
