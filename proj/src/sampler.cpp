#include "liamne/sampler.hpp"

#include <stdexcept>

#include "liamne/linalg.hpp"
#include "liamne/rng.hpp"

namespace liamne {

void SamplerConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= beta && beta <= 1.0))
        throw std::invalid_argument("sampler thresholds must satisfy 0 <= alpha <= beta <= 1");
}

double similarity(const std::vector<double>& x_i, const std::vector<double>& x_j) {
    return sigmoid(dot(x_i, x_j));
}

SampleResult undersample(const MultiplexNetwork& net,
                         const std::vector<std::vector<double>>& layer_embeds,
                         const SamplerConfig& cfg, bool record_decisions) {
    cfg.validate();
    if (cfg.target_layer >= net.num_layers())
        throw std::invalid_argument("undersample: target layer out of range");
    if (layer_embeds.size() != net.num_nodes())
        throw std::invalid_argument("undersample: embeddings must cover all nodes");

    const std::uint64_t edge_stream = rng::substream(cfg.seed, "sampler-edge");

    SampleResult result;
    result.per_layer_kept.resize(net.num_layers());
    std::vector<std::vector<Edge>> new_layers(net.num_layers());
    for (LayerId l = 0; l < net.num_layers(); ++l) {
        const auto& edges = net.edges(l);
        if (l == cfg.target_layer) {
            new_layers[l] = edges;
            result.per_layer_kept[l] = edges.size();
            continue;
        }
        auto& kept = new_layers[l];
        kept.reserve(edges.size());
        for (const Edge& e : edges) {
            SampleVerdict verdict;
            double sim = similarity(layer_embeds[e.u], layer_embeds[e.v]);
            if (net.has_edge(cfg.target_layer, e.u, e.v)) {
                verdict = SampleVerdict::kept_in_target;
            } else if (sim > cfg.beta) {
                verdict = SampleVerdict::kept_high;
            } else if (sim < cfg.alpha) {
                verdict = SampleVerdict::dropped_low;
            } else {
                // One coin per edge, keyed by (seed, layer, edge) rather than
                // drawn from a sequential stream: threshold changes then
                // cannot re-align coins across edges, which keeps the kept
                // count monotone in alpha and beta at fixed seed.
                double u = rng::Stream(rng::mix(rng::mix(edge_stream, l), edge_key(e.u, e.v)))
                               .uniform01();
                verdict = u < sim ? SampleVerdict::kept_prob : SampleVerdict::dropped_prob;
            }
            if (verdict != SampleVerdict::dropped_low && verdict != SampleVerdict::dropped_prob)
                kept.push_back(e);
            if (record_decisions) result.decisions.push_back({l, e, sim, verdict});
        }
        result.per_layer_kept[l] = kept.size();
    }
    result.sampled_network = net.with_layers(std::move(new_layers));
    return result;
}

}  // namespace liamne
