#include "liamne/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "liamne/rng.hpp"

namespace liamne {

TrainVariant parse_variant(const std::string& name) {
    if (name == "full") return TrainVariant::full;
    if (name == "random-sampling") return TrainVariant::random_sampling;
    if (name == "no-sampling") return TrainVariant::no_sampling;
    throw std::invalid_argument("unknown variant '" + name +
                                "', expected full | random-sampling | no-sampling");
}

std::string variant_name(TrainVariant v) {
    switch (v) {
        case TrainVariant::full: return "full";
        case TrainVariant::random_sampling: return "random-sampling";
        case TrainVariant::no_sampling: return "no-sampling";
    }
    return "?";
}

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(learning_rate > 0)) throw std::invalid_argument("learning_rate must be positive");
    if (neg_ratio < 1) throw std::invalid_argument("neg_ratio must be >= 1");
    if (sampling_start_epoch < 1) throw std::invalid_argument("sampling_start_epoch must be >= 1");
    sampler.validate();
}

std::string TrainLog::to_csv() const {
    std::ostringstream out;
    out << "epoch,l_pos,l_neg,l_total";
    if (!epochs.empty())
        for (std::size_t l = 0; l < epochs[0].kept_edges.size(); ++l) out << ",kept_edges_layer_" << l;
    out << "\n";
    out.precision(17);
    for (const EpochRecord& r : epochs) {
        out << r.epoch << "," << r.l_pos << "," << r.l_neg << "," << r.l_total;
        for (std::size_t k : r.kept_edges) out << "," << k;
        out << "\n";
    }
    return out.str();
}

void TrainLog::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open log for writing: " + path);
    out << to_csv();
}

namespace {

inline std::vector<double> z_of(const ModelParams& params, const Forward& fwd, NodeId i,
                                LayerId l) {
    return final_embedding(params, fwd, i, l);
}

}  // namespace

double positive_loss(const MultiplexNetwork& net, const ModelParams& params,
                     const ModelConfig& cfg) {
    Forward fwd = forward_all(net, params, cfg);
    double loss = 0.0;
    for (LayerId l = 0; l < net.num_layers(); ++l)
        for (const Edge& e : net.edges(l))
            loss += neg_log_sigmoid(dot(z_of(params, fwd, e.u, l), z_of(params, fwd, e.v, l)));
    return loss;
}

double negative_loss(const MultiplexNetwork& net, const ModelParams& params,
                     const ModelConfig& cfg, const std::vector<Edge>& pairs, LayerId target) {
    Forward fwd = forward_all(net, params, cfg);
    double loss = 0.0;
    for (const Edge& e : pairs)
        loss += neg_log_one_minus_sigmoid(
            dot(z_of(params, fwd, e.u, target), z_of(params, fwd, e.v, target)));
    return loss;
}

std::pair<double, double> batch_loss(const MultiplexNetwork& net, const ModelParams& params,
                                     const ModelConfig& cfg, const Batch& batch) {
    Forward fwd = forward_all(net, params, cfg);
    double lpos = 0.0, lneg = 0.0;
    for (const TrainEdge& e : batch.positives)
        lpos += neg_log_sigmoid(
            dot(z_of(params, fwd, e.i, e.layer), z_of(params, fwd, e.j, e.layer)));
    for (const Edge& e : batch.negatives)
        lneg += neg_log_one_minus_sigmoid(
            dot(z_of(params, fwd, e.u, batch.target), z_of(params, fwd, e.v, batch.target)));
    return {lpos, lneg};
}

std::vector<Edge> sample_negatives(const MultiplexNetwork& net, LayerId target_layer,
                                   std::size_t count, std::uint64_t seed) {
    const std::size_t V = net.num_nodes();
    if (V < 2) throw std::invalid_argument("sample_negatives: need at least 2 nodes");
    const std::size_t all_pairs = V * (V - 1) / 2;
    const std::size_t candidates = all_pairs - net.edges(target_layer).size();
    if (count > candidates)
        throw std::invalid_argument("sample_negatives: requested " + std::to_string(count) +
                                    " negatives but only " + std::to_string(candidates) +
                                    " non-edges exist");
    rng::Stream rs(seed);
    std::vector<Edge> out;
    out.reserve(count);
    std::unordered_set<std::uint64_t> seen;
    std::size_t attempts = 0;
    const std::size_t max_attempts = std::max<std::size_t>(1000, 100 * count);
    while (out.size() < count) {
        if (++attempts > max_attempts)
            throw std::runtime_error(
                "sample_negatives: rejection budget exhausted (target layer near-complete)");
        NodeId u = static_cast<NodeId>(rs.below(V));
        NodeId v = static_cast<NodeId>(rs.below(V));
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (net.has_edge(target_layer, u, v)) continue;
        if (!seen.insert(edge_key(u, v)).second) continue;
        out.push_back({u, v});
    }
    return out;
}

namespace {

Gradients zero_gradients(const ModelParams& p) {
    Gradients g;
    g.layer_embed.assign(p.layer_embed.size(), 0.0);
    if (p.attributed()) {
        g.attr_transform.resize(p.attr_transform.size());
        for (std::size_t l = 0; l < p.attr_transform.size(); ++l)
            g.attr_transform[l] = Matrix(p.attr_transform[l].rows, p.attr_transform[l].cols);
    } else {
        g.base_neighbor_embed.assign(p.base_neighbor_embed.size(), 0.0);
    }
    g.w1.assign(p.w1.size(), 0.0);
    g.W2 = Matrix(p.W2.rows, p.W2.cols);
    g.W3 = Matrix(p.W3.rows, p.W3.cols);
    return g;
}

}  // namespace

Gradients gradients(const MultiplexNetwork& net, const ModelParams& params,
                    const ModelConfig& cfg, const Batch& batch) {
    const std::size_t V = params.num_nodes, L = params.num_layers, d = params.d,
                      d_a = params.d_a, K = cfg.hops;
    Forward fwd = forward_all(net, params, cfg);
    Gradients g = zero_gradients(params);

    // dL/dz accumulated per (node, layer); touched flags skip idle nodes.
    std::vector<double> g_z(V * L * d, 0.0);
    std::vector<char> touched(V, 0);
    auto gz_at = [&](NodeId i, LayerId l) {
        return g_z.data() + (static_cast<std::size_t>(i) * L + l) * d;
    };
    auto add_pair = [&](NodeId i, NodeId j, LayerId l, double coeff) {
        // coeff * d(z_i . z_j): coeff*z_j into g_z[i], coeff*z_i into g_z[j]
        std::vector<double> zi = z_of(params, fwd, i, l);
        std::vector<double> zj = z_of(params, fwd, j, l);
        double* gi = gz_at(i, l);
        double* gj = gz_at(j, l);
        for (std::size_t t = 0; t < d; ++t) {
            gi[t] += coeff * zj[t];
            gj[t] += coeff * zi[t];
        }
        touched[i] = touched[j] = 1;
    };
    for (const TrainEdge& e : batch.positives) {
        double s = score_edge(z_of(params, fwd, e.i, e.layer), z_of(params, fwd, e.j, e.layer));
        add_pair(e.i, e.j, e.layer, s - 1.0);  // d/dz of -log sigmoid
    }
    for (const Edge& e : batch.negatives) {
        double s = score_edge(z_of(params, fwd, e.u, batch.target),
                              z_of(params, fwd, e.v, batch.target));
        add_pair(e.u, e.v, batch.target, s);  // d/dz of -log(1 - sigmoid)
    }

    // Backward through z = c + x, then attention (Eqs. softmax/tanh path),
    // accumulating hop-K gradients for the aggregation backward below.
    std::vector<double> g_hK(V * L * d, 0.0);
    std::vector<double> g_c(d), g_m(d), g_a(L), g_logits(L);
    for (NodeId i = 0; i < V; ++i) {
        if (!touched[i]) continue;
        std::fill(g_c.begin(), g_c.end(), 0.0);
        for (LayerId l = 0; l < L; ++l) {
            const double* gz = gz_at(i, l);
            double* gx = g.layer_embed.data() + (static_cast<std::size_t>(i) * L + l) * d;
            for (std::size_t t = 0; t < d; ++t) {
                gx[t] += gz[t];
                g_c[t] += gz[t];
            }
        }
        // c = W3 m, m = H a
        const double* m = fwd.mixed.data() + static_cast<std::size_t>(i) * d;
        for (std::size_t r = 0; r < d; ++r) {
            double* gw3r = g.W3.row(r);
            for (std::size_t t = 0; t < d; ++t) gw3r[t] += g_c[r] * m[t];
        }
        std::fill(g_m.begin(), g_m.end(), 0.0);
        for (std::size_t r = 0; r < d; ++r) {
            const double* w3r = params.W3.row(r);
            for (std::size_t t = 0; t < d; ++t) g_m[t] += w3r[t] * g_c[r];
        }
        const double* a = fwd.attn_at(i);
        for (LayerId l = 0; l < L; ++l) {
            const double* col = fwd.h_at(K, i, l);
            double s = 0.0;
            for (std::size_t t = 0; t < d; ++t) s += col[t] * g_m[t];
            g_a[l] = s;
            double* ghk = g_hK.data() + (static_cast<std::size_t>(i) * L + l) * d;
            for (std::size_t t = 0; t < d; ++t) ghk[t] += a[l] * g_m[t];
        }
        // softmax backward
        double adot = 0.0;
        for (LayerId l = 0; l < L; ++l) adot += a[l] * g_a[l];
        for (LayerId l = 0; l < L; ++l) g_logits[l] = a[l] * (g_a[l] - adot);
        // logits = w1^T tanh(W2 H)
        const double* T = fwd.tanh_act.data() + static_cast<std::size_t>(i) * d_a * L;
        for (std::size_t r = 0; r < d_a; ++r) {
            double gw1 = 0.0;
            for (LayerId l = 0; l < L; ++l) gw1 += T[r * L + l] * g_logits[l];
            g.w1[r] += gw1;
        }
        for (std::size_t r = 0; r < d_a; ++r) {
            for (LayerId l = 0; l < L; ++l) {
                const double t = T[r * L + l];
                const double gs = params.w1[r] * g_logits[l] * (1.0 - t * t);
                if (gs == 0.0) continue;
                const double* col = fwd.h_at(K, i, l);
                double* gw2r = g.W2.row(r);
                double* ghk = g_hK.data() + (static_cast<std::size_t>(i) * L + l) * d;
                const double* w2r = params.W2.row(r);
                for (std::size_t c = 0; c < d; ++c) {
                    gw2r[c] += gs * col[c];
                    ghk[c] += gs * w2r[c];
                }
            }
        }
    }

    // Backward through K hops of mean aggregation, per layer.
    std::vector<double> g_prev;
    std::vector<double>* g_cur = &g_hK;
    for (std::size_t k = K; k >= 1; --k) {
        g_prev.assign(V * L * d, 0.0);
        for (LayerId l = 0; l < L; ++l) {
            for (NodeId i = 0; i < V; ++i) {
                const double* gi = g_cur->data() + (static_cast<std::size_t>(i) * L + l) * d;
                bool zero = true;
                for (std::size_t t = 0; t < d; ++t)
                    if (gi[t] != 0.0) {
                        zero = false;
                        break;
                    }
                if (zero) continue;
                const auto& nbrs = net.neighbors(i, l);
                if (nbrs.empty()) {
                    double* gs = g_prev.data() + (static_cast<std::size_t>(i) * L + l) * d;
                    for (std::size_t t = 0; t < d; ++t) gs[t] += gi[t];
                    continue;
                }
                const double inv = 1.0 / static_cast<double>(nbrs.size());
                for (NodeId j : nbrs) {
                    double* gj = g_prev.data() + (static_cast<std::size_t>(j) * L + l) * d;
                    for (std::size_t t = 0; t < d; ++t) gj[t] += inv * gi[t];
                }
            }
        }
        std::swap(*g_cur, g_prev);
    }
    // *g_cur now holds dL/dh^(0).
    if (params.attributed()) {
        for (NodeId i = 0; i < V; ++i) {
            const auto& r_i = net.attributes(i);
            for (LayerId l = 0; l < L; ++l) {
                const double* gh0 = g_cur->data() + (static_cast<std::size_t>(i) * L + l) * d;
                Matrix& gf = g.attr_transform[l];
                for (std::size_t r = 0; r < d; ++r) {
                    if (gh0[r] == 0.0) continue;
                    double* gfr = gf.row(r);
                    for (std::size_t c = 0; c < r_i.size(); ++c) gfr[c] += gh0[r] * r_i[c];
                }
            }
        }
    } else {
        g.base_neighbor_embed = std::move(*g_cur);
    }
    return g;
}

namespace {

void sgd_update(ModelParams& p, const Gradients& g, double lr) {
    auto upd = [lr](std::vector<double>& x, const std::vector<double>& gx) {
        for (std::size_t t = 0; t < x.size(); ++t) x[t] -= lr * gx[t];
    };
    upd(p.layer_embed, g.layer_embed);
    if (p.attributed()) {
        for (std::size_t l = 0; l < p.attr_transform.size(); ++l)
            upd(p.attr_transform[l].a, g.attr_transform[l].a);
    } else {
        upd(p.base_neighbor_embed, g.base_neighbor_embed);
    }
    upd(p.w1, g.w1);
    upd(p.W2.a, g.W2.a);
    upd(p.W3.a, g.W3.a);
}

// Current target-layer embeddings x~_{.,t}, the epoch-(k-1) bootstrap input
// to the similarity function.
// Current target-layer representations z~_{i,t} = c~_i + x~_{i,t} used as the
// sampler's similarity input. The bare layer embedding sees too few target
// edges to rank auxiliary pairs; the full representation carries the
// structure that the aggregation and attention path has already learned.
std::vector<std::vector<double>> target_representations(const MultiplexNetwork& net,
                                                        const ModelParams& p,
                                                        const ModelConfig& cfg, LayerId target) {
    Forward fwd = forward_all(net, p, cfg);
    std::vector<std::vector<double>> embeds(p.num_nodes);
    for (NodeId i = 0; i < p.num_nodes; ++i) embeds[i] = final_embedding(p, fwd, i, target);
    return embeds;
}

// LIAMNE-: keep the same per-layer counts as the similarity sampler would,
// chosen uniformly at random instead.
MultiplexNetwork random_sample(const MultiplexNetwork& original,
                               const std::vector<std::size_t>& keep_counts, LayerId target,
                               std::uint64_t seed) {
    std::vector<std::vector<Edge>> layers(original.num_layers());
    for (LayerId l = 0; l < original.num_layers(); ++l) {
        std::vector<Edge> edges = original.edges(l);
        if (l == target) {
            layers[l] = std::move(edges);
            continue;
        }
        rng::Stream rs(rng::mix(seed, l));
        rs.shuffle(edges);
        edges.resize(std::min(keep_counts[l], edges.size()));
        layers[l] = std::move(edges);
    }
    return original.with_layers(std::move(layers));
}

}  // namespace

TrainResult train(const MultiplexNetwork& net, const ModelConfig& model_cfg,
                  const TrainConfig& cfg) {
    cfg.validate();
    model_cfg.validate();
    const LayerId target = cfg.sampler.target_layer;
    if (target >= net.num_layers())
        throw std::invalid_argument("train: target layer out of range");

    ModelParams params = init_params(net.num_nodes(), net.num_layers(), model_cfg, cfg.seed,
                                     net.has_attributes() ? net.attr_dim() : 0);
    TrainLog log;

    MultiplexNetwork active = net;  // epoch 1 always trains on the unsampled network
    std::vector<Edge> cached_negatives;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();

        const bool sampling_due =
            cfg.variant != TrainVariant::no_sampling && epoch >= cfg.sampling_start_epoch &&
            (cfg.resample_each_epoch || epoch == cfg.sampling_start_epoch);
        if (sampling_due) {
            SamplerConfig scfg = cfg.sampler;
            scfg.seed = rng::substream(cfg.seed, "sampler", epoch);
            SampleResult res = undersample(net, target_representations(net, params, model_cfg, target), scfg);
            if (cfg.variant == TrainVariant::full) {
                active = std::move(*res.sampled_network);
            } else {
                active = random_sample(net, res.per_layer_kept, target,
                                       rng::substream(cfg.seed, "random-sample", epoch));
            }
        }

        std::vector<TrainEdge> positives;
        for (LayerId l = 0; l < active.num_layers(); ++l)
            for (const Edge& e : active.edges(l)) positives.push_back({l, e.u, e.v});
        rng::Stream shuffle_rs(rng::substream(cfg.seed, "shuffle", epoch));
        shuffle_rs.shuffle(positives);

        const std::size_t neg_count = cfg.neg_ratio * positives.size();
        std::vector<Edge> negatives;
        if (cfg.resample_negatives_each_epoch || cached_negatives.empty()) {
            negatives =
                sample_negatives(net, target, neg_count, rng::substream(cfg.seed, "negatives", epoch));
            if (!cfg.resample_negatives_each_epoch) cached_negatives = negatives;
        } else {
            negatives = cached_negatives;
        }

        const std::size_t bs = cfg.batch_size == 0 ? std::max<std::size_t>(positives.size(), 1)
                                                   : cfg.batch_size;
        double l_pos = 0.0, l_neg = 0.0;
        std::size_t neg_cursor = 0;
        std::size_t step = 0;
        for (std::size_t start = 0; start < std::max<std::size_t>(positives.size(), 1);
             start += bs, ++step) {
            Batch batch;
            batch.target = target;
            const std::size_t end = std::min(start + bs, positives.size());
            batch.positives.assign(positives.begin() + static_cast<std::ptrdiff_t>(start),
                                   positives.begin() + static_cast<std::ptrdiff_t>(end));
            // negatives are consumed in proportion; the last batch takes the rest
            std::size_t neg_take = end == positives.size()
                                       ? negatives.size() - neg_cursor
                                       : cfg.neg_ratio * batch.positives.size();
            neg_take = std::min(neg_take, negatives.size() - neg_cursor);
            batch.negatives.assign(negatives.begin() + static_cast<std::ptrdiff_t>(neg_cursor),
                                   negatives.begin() + static_cast<std::ptrdiff_t>(neg_cursor + neg_take));
            neg_cursor += neg_take;
            if (batch.positives.empty() && batch.negatives.empty()) break;

            auto [bp, bn] = batch_loss(active, params, model_cfg, batch);
            if (!std::isfinite(bp) || !std::isfinite(bn))
                throw TrainDivergence(epoch, step, "non-finite batch loss");
            l_pos += bp;
            l_neg += bn;
            Gradients g = gradients(active, params, model_cfg, batch);
            sgd_update(params, g, cfg.learning_rate);
            if (!params.all_finite())
                throw TrainDivergence(epoch, step, "non-finite parameter after update");
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.l_pos = l_pos;
        rec.l_neg = l_neg;
        rec.l_total = l_pos + l_neg;
        for (LayerId l = 0; l < active.num_layers(); ++l)
            rec.kept_edges.push_back(active.edges(l).size());
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                t0)
                          .count();
        log.epochs.push_back(std::move(rec));
    }
    return {std::move(params), std::move(log), std::move(active)};
}

}  // namespace liamne
