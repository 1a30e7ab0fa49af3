#include "liamne/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "liamne/linalg.hpp"
#include "liamne/rng.hpp"

namespace liamne {

namespace {

// Distinct uniform non-edges of the target layer, also avoiding `exclude`.
std::vector<Edge> draw_negatives(const MultiplexNetwork& net, LayerId target, std::size_t count,
                                 std::unordered_set<std::uint64_t>& exclude, rng::Stream& rs) {
    const std::size_t V = net.num_nodes();
    std::vector<Edge> out;
    std::size_t attempts = 0;
    const std::size_t max_attempts = std::max<std::size_t>(1000, 200 * count);
    while (out.size() < count) {
        if (++attempts > max_attempts)
            throw std::runtime_error("split_edges: cannot find enough negative pairs");
        NodeId u = static_cast<NodeId>(rs.below(V));
        NodeId v = static_cast<NodeId>(rs.below(V));
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (net.has_edge(target, u, v)) continue;
        if (!exclude.insert(edge_key(u, v)).second) continue;
        out.push_back({u, v});
    }
    return out;
}

}  // namespace

SplitManifest split_edges(const MultiplexNetwork& net, LayerId target_layer, SplitRatios ratios,
                          std::uint64_t seed) {
    std::vector<Edge> edges = net.edges(target_layer);
    if (edges.size() < 10)
        throw std::invalid_argument("split_edges: target layer too small (" +
                                    std::to_string(edges.size()) + " edges, need >= 10)");
    rng::Stream rs(rng::substream(seed, "split"));
    rs.shuffle(edges);

    const auto n = edges.size();
    const std::size_t n_valid = static_cast<std::size_t>(std::floor(ratios.valid * static_cast<double>(n)));
    const std::size_t n_test = static_cast<std::size_t>(std::floor(ratios.test * static_cast<double>(n)));

    SplitManifest m;
    m.target_layer = target_layer;
    m.seed = seed;
    m.test_pos.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_test));
    m.valid_pos.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_test),
                       edges.begin() + static_cast<std::ptrdiff_t>(n_test + n_valid));
    m.train_pos.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_test + n_valid), edges.end());

    std::unordered_set<std::uint64_t> used;
    rng::Stream neg_rs(rng::substream(seed, "split-negatives"));
    m.valid_neg = draw_negatives(net, target_layer, m.valid_pos.size(), used, neg_rs);
    m.test_neg = draw_negatives(net, target_layer, m.test_pos.size(), used, neg_rs);
    return m;
}

MultiplexNetwork training_network(const MultiplexNetwork& net, const SplitManifest& manifest) {
    std::unordered_set<std::uint64_t> held;
    for (const Edge& e : manifest.valid_pos) held.insert(edge_key(e.u, e.v));
    for (const Edge& e : manifest.test_pos) held.insert(edge_key(e.u, e.v));
    std::vector<Edge> kept;
    for (const Edge& e : net.edges(manifest.target_layer))
        if (!held.count(edge_key(e.u, e.v))) kept.push_back(e);
    return net.with_layer(manifest.target_layer, std::move(kept));
}

double auc(const std::vector<double>& scores_pos, const std::vector<double>& scores_neg) {
    if (scores_pos.empty() || scores_neg.empty())
        throw std::invalid_argument("auc: both score lists must be non-empty");
    // Rank-based Mann-Whitney with midranks for ties.
    struct Item {
        double score;
        bool positive;
    };
    std::vector<Item> items;
    items.reserve(scores_pos.size() + scores_neg.size());
    for (double s : scores_pos) items.push_back({s, true});
    for (double s : scores_neg) items.push_back({s, false});
    std::sort(items.begin(), items.end(),
              [](const Item& a, const Item& b) { return a.score < b.score; });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j < items.size() && items[j].score == items[i].score) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (items[k].positive) rank_sum_pos += midrank;
        i = j;
    }
    const double np = static_cast<double>(scores_pos.size());
    const double nn = static_cast<double>(scores_neg.size());
    const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
    return u / (np * nn);
}

EvalReport predict_links(const MultiplexNetwork& net, const ModelParams& params,
                         const ModelConfig& cfg, const SplitManifest& manifest) {
    Forward fwd = forward_all(net, params, cfg);
    auto score_pairs = [&](const std::vector<Edge>& pairs) {
        std::vector<double> scores;
        scores.reserve(pairs.size());
        for (const Edge& e : pairs)
            scores.push_back(
                score_edge(final_embedding(params, fwd, e.u, manifest.target_layer),
                           final_embedding(params, fwd, e.v, manifest.target_layer)));
        return scores;
    };
    EvalReport rep;
    rep.train_count = manifest.train_pos.size();
    rep.valid_count = manifest.valid_pos.size();
    rep.test_count = manifest.test_pos.size();
    rep.auc = auc(score_pairs(manifest.test_pos), score_pairs(manifest.test_neg));
    if (!manifest.valid_pos.empty())
        rep.valid_auc = auc(score_pairs(manifest.valid_pos), score_pairs(manifest.valid_neg));
    return rep;
}

double macro_f1(const std::vector<int>& truth, const std::vector<int>& pred,
                std::size_t num_classes) {
    double sum = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const bool t = truth[i] == static_cast<int>(c);
            const bool p = pred[i] == static_cast<int>(c);
            tp += t && p;
            fp += !t && p;
            fn += t && !p;
        }
        const double denom = static_cast<double>(2 * tp + fp + fn);
        sum += denom > 0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    }
    return sum / static_cast<double>(num_classes);
}

double micro_f1(const std::vector<int>& truth, const std::vector<int>& pred,
                std::size_t num_classes) {
    // Single-label multiclass: micro precision = micro recall = accuracy.
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const bool t = truth[i] == static_cast<int>(c);
            const bool p = pred[i] == static_cast<int>(c);
            tp += t && p;
            fp += !t && p;
            fn += t && !p;
        }
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    return denom > 0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
}

std::vector<int> softmax_regression(const std::vector<std::vector<double>>& x_train,
                                    const std::vector<int>& y_train,
                                    const std::vector<std::vector<double>>& x_test,
                                    std::size_t num_classes, const LogisticConfig& cfg) {
    if (x_train.empty()) throw std::invalid_argument("softmax_regression: empty training set");
    const std::size_t dim = x_train[0].size();
    // Weights (C x dim) plus bias per class; zero init keeps this deterministic.
    Matrix w(num_classes, dim);
    std::vector<double> b(num_classes, 0.0);
    const double inv_n = 1.0 / static_cast<double>(x_train.size());

    std::vector<double> logits(num_classes);
    Matrix gw(num_classes, dim);
    std::vector<double> gb(num_classes);
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        gw.fill(0.0);
        std::fill(gb.begin(), gb.end(), 0.0);
        for (std::size_t i = 0; i < x_train.size(); ++i) {
            const auto& x = x_train[i];
            for (std::size_t c = 0; c < num_classes; ++c) {
                const double* wr = w.row(c);
                double s = b[c];
                for (std::size_t t = 0; t < dim; ++t) s += wr[t] * x[t];
                logits[c] = s;
            }
            std::vector<double> p = softmax(logits);
            for (std::size_t c = 0; c < num_classes; ++c) {
                const double err = (p[c] - (y_train[i] == static_cast<int>(c) ? 1.0 : 0.0)) * inv_n;
                double* gr = gw.row(c);
                for (std::size_t t = 0; t < dim; ++t) gr[t] += err * x[t];
                gb[c] += err;
            }
        }
        for (std::size_t c = 0; c < num_classes; ++c) {
            double* wr = w.row(c);
            const double* gr = gw.row(c);
            for (std::size_t t = 0; t < dim; ++t)
                wr[t] -= cfg.learning_rate * (gr[t] + cfg.l2 * wr[t]);
            b[c] -= cfg.learning_rate * gb[c];
        }
    }

    std::vector<int> pred;
    pred.reserve(x_test.size());
    for (const auto& x : x_test) {
        int best = 0;
        double best_s = -1e300;
        for (std::size_t c = 0; c < num_classes; ++c) {
            const double* wr = w.row(c);
            double s = b[c];
            for (std::size_t t = 0; t < dim; ++t) s += wr[t] * x[t];
            if (s > best_s) {
                best_s = s;
                best = static_cast<int>(c);
            }
        }
        pred.push_back(best);
    }
    return pred;
}

EvalReport classify_nodes(const MultiplexNetwork& net, const ModelParams& params,
                          const ModelConfig& cfg, std::uint64_t split_seed) {
    if (!net.has_labels()) throw std::invalid_argument("classify_nodes: network has no labels");
    const std::size_t num_classes = net.num_classes();
    if (num_classes < 2) throw std::invalid_argument("classify_nodes: need at least 2 classes");

    Forward fwd = forward_all(net, params, cfg);
    // Feature per node: mean over layers of z~_{i,l}.
    auto feature = [&](NodeId i) {
        std::vector<double> f(params.d, 0.0);
        for (LayerId l = 0; l < params.num_layers; ++l) {
            std::vector<double> z = final_embedding(params, fwd, i, l);
            for (std::size_t t = 0; t < params.d; ++t) f[t] += z[t];
        }
        const double inv = 1.0 / static_cast<double>(params.num_layers);
        for (double& v : f) v *= inv;
        return f;
    };

    std::vector<NodeId> labeled;
    for (NodeId i = 0; i < net.num_nodes(); ++i)
        if (net.label(i) >= 0) labeled.push_back(i);
    rng::Stream rs(rng::substream(split_seed, "nc-split"));
    rs.shuffle(labeled);
    const std::size_t n = labeled.size();
    const std::size_t n_test = n / 10;
    const std::size_t n_valid = n / 10;
    if (n - n_test - n_valid == 0 || n_test == 0)
        throw std::invalid_argument("classify_nodes: too few labeled nodes to split");

    std::vector<std::vector<double>> x_train, x_test;
    std::vector<int> y_train, y_test;
    for (std::size_t k = 0; k < n; ++k) {
        NodeId i = labeled[k];
        if (k < n_test) {
            x_test.push_back(feature(i));
            y_test.push_back(net.label(i));
        } else if (k < n_test + n_valid) {
            // validation slice reserved for model selection; unused here
        } else {
            x_train.push_back(feature(i));
            y_train.push_back(net.label(i));
        }
    }

    std::vector<int> pred = softmax_regression(x_train, y_train, x_test, num_classes);
    EvalReport rep;
    rep.train_count = x_train.size();
    rep.valid_count = n_valid;
    rep.test_count = x_test.size();
    rep.macro_f1 = macro_f1(y_test, pred, num_classes);
    rep.micro_f1 = micro_f1(y_test, pred, num_classes);
    return rep;
}

}  // namespace liamne
