#include "liamne/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "liamne/rng.hpp"

namespace liamne {

void ModelConfig::validate() const {
    if (d < 1) throw std::invalid_argument("model dimension d must be >= 1");
    if (hops < 1) throw std::invalid_argument("aggregation depth must be >= 1");
}

bool ModelParams::all_finite() const {
    auto ok = [](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };
    if (!ok(layer_embed) || !ok(base_neighbor_embed) || !ok(w1) || !ok(W2.a) || !ok(W3.a))
        return false;
    for (const Matrix& m : attr_transform)
        if (!ok(m.a)) return false;
    return true;
}

ModelParams init_params(std::size_t num_nodes, std::size_t num_layers, const ModelConfig& cfg,
                        std::uint64_t seed, std::size_t attr_dim) {
    cfg.validate();
    ModelParams p;
    p.num_nodes = num_nodes;
    p.num_layers = num_layers;
    p.d = cfg.d;
    p.d_a = cfg.attention_dim();
    p.hops = cfg.hops;
    p.seed = seed;

    const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.d));
    rng::Stream rs(rng::substream(seed, "init"));
    auto fill = [&](std::vector<double>& v, std::size_t n) {
        v.resize(n);
        for (double& x : v) x = rs.uniform(-bound, bound);
    };

    fill(p.layer_embed, num_nodes * num_layers * cfg.d);
    if (attr_dim == 0) {
        fill(p.base_neighbor_embed, num_nodes * num_layers * cfg.d);
    } else {
        p.attr_transform.resize(num_layers);
        for (auto& m : p.attr_transform) {
            m = Matrix(cfg.d, attr_dim);
            fill(m.a, cfg.d * attr_dim);
        }
    }
    fill(p.w1, p.d_a);
    p.W2 = Matrix(p.d_a, cfg.d);
    fill(p.W2.a, p.d_a * cfg.d);
    p.W3 = Matrix(cfg.d, cfg.d);
    fill(p.W3.a, cfg.d * cfg.d);
    return p;
}

namespace {

// Fills out (V*L*d) with h^(0): trainable tensor directly, or f_l(r_i).
std::vector<double> compute_h0(const MultiplexNetwork& net, const ModelParams& params) {
    const std::size_t V = params.num_nodes, L = params.num_layers, d = params.d;
    if (!params.attributed()) return params.base_neighbor_embed;
    std::vector<double> h0(V * L * d, 0.0);
    for (NodeId i = 0; i < V; ++i) {
        const auto& r = net.attributes(i);
        for (LayerId l = 0; l < L; ++l) {
            const Matrix& f = params.attr_transform[l];
            double* out = h0.data() + (static_cast<std::size_t>(i) * L + l) * d;
            for (std::size_t row = 0; row < d; ++row) {
                const double* fr = f.row(row);
                double s = 0.0;
                for (std::size_t c = 0; c < r.size(); ++c) s += fr[c] * r[c];
                out[row] = s;
            }
        }
    }
    return h0;
}

}  // namespace

Forward forward_all(const MultiplexNetwork& net, const ModelParams& params,
                    const ModelConfig& cfg) {
    const std::size_t V = params.num_nodes, L = params.num_layers, d = params.d,
                      d_a = params.d_a, K = cfg.hops;
    if (net.num_nodes() != V || net.num_layers() != L)
        throw std::invalid_argument("forward_all: network/params shape mismatch");

    Forward f;
    f.num_nodes = V;
    f.num_layers = L;
    f.d = d;
    f.d_a = d_a;
    f.hops = K;
    f.h.resize(K + 1);
    f.h[0] = compute_h0(net, params);

    // Mean aggregation, K hops, each layer independently. Isolated nodes
    // carry their own previous-hop value forward.
    for (std::size_t k = 1; k <= K; ++k) {
        f.h[k].assign(V * L * d, 0.0);
        for (LayerId l = 0; l < L; ++l) {
            for (NodeId i = 0; i < V; ++i) {
                double* out = f.h[k].data() + (static_cast<std::size_t>(i) * L + l) * d;
                const auto& nbrs = net.neighbors(i, l);
                if (nbrs.empty()) {
                    const double* self = f.h_at(k - 1, i, l);
                    std::memcpy(out, self, d * sizeof(double));
                    continue;
                }
                for (NodeId j : nbrs) {
                    const double* hj = f.h_at(k - 1, j, l);
                    for (std::size_t t = 0; t < d; ++t) out[t] += hj[t];
                }
                const double inv = 1.0 / static_cast<double>(nbrs.size());
                for (std::size_t t = 0; t < d; ++t) out[t] *= inv;
            }
        }
    }

    // Attention over layers and common embedding per node.
    f.tanh_act.assign(V * d_a * L, 0.0);
    f.attn.assign(V * L, 0.0);
    f.mixed.assign(V * d, 0.0);
    f.common.assign(V * d, 0.0);
    std::vector<double> logits(L);
    for (NodeId i = 0; i < V; ++i) {
        double* T = f.tanh_act.data() + static_cast<std::size_t>(i) * d_a * L;
        for (LayerId l = 0; l < L; ++l) {
            const double* col = f.h_at(K, i, l);  // H_i column l
            for (std::size_t r = 0; r < d_a; ++r) {
                const double* w2r = params.W2.row(r);
                double s = 0.0;
                for (std::size_t c = 0; c < d; ++c) s += w2r[c] * col[c];
                T[r * L + l] = std::tanh(s);
            }
        }
        for (LayerId l = 0; l < L; ++l) {
            double s = 0.0;
            for (std::size_t r = 0; r < d_a; ++r) s += params.w1[r] * T[r * L + l];
            logits[l] = s;
        }
        std::vector<double> a = softmax(logits);
        double* attn = f.attn.data() + static_cast<std::size_t>(i) * L;
        double* m = f.mixed.data() + static_cast<std::size_t>(i) * d;
        for (LayerId l = 0; l < L; ++l) {
            attn[l] = a[l];
            const double* col = f.h_at(K, i, l);
            for (std::size_t t = 0; t < d; ++t) m[t] += a[l] * col[t];
        }
        double* c = f.common.data() + static_cast<std::size_t>(i) * d;
        for (std::size_t r = 0; r < d; ++r) {
            const double* w3r = params.W3.row(r);
            double s = 0.0;
            for (std::size_t t = 0; t < d; ++t) s += w3r[t] * m[t];
            c[r] = s;
        }
    }
    return f;
}

std::vector<double> final_embedding(const ModelParams& params, const Forward& fwd, NodeId node,
                                    LayerId layer) {
    std::vector<double> z(params.d);
    const double* c = fwd.common_at(node);
    const double* x = params.layer_embed_at(node, layer);
    for (std::size_t t = 0; t < params.d; ++t) z[t] = c[t] + x[t];
    return z;
}

double score_edge(const std::vector<double>& z_i, const std::vector<double>& z_j) {
    return sigmoid(dot(z_i, z_j));
}

Matrix aggregate_neighbors(const MultiplexNetwork& net, const ModelParams& params,
                           const ModelConfig& cfg, NodeId node) {
    Forward f = forward_all(net, params, cfg);
    Matrix H(params.d, params.num_layers);
    for (LayerId l = 0; l < params.num_layers; ++l) {
        const double* col = f.h_at(cfg.hops, node, l);
        for (std::size_t r = 0; r < params.d; ++r) H(r, l) = col[r];
    }
    return H;
}

std::vector<double> attention_weights(const ModelParams& params, const Matrix& H_i) {
    const std::size_t L = H_i.cols;
    std::vector<double> logits(L, 0.0);
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t r = 0; r < params.d_a; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < params.d; ++c) s += params.W2(r, c) * H_i(c, l);
            logits[l] += params.w1[r] * std::tanh(s);
        }
    }
    return softmax(logits);
}

std::vector<double> common_embedding(const ModelParams& params, const Matrix& H_i,
                                     const std::vector<double>& a_i) {
    std::vector<double> m(params.d, 0.0);
    for (std::size_t l = 0; l < H_i.cols; ++l)
        for (std::size_t r = 0; r < params.d; ++r) m[r] += H_i(r, l) * a_i[l];
    return matvec(params.W3, m);
}

// Checkpoint layout: magic, u64 dims (V, L, d, d_a, hops, seed, attributed,
// attr_dim), then raw little-endian doubles for each tensor in declaration
// order.
namespace {
constexpr char kMagic[8] = {'L', 'I', 'A', 'M', 'N', 'E', 'C', '1'};

void write_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint64_t read_u64(std::ifstream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
void write_vec(std::ofstream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}
void read_vec(std::ifstream& in, std::vector<double>& v, std::size_t n) {
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
}
}  // namespace

void save_checkpoint(const ModelParams& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_u64(out, p.num_nodes);
    write_u64(out, p.num_layers);
    write_u64(out, p.d);
    write_u64(out, p.d_a);
    write_u64(out, p.hops);
    write_u64(out, p.seed);
    write_u64(out, p.attributed() ? 1 : 0);
    write_u64(out, p.attributed() ? p.attr_transform[0].cols : 0);
    write_vec(out, p.layer_embed);
    if (p.attributed()) {
        for (const Matrix& m : p.attr_transform) write_vec(out, m.a);
    } else {
        write_vec(out, p.base_neighbor_embed);
    }
    write_vec(out, p.w1);
    write_vec(out, p.W2.a);
    write_vec(out, p.W3.a);
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    ModelParams p;
    p.num_nodes = read_u64(in);
    p.num_layers = read_u64(in);
    p.d = read_u64(in);
    p.d_a = read_u64(in);
    p.hops = read_u64(in);
    p.seed = read_u64(in);
    const bool attributed = read_u64(in) != 0;
    const std::size_t attr_dim = read_u64(in);
    read_vec(in, p.layer_embed, p.num_nodes * p.num_layers * p.d);
    if (attributed) {
        p.attr_transform.resize(p.num_layers);
        for (Matrix& m : p.attr_transform) {
            m = Matrix(p.d, attr_dim);
            read_vec(in, m.a, p.d * attr_dim);
        }
    } else {
        read_vec(in, p.base_neighbor_embed, p.num_nodes * p.num_layers * p.d);
    }
    read_vec(in, p.w1, p.d_a);
    p.W2 = Matrix(p.d_a, p.d);
    read_vec(in, p.W2.a, p.d_a * p.d);
    p.W3 = Matrix(p.d, p.d);
    read_vec(in, p.W3.a, p.d * p.d);
    if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    return p;
}

}  // namespace liamne
