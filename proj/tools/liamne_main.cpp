// liamne: layer-imbalance-aware multiplex network embedding toolkit.
//
// Subcommands: stats, sample, synth, train, eval-lp, eval-nc, sweep.
// Exit codes: 0 ok, 1 validation error, 2 runtime error / divergence.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "liamne/config.hpp"
#include "liamne/evaluation.hpp"
#include "liamne/graph.hpp"
#include "liamne/model.hpp"
#include "liamne/rng.hpp"
#include "liamne/sampler.hpp"
#include "liamne/synth.hpp"
#include "liamne/trainer.hpp"

namespace {

using namespace liamne;

std::optional<std::string> opt_path(const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd ms;
    if (xs.empty()) return ms;
    for (double x : xs) ms.mean += x;
    ms.mean /= static_cast<double>(xs.size());
    for (double x : xs) ms.stddev += (x - ms.mean) * (x - ms.mean);
    ms.stddev = std::sqrt(ms.stddev / static_cast<double>(xs.size()));
    return ms;
}

ModelConfig config_from_checkpoint(const ModelParams& p) {
    ModelConfig cfg;
    cfg.d = p.d;
    cfg.d_a = p.d_a;
    cfg.hops = p.hops;
    return cfg;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    return out;
}

// ---------------------------------------------------------------- stats ----

void cmd_stats(const std::string& data, LayerId target, const std::string& csv_path) {
    MultiplexNetwork net = load_multiplex(data);
    LayerStats st = compute_stats(net, target);
    std::cout << "nodes " << net.num_nodes() << " layers " << net.num_layers() << "\n";
    for (std::size_t l = 0; l < st.edges_per_layer.size(); ++l)
        std::cout << "layer " << l << ": " << st.edges_per_layer[l] << " edges"
                  << (l == target ? "  (target)" : "") << "\n";
    std::cout << "densest layer " << st.densest << " (" << st.edges_per_layer[st.densest]
              << "), sparsest layer " << st.sparsest << " (" << st.edges_per_layer[st.sparsest]
              << ")\n";
    std::printf("imbalance ratio  %.2f\n", st.imbalance_ratio);
    std::printf("target density   %.3g\n", st.target_density);
    if (!csv_path.empty()) {
        auto out = open_out(csv_path);
        out << "nodes,layers,target_layer,edges_densest,edges_sparsest,edges_target,"
               "imbalance_ratio,target_density\n";
        out << net.num_nodes() << "," << net.num_layers() << "," << target << ","
            << st.edges_per_layer[st.densest] << "," << st.edges_per_layer[st.sparsest] << ","
            << st.edges_per_layer[target] << "," << st.imbalance_ratio << ","
            << st.target_density << "\n";
    }
}

// --------------------------------------------------------------- sample ----

const char* verdict_name(SampleVerdict v) {
    switch (v) {
        case SampleVerdict::kept_in_target: return "kept-in-target";
        case SampleVerdict::kept_high: return "kept-high";
        case SampleVerdict::kept_prob: return "kept-prob";
        case SampleVerdict::dropped_prob: return "dropped-prob";
        case SampleVerdict::dropped_low: return "dropped-low";
    }
    return "?";
}

void cmd_sample(const std::string& data, const std::string& checkpoint, const std::string& out,
                double alpha, double beta, LayerId target, std::uint64_t seed,
                bool emit_decisions, const std::string& decisions_path) {
    MultiplexNetwork net = load_multiplex(data);
    ModelParams params = load_checkpoint(checkpoint);
    if (params.num_nodes != net.num_nodes() || params.num_layers != net.num_layers())
        throw std::invalid_argument("checkpoint shape does not match the network");
    // similarity over the full target-layer representations z~ = c~ + x~
    Forward fwd = forward_all(net, params, config_from_checkpoint(params));
    std::vector<std::vector<double>> embeds(net.num_nodes());
    for (NodeId i = 0; i < net.num_nodes(); ++i)
        embeds[i] = final_embedding(params, fwd, i, target);
    SamplerConfig cfg{alpha, beta, target, seed};
    SampleResult res = undersample(net, embeds, cfg, emit_decisions);
    res.sampled_network->save(out);
    for (std::size_t l = 0; l < res.per_layer_kept.size(); ++l)
        std::cout << "layer " << l << ": kept " << res.per_layer_kept[l] << " / "
                  << net.edges(static_cast<LayerId>(l)).size()
                  << (l == target ? "  (target, unchanged)" : "") << "\n";
    if (emit_decisions) {
        auto dout = open_out(decisions_path.empty() ? out + ".decisions.csv" : decisions_path);
        dout << "layer,u,v,similarity,verdict\n";
        for (const SampleDecision& d : res.decisions)
            dout << d.layer << "," << d.edge.u << "," << d.edge.v << "," << d.similarity << ","
                 << verdict_name(d.verdict) << "\n";
    }
}

// ---------------------------------------------------------------- synth ----

void cmd_synth(const SynthConfig& cfg, const std::string& out_prefix) {
    MultiplexNetwork net = generate(cfg);
    net.save(out_prefix + ".edges");
    net.save_labels(out_prefix + ".labels");
    LayerStats st = compute_stats(net, 0);
    std::cout << "wrote " << out_prefix << ".edges (" << net.num_nodes() << " nodes, "
              << net.num_layers() << " layers) and " << out_prefix << ".labels\n";
    std::printf("imbalance ratio  %.2f\n", st.imbalance_ratio);
}

// ---------------------------------------------------------------- train ----

void cmd_train(const std::string& data, const std::string& attrs, const std::string& labels,
               const RunConfig& cfg, const std::string& out_checkpoint,
               const std::string& log_path) {
    cfg.validate();
    MultiplexNetwork net = load_multiplex(data, opt_path(attrs), opt_path(labels));
    auto [params, log, final_net] = train(net, cfg.model, cfg.train);
    if (!out_checkpoint.empty()) save_checkpoint(params, out_checkpoint);
    if (!log_path.empty()) log.write_csv(log_path);
    if (!log.epochs.empty()) {
        const EpochRecord& last = log.epochs.back();
        std::printf("epoch %zu  l_pos %.4f  l_neg %.4f  l_total %.4f\n", last.epoch, last.l_pos,
                    last.l_neg, last.l_total);
    }
    if (!out_checkpoint.empty()) std::cout << "checkpoint written to " << out_checkpoint << "\n";
}

// -------------------------------------------------------------- eval-lp ----

struct LpResult {
    MeanStd auc;
    MeanStd valid_auc;
    std::size_t test_count = 0;
};

LpResult run_eval_lp(const MultiplexNetwork& net, LayerId target, std::uint64_t split_seed,
                     std::size_t repeats, const RunConfig* train_cfg,
                     const ModelParams* checkpoint) {
    SplitManifest manifest = split_edges(net, target, {}, split_seed);
    MultiplexNetwork tn = training_network(net, manifest);
    std::vector<double> aucs, valid_aucs;
    if (checkpoint) {
        EvalReport rep = predict_links(tn, *checkpoint, config_from_checkpoint(*checkpoint),
                                       manifest);
        aucs.push_back(rep.auc);
        valid_aucs.push_back(rep.valid_auc);
    } else {
        for (std::size_t rep = 0; rep < repeats; ++rep) {
            RunConfig cfg = *train_cfg;
            cfg.train.seed = rng::mix(cfg.train.seed, rep);
            cfg.train.sampler.target_layer = target;
            auto [params, log, final_net] = train(tn, cfg.model, cfg.train);
            EvalReport r = predict_links(final_net, params, cfg.model, manifest);
            aucs.push_back(r.auc);
            valid_aucs.push_back(r.valid_auc);
        }
    }
    LpResult res;
    res.auc = mean_std(aucs);
    res.valid_auc = mean_std(valid_aucs);
    res.test_count = manifest.test_pos.size();
    return res;
}

void cmd_eval_lp(const std::string& data, LayerId target, std::uint64_t split_seed,
                 std::size_t repeats, const std::string& config_path, const RunConfig& cfg,
                 const std::string& checkpoint_path, const std::string& csv_path) {
    if (config_path.empty() && checkpoint_path.empty())
        throw std::invalid_argument("eval-lp: provide --checkpoint or --config");
    MultiplexNetwork net = load_multiplex(data);
    std::optional<ModelParams> ckpt;
    if (!checkpoint_path.empty()) ckpt = load_checkpoint(checkpoint_path);
    LpResult res = run_eval_lp(net, target, split_seed, repeats,
                               checkpoint_path.empty() ? &cfg : nullptr,
                               ckpt ? &*ckpt : nullptr);
    std::printf("link prediction on layer %u: test AUC %.4f (std %.4f, %zu runs, %zu test pairs)\n",
                target, res.auc.mean, res.auc.stddev, checkpoint_path.empty() ? repeats : 1,
                res.test_count);
    std::printf("validation AUC %.4f\n", res.valid_auc.mean);
    if (!csv_path.empty()) {
        auto out = open_out(csv_path);
        out << "target_layer,split_seed,repeats,auc_mean,auc_std,valid_auc_mean,test_pairs\n";
        out << target << "," << split_seed << "," << (checkpoint_path.empty() ? repeats : 1) << ","
            << res.auc.mean << "," << res.auc.stddev << "," << res.valid_auc.mean << ","
            << res.test_count << "\n";
    }
}

// -------------------------------------------------------------- eval-nc ----

void cmd_eval_nc(const std::string& data, const std::string& labels, LayerId target,
                 std::uint64_t split_seed, std::size_t repeats, const std::string& config_path,
                 const RunConfig& cfg, const std::string& checkpoint_path,
                 const std::string& csv_path) {
    if (config_path.empty() && checkpoint_path.empty())
        throw std::invalid_argument("eval-nc: provide --checkpoint or --config");
    MultiplexNetwork net = load_multiplex(data, std::nullopt, opt_path(labels));
    if (!net.has_labels())
        throw std::invalid_argument("eval-nc: no labels (pass --labels or a labeled edge file)");
    std::vector<double> macro, micro;
    if (!checkpoint_path.empty()) {
        ModelParams params = load_checkpoint(checkpoint_path);
        EvalReport rep = classify_nodes(net, params, config_from_checkpoint(params), split_seed);
        macro.push_back(rep.macro_f1);
        micro.push_back(rep.micro_f1);
    } else {
        for (std::size_t rep = 0; rep < repeats; ++rep) {
            RunConfig c = cfg;
            c.train.seed = rng::mix(c.train.seed, rep);
            c.train.sampler.target_layer = target;
            auto [params, log, final_net] = train(net, c.model, c.train);
            EvalReport r = classify_nodes(final_net, params, c.model, split_seed);
            macro.push_back(r.macro_f1);
            micro.push_back(r.micro_f1);
        }
    }
    MeanStd ma = mean_std(macro), mi = mean_std(micro);
    std::printf("node classification: Macro-F1 %.4f (std %.4f)  Micro-F1 %.4f (std %.4f)\n",
                ma.mean, ma.stddev, mi.mean, mi.stddev);
    if (!csv_path.empty()) {
        auto out = open_out(csv_path);
        out << "split_seed,repeats,macro_f1_mean,macro_f1_std,micro_f1_mean,micro_f1_std\n";
        out << split_seed << "," << macro.size() << "," << ma.mean << "," << ma.stddev << ","
            << mi.mean << "," << mi.stddev << "\n";
    }
}

// ---------------------------------------------------------------- sweep ----

void cmd_sweep(const std::string& data, LayerId target, const std::string& axis,
               const std::vector<double>& values, std::size_t repeats, const RunConfig& base_cfg,
               std::uint64_t split_seed, const std::string& out_csv) {
    MultiplexNetwork net = load_multiplex(data);
    auto out = open_out(out_csv);
    out << "axis,value,imbalance_ratio,auc_mean,auc_std,status\n";
    for (double value : values) {
        try {
            RunConfig cfg = base_cfg;
            cfg.train.sampler.target_layer = target;
            MultiplexNetwork current = net;
            if (axis == "keep_fraction") {
                current = sparsify_target(net, target, value, split_seed);
            } else if (axis == "alpha") {
                cfg.train.sampler.alpha = value;
            } else if (axis == "beta") {
                cfg.train.sampler.beta = value;
            } else if (axis == "dimension") {
                cfg.model.d = static_cast<std::size_t>(value);
            } else {
                throw std::invalid_argument(
                    "sweep: axis must be keep_fraction | alpha | beta | dimension");
            }
            cfg.validate();
            const double mu = compute_stats(current, target).imbalance_ratio;
            std::vector<double> aucs;
            for (std::size_t rep = 0; rep < repeats; ++rep) {
                LpResult r = run_eval_lp(current, target, rng::mix(split_seed, rep), 1, &cfg,
                                         nullptr);
                aucs.push_back(r.auc.mean);
            }
            MeanStd ms = mean_std(aucs);
            out << axis << "," << value << "," << mu << "," << ms.mean << "," << ms.stddev
                << ",ok\n";
            std::printf("%s=%g  mu %.3f  AUC %.4f +- %.4f\n", axis.c_str(), value, mu, ms.mean,
                        ms.stddev);
        } catch (const std::exception& e) {
            out << axis << "," << value << ",,,," << "error: " << e.what() << "\n";
            std::cerr << axis << "=" << value << " failed: " << e.what() << "\n";
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LIAMNE multiplex network embedding toolkit"};
    app.require_subcommand(1);

    // shared option storage
    std::string data, attrs, labels, config_path, checkpoint, out_path, log_path, csv_path;
    std::string decisions_path, axis, variant_str;
    LayerId target = 0;
    std::uint64_t seed = 0, split_seed = 0;
    std::size_t repeats = 3;
    bool emit_decisions = false;

    RunConfig cfg;

    auto add_config_overrides = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value config file");
        sub->add_option("--epochs", cfg.train.epochs, "training epochs");
        sub->add_option("--learning-rate", cfg.train.learning_rate, "SGD learning rate");
        sub->add_option("--neg-ratio", cfg.train.neg_ratio, "negatives per positive edge");
        sub->add_option("--batch-size", cfg.train.batch_size, "edges per step (0 = full batch)");
        sub->add_option("--seed", cfg.train.seed, "master RNG seed");
        sub->add_option("--sampling-start-epoch", cfg.train.sampling_start_epoch,
                        "first epoch that under-samples");
        sub->add_option("--alpha", cfg.train.sampler.alpha, "drop threshold");
        sub->add_option("--beta", cfg.train.sampler.beta, "keep threshold");
        sub->add_option("--variant", variant_str, "full | random-sampling | no-sampling");
        sub->add_option("--d", cfg.model.d, "embedding dimension");
        sub->add_option("--d-a", cfg.model.d_a, "attention hidden size (0 = d)");
        sub->add_option("--hops", cfg.model.hops, "aggregation depth");
        sub->add_flag("--no-resample-each-epoch",
                      [&](std::int64_t) { cfg.train.resample_each_epoch = false; },
                      "sample once at the start epoch instead of every epoch");
        sub->add_flag("--fixed-negatives",
                      [&](std::int64_t) { cfg.train.resample_negatives_each_epoch = false; },
                      "draw negatives once and reuse them every epoch");
    };

    // stats
    auto* s_stats = app.add_subcommand("stats", "per-layer counts, imbalance ratio, density");
    s_stats->add_option("--data", data, "edge file")->required();
    s_stats->add_option("--target-layer", target, "target layer id");
    s_stats->add_option("--csv", csv_path, "also write a CSV row");

    // sample
    auto* s_sample = app.add_subcommand("sample", "under-sample auxiliary layers");
    s_sample->add_option("--data", data, "edge file")->required();
    s_sample->add_option("--checkpoint", checkpoint, "checkpoint providing target-layer embeddings")
        ->required();
    s_sample->add_option("--out", out_path, "output edge file")->required();
    s_sample->add_option("--alpha", cfg.train.sampler.alpha, "drop threshold");
    s_sample->add_option("--beta", cfg.train.sampler.beta, "keep threshold");
    s_sample->add_option("--target-layer", target, "target layer id");
    s_sample->add_option("--seed", seed, "sampler seed");
    s_sample->add_flag("--emit-decisions", emit_decisions, "write per-edge decision CSV");
    s_sample->add_option("--decisions-out", decisions_path, "decision CSV path");

    // synth
    SynthConfig synth_cfg;
    std::vector<std::string> aux_specs;
    std::string out_prefix;
    auto* s_synth = app.add_subcommand("synth", "generate a planted-partition multiplex network");
    s_synth->add_option("--nodes", synth_cfg.num_nodes, "node count");
    s_synth->add_option("--communities", synth_cfg.num_communities, "community count");
    s_synth->add_option("--target-edges", synth_cfg.target_edges, "target-layer edge count");
    s_synth->add_option("--aux", aux_specs, "auxiliary layer spec count:rho (repeatable)")
        ->required();
    s_synth->add_option("--p-in", synth_cfg.p_in, "within-community propensity");
    s_synth->add_option("--p-out", synth_cfg.p_out, "between-community propensity");
    s_synth->add_option("--seed", synth_cfg.seed, "generator seed");
    s_synth->add_option("--out", out_prefix, "output path prefix")->required();

    // train
    auto* s_train = app.add_subcommand("train", "train embeddings");
    s_train->add_option("--data", data, "edge file")->required();
    s_train->add_option("--attrs", attrs, "node attribute file");
    s_train->add_option("--labels", labels, "node label file");
    s_train->add_option("--target-layer", target, "target layer id");
    s_train->add_option("--out-checkpoint", out_path, "checkpoint output path");
    s_train->add_option("--log", log_path, "CSV training log path");
    add_config_overrides(s_train);

    // eval-lp
    auto* s_lp = app.add_subcommand("eval-lp", "link prediction AUC on the target layer");
    s_lp->add_option("--data", data, "edge file")->required();
    s_lp->add_option("--target-layer", target, "target layer id");
    s_lp->add_option("--split-seed", split_seed, "edge split seed");
    s_lp->add_option("--repeats", repeats, "training runs to average");
    s_lp->add_option("--checkpoint", checkpoint, "score an existing checkpoint instead");
    s_lp->add_option("--csv", csv_path, "CSV output path");
    add_config_overrides(s_lp);

    // eval-nc
    auto* s_nc = app.add_subcommand("eval-nc", "node classification Macro/Micro F1");
    s_nc->add_option("--data", data, "edge file")->required();
    s_nc->add_option("--labels", labels, "node label file")->required();
    s_nc->add_option("--target-layer", target, "target layer id");
    s_nc->add_option("--split-seed", split_seed, "node split seed");
    s_nc->add_option("--repeats", repeats, "training runs to average");
    s_nc->add_option("--checkpoint", checkpoint, "score an existing checkpoint instead");
    s_nc->add_option("--csv", csv_path, "CSV output path");
    add_config_overrides(s_nc);

    // sweep
    std::vector<double> sweep_values;
    auto* s_sweep = app.add_subcommand("sweep", "sweep one axis, train + eval-lp per value");
    s_sweep->add_option("--data", data, "edge file")->required();
    s_sweep->add_option("--target-layer", target, "target layer id");
    s_sweep->add_option("--axis", axis, "keep_fraction | alpha | beta | dimension")->required();
    s_sweep->add_option("--values", sweep_values, "axis values")->required();
    s_sweep->add_option("--repeats", repeats, "training runs per value");
    s_sweep->add_option("--split-seed", split_seed, "split seed base");
    s_sweep->add_option("--out", csv_path, "CSV report path")->required();
    add_config_overrides(s_sweep);

    // Config file first, then flags win: re-parse flags after applying file.
    auto finalize_cfg = [&]() {
        if (!config_path.empty()) {
            RunConfig file_cfg;
            apply_key_values(load_key_values(config_path), file_cfg);
            // Flags win over file values: keep cfg where the user passed the
            // flag, take the file value everywhere else.
            const RunConfig& merged = file_cfg;
            CLI::App* sub = app.get_subcommands().front();
            auto passed = [&](const std::string& name) {
                auto* opt = sub->get_option_no_throw(name);
                return opt != nullptr && opt->count() > 0;
            };
            if (!passed("--epochs")) cfg.train.epochs = merged.train.epochs;
            if (!passed("--learning-rate")) cfg.train.learning_rate = merged.train.learning_rate;
            if (!passed("--neg-ratio")) cfg.train.neg_ratio = merged.train.neg_ratio;
            if (!passed("--batch-size")) cfg.train.batch_size = merged.train.batch_size;
            if (!passed("--seed")) cfg.train.seed = merged.train.seed;
            if (!passed("--sampling-start-epoch"))
                cfg.train.sampling_start_epoch = merged.train.sampling_start_epoch;
            if (!passed("--alpha")) cfg.train.sampler.alpha = merged.train.sampler.alpha;
            if (!passed("--beta")) cfg.train.sampler.beta = merged.train.sampler.beta;
            if (!passed("--d")) cfg.model.d = merged.model.d;
            if (!passed("--d-a")) cfg.model.d_a = merged.model.d_a;
            if (!passed("--hops")) cfg.model.hops = merged.model.hops;
            if (!passed("--variant")) cfg.train.variant = merged.train.variant;
            if (!passed("--no-resample-each-epoch"))
                cfg.train.resample_each_epoch = merged.train.resample_each_epoch;
            if (!passed("--fixed-negatives"))
                cfg.train.resample_negatives_each_epoch =
                    merged.train.resample_negatives_each_epoch;
        }
        if (!variant_str.empty()) cfg.train.variant = parse_variant(variant_str);
        cfg.train.sampler.target_layer = target;
    };

    try {
        app.parse(argc, argv);
        finalize_cfg();
        if (*s_stats) {
            cmd_stats(data, target, csv_path);
        } else if (*s_sample) {
            cmd_sample(data, checkpoint, out_path, cfg.train.sampler.alpha,
                       cfg.train.sampler.beta, target, seed, emit_decisions, decisions_path);
        } else if (*s_synth) {
            for (const std::string& spec : aux_specs) {
                auto colon = spec.find(':');
                if (colon == std::string::npos)
                    throw std::invalid_argument("--aux expects count:rho, got '" + spec + "'");
                AuxLayerSpec a;
                a.edge_count = std::stoull(spec.substr(0, colon));
                a.relevance = std::stod(spec.substr(colon + 1));
                synth_cfg.aux_layers.push_back(a);
            }
            cmd_synth(synth_cfg, out_prefix);
        } else if (*s_train) {
            cmd_train(data, attrs, labels, cfg, out_path, log_path);
        } else if (*s_lp) {
            cmd_eval_lp(data, target, split_seed, repeats, config_path, cfg, checkpoint,
                        csv_path);
        } else if (*s_nc) {
            cmd_eval_nc(data, labels, target, split_seed, repeats, config_path, cfg, checkpoint,
                        csv_path);
        } else if (*s_sweep) {
            cmd_sweep(data, target, axis, sweep_values, repeats, cfg, split_seed, csv_path);
        }
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
