#include "liamne/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace liamne {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

template <typename T>
T parse_num(const std::string& key, const std::string& value) {
    std::istringstream ss(value);
    T v{};
    std::string rest;
    if (!(ss >> v) || (ss >> rest))
        throw std::invalid_argument("config: bad value '" + value + "' for key '" + key + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config: bad boolean '" + value + "' for key '" + key + "'");
}

}  // namespace

std::map<std::string, std::string> load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected 'key = value'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void apply_key_values(const std::map<std::string, std::string>& kv, RunConfig& cfg) {
    for (const auto& [key, value] : kv) {
        if (key == "d") cfg.model.d = parse_num<std::size_t>(key, value);
        else if (key == "d_a") cfg.model.d_a = parse_num<std::size_t>(key, value);
        else if (key == "hops") cfg.model.hops = parse_num<std::size_t>(key, value);
        else if (key == "epochs") cfg.train.epochs = parse_num<std::size_t>(key, value);
        else if (key == "learning_rate") cfg.train.learning_rate = parse_num<double>(key, value);
        else if (key == "neg_ratio") cfg.train.neg_ratio = parse_num<std::size_t>(key, value);
        else if (key == "batch_size") cfg.train.batch_size = parse_num<std::size_t>(key, value);
        else if (key == "seed") cfg.train.seed = parse_num<std::uint64_t>(key, value);
        else if (key == "sampling_start_epoch")
            cfg.train.sampling_start_epoch = parse_num<std::size_t>(key, value);
        else if (key == "resample_each_epoch")
            cfg.train.resample_each_epoch = parse_bool(key, value);
        else if (key == "resample_negatives_each_epoch")
            cfg.train.resample_negatives_each_epoch = parse_bool(key, value);
        else if (key == "alpha") cfg.train.sampler.alpha = parse_num<double>(key, value);
        else if (key == "beta") cfg.train.sampler.beta = parse_num<double>(key, value);
        else if (key == "target_layer")
            cfg.train.sampler.target_layer = parse_num<LayerId>(key, value);
        else if (key == "variant") cfg.train.variant = parse_variant(value);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

RunConfig load_run_config(const std::string& path) {
    RunConfig cfg;
    apply_key_values(load_key_values(path), cfg);
    return cfg;
}

}  // namespace liamne
