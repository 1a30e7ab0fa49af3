#pragma once

#include <map>
#include <string>

#include "liamne/model.hpp"
#include "liamne/trainer.hpp"

namespace liamne {

// Unified run configuration: model + training + sampler settings, loadable
// from a flat "key = value" UTF-8 text file. Unknown keys are rejected.
struct RunConfig {
    ModelConfig model;
    TrainConfig train;

    void validate() const {
        model.validate();
        train.validate();
    }
};

// '#' starts a comment; blank lines ignored; "key = value" per line.
std::map<std::string, std::string> load_key_values(const std::string& path);

// Applies file keys onto cfg (callers apply CLI flags afterwards, so flags
// win). Throws std::invalid_argument on unknown keys or unparsable values.
void apply_key_values(const std::map<std::string, std::string>& kv, RunConfig& cfg);

RunConfig load_run_config(const std::string& path);

}  // namespace liamne
