#ifndef XTALK_CONFIG_H
#define XTALK_CONFIG_H

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "xtalk/design.h"
#include "xtalk/discovery.h"
#include "xtalk/regions.h"
#include "xtalk/simulator.h"

namespace xtalk {

enum class PartitionMode { One, BruteForce2, Random2 };

struct RunConfig {
    uint64_t seed = 0;
    DeviceLayout layout = DeviceLayout::fully_connected(2);
    PartitionMode partition_mode = PartitionMode::One;
    double cover_epsilon = 0.1;
    size_t partition_index = 0;
    DesignParams design;
    /// {"kind": ..., parameters...}; empty when the config is only used for analysis.
    nlohmann::json model = nlohmann::json::object();
    AnalysisOptions analysis;

    /// Relative layout file names are resolved against `base_dir`.
    static RunConfig from_json(const nlohmann::json &j, const std::filesystem::path &base_dir = {});
    static RunConfig load(const std::filesystem::path &path);
    nlohmann::json to_json() const;
};

/// Named sub-stream seeds of the master seed.
uint64_t design_seed(const RunConfig &config);
uint64_t simulation_seed(const RunConfig &config);
uint64_t partition_seed(const RunConfig &config);

Partition select_partition(const RunConfig &config);
ErrorModel build_model(const nlohmann::json &model, const DeviceLayout &layout);

nlohmann::json read_json_file(const std::filesystem::path &path);

}  // namespace xtalk

#endif
