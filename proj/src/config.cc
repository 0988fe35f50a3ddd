#include "xtalk/config.h"

#include <fstream>
#include <set>

#include "xtalk/errors.h"

namespace xtalk {

namespace {

void check_keys(const nlohmann::json &j, const std::set<std::string> &allowed, const std::string &section) {
    if (!j.is_object()) {
        throw ConfigError("\"" + section + "\" must be an object");
    }
    for (const auto &[key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("unknown key \"" + key + "\" in \"" + section + "\"");
        }
    }
}

template <typename T>
T get(const nlohmann::json &j, const std::string &key, const std::string &section) {
    if (!j.contains(key)) {
        throw ConfigError("\"" + section + "\" is missing \"" + key + "\"");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw ConfigError("\"" + section + "." + key + "\" has the wrong type");
    }
}

DeviceLayout parse_layout(const nlohmann::json &j, const std::filesystem::path &base_dir) {
    if (j.is_string()) {
        std::filesystem::path p = j.get<std::string>();
        if (p.is_relative()) {
            p = base_dir / p;
        }
        return parse_layout(read_json_file(p), base_dir);
    }
    if (j.is_object() && j.contains("preset")) {
        check_keys(j, {"preset", "n_qubits"}, "layout");
        std::string preset = get<std::string>(j, "preset", "layout");
        if (preset == "ladder6") {
            return DeviceLayout::ladder6();
        }
        if (preset == "complete") {
            return DeviceLayout::fully_connected(get<size_t>(j, "n_qubits", "layout"));
        }
        throw ConfigError("unknown layout preset \"" + preset + "\"");
    }
    try {
        return DeviceLayout::from_json(j);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("malformed layout: ") + e.what());
    }
}

const char *partition_mode_name(PartitionMode m) {
    switch (m) {
        case PartitionMode::One:
            return "one";
        case PartitionMode::BruteForce2:
            return "brute2";
        case PartitionMode::Random2:
            return "random2";
    }
    return "?";
}

}  // namespace

nlohmann::json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

RunConfig RunConfig::from_json(const nlohmann::json &j, const std::filesystem::path &base_dir) {
    check_keys(j, {"seed", "layout", "partition", "design", "model", "analysis"}, "config");
    RunConfig c;
    if (j.contains("seed")) {
        c.seed = get<uint64_t>(j, "seed", "config");
    }
    if (j.contains("layout")) {
        c.layout = parse_layout(j.at("layout"), base_dir);
    }

    if (j.contains("partition")) {
        const auto &p = j.at("partition");
        check_keys(p, {"mode", "epsilon", "index"}, "partition");
        std::string mode = p.value("mode", std::string("one"));
        if (mode == "one") {
            c.partition_mode = PartitionMode::One;
        } else if (mode == "brute2") {
            c.partition_mode = PartitionMode::BruteForce2;
        } else if (mode == "random2") {
            c.partition_mode = PartitionMode::Random2;
        } else {
            throw ConfigError("unknown partition mode \"" + mode + "\"");
        }
        if (p.contains("epsilon")) {
            c.cover_epsilon = get<double>(p, "epsilon", "partition");
        }
        if (p.contains("index")) {
            c.partition_index = get<size_t>(p, "index", "partition");
        }
    }

    if (j.contains("design")) {
        nlohmann::json d = j.at("design");
        check_keys(d, {"regime", "L", "n_circ", "n_con", "p_idle_sample", "n_rep", "schedule"}, "design");
        nlohmann::json merged = DesignParams{}.to_json();
        if (d.contains("regime")) {
            std::string regime = get<std::string>(d, "regime", "design");
            if (regime != "low" && regime != "high") {
                throw ConfigError("design.regime must be \"low\" or \"high\"");
            }
            size_t regions = select_partition(c).num_regions();
            merged = default_params(regions, regime == "low" ? SignalRegime::Low : SignalRegime::High).to_json();
            d.erase("regime");
        }
        merged.update(d);
        try {
            c.design = DesignParams::from_json(merged);
        } catch (const nlohmann::json::exception &e) {
            throw ConfigError(std::string("malformed design section: ") + e.what());
        }
        c.design.validate();
    }

    if (j.contains("model")) {
        c.model = j.at("model");
        build_model(c.model, c.layout);
    }

    if (j.contains("analysis")) {
        const auto &a = j.at("analysis");
        check_keys(a, {"alpha", "bonferroni", "max_cond_size", "tvd_expected", "priors", "df"}, "analysis");
        if (a.contains("alpha")) {
            c.analysis.pc.alpha = get<double>(a, "alpha", "analysis");
            if (!(c.analysis.pc.alpha > 0 && c.analysis.pc.alpha < 1)) {
                throw ConfigError("analysis.alpha must lie in (0, 1)");
            }
        }
        if (a.contains("bonferroni")) {
            c.analysis.pc.bonferroni = get<bool>(a, "bonferroni", "analysis");
        }
        if (a.contains("max_cond_size") && !a.at("max_cond_size").is_null()) {
            c.analysis.pc.max_cond_size = get<size_t>(a, "max_cond_size", "analysis");
        }
        if (a.contains("tvd_expected")) {
            c.analysis.graph.tvd_expected = get<bool>(a, "tvd_expected", "analysis");
        }
        if (a.contains("priors")) {
            c.analysis.use_priors = get<bool>(a, "priors", "analysis");
        }
        if (a.contains("df")) {
            std::string df = get<std::string>(a, "df", "analysis");
            if (df == "full") {
                c.analysis.pc.df_mode = DfMode::Full;
            } else if (df == "adjusted") {
                c.analysis.pc.df_mode = DfMode::Adjusted;
            } else {
                throw ConfigError("analysis.df must be \"full\" or \"adjusted\"");
            }
        }
    }
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path &path) {
    return from_json(read_json_file(path), path.parent_path());
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json max_cond = analysis.pc.max_cond_size ? nlohmann::json(*analysis.pc.max_cond_size) : nlohmann::json(nullptr);
    return {
        {"seed", seed},
        {"layout", layout.to_json()},
        {"partition", {{"mode", partition_mode_name(partition_mode)}, {"epsilon", cover_epsilon}, {"index", partition_index}}},
        {"design", design.to_json()},
        {"model", model},
        {"analysis",
         {
             {"alpha", analysis.pc.alpha},
             {"bonferroni", analysis.pc.bonferroni},
             {"max_cond_size", max_cond},
             {"tvd_expected", analysis.graph.tvd_expected},
             {"priors", analysis.use_priors},
             {"df", analysis.pc.df_mode == DfMode::Full ? "full" : "adjusted"},
         }},
    };
}

uint64_t design_seed(const RunConfig &config) {
    return derive_seed(config.seed, "design");
}

uint64_t simulation_seed(const RunConfig &config) {
    return derive_seed(config.seed, "simulate");
}

uint64_t partition_seed(const RunConfig &config) {
    return derive_seed(config.seed, "partition");
}

Partition select_partition(const RunConfig &config) {
    switch (config.partition_mode) {
        case PartitionMode::One:
            return one_partition(config.layout);
        case PartitionMode::Random2:
            return random_two_partition(config.layout, partition_seed(config));
        case PartitionMode::BruteForce2: {
            PartitionSet set = partition_cover(config.layout, config.cover_epsilon, partition_seed(config), CoverMode::BruteForce);
            if (config.partition_index >= set.partitions.size()) {
                throw ConfigError(
                    "partition.index " + std::to_string(config.partition_index) + " exceeds the " +
                    std::to_string(set.partitions.size()) + " partitions of the cover");
            }
            return set.partitions[config.partition_index];
        }
    }
    throw ConfigError("unknown partition mode");
}

ErrorModel build_model(const nlohmann::json &model, const DeviceLayout &layout) {
    std::string kind = get<std::string>(model, "kind", "model");
    size_t n = layout.n_qubits();
    if (kind == "crosstalk_free") {
        check_keys(model, {"kind", "p_local"}, "model");
        return crosstalk_free_model(n, get<double>(model, "p_local", "model"));
    }
    if (kind == "depolarizing_crosstalk") {
        check_keys(model, {"kind", "source", "target", "p", "p_local"}, "model");
        return operation_crosstalk_depolarizing(
            n, get<Qubit>(model, "source", "model"), get<Qubit>(model, "target", "model"), get<double>(model, "p", "model"),
            get<double>(model, "p_local", "model"));
    }
    if (kind == "coherent_crosstalk") {
        check_keys(model, {"kind", "source", "target", "epsilon", "p_local"}, "model");
        return operation_crosstalk_coherent(
            n, get<Qubit>(model, "source", "model"), get<Qubit>(model, "target", "model"),
            get<double>(model, "epsilon", "model"), get<double>(model, "p_local", "model"));
    }
    if (kind == "detection_crosstalk") {
        check_keys(model, {"kind", "p_m", "p_local"}, "model");
        if (n != 2) {
            throw ConfigError("the detection crosstalk model needs a 2-qubit layout");
        }
        return detection_crosstalk(get<double>(model, "p_m", "model"), get<double>(model, "p_local", "model"));
    }
    if (kind == "ladder_crosstalk") {
        check_keys(model, {"kind", "p", "p_local", "p_idle_err"}, "model");
        return ladder_crosstalk_model(
            layout, get<double>(model, "p", "model"), get<double>(model, "p_local", "model"),
            get<double>(model, "p_idle_err", "model"));
    }
    throw ConfigError("unknown model kind \"" + kind + "\"");
}

}  // namespace xtalk
