#include "xtalk/design.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "xtalk/errors.h"

namespace xtalk {

GateRegistry GateRegistry::for_region_size(size_t size) {
    switch (size) {
        case 1:
            return {{"I", "Xhalf", "Yhalf"}};
        case 2:
            return {{"I", "Xhalf:0", "Xhalf:1", "Yhalf:0", "Yhalf:1", "CZ"}};
        default:
            throw ConfigError("no gate registry for regions of size " + std::to_string(size));
    }
}

bool GateRegistry::contains(const GateName &g) const {
    return std::find(gates.begin(), gates.end(), g) != gates.end();
}

void DesignParams::validate() const {
    if (depth < 1) {
        throw ParameterError("subcircuit depth L must be at least 1");
    }
    if (n_circ < 1) {
        throw ParameterError("N_circ must be at least 1");
    }
    if (n_con < 1) {
        throw ParameterError("N_con must be at least 1");
    }
    if (!(p_idle_sample >= 0 && p_idle_sample <= 1)) {
        throw ParameterError("p_idle_sample must lie in [0, 1]");
    }
    if (n_rep < 1) {
        throw ParameterError("N_rep must be at least 1");
    }
}

nlohmann::json DesignParams::to_json() const {
    return {
        {"L", depth},
        {"n_circ", n_circ},
        {"n_con", n_con},
        {"p_idle_sample", p_idle_sample},
        {"n_rep", n_rep},
        {"schedule", schedule == ScheduleMode::Rasterized ? "rasterized" : "randomized"},
    };
}

DesignParams DesignParams::from_json(const nlohmann::json &j) {
    DesignParams p;
    p.depth = j.value("L", p.depth);
    p.n_circ = j.value("n_circ", p.n_circ);
    p.n_con = j.value("n_con", p.n_con);
    p.p_idle_sample = j.value("p_idle_sample", p.p_idle_sample);
    p.n_rep = j.value("n_rep", p.n_rep);
    std::string mode = j.value("schedule", std::string("rasterized"));
    if (mode == "rasterized") {
        p.schedule = ScheduleMode::Rasterized;
    } else if (mode == "randomized") {
        p.schedule = ScheduleMode::Randomized;
    } else {
        throw FormatError("unknown schedule mode \"" + mode + "\"");
    }
    return p;
}

DesignParams default_params(size_t num_regions, SignalRegime regime, std::vector<std::string> *warnings) {
    if (num_regions < 1) {
        throw ParameterError("default_params needs at least one region");
    }
    DesignParams p;
    p.n_circ = 20;
    p.n_con = regime == SignalRegime::Low ? p.n_circ / 2 : p.n_circ / 4;
    p.p_idle_sample = 1.0 / static_cast<double>(num_regions);
    p.n_rep = 1000;
    p.depth = 30;
    if (num_regions == 1 && warnings) {
        warnings->push_back("a single region has no contexts to vary; the plan cannot reveal crosstalk");
    }
    return p;
}

std::vector<Subcircuit> sample_bag(
    const Region &region, size_t depth, size_t n_circ, uint64_t seed, const GateRegistry &registry) {
    if (registry.gates.empty()) {
        throw ConfigError("gate registry for region " + region.str() + " is empty");
    }
    if (depth < 1 || n_circ < 1) {
        throw ParameterError("sample_bag needs depth >= 1 and n_circ >= 1");
    }
    size_t k = registry.gates.size();
    if (depth * n_circ < k) {
        throw ConfigError(
            "a bag of " + std::to_string(n_circ) + " depth-" + std::to_string(depth) +
            " subcircuits cannot contain all " + std::to_string(k) + " gates");
    }
    Rng rng(seed);
    constexpr int kMaxAttempts = 10000;
    std::vector<Subcircuit> bag;
    for (int attempt = 0; attempt < kMaxAttempts; attempt++) {
        bag.assign(n_circ, Subcircuit{region, {}});
        std::vector<bool> seen(k, false);
        for (auto &sub : bag) {
            sub.layers.reserve(depth);
            for (size_t t = 0; t < depth; t++) {
                size_t g = uniform_index(rng, k);
                seen[g] = true;
                sub.layers.push_back(registry.gates[g]);
            }
        }
        if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
            return bag;
        }
    }
    throw ConfigError("could not draw a bag covering every gate of region " + region.str());
}

std::vector<Subcircuit> sample_bag(const Region &region, size_t depth, size_t n_circ, uint64_t seed) {
    return sample_bag(region, depth, n_circ, seed, GateRegistry::for_region_size(region.size()));
}

Schedule Schedule::rasterized(size_t num_circuits, size_t num_reps) {
    Schedule s;
    s.mode_ = ScheduleMode::Rasterized;
    s.num_circuits_ = num_circuits;
    s.num_reps_ = num_reps;
    return s;
}

Schedule Schedule::randomized(size_t num_circuits, size_t num_reps, uint64_t seed) {
    Schedule s;
    s.mode_ = ScheduleMode::Randomized;
    s.num_circuits_ = num_circuits;
    s.num_reps_ = num_reps;
    s.order_.reserve(num_circuits * num_reps);
    for (size_t r = 0; r < num_reps; r++) {
        for (uint32_t c = 0; c < num_circuits; c++) {
            s.order_.push_back(c);
        }
    }
    Rng rng(seed);
    shuffle_in_place(s.order_, rng);
    return s;
}

std::pair<uint32_t, uint32_t> Schedule::at(size_t k) const {
    if (k >= size()) {
        throw ParameterError("schedule position out of range");
    }
    if (mode_ == ScheduleMode::Rasterized) {
        return {static_cast<uint32_t>(k % num_circuits_), static_cast<uint32_t>(k / num_circuits_)};
    }
    uint32_t c = order_[k];
    uint32_t rep = static_cast<uint32_t>(std::count(order_.begin(), order_.begin() + k, c));
    return {c, rep};
}

nlohmann::json Schedule::to_json() const {
    nlohmann::json j = {
        {"mode", mode_ == ScheduleMode::Rasterized ? "rasterized" : "randomized"},
        {"num_reps", num_reps_},
    };
    if (mode_ == ScheduleMode::Randomized) {
        j["order"] = order_;
    }
    return j;
}

Schedule Schedule::from_json(size_t num_circuits, const nlohmann::json &j) {
    Schedule s;
    s.num_circuits_ = num_circuits;
    s.num_reps_ = j.at("num_reps").get<size_t>();
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "rasterized") {
        s.mode_ = ScheduleMode::Rasterized;
    } else if (mode == "randomized") {
        s.mode_ = ScheduleMode::Randomized;
        s.order_ = j.at("order").get<std::vector<uint32_t>>();
        if (s.order_.size() != s.size()) {
            throw FormatError("randomized schedule length does not match circuits x reps");
        }
        std::vector<size_t> counts(num_circuits, 0);
        for (uint32_t c : s.order_) {
            if (c >= num_circuits || ++counts[c] > s.num_reps_) {
                throw FormatError("randomized schedule does not repeat every circuit num_reps times");
            }
        }
    } else {
        throw FormatError("unknown schedule mode \"" + mode + "\"");
    }
    return s;
}

const std::vector<GateName> &ExperimentPlan::layers(size_t region, uint32_t setting) const {
    if (setting == idle_setting()) {
        return idle_layers;
    }
    return bags.at(region).at(setting).layers;
}

std::vector<GateName> ExperimentPlan::layer(size_t c, size_t t) const {
    std::vector<GateName> out;
    out.reserve(num_regions());
    for (size_t m = 0; m < num_regions(); m++) {
        out.push_back(layers(m, circuits[c][m])[t]);
    }
    return out;
}

nlohmann::json ExperimentPlan::to_json() const {
    nlohmann::json bags_json = nlohmann::json::array();
    for (const auto &bag : bags) {
        nlohmann::json b = nlohmann::json::array();
        for (const auto &sub : bag) {
            b.push_back(sub.layers);
        }
        bags_json.push_back(b);
    }
    return {
        {"format", "xtalk-plan/1"},
        {"seed", seed},
        {"n_qubits", partition.n_qubits()},
        {"params", params.to_json()},
        {"partition", partition.to_json()},
        {"idle_setting", idle_setting()},
        {"bags", bags_json},
        {"circuits", circuits},
        {"schedule", schedule.to_json()},
    };
}

ExperimentPlan ExperimentPlan::from_json(const nlohmann::json &j) {
    ExperimentPlan plan;
    try {
        plan.seed = j.at("seed").get<uint64_t>();
        plan.params = DesignParams::from_json(j.at("params"));
        plan.params.validate();
        plan.partition = Partition::from_json(j.at("n_qubits").get<size_t>(), j.at("partition"));
        const auto &bags = j.at("bags");
        if (bags.size() != plan.num_regions()) {
            throw FormatError("plan has " + std::to_string(bags.size()) + " bags for " +
                              std::to_string(plan.num_regions()) + " regions");
        }
        for (size_t m = 0; m < bags.size(); m++) {
            const Region &region = plan.partition[m];
            GateRegistry registry = GateRegistry::for_region_size(region.size());
            std::vector<Subcircuit> bag;
            for (const auto &seq : bags[m]) {
                Subcircuit sub{region, seq.get<std::vector<GateName>>()};
                if (sub.layers.size() != plan.params.depth) {
                    throw FormatError("bag subcircuit length differs from L");
                }
                for (const auto &g : sub.layers) {
                    if (!registry.contains(g)) {
                        throw FormatError("gate \"" + g + "\" is not valid on region " + region.str());
                    }
                }
                bag.push_back(std::move(sub));
            }
            if (bag.size() != plan.params.n_circ) {
                throw FormatError("bag size differs from n_circ");
            }
            plan.bags.push_back(std::move(bag));
        }
        plan.circuits = j.at("circuits").get<std::vector<Circuit>>();
        for (const auto &c : plan.circuits) {
            if (c.size() != plan.num_regions()) {
                throw FormatError("circuit does not assign a setting to every region");
            }
            for (uint32_t s : c) {
                if (s > plan.idle_setting()) {
                    throw FormatError("circuit setting index out of range");
                }
            }
        }
        plan.schedule = Schedule::from_json(plan.circuits.size(), j.at("schedule"));
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(std::string("malformed plan: ") + e.what());
    }
    plan.idle_layers.assign(plan.params.depth, kIdleGate);
    return plan;
}

std::vector<CandidateCircuit> sample_candidates(const Partition &partition, const DesignParams &params, Rng &rng) {
    size_t M = partition.num_regions();
    auto idle = static_cast<uint32_t>(params.n_circ);
    std::vector<CandidateCircuit> out;
    out.reserve(M * params.n_circ * params.n_con);
    for (size_t m = 0; m < M; m++) {
        for (uint32_t nu = 0; nu < params.n_circ; nu++) {
            for (size_t c = 0; c < params.n_con; c++) {
                Circuit settings(M);
                for (size_t k = 0; k < M; k++) {
                    if (k == m) {
                        settings[k] = nu;
                    } else if (uniform01(rng) < params.p_idle_sample) {
                        settings[k] = idle;
                    } else {
                        settings[k] = static_cast<uint32_t>(uniform_index(rng, params.n_circ));
                    }
                }
                out.push_back({m, std::move(settings)});
            }
        }
    }
    return out;
}

ExperimentPlan build_plan(const Partition &partition, const DesignParams &params, uint64_t seed) {
    params.validate();
    if (partition.num_regions() == 0) {
        throw ParameterError("cannot build a plan for an empty partition");
    }
    ExperimentPlan plan;
    plan.partition = partition;
    plan.params = params;
    plan.seed = seed;
    plan.idle_layers.assign(params.depth, kIdleGate);
    size_t M = partition.num_regions();
    for (size_t m = 0; m < M; m++) {
        plan.bags.push_back(sample_bag(partition[m], params.depth, params.n_circ, derive_seed(seed, "bag/" + std::to_string(m))));
    }

    // Canonical id per distinct gate sequence on each region, so that duplicates are detected
    // by content rather than by label.
    std::vector<std::vector<uint32_t>> canonical(M);
    for (size_t m = 0; m < M; m++) {
        std::map<std::vector<GateName>, uint32_t> first;
        canonical[m].resize(params.n_circ + 1);
        for (uint32_t s = 0; s <= params.n_circ; s++) {
            auto [it, inserted] = first.emplace(plan.layers(m, s), s);
            canonical[m][s] = it->second;
        }
    }

    Rng rng(derive_seed(seed, "contexts"));
    std::set<std::vector<uint32_t>> seen;
    for (auto &cand : sample_candidates(partition, params, rng)) {
        std::vector<uint32_t> key(M);
        for (size_t m = 0; m < M; m++) {
            key[m] = canonical[m][cand.settings[m]];
        }
        if (seen.insert(std::move(key)).second) {
            plan.circuits.push_back(std::move(cand.settings));
        }
    }

    if (params.schedule == ScheduleMode::Rasterized) {
        plan.schedule = Schedule::rasterized(plan.circuits.size(), params.n_rep);
    } else {
        plan.schedule = Schedule::randomized(plan.circuits.size(), params.n_rep, derive_seed(seed, "schedule"));
    }
    return plan;
}

}  // namespace xtalk
