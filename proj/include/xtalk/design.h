#ifndef XTALK_DESIGN_H
#define XTALK_DESIGN_H

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xtalk/regions.h"

namespace xtalk {

using GateName = std::string;

inline constexpr const char *kIdleGate = "I";

/// Elementary gates available on a region, keyed by region size.
///   1-qubit regions: I, Xhalf, Yhalf.
///   2-qubit regions: I, Xhalf:0, Xhalf:1, Yhalf:0, Yhalf:1, CZ (":k" = k-th qubit of the region).
struct GateRegistry {
    std::vector<GateName> gates;

    static GateRegistry for_region_size(size_t size);
    bool contains(const GateName &g) const;
};

struct Subcircuit {
    Region region;
    std::vector<GateName> layers;

    bool operator==(const Subcircuit &other) const = default;
};

enum class ScheduleMode { Rasterized, Randomized };

struct DesignParams {
    size_t depth = 30;  // L
    size_t n_circ = 20;
    size_t n_con = 10;
    double p_idle_sample = 0.1;
    size_t n_rep = 1000;
    ScheduleMode schedule = ScheduleMode::Rasterized;

    void validate() const;
    nlohmann::json to_json() const;
    static DesignParams from_json(const nlohmann::json &j);
    bool operator==(const DesignParams &other) const = default;
};

enum class SignalRegime { Low, High };

/// Parameter defaults from the protocol's tuning guidance. Appends a warning for M = 1.
DesignParams default_params(size_t num_regions, SignalRegime regime, std::vector<std::string> *warnings = nullptr);

/// Draws n_circ depth-L subcircuits with i.i.d. uniform layers. The whole bag is redrawn
/// (bounded retries) until every registry gate appears somewhere in it.
std::vector<Subcircuit> sample_bag(
    const Region &region, size_t depth, size_t n_circ, uint64_t seed, const GateRegistry &registry);
std::vector<Subcircuit> sample_bag(const Region &region, size_t depth, size_t n_circ, uint64_t seed);

/// Setting index per region. Values below n_circ index the region's bag; n_circ is the idle subcircuit.
using Circuit = std::vector<uint32_t>;

/// Order in which (circuit, repetition) pairs are executed.
class Schedule {
   public:
    Schedule() = default;
    static Schedule rasterized(size_t num_circuits, size_t num_reps);
    static Schedule randomized(size_t num_circuits, size_t num_reps, uint64_t seed);

    ScheduleMode mode() const {
        return mode_;
    }
    size_t size() const {
        return num_circuits_ * num_reps_;
    }
    size_t num_circuits() const {
        return num_circuits_;
    }
    size_t num_reps() const {
        return num_reps_;
    }
    /// The k-th executed (circuit, repetition) pair.
    std::pair<uint32_t, uint32_t> at(size_t k) const;

    template <typename Fn>
    void for_each(Fn &&fn) const {
        if (mode_ == ScheduleMode::Rasterized) {
            for (uint32_t r = 0; r < num_reps_; r++) {
                for (uint32_t c = 0; c < num_circuits_; c++) {
                    fn(c, r);
                }
            }
        } else {
            std::vector<uint32_t> seen(num_circuits_, 0);
            for (uint32_t c : order_) {
                fn(c, seen[c]++);
            }
        }
    }

    nlohmann::json to_json() const;
    static Schedule from_json(size_t num_circuits, const nlohmann::json &j);
    bool operator==(const Schedule &other) const = default;

   private:
    ScheduleMode mode_ = ScheduleMode::Rasterized;
    size_t num_circuits_ = 0;
    size_t num_reps_ = 0;
    std::vector<uint32_t> order_;  // randomized only: circuit index per slot
};

/// A circuit before deduplication, tagged with the region whose bag was being iterated.
struct CandidateCircuit {
    size_t target_region;
    Circuit settings;
};

struct ExperimentPlan {
    Partition partition;
    DesignParams params;
    uint64_t seed = 0;
    std::vector<std::vector<Subcircuit>> bags;  // [region][bag index]
    std::vector<Circuit> circuits;
    Schedule schedule;

    size_t num_regions() const {
        return partition.num_regions();
    }
    uint32_t idle_setting() const {
        return static_cast<uint32_t>(params.n_circ);
    }
    /// Gate sequence run on `region` for a setting index (bag entry or the idle subcircuit).
    const std::vector<GateName> &layers(size_t region, uint32_t setting) const;
    /// Gate names of every region in layer `t` of circuit `c`.
    std::vector<GateName> layer(size_t c, size_t t) const;

    nlohmann::json to_json() const;
    static ExperimentPlan from_json(const nlohmann::json &j);

    /// Length-L all-idle sequence, shared by every region.
    std::vector<GateName> idle_layers;
};

/// The randomized-context candidates: for every region m and every bag entry, n_con circuits with
/// that entry on m and each other region independently idle (p_idle_sample) or a uniform bag draw.
std::vector<CandidateCircuit> sample_candidates(
    const Partition &partition, const DesignParams &params, Rng &rng);

/// Full plan: bags, candidates, duplicate removal (by gate content) and the repetition schedule.
ExperimentPlan build_plan(const Partition &partition, const DesignParams &params, uint64_t seed);

}  // namespace xtalk

#endif
