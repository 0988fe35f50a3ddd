#ifndef XTALK_SIMULATOR_H
#define XTALK_SIMULATOR_H

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "xtalk/dataset.h"
#include "xtalk/design.h"
#include "xtalk/superop.h"

namespace xtalk {

inline constexpr size_t kMaxSimulatedQubits = 8;

/// POVM effect stored as sparse Pauli coefficients Tr(B_P E).
struct Effect {
    std::vector<std::pair<uint32_t, double>> terms;

    static Effect from_operator(const CMatrix &op);
    CMatrix to_operator(size_t num_qubits) const;
    double expectation(const PauliVector &state) const;
};

/// Maps the gate labels of one layer (one per region of `partition`) to a CPTP layer map.
using LayerRule = std::function<LayerMap(const Partition &partition, const std::vector<GateName> &gates)>;

/// A Markovian n-qubit model: preparation, per-layer maps and a POVM indexed by outcome.
/// Outcome integers put qubit 0 in the most significant bit.
struct ErrorModel {
    std::string name;
    size_t n_qubits = 0;
    PauliVector prep;
    LayerRule layer_rule;
    std::vector<Effect> povm;

    /// Throws unless prep is a unit-trace PSD state and the effects are PSD summing to identity.
    void validate() const;
};

/// Exact outcome probabilities over 2^n strings.
struct OutcomeDistribution {
    std::vector<double> probabilities;

    double total() const;
    /// Marginal over the listed qubits, first listed qubit most significant.
    std::vector<double> marginal(const std::vector<Qubit> &qubits, size_t num_qubits) const;
};

/// The operation that gate `gate` of region `region` performs on the region's k-th qubit:
/// "I", "Xhalf", "Yhalf" or "CZ".
std::string qubit_action(const Region &region, const GateName &gate, size_t k);

/// Ideal transfer matrix of a region gate.
Superoperator ideal_gate(const Region &region, const GateName &gate);

/// |0...0><0...0| as a Pauli vector.
PauliVector ground_state(size_t n_qubits);
/// Ideal computational-basis POVM.
std::vector<Effect> computational_povm(size_t n_qubits);

/// Tensor product of ideal local gates, each followed by single-qubit depolarization at p_local.
ErrorModel crosstalk_free_model(size_t n_qubits, double p_local);

/// As the crosstalk-free model, plus depolarization D_p on `target` whenever `source` runs Xhalf.
ErrorModel operation_crosstalk_depolarizing(size_t n_qubits, Qubit source, Qubit target, double p, double p_local);

/// Xhalf on `source` implements exp(-(i/2)[(pi/2) X_s + (eps/2) Z_s Z_t]) on (source, target).
ErrorModel operation_crosstalk_coherent(size_t n_qubits, Qubit source, Qubit target, double epsilon, double p_local);

/// Two qubits; when qubit 0 reads 1 the reading of qubit 1 flips with probability p_m.
ErrorModel detection_crosstalk(double p_m, double p_local);

/// The 2x3 ladder: any Xhalf/Yhalf on qubits 3, 4, 5 depolarizes qubit q-3 at rate p. Local
/// depolarization is p_local after gates and p_idle_err after idles.
ErrorModel ladder_crosstalk_model(const DeviceLayout &layout, double p, double p_local, double p_idle_err);

/// Final Pauli vector after running circuit `c` of the plan (no measurement).
PauliVector evolve(const ErrorModel &model, const ExperimentPlan &plan, size_t c);
OutcomeDistribution outcome_distribution(const ErrorModel &model, const ExperimentPlan &plan, size_t c);
/// Distribution for an explicit list of layers on a partition.
OutcomeDistribution outcome_distribution(
    const ErrorModel &model, const Partition &partition, const std::vector<std::vector<GateName>> &layers);

/// Computes each circuit's distribution once, draws N_rep outcomes per circuit from a per-circuit
/// sub-seed, and emits records in schedule order.
Dataset run_plan(const ErrorModel &model, const ExperimentPlan &plan, uint64_t seed);

}  // namespace xtalk

#endif
