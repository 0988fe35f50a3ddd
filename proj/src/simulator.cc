#include "xtalk/simulator.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "xtalk/errors.h"

namespace xtalk {

namespace {

void check_rate(double p, const char *name) {
    if (!(p >= 0 && p <= 1)) {
        throw ParameterError(std::string(name) + " must lie in [0, 1]");
    }
}

void check_register(size_t n) {
    if (n < 1 || n > kMaxSimulatedQubits) {
        throw ParameterError("the simulator supports 1 to " + std::to_string(kMaxSimulatedQubits) + " qubits");
    }
}

const Superoperator &xhalf_map() {
    static const Superoperator m = Superoperator::from_unitary(exp_minus_half_i(std::numbers::pi / 2 * pauli_x()));
    return m;
}

const Superoperator &yhalf_map() {
    static const Superoperator m = Superoperator::from_unitary(exp_minus_half_i(std::numbers::pi / 2 * pauli_y()));
    return m;
}

const Superoperator &single_qubit_map(const std::string &action) {
    static const Superoperator id = Superoperator::identity(1);
    if (action == "I") {
        return id;
    }
    if (action == "Xhalf") {
        return xhalf_map();
    }
    if (action == "Yhalf") {
        return yhalf_map();
    }
    throw ConfigError("unknown single-qubit gate \"" + action + "\"");
}

const Superoperator &cz_map() {
    static const Superoperator m = [] {
        CMatrix u = CMatrix::Identity(4, 4);
        u(3, 3) = -1;
        return Superoperator::from_unitary(u);
    }();
    return m;
}

void check_layer(const Partition &partition, const std::vector<GateName> &gates, size_t n_qubits) {
    if (partition.n_qubits() != n_qubits) {
        throw DimensionError("partition qubit count differs from the model's");
    }
    if (gates.size() != partition.num_regions()) {
        throw DimensionError("layer must give one gate per region");
    }
}

/// Ideal gates of every region except `skip`.
void append_region_gates(
    LayerMap &layer, const Partition &partition, const std::vector<GateName> &gates, size_t skip = SIZE_MAX) {
    for (size_t m = 0; m < partition.num_regions(); m++) {
        if (m == skip || gates[m] == kIdleGate) {
            continue;
        }
        layer.append(partition[m].qubits, ideal_gate(partition[m], gates[m]));
    }
}

/// Depolarization on every qubit: `idle_rate` when the qubit idles in this layer, else `gate_rate`.
void append_local_noise(
    LayerMap &layer, const Partition &partition, const std::vector<GateName> &gates, double gate_rate, double idle_rate) {
    for (size_t m = 0; m < partition.num_regions(); m++) {
        const Region &r = partition[m];
        for (size_t k = 0; k < r.size(); k++) {
            double rate = qubit_action(r, gates[m], k) == "I" ? idle_rate : gate_rate;
            if (rate > 0) {
                layer.append({r.qubits[k]}, depolarizing(rate));
            }
        }
    }
}

std::string action_on(const Partition &partition, const std::vector<GateName> &gates, Qubit q) {
    size_t m = partition.region_of(q);
    const Region &r = partition[m];
    size_t k = r.qubits[0] == q ? 0 : 1;
    return qubit_action(r, gates[m], k);
}

ErrorModel base_model(std::string name, size_t n_qubits) {
    ErrorModel model;
    model.name = std::move(name);
    model.n_qubits = n_qubits;
    model.prep = ground_state(n_qubits);
    model.povm = computational_povm(n_qubits);
    return model;
}

}  // namespace

Effect Effect::from_operator(const CMatrix &op) {
    Effect e;
    PauliVector v = to_pauli_vector(op);
    for (Eigen::Index p = 0; p < v.size(); p++) {
        if (std::abs(v(p)) > 1e-15) {
            e.terms.emplace_back(static_cast<uint32_t>(p), v(p));
        }
    }
    return e;
}

CMatrix Effect::to_operator(size_t num_qubits) const {
    PauliVector v = PauliVector::Zero(Eigen::Index{1} << (2 * num_qubits));
    for (auto [p, c] : terms) {
        v(p) = c;
    }
    return from_pauli_vector(v);
}

double Effect::expectation(const PauliVector &state) const {
    double acc = 0;
    for (auto [p, c] : terms) {
        acc += c * state(p);
    }
    return acc;
}

void ErrorModel::validate() const {
    check_register(n_qubits);
    size_t d4 = size_t{1} << (2 * n_qubits);
    double scale = std::sqrt(static_cast<double>(size_t{1} << n_qubits));
    if (static_cast<size_t>(prep.size()) != d4) {
        throw DimensionError("preparation vector has the wrong dimension");
    }
    if (std::abs(prep(0) * scale - 1) > 1e-10) {
        throw ParameterError("preparation state does not have unit trace");
    }
    PauliVector sum = PauliVector::Zero(d4);
    for (const auto &e : povm) {
        for (auto [p, c] : e.terms) {
            sum(p) += c;
        }
    }
    sum(0) -= scale;
    if (povm.size() != (size_t{1} << n_qubits) || sum.cwiseAbs().maxCoeff() > 1e-10) {
        throw ParameterError("POVM effects do not sum to the identity");
    }
    if (n_qubits <= 4) {
        Eigen::SelfAdjointEigenSolver<CMatrix> rho(from_pauli_vector(prep), Eigen::EigenvaluesOnly);
        if (rho.eigenvalues().minCoeff() < -1e-10) {
            throw ParameterError("preparation state is not positive semidefinite");
        }
        for (const auto &e : povm) {
            Eigen::SelfAdjointEigenSolver<CMatrix> s(e.to_operator(n_qubits), Eigen::EigenvaluesOnly);
            if (s.eigenvalues().minCoeff() < -1e-10) {
                throw ParameterError("POVM effect is not positive semidefinite");
            }
        }
    }
}

double OutcomeDistribution::total() const {
    double t = 0;
    for (double p : probabilities) {
        t += p;
    }
    return t;
}

std::vector<double> OutcomeDistribution::marginal(const std::vector<Qubit> &qubits, size_t num_qubits) const {
    std::vector<double> out(size_t{1} << qubits.size(), 0.0);
    for (size_t x = 0; x < probabilities.size(); x++) {
        size_t y = 0;
        for (Qubit q : qubits) {
            y = (y << 1) | ((x >> (num_qubits - 1 - q)) & 1);
        }
        out[y] += probabilities[x];
    }
    return out;
}

std::string qubit_action(const Region &region, const GateName &gate, size_t k) {
    if (region.size() == 1) {
        return gate;
    }
    if (gate == "I") {
        return "I";
    }
    if (gate == "CZ") {
        return "CZ";
    }
    auto colon = gate.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("gate \"" + gate + "\" is not valid on 2-region " + region.str());
    }
    size_t target = static_cast<size_t>(std::stoul(gate.substr(colon + 1)));
    return target == k ? gate.substr(0, colon) : "I";
}

Superoperator ideal_gate(const Region &region, const GateName &gate) {
    if (region.size() == 1) {
        return single_qubit_map(gate);
    }
    if (gate == "CZ") {
        return cz_map();
    }
    return single_qubit_map(qubit_action(region, gate, 0)).tensor(single_qubit_map(qubit_action(region, gate, 1)));
}

PauliVector ground_state(size_t n_qubits) {
    PauliVector v = PauliVector::Zero(Eigen::Index{1} << (2 * n_qubits));
    double c = 1 / std::sqrt(static_cast<double>(size_t{1} << n_qubits));
    for (size_t mask = 0; mask < (size_t{1} << n_qubits); mask++) {
        size_t idx = 0;
        for (size_t q = 0; q < n_qubits; q++) {
            if ((mask >> q) & 1) {
                idx |= size_t{3} << (2 * q);
            }
        }
        v(idx) = c;
    }
    return v;
}

std::vector<Effect> computational_povm(size_t n_qubits) {
    std::vector<Effect> out(size_t{1} << n_qubits);
    double c = 1 / std::sqrt(static_cast<double>(size_t{1} << n_qubits));
    for (size_t x = 0; x < out.size(); x++) {
        for (size_t mask = 0; mask < (size_t{1} << n_qubits); mask++) {
            // bit q of mask selects Z on qubit (n-1-q); the sign is (-1)^(popcount of x & mask).
            size_t idx = 0;
            for (size_t q = 0; q < n_qubits; q++) {
                if ((mask >> q) & 1) {
                    idx |= size_t{3} << (2 * q);
                }
            }
            double sign = (__builtin_popcountll(x & mask) & 1) ? -1.0 : 1.0;
            out[x].terms.emplace_back(static_cast<uint32_t>(idx), sign * c);
        }
        std::sort(out[x].terms.begin(), out[x].terms.end());
    }
    return out;
}

ErrorModel crosstalk_free_model(size_t n_qubits, double p_local) {
    check_register(n_qubits);
    check_rate(p_local, "p_local");
    ErrorModel model = base_model("crosstalk_free", n_qubits);
    model.layer_rule = [n_qubits, p_local](const Partition &partition, const std::vector<GateName> &gates) {
        check_layer(partition, gates, n_qubits);
        LayerMap layer;
        append_region_gates(layer, partition, gates);
        append_local_noise(layer, partition, gates, p_local, p_local);
        layer.fuse();
        return layer;
    };
    return model;
}

ErrorModel operation_crosstalk_depolarizing(size_t n_qubits, Qubit source, Qubit target, double p, double p_local) {
    check_register(n_qubits);
    check_rate(p, "p");
    check_rate(p_local, "p_local");
    if (source == target) {
        throw ParameterError("crosstalk source and target must differ");
    }
    if (source >= n_qubits || target >= n_qubits) {
        throw ParameterError("crosstalk qubit index out of range");
    }
    ErrorModel model = base_model("depolarizing_crosstalk", n_qubits);
    model.layer_rule = [=](const Partition &partition, const std::vector<GateName> &gates) {
        check_layer(partition, gates, n_qubits);
        LayerMap layer;
        append_region_gates(layer, partition, gates);
        if (p > 0 && action_on(partition, gates, source) == "Xhalf") {
            layer.append({target}, depolarizing(p));
        }
        append_local_noise(layer, partition, gates, p_local, p_local);
        layer.fuse();
        return layer;
    };
    return model;
}

ErrorModel operation_crosstalk_coherent(size_t n_qubits, Qubit source, Qubit target, double epsilon, double p_local) {
    check_register(n_qubits);
    check_rate(p_local, "p_local");
    if (source == target) {
        throw ParameterError("crosstalk source and target must differ");
    }
    if (source >= n_qubits || target >= n_qubits) {
        throw ParameterError("crosstalk qubit index out of range");
    }
    CMatrix generator = std::numbers::pi / 2 * kron(pauli_x(), CMatrix::Identity(2, 2)) +
                        epsilon / 2 * kron(pauli_z(), pauli_z());
    Superoperator coupled = Superoperator::from_unitary(exp_minus_half_i(generator));
    ErrorModel model = base_model("coherent_crosstalk", n_qubits);
    model.layer_rule = [=](const Partition &partition, const std::vector<GateName> &gates) {
        check_layer(partition, gates, n_qubits);
        LayerMap layer;
        if (action_on(partition, gates, source) == "Xhalf") {
            // The source region's only non-idle action is this Xhalf; the coupled unitary replaces it.
            append_region_gates(layer, partition, gates, partition.region_of(source));
            layer.append({source, target}, coupled);
        } else {
            append_region_gates(layer, partition, gates);
        }
        append_local_noise(layer, partition, gates, p_local, p_local);
        layer.fuse();
        return layer;
    };
    return model;
}

ErrorModel detection_crosstalk(double p_m, double p_local) {
    check_rate(p_m, "p_m");
    check_rate(p_local, "p_local");
    ErrorModel model = crosstalk_free_model(2, p_local);
    model.name = "detection_crosstalk";
    auto projector = [](size_t k) {
        CMatrix m = CMatrix::Zero(4, 4);
        m(k, k) = 1;
        return m;
    };
    model.povm = {
        Effect::from_operator(projector(0)),
        Effect::from_operator(projector(1)),
        Effect::from_operator((1 - p_m) * projector(2) + p_m * projector(3)),
        Effect::from_operator((1 - p_m) * projector(3) + p_m * projector(2)),
    };
    return model;
}

ErrorModel ladder_crosstalk_model(const DeviceLayout &layout, double p, double p_local, double p_idle_err) {
    if (!(layout == DeviceLayout::ladder6())) {
        throw ConfigError("the ladder model needs the 6-qubit 2x3 ladder layout");
    }
    check_rate(p, "p");
    check_rate(p_local, "p_local");
    check_rate(p_idle_err, "p_idle_err");
    ErrorModel model = base_model("ladder_crosstalk", 6);
    model.layer_rule = [=](const Partition &partition, const std::vector<GateName> &gates) {
        check_layer(partition, gates, 6);
        LayerMap layer;
        append_region_gates(layer, partition, gates);
        if (p > 0) {
            for (Qubit q = 3; q < 6; q++) {
                std::string a = action_on(partition, gates, q);
                if (a == "Xhalf" || a == "Yhalf") {
                    layer.append({q - 3}, depolarizing(p));
                }
            }
        }
        append_local_noise(layer, partition, gates, p_local, p_idle_err);
        layer.fuse();
        return layer;
    };
    return model;
}

namespace {

class LayerCache {
   public:
    LayerCache(const ErrorModel &model, const Partition &partition) : model_(model), partition_(partition) {
    }

    const LayerMap &get(const std::vector<GateName> &gates) {
        auto it = cache_.find(gates);
        if (it == cache_.end()) {
            it = cache_.emplace(gates, model_.layer_rule(partition_, gates)).first;
        }
        return it->second;
    }

   private:
    const ErrorModel &model_;
    const Partition &partition_;
    std::map<std::vector<GateName>, LayerMap> cache_;
};

OutcomeDistribution measure(const ErrorModel &model, const PauliVector &state) {
    OutcomeDistribution d;
    d.probabilities.reserve(model.povm.size());
    for (const auto &e : model.povm) {
        double p = e.expectation(state);
        if (p < -1e-10) {
            throw std::logic_error("simulated outcome probability is negative");
        }
        d.probabilities.push_back(std::max(p, 0.0));
    }
    if (std::abs(d.total() - 1) > 1e-10) {
        throw std::logic_error("simulated outcome distribution is not normalized");
    }
    return d;
}

PauliVector evolve_cached(const ErrorModel &model, const ExperimentPlan &plan, size_t c, LayerCache &cache) {
    PauliVector state = model.prep;
    std::vector<GateName> gates(plan.num_regions());
    for (size_t t = 0; t < plan.params.depth; t++) {
        for (size_t m = 0; m < plan.num_regions(); m++) {
            gates[m] = plan.layers(m, plan.circuits[c][m])[t];
        }
        cache.get(gates).apply(state, model.n_qubits);
    }
    return state;
}

void check_compatible(const ErrorModel &model, const Partition &partition) {
    if (model.n_qubits != partition.n_qubits()) {
        throw DimensionError(
            "model has " + std::to_string(model.n_qubits) + " qubits but the plan has " +
            std::to_string(partition.n_qubits()));
    }
    if (!model.layer_rule) {
        throw ConfigError("error model has no layer rule");
    }
}

}  // namespace

PauliVector evolve(const ErrorModel &model, const ExperimentPlan &plan, size_t c) {
    check_compatible(model, plan.partition);
    LayerCache cache(model, plan.partition);
    return evolve_cached(model, plan, c, cache);
}

OutcomeDistribution outcome_distribution(const ErrorModel &model, const ExperimentPlan &plan, size_t c) {
    return measure(model, evolve(model, plan, c));
}

OutcomeDistribution outcome_distribution(
    const ErrorModel &model, const Partition &partition, const std::vector<std::vector<GateName>> &layers) {
    check_compatible(model, partition);
    PauliVector state = model.prep;
    for (const auto &gates : layers) {
        model.layer_rule(partition, gates).apply(state, model.n_qubits);
    }
    return measure(model, state);
}

Dataset run_plan(const ErrorModel &model, const ExperimentPlan &plan, uint64_t seed) {
    check_compatible(model, plan.partition);
    size_t n = model.n_qubits;
    size_t M = plan.num_regions();
    size_t num_outcomes = size_t{1} << n;

    std::vector<uint8_t> widths;
    for (const auto &r : plan.partition.regions()) {
        widths.push_back(static_cast<uint8_t>(r.size()));
    }
    Dataset data(widths);

    // Per-outcome region values, first qubit of a region most significant.
    std::vector<uint8_t> region_values(num_outcomes * M);
    for (size_t x = 0; x < num_outcomes; x++) {
        for (size_t m = 0; m < M; m++) {
            uint8_t v = 0;
            for (Qubit q : plan.partition[m].qubits) {
                v = static_cast<uint8_t>((v << 1) | ((x >> (n - 1 - q)) & 1));
            }
            region_values[x * M + m] = v;
        }
    }

    size_t num_circuits = plan.circuits.size();
    size_t n_rep = plan.schedule.num_reps();
    std::vector<uint32_t> context_of(num_circuits);
    std::vector<uint8_t> outcomes(num_circuits * n_rep);
    LayerCache cache(model, plan.partition);
    std::vector<double> cdf(num_outcomes);
    for (size_t c = 0; c < num_circuits; c++) {
        context_of[c] = data.add_context(static_cast<uint32_t>(c), plan.circuits[c]);
        OutcomeDistribution dist = measure(model, evolve_cached(model, plan, c, cache));
        double acc = 0;
        size_t last = 0;
        for (size_t x = 0; x < num_outcomes; x++) {
            acc += dist.probabilities[x];
            cdf[x] = acc;
            if (dist.probabilities[x] > 0) {
                last = x;
            }
        }
        Rng rng(derive_seed(seed, static_cast<uint64_t>(c)));
        for (size_t r = 0; r < n_rep; r++) {
            double u = uniform01(rng) * acc;
            size_t x = static_cast<size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            outcomes[c * n_rep + r] = static_cast<uint8_t>(std::min(x, last));
        }
    }

    data.reserve(plan.schedule.size());
    plan.schedule.for_each([&](uint32_t c, uint32_t r) {
        uint8_t x = outcomes[c * n_rep + r];
        data.append(context_of[c], r, std::span<const uint8_t>(&region_values[x * M], M));
    });
    return data;
}

}  // namespace xtalk
