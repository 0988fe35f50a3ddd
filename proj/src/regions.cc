#include "xtalk/regions.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "xtalk/errors.h"

namespace xtalk {

DeviceLayout::DeviceLayout(size_t n_qubits, std::vector<Edge> coupling_edges) : n_(n_qubits) {
    if (n_qubits == 0) {
        throw ParameterError("layout needs at least one qubit");
    }
    for (auto [a, b] : coupling_edges) {
        if (a >= n_qubits || b >= n_qubits) {
            throw ParameterError(
                "coupling edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range for " +
                std::to_string(n_qubits) + " qubits");
        }
        if (a == b) {
            throw ParameterError("coupling edge is a self-loop on qubit " + std::to_string(a));
        }
        edges_.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
        throw ParameterError("duplicate coupling edge");
    }
}

DeviceLayout DeviceLayout::fully_connected(size_t n_qubits) {
    std::vector<Edge> edges;
    for (Qubit a = 0; a < n_qubits; a++) {
        for (Qubit b = a + 1; b < n_qubits; b++) {
            edges.emplace_back(a, b);
        }
    }
    return DeviceLayout(n_qubits, std::move(edges));
}

DeviceLayout DeviceLayout::ladder6() {
    return DeviceLayout(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {0, 3}, {1, 4}, {2, 5}});
}

DeviceLayout DeviceLayout::from_json(const nlohmann::json &j) {
    if (!j.contains("n_qubits")) {
        throw FormatError("layout is missing \"n_qubits\"");
    }
    std::vector<Edge> edges;
    if (j.contains("edges")) {
        for (const auto &e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) {
                throw FormatError("layout edge must be a pair of qubit indices");
            }
            edges.emplace_back(e[0].get<Qubit>(), e[1].get<Qubit>());
        }
    }
    return DeviceLayout(j.at("n_qubits").get<size_t>(), std::move(edges));
}

nlohmann::json DeviceLayout::to_json() const {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [a, b] : edges_) {
        edges.push_back({a, b});
    }
    return {{"n_qubits", n_}, {"edges", edges}};
}

bool DeviceLayout::has_edge(Qubit a, Qubit b) const {
    Edge e{std::min(a, b), std::max(a, b)};
    return std::binary_search(edges_.begin(), edges_.end(), e);
}

bool DeviceLayout::is_fully_connected() const {
    return edges_.size() == n_ * (n_ - 1) / 2;
}

Region::Region(std::vector<Qubit> qs) : qubits(std::move(qs)) {
    std::sort(qubits.begin(), qubits.end());
    if (qubits.empty() || qubits.size() > 2) {
        throw ParameterError("a region holds one or two qubits, got " + std::to_string(qubits.size()));
    }
    if (qubits.size() == 2 && qubits[0] == qubits[1]) {
        throw ParameterError("a 2-region needs two distinct qubits");
    }
}

bool Region::overlaps(const Region &other) const {
    for (Qubit a : qubits) {
        for (Qubit b : other.qubits) {
            if (a == b) {
                return true;
            }
        }
    }
    return false;
}

std::string Region::str() const {
    std::ostringstream out;
    out << '{';
    for (size_t k = 0; k < qubits.size(); k++) {
        out << (k ? "," : "") << qubits[k];
    }
    out << '}';
    return out.str();
}

Partition::Partition(size_t n_qubits, std::vector<Region> regions) : n_(n_qubits), regions_(std::move(regions)) {
    std::vector<int> seen(n_qubits, 0);
    for (const auto &r : regions_) {
        if (r.qubits.empty() || r.qubits.size() > 2) {
            throw ParameterError("a region holds one or two qubits");
        }
        for (Qubit q : r.qubits) {
            if (q >= n_qubits) {
                throw ParameterError("region " + r.str() + " references a qubit out of range");
            }
            if (seen[q]++) {
                throw ParameterError("qubit " + std::to_string(q) + " appears in more than one region");
            }
        }
    }
    for (size_t q = 0; q < n_qubits; q++) {
        if (!seen[q]) {
            throw ParameterError("qubit " + std::to_string(q) + " is not covered by any region");
        }
    }
    std::sort(regions_.begin(), regions_.end());
}

Partition::Partition(const DeviceLayout &layout, std::vector<Region> regions)
    : Partition(layout.n_qubits(), std::move(regions)) {
    check_allowed(layout);
}

void Partition::check_allowed(const DeviceLayout &layout) const {
    if (layout.n_qubits() != n_) {
        throw DimensionError("partition and layout disagree on the qubit count");
    }
    for (const auto &r : regions_) {
        if (r.size() == 2 && !layout.has_edge(r.qubits[0], r.qubits[1])) {
            throw ParameterError("2-region " + r.str() + " is not a coupling edge of the layout");
        }
    }
}

size_t Partition::region_of(Qubit q) const {
    for (size_t i = 0; i < regions_.size(); i++) {
        for (Qubit x : regions_[i].qubits) {
            if (x == q) {
                return i;
            }
        }
    }
    throw ParameterError("qubit " + std::to_string(q) + " is not in the partition");
}

bool Partition::contains(const Region &r) const {
    return std::find(regions_.begin(), regions_.end(), r) != regions_.end();
}

nlohmann::json Partition::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &r : regions_) {
        out.push_back(r.qubits);
    }
    return out;
}

Partition Partition::from_json(size_t n_qubits, const nlohmann::json &j) {
    std::vector<Region> regions;
    for (const auto &r : j) {
        regions.emplace_back(r.get<std::vector<Qubit>>());
    }
    return Partition(n_qubits, std::move(regions));
}

nlohmann::json PartitionSet::to_json() const {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto &p : partitions) {
        parts.push_back(p.to_json());
    }
    return {{"n", n_qubits}, {"partitions", parts}};
}

PartitionSet PartitionSet::from_json(const nlohmann::json &j) {
    PartitionSet out;
    out.n_qubits = j.at("n").get<size_t>();
    for (const auto &p : j.at("partitions")) {
        out.partitions.push_back(Partition::from_json(out.n_qubits, p));
    }
    return out;
}

Partition one_partition(const DeviceLayout &layout) {
    std::vector<Region> regions;
    for (Qubit q = 0; q < layout.n_qubits(); q++) {
        regions.emplace_back(std::vector<Qubit>{q});
    }
    return Partition(layout.n_qubits(), std::move(regions));
}

std::vector<Region> enumerate_two_regions(const DeviceLayout &layout) {
    std::vector<Region> out;
    for (auto [a, b] : layout.edges()) {
        out.emplace_back(std::vector<Qubit>{a, b});
    }
    return out;
}

namespace {

Partition partition_from_matching(const DeviceLayout &layout, const std::vector<Edge> &matching) {
    std::vector<Region> regions;
    std::vector<bool> used(layout.n_qubits(), false);
    for (auto [a, b] : matching) {
        regions.emplace_back(std::vector<Qubit>{a, b});
        used[a] = used[b] = true;
    }
    for (Qubit q = 0; q < layout.n_qubits(); q++) {
        if (!used[q]) {
            regions.emplace_back(std::vector<Qubit>{q});
        }
    }
    return Partition(layout.n_qubits(), std::move(regions));
}

constexpr size_t kMaxEnumeratedMatchings = 2'000'000;

void enumerate_maximal_matchings(
    const DeviceLayout &layout,
    const std::vector<std::vector<Qubit>> &adjacency,
    Qubit v,
    std::vector<bool> &matched,
    std::vector<Edge> &current,
    std::vector<std::vector<Edge>> &out) {
    size_t n = layout.n_qubits();
    while (v < n && matched[v]) {
        v++;
    }
    if (v == n) {
        for (auto [a, b] : layout.edges()) {
            if (!matched[a] && !matched[b]) {
                return;
            }
        }
        out.push_back(current);
        if (out.size() > kMaxEnumeratedMatchings) {
            throw ConfigError("layout has too many maximal matchings to sample uniformly");
        }
        return;
    }
    // v stays unmatched.
    enumerate_maximal_matchings(layout, adjacency, v + 1, matched, current, out);
    for (Qubit u : adjacency[v]) {
        if (u > v && !matched[u]) {
            matched[v] = matched[u] = true;
            current.emplace_back(v, u);
            enumerate_maximal_matchings(layout, adjacency, v + 1, matched, current, out);
            current.pop_back();
            matched[v] = matched[u] = false;
        }
    }
}

}  // namespace

TwoPartitionSampler::TwoPartitionSampler(const DeviceLayout &layout)
    : layout_(layout), complete_(layout.is_fully_connected()) {
    if (complete_ || layout.edges().empty()) {
        return;
    }
    std::vector<std::vector<Qubit>> adjacency(layout.n_qubits());
    for (auto [a, b] : layout.edges()) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    }
    std::vector<bool> matched(layout.n_qubits(), false);
    std::vector<Edge> current;
    enumerate_maximal_matchings(layout, adjacency, 0, matched, current, matchings_);
}

Partition TwoPartitionSampler::sample(Rng &rng) const {
    if (layout_.edges().empty()) {
        return one_partition(layout_);
    }
    if (complete_) {
        // Pairing consecutive entries of a uniform permutation is uniform over (near-)perfect matchings.
        std::vector<Qubit> order(layout_.n_qubits());
        for (Qubit q = 0; q < order.size(); q++) {
            order[q] = q;
        }
        shuffle_in_place(order, rng);
        std::vector<Edge> matching;
        for (size_t k = 0; k + 1 < order.size(); k += 2) {
            matching.emplace_back(std::min(order[k], order[k + 1]), std::max(order[k], order[k + 1]));
        }
        return partition_from_matching(layout_, matching);
    }
    return partition_from_matching(layout_, matchings_[uniform_index(rng, matchings_.size())]);
}

Partition random_two_partition(const DeviceLayout &layout, uint64_t seed) {
    Rng rng(seed);
    return TwoPartitionSampler(layout).sample(rng);
}

size_t cover_size(size_t n_qubits, size_t num_two_regions, double epsilon) {
    if (!(epsilon > 0 && epsilon < 1)) {
        throw ParameterError("epsilon must lie in (0, 1)");
    }
    if (num_two_regions == 0) {
        return 0;
    }
    double n = static_cast<double>(n_qubits);
    double bound = n * n * (2 * std::log(static_cast<double>(num_two_regions)) - std::log(epsilon));
    return static_cast<size_t>(std::ceil(bound));
}

std::vector<std::pair<Region, Region>> disjoint_two_region_pairs(const DeviceLayout &layout) {
    auto regions = enumerate_two_regions(layout);
    std::vector<std::pair<Region, Region>> out;
    for (size_t i = 0; i < regions.size(); i++) {
        for (size_t j = i + 1; j < regions.size(); j++) {
            if (!regions[i].overlaps(regions[j])) {
                out.emplace_back(regions[i], regions[j]);
            }
        }
    }
    return out;
}

namespace {

Partition complete_greedily(const DeviceLayout &layout, std::vector<Edge> seed_edges) {
    std::vector<bool> used(layout.n_qubits(), false);
    for (auto [a, b] : seed_edges) {
        used[a] = used[b] = true;
    }
    for (auto [a, b] : layout.edges()) {
        if (!used[a] && !used[b]) {
            used[a] = used[b] = true;
            seed_edges.emplace_back(a, b);
        }
    }
    return partition_from_matching(layout, seed_edges);
}

}  // namespace

PartitionSet partition_cover(const DeviceLayout &layout, double epsilon, uint64_t seed, CoverMode mode) {
    if (!(epsilon > 0 && epsilon < 1)) {
        throw ParameterError("epsilon must lie in (0, 1)");
    }
    PartitionSet out;
    out.n_qubits = layout.n_qubits();
    if (mode == CoverMode::BruteForce) {
        std::set<std::vector<Region>> seen;
        for (const auto &[a, b] : disjoint_two_region_pairs(layout)) {
            Partition p = complete_greedily(layout, {{a.qubits[0], a.qubits[1]}, {b.qubits[0], b.qubits[1]}});
            if (seen.insert(p.regions()).second) {
                out.partitions.push_back(std::move(p));
            }
        }
        for (const auto &r : enumerate_two_regions(layout)) {
            bool covered = std::any_of(
                out.partitions.begin(), out.partitions.end(), [&](const Partition &p) { return p.contains(r); });
            if (!covered) {
                Partition p = complete_greedily(layout, {{r.qubits[0], r.qubits[1]}});
                seen.insert(p.regions());
                out.partitions.push_back(std::move(p));
            }
        }
        if (out.partitions.empty()) {
            out.partitions.push_back(one_partition(layout));
        }
        return out;
    }
    size_t count = cover_size(layout.n_qubits(), layout.edges().size(), epsilon);
    TwoPartitionSampler sampler(layout);
    Rng rng(seed);
    out.partitions.reserve(count);
    for (size_t k = 0; k < count; k++) {
        out.partitions.push_back(sampler.sample(rng));
    }
    if (out.partitions.empty()) {
        out.partitions.push_back(one_partition(layout));
    }
    return out;
}

size_t count_uncovered_pairs(const DeviceLayout &layout, const PartitionSet &set) {
    size_t uncovered = 0;
    for (const auto &[a, b] : disjoint_two_region_pairs(layout)) {
        bool covered = false;
        for (const auto &p : set.partitions) {
            if (p.contains(a) && p.contains(b)) {
                covered = true;
                break;
            }
        }
        uncovered += !covered;
    }
    return uncovered;
}

}  // namespace xtalk
