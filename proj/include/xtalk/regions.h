#ifndef XTALK_REGIONS_H
#define XTALK_REGIONS_H

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xtalk/rng.h"

namespace xtalk {

using Qubit = uint32_t;
using Edge = std::pair<Qubit, Qubit>;

/// Qubit count plus the pairs that support native two-qubit operations.
class DeviceLayout {
   public:
    DeviceLayout(size_t n_qubits, std::vector<Edge> coupling_edges);

    static DeviceLayout fully_connected(size_t n_qubits);
    /// The 2x3 ladder: top row 0,1,2 and bottom row 3,4,5 with rungs 0-3, 1-4, 2-5.
    static DeviceLayout ladder6();
    static DeviceLayout from_json(const nlohmann::json &j);
    nlohmann::json to_json() const;

    size_t n_qubits() const {
        return n_;
    }
    /// Normalized (lo, hi) and sorted.
    const std::vector<Edge> &edges() const {
        return edges_;
    }
    bool has_edge(Qubit a, Qubit b) const;
    bool is_fully_connected() const;
    bool operator==(const DeviceLayout &other) const = default;

   private:
    size_t n_;
    std::vector<Edge> edges_;
};

/// A sorted set of one or two qubits treated as a unit.
struct Region {
    std::vector<Qubit> qubits;

    Region() = default;
    explicit Region(std::vector<Qubit> qs);
    size_t size() const {
        return qubits.size();
    }
    bool overlaps(const Region &other) const;
    std::string str() const;
    auto operator<=>(const Region &other) const = default;
};

/// Disjoint regions covering every qubit. Regions are kept sorted by their lowest qubit,
/// so region i of the 1-partition is qubit i.
class Partition {
   public:
    Partition() = default;
    /// Checks disjointness and cover; throws ParameterError otherwise.
    Partition(size_t n_qubits, std::vector<Region> regions);
    /// Additionally checks that every 2-region is a coupling edge of the layout.
    Partition(const DeviceLayout &layout, std::vector<Region> regions);

    size_t n_qubits() const {
        return n_;
    }
    size_t num_regions() const {
        return regions_.size();
    }
    const std::vector<Region> &regions() const {
        return regions_;
    }
    const Region &operator[](size_t i) const {
        return regions_[i];
    }
    /// Index of the region containing qubit q.
    size_t region_of(Qubit q) const;
    bool contains(const Region &r) const;
    void check_allowed(const DeviceLayout &layout) const;
    bool operator==(const Partition &other) const = default;

    nlohmann::json to_json() const;
    static Partition from_json(size_t n_qubits, const nlohmann::json &j);

   private:
    size_t n_ = 0;
    std::vector<Region> regions_;
};

struct PartitionSet {
    size_t n_qubits = 0;
    std::vector<Partition> partitions;

    nlohmann::json to_json() const;
    static PartitionSet from_json(const nlohmann::json &j);
};

Partition one_partition(const DeviceLayout &layout);

std::vector<Region> enumerate_two_regions(const DeviceLayout &layout);

/// Samples maximal matchings of the coupling graph uniformly; unmatched qubits become 1-regions.
/// Complete graphs are sampled by random pairing; other layouts by enumerating all maximal
/// matchings once at construction.
class TwoPartitionSampler {
   public:
    explicit TwoPartitionSampler(const DeviceLayout &layout);
    Partition sample(Rng &rng) const;
    /// Number of distinct partitions the sampler draws from (0 when not enumerated).
    size_t support_size() const {
        return matchings_.size();
    }

   private:
    DeviceLayout layout_;
    bool complete_;
    std::vector<std::vector<Edge>> matchings_;
};

Partition random_two_partition(const DeviceLayout &layout, uint64_t seed);

/// Smallest cover size guaranteeing, for even n on a complete layout, that every pair of
/// disjoint 2-regions is covered with probability at least 1 - epsilon: ceil(n^2 (2 ln R - ln eps)).
size_t cover_size(size_t n_qubits, size_t num_two_regions, double epsilon);

enum class CoverMode { Random, BruteForce };

/// Random mode: cover_size(...) independent uniform 2-partitions.
/// Brute-force mode: for each pair of disjoint allowed 2-regions, one partition that starts
/// from that pair and greedily matches the rest (duplicates dropped), plus one partition for
/// each 2-region no such partition contains.
PartitionSet partition_cover(
    const DeviceLayout &layout, double epsilon, uint64_t seed, CoverMode mode = CoverMode::Random);

/// All unordered pairs of disjoint allowed 2-regions.
std::vector<std::pair<Region, Region>> disjoint_two_region_pairs(const DeviceLayout &layout);

/// Number of disjoint 2-region pairs that no partition of the set contains together.
size_t count_uncovered_pairs(const DeviceLayout &layout, const PartitionSet &set);

}  // namespace xtalk

#endif
