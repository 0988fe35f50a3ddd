#ifndef XTALK_DATASET_H
#define XTALK_DATASET_H

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace xtalk {

/// One observed repetition: a setting index and a measured bit string per region.
struct TrialRecord {
    uint32_t circuit = 0;
    uint32_t rep = 0;
    std::vector<uint32_t> settings;
    std::vector<std::string> results;

    bool operator==(const TrialRecord &other) const = default;
};

/// Columnar store of trial records. Identical (circuit, settings) assignments are interned as
/// contexts; each row holds a context id, a repetition index and one result value per region.
class Dataset {
   public:
    Dataset() = default;
    /// `result_widths[m]` is the number of measured bits of region m (1..8).
    explicit Dataset(std::vector<uint8_t> result_widths);

    size_t num_regions() const {
        return widths_.size();
    }
    size_t num_rows() const {
        return reps_.size();
    }
    size_t num_contexts() const {
        return context_circuit_.size();
    }
    const std::vector<uint8_t> &result_widths() const {
        return widths_;
    }

    uint32_t add_context(uint32_t circuit, std::span<const uint32_t> settings);
    void append(uint32_t context, uint32_t rep, std::span<const uint8_t> results);
    void append(const TrialRecord &record);
    void reserve(size_t rows);

    uint32_t context(size_t row) const {
        return contexts_[row];
    }
    uint32_t rep(size_t row) const {
        return reps_[row];
    }
    uint8_t result(size_t row, size_t region) const {
        return results_[row * widths_.size() + region];
    }
    uint32_t context_circuit(uint32_t context) const {
        return context_circuit_[context];
    }
    uint32_t context_setting(uint32_t context, size_t region) const {
        return context_settings_[context * widths_.size() + region];
    }
    TrialRecord record(size_t row) const;

    /// FNV-1a over every record, as a 16-digit hex string.
    std::string digest() const;

    /// One JSON object per line: {"circuit":..,"rep":..,"settings":[..],"results":["b..",..]}.
    void write_jsonl(std::ostream &out) const;
    /// Throws FormatError naming the offending line numbers.
    static Dataset read_jsonl(std::istream &in);

    bool operator==(const Dataset &other) const;

   private:
    std::vector<uint8_t> widths_;
    std::vector<uint32_t> context_circuit_;
    std::vector<uint32_t> context_settings_;
    std::map<std::vector<uint32_t>, uint32_t> context_index_;
    std::vector<uint32_t> contexts_;
    std::vector<uint32_t> reps_;
    std::vector<uint8_t> results_;
};

std::string format_bits(uint32_t value, size_t width);

}  // namespace xtalk

#endif
