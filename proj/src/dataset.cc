#include "xtalk/dataset.h"

#include <cstdio>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "xtalk/errors.h"

namespace xtalk {

std::string format_bits(uint32_t value, size_t width) {
    std::string s(width, '0');
    for (size_t k = 0; k < width; k++) {
        if ((value >> (width - 1 - k)) & 1) {
            s[k] = '1';
        }
    }
    return s;
}

namespace {

uint8_t parse_bits(const std::string &s) {
    if (s.empty() || s.size() > 8) {
        throw FormatError("result bit string must hold 1 to 8 bits");
    }
    uint8_t v = 0;
    for (char c : s) {
        if (c != '0' && c != '1') {
            throw FormatError("result bit string contains a character other than 0/1");
        }
        v = static_cast<uint8_t>((v << 1) | (c == '1'));
    }
    return v;
}

}  // namespace

Dataset::Dataset(std::vector<uint8_t> result_widths) : widths_(std::move(result_widths)) {
    if (widths_.empty()) {
        throw DimensionError("a dataset needs at least one region");
    }
    for (uint8_t w : widths_) {
        if (w < 1 || w > 8) {
            throw DimensionError("region result width must lie in 1..8 bits");
        }
    }
}

uint32_t Dataset::add_context(uint32_t circuit, std::span<const uint32_t> settings) {
    if (settings.size() != widths_.size()) {
        throw DimensionError("context must give one setting per region");
    }
    std::vector<uint32_t> key;
    key.reserve(settings.size() + 1);
    key.push_back(circuit);
    key.insert(key.end(), settings.begin(), settings.end());
    auto [it, inserted] = context_index_.emplace(std::move(key), static_cast<uint32_t>(context_circuit_.size()));
    if (inserted) {
        context_circuit_.push_back(circuit);
        context_settings_.insert(context_settings_.end(), settings.begin(), settings.end());
    }
    return it->second;
}

void Dataset::append(uint32_t context, uint32_t rep, std::span<const uint8_t> results) {
    if (context >= context_circuit_.size()) {
        throw ParameterError("unknown context id");
    }
    if (results.size() != widths_.size()) {
        throw DimensionError("record must give one result per region");
    }
    contexts_.push_back(context);
    reps_.push_back(rep);
    results_.insert(results_.end(), results.begin(), results.end());
}

void Dataset::append(const TrialRecord &record) {
    if (record.results.size() != widths_.size()) {
        throw DimensionError("record must give one result per region");
    }
    std::vector<uint8_t> values(widths_.size());
    for (size_t m = 0; m < widths_.size(); m++) {
        if (record.results[m].size() != widths_[m]) {
            throw DimensionError("result bit string width differs from the region's width");
        }
        values[m] = parse_bits(record.results[m]);
    }
    append(add_context(record.circuit, record.settings), record.rep, values);
}

void Dataset::reserve(size_t rows) {
    contexts_.reserve(rows);
    reps_.reserve(rows);
    results_.reserve(rows * widths_.size());
}

TrialRecord Dataset::record(size_t row) const {
    TrialRecord r;
    uint32_t ctx = contexts_[row];
    r.circuit = context_circuit_[ctx];
    r.rep = reps_[row];
    for (size_t m = 0; m < widths_.size(); m++) {
        r.settings.push_back(context_setting(ctx, m));
        r.results.push_back(format_bits(result(row, m), widths_[m]));
    }
    return r;
}

std::string Dataset::digest() const {
    uint64_t h = 0xCBF29CE484222325ULL;
    auto feed = [&h](uint64_t v) {
        for (int b = 0; b < 8; b++) {
            h ^= (v >> (8 * b)) & 0xFF;
            h *= 0x100000001B3ULL;
        }
    };
    for (uint8_t w : widths_) {
        feed(w);
    }
    for (size_t row = 0; row < num_rows(); row++) {
        uint32_t ctx = contexts_[row];
        feed(context_circuit_[ctx]);
        feed(reps_[row]);
        for (size_t m = 0; m < widths_.size(); m++) {
            feed(context_setting(ctx, m));
            feed(result(row, m));
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void Dataset::write_jsonl(std::ostream &out) const {
    std::string line;
    for (size_t row = 0; row < num_rows(); row++) {
        uint32_t ctx = contexts_[row];
        line = "{\"circuit\":" + std::to_string(context_circuit_[ctx]) + ",\"rep\":" + std::to_string(reps_[row]) +
               ",\"settings\":[";
        for (size_t m = 0; m < widths_.size(); m++) {
            if (m) {
                line += ',';
            }
            line += std::to_string(context_setting(ctx, m));
        }
        line += "],\"results\":[";
        for (size_t m = 0; m < widths_.size(); m++) {
            if (m) {
                line += ',';
            }
            line += '"';
            line += format_bits(result(row, m), widths_[m]);
            line += '"';
        }
        line += "]}\n";
        out << line;
    }
}

Dataset Dataset::read_jsonl(std::istream &in) {
    Dataset out;
    bool initialized = false;
    std::vector<size_t> bad_lines;
    std::string first_error;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            auto j = nlohmann::json::parse(line);
            TrialRecord r;
            r.circuit = j.at("circuit").get<uint32_t>();
            r.rep = j.at("rep").get<uint32_t>();
            r.settings = j.at("settings").get<std::vector<uint32_t>>();
            r.results = j.at("results").get<std::vector<std::string>>();
            if (!initialized) {
                std::vector<uint8_t> widths;
                for (const auto &s : r.results) {
                    widths.push_back(static_cast<uint8_t>(std::min<size_t>(s.size(), 255)));
                }
                out = Dataset(std::move(widths));
                initialized = true;
            }
            if (r.settings.size() != out.num_regions()) {
                throw DimensionError("settings length differs from earlier records");
            }
            out.append(r);
        } catch (const std::exception &e) {
            if (bad_lines.empty()) {
                first_error = e.what();
            }
            bad_lines.push_back(line_no);
        }
    }
    if (!bad_lines.empty()) {
        std::string msg = "malformed dataset records on line(s)";
        for (size_t k = 0; k < bad_lines.size() && k < 20; k++) {
            msg += ' ' + std::to_string(bad_lines[k]);
        }
        if (bad_lines.size() > 20) {
            msg += " ... (" + std::to_string(bad_lines.size()) + " total)";
        }
        msg += "; first error: " + first_error;
        throw FormatError(msg);
    }
    if (!initialized) {
        throw FormatError("dataset is empty");
    }
    return out;
}

bool Dataset::operator==(const Dataset &other) const {
    if (widths_ != other.widths_ || num_rows() != other.num_rows()) {
        return false;
    }
    for (size_t row = 0; row < num_rows(); row++) {
        if (record(row) != other.record(row)) {
            return false;
        }
    }
    return true;
}

}  // namespace xtalk
