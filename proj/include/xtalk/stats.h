#ifndef XTALK_STATS_H
#define XTALK_STATS_H

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xtalk/dataset.h"

namespace xtalk {

enum class VarKind { Setting, Result };

/// One categorical analysis variable. `levels` lists the raw values that were observed, in
/// increasing order; the variable's code k stands for levels[k].
struct VariableSpec {
    size_t id = 0;
    VarKind kind = VarKind::Setting;
    size_t region = 0;
    std::vector<uint32_t> levels;
    std::string name;  // "S0", "R3", ...

    size_t cardinality() const {
        return levels.size();
    }
};

std::string variable_name(VarKind kind, size_t region);

/// Weighted categorical sample: identical joint assignments are stored once with a count.
class CategoricalData {
   public:
    CategoricalData() = default;

    /// Variables S0..S_{M-1} followed by R0..R_{M-1}; one cell per distinct (context, results).
    static CategoricalData from_dataset(const Dataset &data);
    /// Raw samples, `columns[v][row]`. Specs supply kind, region and name; levels are filled in.
    static CategoricalData from_columns(std::vector<VariableSpec> specs, const std::vector<std::vector<uint32_t>> &columns);

    size_t num_variables() const {
        return specs_.size();
    }
    size_t num_cells() const {
        return weights_.size();
    }
    uint64_t total() const {
        return total_;
    }
    const std::vector<VariableSpec> &specs() const {
        return specs_;
    }
    const VariableSpec &spec(size_t v) const {
        return specs_[v];
    }
    uint16_t code(size_t v, size_t cell) const {
        return codes_[v][cell];
    }
    uint64_t weight(size_t cell) const {
        return weights_[cell];
    }
    /// Index of the variable with this kind and region, if present.
    std::optional<size_t> find(VarKind kind, size_t region) const;

    /// Variable k of the result is variable order[k] of this one.
    CategoricalData permuted(const std::vector<size_t> &order) const;

   private:
    void build(std::vector<VariableSpec> specs, const std::vector<std::vector<uint32_t>> &values,
               const std::vector<uint64_t> &weights);

    std::vector<VariableSpec> specs_;
    std::vector<std::vector<uint16_t>> codes_;  // [variable][cell]
    std::vector<uint64_t> weights_;
    uint64_t total_ = 0;
};

/// Counts of (X_i, X_j) within each observed stratum of the conditioning variables.
struct ContingencyTable {
    struct Entry {
        uint32_t stratum;
        uint16_t xi;
        uint16_t xj;
        uint64_t count;
    };

    size_t i = 0;
    size_t j = 0;
    std::vector<size_t> cond;
    size_t card_i = 0;
    size_t card_j = 0;
    /// Product of conditioning cardinalities.
    double num_strata = 1;
    /// Nonzero joint counts sorted by (stratum, xi, xj).
    std::vector<Entry> entries;
    std::vector<uint64_t> n_a;   // [stratum]
    std::vector<uint64_t> n_ia;  // [stratum * card_i + xi]
    std::vector<uint64_t> n_ja;  // [stratum * card_j + xj]
    uint64_t total = 0;

    size_t observed_strata() const {
        return n_a.size();
    }
};

ContingencyTable contingency_table(const CategoricalData &data, size_t i, size_t j, const std::vector<size_t> &cond);

/// Full: df = (|X_i|-1)(|X_j|-1) prod |X_A|.
/// Adjusted: df = sum over observed strata of (levels of X_i seen - 1)(levels of X_j seen - 1).
enum class DfMode { Full, Adjusted };

struct CITestResult {
    double g2 = 0;
    double df = 0;
    double p_value = 1;
    /// X_i or X_j takes a single observed value; the test is skipped with p = 1.
    bool degenerate = false;
    /// More than 20% of the conditioning strata are empty.
    bool sparse = false;
};

/// Regularized upper incomplete gamma Q(df/2, x/2).
double chi2_sf(double x, double df);

/// G^2 = 2 sum n_ijA ln(n_ijA n_A / (n_iA n_jA)), referred to chi-squared at the chosen df.
/// An adjusted df of zero gives p = 1.
CITestResult g2_test(
    const CategoricalData &data, size_t i, size_t j, const std::vector<size_t> &cond, DfMode mode = DfMode::Full);
CITestResult g2_test(const ContingencyTable &table, DfMode mode = DfMode::Full);

struct TvdSummary {
    bool computable = false;
    double max = 0;
    double median = 0;
    /// Raw values of X attaining the maximum.
    uint32_t argmax_first = 0;
    uint32_t argmax_second = 0;
    /// Raw value of the stratifying setting at the maximum, when stratified.
    std::optional<uint32_t> argmax_stratum;
    size_t num_pairs = 0;
};

/// Max and median over value pairs of X of d = sum_z |P(z | x_i) - P(z | x_j)| (range [0, 2]).
/// A setting of region a against a result of region b != a is compared only within strata of
/// equal S_b.
TvdSummary edge_tvd(const CategoricalData &data, size_t x, size_t y);

}  // namespace xtalk

#endif
