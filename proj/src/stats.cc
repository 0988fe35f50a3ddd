#include "xtalk/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "xtalk/errors.h"

namespace xtalk {

std::string variable_name(VarKind kind, size_t region) {
    return (kind == VarKind::Setting ? "S" : "R") + std::to_string(region);
}

void CategoricalData::build(
    std::vector<VariableSpec> specs, const std::vector<std::vector<uint32_t>> &values,
    const std::vector<uint64_t> &weights) {
    size_t V = specs.size();
    size_t rows = weights.size();
    if (values.size() != V) {
        throw DimensionError("one value column is needed per variable");
    }
    std::vector<std::vector<uint16_t>> codes(V, std::vector<uint16_t>(rows));
    for (size_t v = 0; v < V; v++) {
        if (values[v].size() != rows) {
            throw DimensionError("value columns differ in length");
        }
        std::vector<uint32_t> levels = values[v];
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        if (levels.size() > std::numeric_limits<uint16_t>::max()) {
            throw ParameterError("variable " + specs[v].name + " has too many levels");
        }
        for (size_t r = 0; r < rows; r++) {
            codes[v][r] = static_cast<uint16_t>(
                std::lower_bound(levels.begin(), levels.end(), values[v][r]) - levels.begin());
        }
        specs[v].id = v;
        specs[v].levels = std::move(levels);
    }

    std::vector<size_t> order(rows);
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](size_t a, size_t b) {
        for (size_t v = 0; v < V; v++) {
            if (codes[v][a] != codes[v][b]) {
                return codes[v][a] < codes[v][b];
            }
        }
        return false;
    };
    std::sort(order.begin(), order.end(), less);

    specs_ = std::move(specs);
    codes_.assign(V, {});
    weights_.clear();
    total_ = 0;
    size_t last = SIZE_MAX;
    for (size_t r : order) {
        if (weights[r] == 0) {
            continue;
        }
        if (last != SIZE_MAX && !less(last, r)) {
            weights_.back() += weights[r];
        } else {
            last = r;
            for (size_t v = 0; v < V; v++) {
                codes_[v].push_back(codes[v][r]);
            }
            weights_.push_back(weights[r]);
        }
        total_ += weights[r];
    }
}

CategoricalData CategoricalData::from_dataset(const Dataset &data) {
    size_t M = data.num_regions();
    if (M > 8) {
        throw DimensionError("analysis supports at most 8 regions");
    }
    std::vector<std::unordered_map<uint64_t, uint64_t>> per_context(data.num_contexts());
    for (size_t row = 0; row < data.num_rows(); row++) {
        uint64_t packed = 0;
        for (size_t m = 0; m < M; m++) {
            packed = (packed << 8) | data.result(row, m);
        }
        per_context[data.context(row)][packed]++;
    }

    std::vector<VariableSpec> specs;
    for (VarKind kind : {VarKind::Setting, VarKind::Result}) {
        for (size_t m = 0; m < M; m++) {
            VariableSpec s;
            s.kind = kind;
            s.region = m;
            s.name = variable_name(kind, m);
            specs.push_back(std::move(s));
        }
    }
    std::vector<std::vector<uint32_t>> values(2 * M);
    std::vector<uint64_t> weights;
    for (uint32_t ctx = 0; ctx < per_context.size(); ctx++) {
        for (auto [packed, count] : per_context[ctx]) {
            for (size_t m = 0; m < M; m++) {
                values[m].push_back(data.context_setting(ctx, m));
                values[M + m].push_back(static_cast<uint32_t>((packed >> (8 * (M - 1 - m))) & 0xff));
            }
            weights.push_back(count);
        }
    }
    CategoricalData out;
    out.build(std::move(specs), values, weights);
    return out;
}

CategoricalData CategoricalData::from_columns(
    std::vector<VariableSpec> specs, const std::vector<std::vector<uint32_t>> &columns) {
    size_t rows = columns.empty() ? 0 : columns[0].size();
    CategoricalData out;
    out.build(std::move(specs), columns, std::vector<uint64_t>(rows, 1));
    return out;
}

std::optional<size_t> CategoricalData::find(VarKind kind, size_t region) const {
    for (size_t v = 0; v < specs_.size(); v++) {
        if (specs_[v].kind == kind && specs_[v].region == region) {
            return v;
        }
    }
    return std::nullopt;
}

CategoricalData CategoricalData::permuted(const std::vector<size_t> &order) const {
    if (order.size() != specs_.size()) {
        throw DimensionError("permutation size differs from the variable count");
    }
    std::vector<bool> seen(order.size(), false);
    CategoricalData out;
    out.weights_ = weights_;
    out.total_ = total_;
    for (size_t k = 0; k < order.size(); k++) {
        if (order[k] >= order.size() || seen[order[k]]) {
            throw ParameterError("not a permutation");
        }
        seen[order[k]] = true;
        out.specs_.push_back(specs_[order[k]]);
        out.specs_.back().id = k;
        out.codes_.push_back(codes_[order[k]]);
    }
    return out;
}

ContingencyTable contingency_table(const CategoricalData &data, size_t i, size_t j, const std::vector<size_t> &cond) {
    size_t V = data.num_variables();
    if (i >= V || j >= V) {
        throw ParameterError("variable index out of range");
    }
    if (i == j) {
        throw ParameterError("a variable cannot be tested against itself");
    }
    for (size_t a : cond) {
        if (a >= V) {
            throw ParameterError("conditioning variable index out of range");
        }
        if (a == i || a == j) {
            throw ParameterError("tested variables cannot appear in the conditioning set");
        }
    }
    if (data.total() == 0) {
        throw ParameterError("cannot test on an empty dataset");
    }

    ContingencyTable t;
    t.i = i;
    t.j = j;
    t.cond = cond;
    t.card_i = data.spec(i).cardinality();
    t.card_j = data.spec(j).cardinality();
    for (size_t a : cond) {
        t.num_strata *= static_cast<double>(data.spec(a).cardinality());
    }

    size_t cells = data.num_cells();
    std::vector<uint32_t> stratum(cells, 0);
    uint32_t num_observed = 1;
    if (!cond.empty()) {
        std::vector<uint32_t> order(cells);
        std::iota(order.begin(), order.end(), 0);
        auto cmp = [&](uint32_t a, uint32_t b) {
            for (size_t v : cond) {
                if (data.code(v, a) != data.code(v, b)) {
                    return data.code(v, a) < data.code(v, b) ? -1 : 1;
                }
            }
            return 0;
        };
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) { return cmp(a, b) < 0; });
        num_observed = 0;
        for (size_t k = 0; k < cells; k++) {
            if (k == 0 || cmp(order[k - 1], order[k]) != 0) {
                num_observed++;
            }
            stratum[order[k]] = num_observed - 1;
        }
    }

    std::vector<std::pair<uint64_t, uint64_t>> keyed(cells);
    for (size_t c = 0; c < cells; c++) {
        uint64_t key = (uint64_t{stratum[c]} << 32) | (uint64_t{data.code(i, c)} << 16) | data.code(j, c);
        keyed[c] = {key, data.weight(c)};
    }
    std::sort(keyed.begin(), keyed.end());

    t.n_a.assign(num_observed, 0);
    t.n_ia.assign(size_t{num_observed} * t.card_i, 0);
    t.n_ja.assign(size_t{num_observed} * t.card_j, 0);
    for (auto [key, w] : keyed) {
        auto s = static_cast<uint32_t>(key >> 32);
        auto xi = static_cast<uint16_t>((key >> 16) & 0xffff);
        auto xj = static_cast<uint16_t>(key & 0xffff);
        if (!t.entries.empty() && t.entries.back().stratum == s && t.entries.back().xi == xi &&
            t.entries.back().xj == xj) {
            t.entries.back().count += w;
        } else {
            t.entries.push_back({s, xi, xj, w});
        }
        t.n_a[s] += w;
        t.n_ia[s * t.card_i + xi] += w;
        t.n_ja[s * t.card_j + xj] += w;
        t.total += w;
    }
    return t;
}

namespace {

// Series for the regularized lower incomplete gamma P(a, z); converges for z < a + 1.
double gamma_p_series(double a, double z) {
    double term = 1 / a;
    double sum = term;
    for (int n = 1; n < 100000; n++) {
        term *= z / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) {
            break;
        }
    }
    return sum * std::exp(-z + a * std::log(z) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, z); converges for z >= a + 1.
double gamma_q_fraction(double a, double z) {
    constexpr double tiny = 1e-300;
    double b = z + 1 - a;
    double c = 1 / tiny;
    double d = 1 / b;
    double h = d;
    for (int n = 1; n < 100000; n++) {
        double an = -n * (n - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1) < 1e-17) {
            break;
        }
    }
    return std::exp(-z + a * std::log(z) - std::lgamma(a)) * h;
}

}  // namespace

double chi2_sf(double x, double df) {
    if (!(df > 0)) {
        throw ParameterError("chi-squared degrees of freedom must be positive");
    }
    if (std::isnan(x)) {
        throw ParameterError("chi-squared statistic is NaN");
    }
    if (x <= 0) {
        return 1;
    }
    double a = df / 2;
    double z = x / 2;
    double q = z < a + 1 ? 1 - gamma_p_series(a, z) : gamma_q_fraction(a, z);
    return std::clamp(q, 0.0, 1.0);
}

CITestResult g2_test(const ContingencyTable &t, DfMode mode) {
    CITestResult r;
    if (t.card_i < 2 || t.card_j < 2) {
        r.degenerate = true;
        return r;
    }
    double g2 = 0;
    for (const auto &e : t.entries) {
        double n = static_cast<double>(e.count);
        double num = n * static_cast<double>(t.n_a[e.stratum]);
        double den = static_cast<double>(t.n_ia[e.stratum * t.card_i + e.xi]) *
                     static_cast<double>(t.n_ja[e.stratum * t.card_j + e.xj]);
        g2 += n * std::log(num / den);
    }
    r.g2 = std::max(0.0, 2 * g2);
    if (mode == DfMode::Full) {
        r.df = static_cast<double>(t.card_i - 1) * static_cast<double>(t.card_j - 1) * t.num_strata;
    } else {
        for (size_t s = 0; s < t.observed_strata(); s++) {
            auto seen = [](auto first, auto last) { return std::count_if(first, last, [](uint64_t n) { return n > 0; }); };
            auto ri = seen(t.n_ia.begin() + s * t.card_i, t.n_ia.begin() + (s + 1) * t.card_i);
            auto rj = seen(t.n_ja.begin() + s * t.card_j, t.n_ja.begin() + (s + 1) * t.card_j);
            r.df += static_cast<double>((ri - 1) * (rj - 1));
        }
    }
    r.p_value = r.df > 0 ? chi2_sf(r.g2, r.df) : 1.0;
    r.sparse = static_cast<double>(t.observed_strata()) < 0.8 * t.num_strata;
    return r;
}

CITestResult g2_test(const CategoricalData &data, size_t i, size_t j, const std::vector<size_t> &cond, DfMode mode) {
    return g2_test(contingency_table(data, i, j, cond), mode);
}

TvdSummary edge_tvd(const CategoricalData &data, size_t x, size_t y) {
    if (x >= data.num_variables() || y >= data.num_variables()) {
        throw ParameterError("variable index out of range");
    }
    if (x == y) {
        throw ParameterError("edge endpoints must differ");
    }
    const VariableSpec &sx = data.spec(x);
    const VariableSpec &sy = data.spec(y);
    std::optional<size_t> strat;
    if (sx.kind == VarKind::Setting && sy.kind == VarKind::Result && sx.region != sy.region) {
        strat = data.find(VarKind::Setting, sy.region);
    }
    size_t cs = strat ? data.spec(*strat).cardinality() : 1;
    size_t cx = sx.cardinality();
    size_t cy = sy.cardinality();

    std::vector<uint64_t> counts(cs * cx * cy, 0);
    std::vector<uint64_t> totals(cs * cx, 0);
    for (size_t c = 0; c < data.num_cells(); c++) {
        size_t s = strat ? data.code(*strat, c) : 0;
        size_t row = s * cx + data.code(x, c);
        counts[row * cy + data.code(y, c)] += data.weight(c);
        totals[row] += data.weight(c);
    }

    TvdSummary out;
    std::vector<double> ds;
    for (size_t s = 0; s < cs; s++) {
        for (size_t a = 0; a < cx; a++) {
            size_t ra = s * cx + a;
            if (totals[ra] == 0) {
                continue;
            }
            for (size_t b = a + 1; b < cx; b++) {
                size_t rb = s * cx + b;
                if (totals[rb] == 0) {
                    continue;
                }
                double d = 0;
                for (size_t z = 0; z < cy; z++) {
                    d += std::abs(
                        static_cast<double>(counts[ra * cy + z]) / static_cast<double>(totals[ra]) -
                        static_cast<double>(counts[rb * cy + z]) / static_cast<double>(totals[rb]));
                }
                if (ds.empty() || d > out.max) {
                    out.max = d;
                    out.argmax_first = sx.levels[a];
                    out.argmax_second = sx.levels[b];
                    out.argmax_stratum = strat ? std::optional<uint32_t>(data.spec(*strat).levels[s]) : std::nullopt;
                }
                ds.push_back(d);
            }
        }
    }
    out.num_pairs = ds.size();
    if (ds.empty()) {
        return out;
    }
    out.computable = true;
    std::sort(ds.begin(), ds.end());
    size_t k = ds.size();
    out.median = k % 2 ? ds[k / 2] : (ds[k / 2 - 1] + ds[k / 2]) / 2;
    return out;
}

}  // namespace xtalk
