#include "xtalk/stats.h"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <map>
#include <tuple>

#include "gtest/gtest.h"
#include "test_util.h"
#include "xtalk/errors.h"
#include "xtalk/rng.h"

using namespace xtalk;
using xtalk_test::from_table;
using xtalk_test::result_specs;

namespace {

// G^2 summed directly over the joint counts in long double.
long double g2_reference(const std::vector<std::vector<uint32_t>> &cols, size_t i, size_t j, const std::vector<size_t> &cond) {
    using Key = std::vector<uint32_t>;
    std::map<Key, long double> n_ija, n_ia, n_ja, n_a;
    size_t rows = cols[0].size();
    for (size_t r = 0; r < rows; r++) {
        Key a;
        for (size_t c : cond) {
            a.push_back(cols[c][r]);
        }
        Key ia = a, ja = a, ija = a;
        ia.push_back(cols[i][r]);
        ja.push_back(cols[j][r]);
        ija.push_back(cols[i][r]);
        ija.push_back(cols[j][r]);
        n_a[a]++;
        n_ia[ia]++;
        n_ja[ja]++;
        n_ija[ija]++;
    }
    long double g2 = 0;
    for (const auto &[key, n] : n_ija) {
        Key a(key.begin(), key.end() - 2);
        Key ia = a, ja = a;
        ia.push_back(key[key.size() - 2]);
        ja.push_back(key.back());
        g2 += n * std::log(n * n_a[a] / (n_ia[ia] * n_ja[ja]));
    }
    return 2 * g2;
}

// Empirical conditional mutual information I(X_i; X_j | X_A) in nats, from entropies.
double cmi_reference(const std::vector<std::vector<uint32_t>> &cols, size_t i, size_t j, const std::vector<size_t> &cond) {
    auto entropy = [&](const std::vector<size_t> &vars) {
        std::map<std::vector<uint32_t>, double> counts;
        size_t rows = cols[0].size();
        for (size_t r = 0; r < rows; r++) {
            std::vector<uint32_t> key;
            for (size_t v : vars) {
                key.push_back(cols[v][r]);
            }
            counts[key]++;
        }
        double h = 0;
        for (const auto &[k, n] : counts) {
            double p = n / static_cast<double>(rows);
            h -= p * std::log(p);
        }
        return h;
    };
    std::vector<size_t> ia = cond, ja = cond, ija = cond;
    ia.push_back(i);
    ja.push_back(j);
    ija.push_back(i);
    ija.push_back(j);
    return entropy(ia) + entropy(ja) - entropy(ija) - entropy(cond);
}

std::vector<std::vector<uint32_t>> random_columns(size_t vars, size_t rows, const std::vector<uint32_t> &cards, Rng &rng) {
    std::vector<std::vector<uint32_t>> cols(vars, std::vector<uint32_t>(rows));
    for (size_t r = 0; r < rows; r++) {
        for (size_t v = 0; v < vars; v++) {
            cols[v][r] = static_cast<uint32_t>(uniform_index(rng, cards[v]));
        }
        // Mild dependence between the first two variables.
        if (uniform01(rng) < 0.2) {
            cols[1][r] = cols[0][r] % cards[1];
        }
    }
    return cols;
}

}  // namespace

TEST(CategoricalData, aggregation_and_levels) {
    auto data = CategoricalData::from_columns(result_specs({"A", "B"}), {{5, 7, 5, 5}, {1, 1, 1, 0}});
    ASSERT_EQ(data.num_cells(), 3u);
    ASSERT_EQ(data.total(), 4u);
    ASSERT_EQ(data.spec(0).levels, (std::vector<uint32_t>{5, 7}));
    ASSERT_EQ(data.spec(1).id, 1u);
    uint64_t w = 0;
    for (size_t c = 0; c < data.num_cells(); c++) {
        w += data.weight(c);
    }
    ASSERT_EQ(w, 4u);
    ASSERT_THROW(CategoricalData::from_columns(result_specs({"A", "B"}), {{1, 2}, {1}}), DimensionError);
}

TEST(CategoricalData, from_dataset_variables) {
    Dataset d({1, 2});
    d.append(TrialRecord{0, 0, {3, 1}, {"1", "10"}});
    d.append(TrialRecord{0, 1, {3, 1}, {"1", "10"}});
    d.append(TrialRecord{1, 0, {0, 4}, {"0", "01"}});
    auto data = CategoricalData::from_dataset(d);
    ASSERT_EQ(data.num_variables(), 4u);
    ASSERT_EQ(data.spec(0).name, "S0");
    ASSERT_EQ(data.spec(3).name, "R1");
    ASSERT_EQ(data.spec(3).levels, (std::vector<uint32_t>{1, 2}));
    ASSERT_EQ(data.spec(0).levels, (std::vector<uint32_t>{0, 3}));
    ASSERT_EQ(data.num_cells(), 2u);
    ASSERT_EQ(data.total(), 3u);
    ASSERT_EQ(*data.find(VarKind::Result, 1), 3u);
    ASSERT_FALSE(data.find(VarKind::Result, 2).has_value());
}

TEST(CategoricalData, permuted) {
    auto data = CategoricalData::from_columns(result_specs({"A", "B", "C"}), {{0, 1, 1}, {2, 2, 3}, {0, 0, 0}});
    auto p = data.permuted({2, 0, 1});
    ASSERT_EQ(p.spec(0).name, "C");
    ASSERT_EQ(p.spec(1).name, "A");
    ASSERT_NEAR(g2_test(p, 1, 2, {}).g2, g2_test(data, 0, 1, {}).g2, 1e-12);
    ASSERT_THROW(data.permuted({0, 0, 1}), ParameterError);
}

TEST(g2_test, independent_table_is_zero) {
    CITestResult r = g2_test(from_table({{9, 3}, {3, 1}}), 0, 1, {});
    ASSERT_NEAR(r.g2, 0, 1e-12);
    ASSERT_EQ(r.df, 1);
    ASSERT_EQ(r.p_value, 1);
    ASSERT_FALSE(r.degenerate);
}

TEST(g2_test, dependent_table_matches_reference) {
    CITestResult r = g2_test(from_table({{30, 10}, {10, 30}}), 0, 1, {});
    // 2 * sum n ln(n N / (n_i n_j)) with all margins 40, N = 80.
    long double expected = 2 * (2 * 30 * std::log(30.0L * 80 / 1600) + 2 * 10 * std::log(10.0L * 80 / 1600));
    ASSERT_NEAR(r.g2, static_cast<double>(expected), 1e-9);
    ASSERT_NEAR(r.p_value, boost::math::gamma_q(0.5, r.g2 / 2), 1e-12);
    ASSERT_LT(r.p_value, 1e-4);
}

TEST(g2_test, degenerate_variable) {
    CITestResult r = g2_test(from_table({{5, 7}}), 0, 1, {});
    ASSERT_TRUE(r.degenerate);
    ASSERT_EQ(r.p_value, 1);
}

TEST(g2_test, argument_checks) {
    auto data = CategoricalData::from_columns(result_specs({"A", "B", "C"}), {{0, 1}, {0, 1}, {0, 1}});
    ASSERT_THROW(g2_test(data, 0, 0, {}), ParameterError);
    ASSERT_THROW(g2_test(data, 0, 1, {1}), ParameterError);
    ASSERT_THROW(g2_test(data, 0, 5, {}), ParameterError);
    auto empty = CategoricalData::from_columns(result_specs({"A", "B"}), {{}, {}});
    ASSERT_THROW(g2_test(empty, 0, 1, {}), ParameterError);
}

TEST(g2_test, random_tables_match_reference_and_cmi) {
    Rng rng(21);
    for (size_t trial = 0; trial < 40; trial++) {
        std::vector<uint32_t> cards{2 + static_cast<uint32_t>(trial % 3), 2, 3, 2};
        size_t rows = 50 + 20 * trial;
        auto cols = random_columns(4, rows, cards, rng);
        auto data = CategoricalData::from_columns(result_specs({"A", "B", "C", "D"}), cols);
        for (const std::vector<size_t> &cond : {std::vector<size_t>{}, {2}, {2, 3}}) {
            CITestResult r = g2_test(data, 0, 1, cond);
            long double ref = g2_reference(cols, 0, 1, cond);
            ASSERT_NEAR(r.g2, static_cast<double>(ref), 1e-8 * std::max(1.0, std::abs(static_cast<double>(ref))));
            ASSERT_NEAR(r.g2, 2 * static_cast<double>(rows) * cmi_reference(cols, 0, 1, cond), 1e-8 * rows);
            ASSERT_GE(r.g2, 0);
            ASSERT_GE(r.p_value, 0);
            ASSERT_LE(r.p_value, 1);
            // Symmetric in the tested pair.
            CITestResult s = g2_test(data, 1, 0, cond);
            ASSERT_NEAR(r.g2, s.g2, 1e-9);
            ASSERT_EQ(r.df, s.df);
        }
    }
}

TEST(g2_test, full_df_formula) {
    Rng rng(22);
    auto cols = random_columns(4, 500, {3, 2, 4, 2}, rng);
    auto data = CategoricalData::from_columns(result_specs({"A", "B", "C", "D"}), cols);
    ASSERT_EQ(g2_test(data, 0, 1, {}).df, 2);
    ASSERT_EQ(g2_test(data, 0, 1, {2}).df, 2 * 1 * 4);
    ASSERT_EQ(g2_test(data, 0, 2, {1, 3}).df, 2 * 3 * 2 * 2);
}

TEST(g2_test, adjusted_df_counts_levels_seen_per_stratum) {
    // Stratum C=0 sees A in {0,1}, B in {0,1}; stratum C=1 sees A only at 2.
    std::vector<std::vector<uint32_t>> cols{{0, 1, 0, 1, 2, 2}, {0, 1, 1, 0, 0, 1}, {0, 0, 0, 0, 1, 1}};
    auto data = CategoricalData::from_columns(result_specs({"A", "B", "C"}), cols);
    ASSERT_EQ(g2_test(data, 0, 1, {2}, DfMode::Full).df, 2 * 1 * 2);
    ASSERT_EQ(g2_test(data, 0, 1, {2}, DfMode::Adjusted).df, 1);
    // No stratum sees two levels of A: df 0 gives p = 1.
    auto split = CategoricalData::from_columns(result_specs({"A", "B", "C"}), {{0, 0, 1, 1}, {0, 1, 0, 1}, {0, 0, 1, 1}});
    CITestResult r = g2_test(split, 0, 1, {2}, DfMode::Adjusted);
    ASSERT_EQ(r.df, 0);
    ASSERT_EQ(r.p_value, 1);
}

TEST(g2_test, sparse_flag) {
    // A and D are always equal: 2 of the 4 (A, D) strata are seen.
    std::vector<std::vector<uint32_t>> cols{{0, 0, 1, 1, 0, 1}, {0, 1, 0, 1, 1, 0}, {0, 1, 2, 3, 0, 3}, {0, 0, 1, 1, 0, 1}};
    auto data = CategoricalData::from_columns(result_specs({"A", "B", "C", "D"}), cols);
    ASSERT_TRUE(g2_test(data, 1, 2, {0, 3}).sparse);
    ASSERT_FALSE(g2_test(data, 0, 1, {}).sparse);
}

TEST(g2_test, contingency_table_margins) {
    Rng rng(23);
    auto cols = random_columns(3, 300, {3, 3, 2}, rng);
    auto data = CategoricalData::from_columns(result_specs({"A", "B", "C"}), cols);
    ContingencyTable t = contingency_table(data, 0, 1, {2});
    ASSERT_EQ(t.total, 300u);
    ASSERT_EQ(t.observed_strata(), 2u);
    ASSERT_EQ(t.num_strata, 2);
    uint64_t sum = 0;
    for (const auto &e : t.entries) {
        sum += e.count;
    }
    ASSERT_EQ(sum, 300u);
    ASSERT_NEAR(g2_test(t).g2, g2_test(data, 0, 1, {2}).g2, 0);
}

TEST(g2_test, null_rejection_rate) {
    Rng rng(24);
    size_t rejections = 0;
    const size_t trials = 400;
    for (size_t t = 0; t < trials; t++) {
        std::vector<std::vector<uint32_t>> cols(3, std::vector<uint32_t>(400));
        for (size_t r = 0; r < 400; r++) {
            cols[2][r] = static_cast<uint32_t>(uniform_index(rng, 2));
            cols[0][r] = uniform01(rng) < (cols[2][r] ? 0.7 : 0.3);
            cols[1][r] = uniform01(rng) < (cols[2][r] ? 0.6 : 0.2);
        }
        auto data = CategoricalData::from_columns(result_specs({"A", "B", "C"}), cols);
        rejections += g2_test(data, 0, 1, {2}).p_value < 0.05;
    }
    double rate = static_cast<double>(rejections) / trials;
    ASSERT_LT(std::abs(rate - 0.05), 3 * std::sqrt(0.05 * 0.95 / trials) + 0.01);
}

TEST(chi2_sf, examples) {
    ASSERT_EQ(chi2_sf(0, 3), 1);
    ASSERT_NEAR(chi2_sf(3.841458820694124, 1), 0.05, 1e-12);
    ASSERT_NEAR(chi2_sf(2, 2), std::exp(-1.0), 1e-14);
    ASSERT_NEAR(chi2_sf(6.634896601021214, 1), 0.01, 1e-12);
    ASSERT_THROW(chi2_sf(1, 0), ParameterError);
    ASSERT_THROW(chi2_sf(NAN, 1), ParameterError);
}

TEST(chi2_sf, matches_boost_gamma_q) {
    for (double df : {1.0, 2.0, 3.0, 7.0, 20.0, 121.0, 1210.0}) {
        for (double x : {0.01, 0.5, 1.0, 3.0, 10.0, 50.0, 150.0, 1000.0, 1300.0}) {
            double expected = boost::math::gamma_q(df / 2, x / 2);
            ASSERT_NEAR(chi2_sf(x, df), expected, 1e-10) << "x=" << x << " df=" << df;
            if (expected > 1e-250) {
                ASSERT_NEAR(chi2_sf(x, df) / expected, 1, 1e-8) << "x=" << x << " df=" << df;
            }
        }
    }
}

TEST(chi2_sf, monotone) {
    for (double df : {1.0, 4.0, 30.0}) {
        double prev = 1;
        for (double x = 0.1; x < 100; x *= 1.3) {
            double q = chi2_sf(x, df);
            ASSERT_LE(q, prev);
            ASSERT_LE(q, chi2_sf(x, df + 1));
            prev = q;
        }
    }
}

TEST(edge_tvd, disjoint_and_identical) {
    auto disjoint = from_table({{10, 0}, {0, 10}});
    TvdSummary d = edge_tvd(disjoint, 0, 1);
    ASSERT_TRUE(d.computable);
    ASSERT_DOUBLE_EQ(d.max, 2);
    ASSERT_DOUBLE_EQ(d.median, 2);
    ASSERT_EQ(d.num_pairs, 1u);
    TvdSummary same = edge_tvd(from_table({{4, 6}, {2, 3}}), 0, 1);
    ASSERT_NEAR(same.max, 0, 1e-15);
}

TEST(edge_tvd, max_median_and_argmax) {
    // Rows of X: P(Y) = (1,0), (0.5,0.5), (0,1). Pair distances 1, 2, 1.
    auto data = CategoricalData::from_columns(
        result_specs({"X", "Y"}), {{3, 3, 5, 5, 9, 9}, {0, 0, 0, 1, 1, 1}});
    TvdSummary t = edge_tvd(data, 0, 1);
    ASSERT_EQ(t.num_pairs, 3u);
    ASSERT_DOUBLE_EQ(t.max, 2);
    ASSERT_DOUBLE_EQ(t.median, 1);
    ASSERT_EQ(t.argmax_first, 3u);
    ASSERT_EQ(t.argmax_second, 9u);
    ASSERT_FALSE(t.argmax_stratum.has_value());
    ASSERT_GE(t.max, t.median);
}

TEST(edge_tvd, cross_region_setting_is_stratified) {
    std::vector<VariableSpec> specs(3);
    specs[0] = VariableSpec{0, VarKind::Setting, 0, {}, "S0"};
    specs[1] = VariableSpec{0, VarKind::Setting, 1, {}, "S1"};
    specs[2] = VariableSpec{0, VarKind::Result, 1, {}, "R1"};
    // R1 follows S1 only; S0 has no effect within a stratum of S1.
    std::vector<std::vector<uint32_t>> cols(3);
    for (uint32_t s0 = 0; s0 < 2; s0++) {
        for (uint32_t s1 = 0; s1 < 2; s1++) {
            for (int k = 0; k < 5; k++) {
                cols[0].push_back(s0);
                cols[1].push_back(s1);
                cols[2].push_back(s1);
            }
        }
    }
    auto data = CategoricalData::from_columns(specs, cols);
    TvdSummary t = edge_tvd(data, 0, 2);
    ASSERT_TRUE(t.computable);
    ASSERT_EQ(t.num_pairs, 2u);
    ASSERT_NEAR(t.max, 0, 1e-15);
    ASSERT_TRUE(t.argmax_stratum.has_value());

    // S0 and S1 always equal: no stratum holds two values of S0.
    auto tied = CategoricalData::from_columns(specs, {{0, 1, 0, 1}, {0, 1, 0, 1}, {0, 1, 1, 0}});
    TvdSummary n = edge_tvd(tied, 0, 2);
    ASSERT_FALSE(n.computable);
    ASSERT_EQ(n.num_pairs, 0u);
}

TEST(edge_tvd, bounds_property) {
    Rng rng(25);
    for (size_t trial = 0; trial < 30; trial++) {
        auto cols = random_columns(2, 100, {4, 3}, rng);
        TvdSummary t = edge_tvd(CategoricalData::from_columns(result_specs({"X", "Y"}), cols), 0, 1);
        ASSERT_TRUE(t.computable);
        ASSERT_GE(t.median, 0);
        ASSERT_GE(t.max, t.median);
        ASSERT_LE(t.max, 2 + 1e-12);
    }
}
