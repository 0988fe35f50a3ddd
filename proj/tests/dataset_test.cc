#include "xtalk/dataset.h"

#include <sstream>

#include "gtest/gtest.h"
#include "xtalk/errors.h"

using namespace xtalk;

TEST(format_bits, examples) {
    ASSERT_EQ(format_bits(2, 2), "10");
    ASSERT_EQ(format_bits(1, 3), "001");
    ASSERT_EQ(format_bits(0, 1), "0");
}

TEST(Dataset, append_and_record) {
    Dataset d({1, 2});
    d.append(TrialRecord{4, 0, {1, 2}, {"1", "01"}});
    d.append(TrialRecord{4, 1, {1, 2}, {"0", "11"}});
    d.append(TrialRecord{5, 0, {0, 2}, {"0", "00"}});
    ASSERT_EQ(d.num_rows(), 3u);
    ASSERT_EQ(d.num_contexts(), 2u);
    ASSERT_EQ(d.result(1, 1), 3);
    ASSERT_EQ(d.record(1), (TrialRecord{4, 1, {1, 2}, {"0", "11"}}));
    ASSERT_THROW(d.append(TrialRecord{4, 0, {1}, {"1", "01"}}), DimensionError);
    ASSERT_THROW(d.append(TrialRecord{4, 0, {1, 2}, {"1", "1"}}), DimensionError);
    ASSERT_THROW(d.append(TrialRecord{4, 0, {1, 2}, {"2", "01"}}), FormatError);
    ASSERT_THROW(Dataset(std::vector<uint8_t>{}), DimensionError);
    ASSERT_THROW(Dataset({9}), DimensionError);
}

TEST(Dataset, jsonl_round_trip) {
    Dataset d({2, 1});
    for (uint32_t r = 0; r < 5; r++) {
        d.append(TrialRecord{r % 2, r, {r % 2, 7}, {r % 2 ? "10" : "01", "1"}});
    }
    std::stringstream ss;
    d.write_jsonl(ss);
    std::string text = ss.str();
    ASSERT_EQ(text.substr(0, text.find('\n')), R"({"circuit":0,"rep":0,"settings":[0,7],"results":["01","1"]})");
    Dataset back = Dataset::read_jsonl(ss);
    ASSERT_EQ(back, d);
    ASSERT_EQ(back.digest(), d.digest());
}

TEST(Dataset, digest_sensitive_to_content) {
    Dataset a({1});
    a.append(TrialRecord{0, 0, {0}, {"0"}});
    Dataset b({1});
    b.append(TrialRecord{0, 0, {0}, {"1"}});
    ASSERT_NE(a.digest(), b.digest());
    ASSERT_EQ(a.digest().size(), 16u);
}

TEST(Dataset, malformed_lines_are_reported) {
    std::stringstream ss;
    ss << R"({"circuit":0,"rep":0,"settings":[0],"results":["1"]})" << "\n"
       << "not json\n"
       << "\n"
       << R"({"circuit":0,"rep":1,"settings":[0,1],"results":["1"]})" << "\n"
       << R"({"circuit":0,"rep":2,"settings":[0],"results":["1"]})" << "\n";
    try {
        Dataset::read_jsonl(ss);
        FAIL() << "expected FormatError";
    } catch (const FormatError &e) {
        std::string msg = e.what();
        ASSERT_NE(msg.find("line(s) 2 4"), std::string::npos) << msg;
    }
    std::stringstream empty;
    ASSERT_THROW(Dataset::read_jsonl(empty), FormatError);
}
