#include <string>

#include "doctest.h"
#include "freqq/error.hpp"
#include "freqq/series.hpp"

using namespace freqq;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("two-row minimal file") {
    const auto s = parse_csv("time_s,frequency_hz\n0,50.0\n1,50.0");
    CHECK(s.size() == 2);
    CHECK(s.dt() == 1.0);
    CHECK(s.values()[0] == 50.0);
    CHECK(s.values()[1] == 50.0);
    CHECK(s.nominal_hz() == 50.0);
}

TEST_CASE("non-uniform sampling reports the offending row") {
    try {
        (void)parse_csv("time_s,frequency_hz\n0,50.0\n1,50.1\n3,50.2");
        FAIL("expected NonUniformSampling");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonUniformSampling);
        REQUIRE(e.row().has_value());
        CHECK(*e.row() == 3);
    }
}

TEST_CASE("CRLF, BOM and blank lines") {
    const auto s = parse_csv("\xEF\xBB\xBFtime_s,frequency_hz\r\n0,49.95\r\n\r\n0.5,50.05\r\n1.0,50\r\n");
    CHECK(s.size() == 3);
    CHECK(s.dt() == 0.5);
    CHECK(s.values()[2] == 50.0);
}

TEST_CASE("ingest errors") {
    CHECK(code_of([] { (void)parse_csv(""); }) == ErrorCode::EmptyInput);
    CHECK(code_of([] { (void)parse_csv("time_s,frequency_hz\n"); }) == ErrorCode::EmptyInput);
    CHECK(code_of([] { (void)parse_csv("t,f\n0,50"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { (void)parse_csv("time_s,frequency_hz\n0,50\n1,abc"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { (void)parse_csv("time_s,frequency_hz\n0,50\n1,50,3"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { (void)parse_csv("time_s,frequency_hz\n0,50\n1,nan"); }) == ErrorCode::NonFiniteValue);
    CHECK(code_of([] { (void)parse_csv("time_s,frequency_hz\n0,50\n0,50"); }) == ErrorCode::NonUniformSampling);
    CHECK(code_of([] { (void)parse_csv("time_s,frequency_hz\n1,50\n0,50"); }) == ErrorCode::NonUniformSampling);
    CHECK(code_of([] { FrequencySeries({}, 1.0); }) == ErrorCode::EmptyInput);
    CHECK(code_of([] { FrequencySeries({50.0}, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("malformed row number is 1-based over data rows") {
    try {
        (void)parse_csv("time_s,frequency_hz\n0,50\n1,50\n2,x\n");
        FAIL("expected MalformedRow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedRow);
        CHECK(e.row() == 3);
    }
}

TEST_CASE("hold fills whole-multiple gaps and counts them") {
    IngestOptions opts;
    opts.gap_policy = GapPolicy::Hold;
    const auto r = parse_csv("time_s,frequency_hz\n0,50.0\n1,50.1\n4,50.2\n5,50.3", opts);
    CHECK(r.filled_samples == 2);
    REQUIRE(r.series.size() == 6);
    CHECK(r.series.values()[2] == 50.1);
    CHECK(r.series.values()[3] == 50.1);
    CHECK(r.series.values()[4] == 50.2);

    CHECK(code_of([&] { (void)parse_csv("time_s,frequency_hz\n0,50\n1,50\n2.5,50", opts); }) ==
          ErrorCode::NonUniformSampling);
}

TEST_CASE("10000-row file") {
    std::string text = "time_s,frequency_hz";
    for (int i = 0; i < 10000; ++i) text += "\n" + std::to_string(i) + ",50.0" + std::to_string(i % 10);
    const auto s = parse_csv(text);
    CHECK(s.size() == 10000);
    CHECK(s.dt() == 1.0);
}

TEST_CASE("window") {
    std::vector<double> v(100);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 50.0 + 0.001 * static_cast<double>(i);
    const FrequencySeries s(v, 1.0);
    CHECK(window(s, 0, 100) == s);

    const auto w = window(s, 10, 5);
    REQUIRE(w.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(w.values()[i] == v[10 + i]);
    CHECK(w.start_epoch() == 10.0);

    CHECK(code_of([&] { (void)window(s, 96, 5); }) == ErrorCode::OutOfRange);
    CHECK(code_of([&] { (void)window(s, 0, 0); }) == ErrorCode::OutOfRange);
}

TEST_CASE("csv round trip at 6 decimals") {
    const FrequencySeries s({49.987654, 50.0, 50.012345, 50.1}, 0.25, 10.0);
    const auto text = series_to_csv(s);
    CHECK(text.rfind("time_s,frequency_hz\n10,49.987654", 0) == 0);
    CHECK(text.back() != '\n');
    const auto back = parse_csv(text);
    CHECK(back == s);
    CHECK(series_to_csv(back) == text);
}

TEST_CASE("error row suffix in message") {
    const Error e(ErrorCode::MalformedRow, "bad", 7);
    CHECK(std::string(e.what()).find("row 7") != std::string::npos);
    CHECK(to_string(ErrorCode::VarianceZero) == "variance_zero");
    CHECK(error_code_from_string("numerical_blowup") == ErrorCode::NumericalBlowup);
    CHECK_FALSE(error_code_from_string("nope").has_value());
}
