#include "sthygarch/errors.hpp"
#include "sthygarch/io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace sthygarch;

namespace {

std::vector<double> parse(const std::string& text, LoadOptions opts = {}) {
    std::istringstream in(text);
    return read_returns(in, opts);
}

std::string error_of(const std::string& text, LoadOptions opts = {}) {
    try {
        parse(text, opts);
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("price conversion to percent log returns") {
    const auto flat = prices_to_returns(std::vector<double>{100.0, 100.0});
    REQUIRE(flat.size() == 1);
    CHECK(flat[0] == 0.0);
    const auto up = prices_to_returns(std::vector<double>{100.0, 100.0 * std::exp(0.01)});
    CHECK(up[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(prices_to_returns(std::vector<double>{100.0}), DomainError);
    CHECK_THROWS_AS(prices_to_returns(std::vector<double>{100.0, 0.0}), DomainError);
}

TEST_CASE("column selection") {
    const std::string csv = "date,price,y\n2020-01-01,100,0.5\n2020-01-02,101,-0.25\n";
    CHECK(parse(csv) == std::vector<double>{0.5, -0.25});
    LoadOptions by_name;
    by_name.column = "price";
    CHECK(parse(csv, by_name) == std::vector<double>{100.0, 101.0});
    LoadOptions by_index;
    by_index.column = "1";
    CHECK(parse(csv, by_index) == std::vector<double>{100.0, 101.0});
    LoadOptions prices;
    prices.column = "price";
    prices.prices = true;
    const auto r = parse(csv, prices);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == doctest::Approx(100.0 * std::log(1.01)));
    CHECK(parse("return,x\n1.5,2\n") == std::vector<double>{1.5});
    CHECK(parse("a,b\n3,4\n") == std::vector<double>{3.0});
    LoadOptions missing;
    missing.column = "close";
    CHECK(error_of(csv, missing).find("close") != std::string::npos);
}

TEST_CASE("comments, CRLF and trailing blank lines are tolerated") {
    CHECK(parse("# source: test\ny\r\n1\r\n# mid comment\n2\n\n\n") == std::vector<double>{1.0, 2.0});
    LoadOptions semi;
    semi.delimiter = ';';
    CHECK(parse("y;z\n1.25;3\n", semi) == std::vector<double>{1.25});
}

TEST_CASE("a blank cell is reported with its row") {
    const std::string msg = error_of("y\n0.1\n\n0.3\n");
    CHECK(msg.find("row 2") != std::string::npos);
    const std::string msg2 = error_of("a,y\n1,0.1\n2,\n3,0.3\n");
    CHECK(msg2.find("row 2") != std::string::npos);
    CHECK(msg2.find("line 3") != std::string::npos);
}

TEST_CASE("malformed inputs raise descriptive errors") {
    CHECK(error_of("y\n0.1\nabc\n").find("non-numeric") != std::string::npos);
    CHECK(error_of("y\n1.5x\n").find("row 1") != std::string::npos);
    CHECK(error_of("").find("header") != std::string::npos);
    CHECK(error_of("y\n").find("no data") != std::string::npos);
    CHECK_THROWS_AS(load_returns("/nonexistent/returns.csv"), ConfigurationError);
}

TEST_CASE("load from disk") {
    const std::string path = "io_test_returns.csv";
    {
        std::ofstream out(path);
        out << "t,y\n1,0.5\n2,-1e-3\n";
    }
    CHECK(load_returns(path) == std::vector<double>{0.5, -1e-3});
    std::remove(path.c_str());
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456789.125, 0.0}) {
        CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_number(0.5) == "0.5");
}
