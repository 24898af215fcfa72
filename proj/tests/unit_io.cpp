// Copyright 2026 the qfc developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sstream>

#include "doctest.h"

#include "qfc/check.hpp"
#include "qfc/io.hpp"

using namespace qfc;

TEST_CASE("seeded sampling is reproducible") {
    check::Rng a(42), b(42), c(43);
    bool all_equal = true, any_differs = false;
    for (int i = 0; i < 100; ++i) {
        const double va = a.uniform();
        all_equal = all_equal && va == b.uniform();
        any_differs = any_differs || va != c.uniform();
    }
    CHECK(all_equal);
    CHECK(any_differs);
}

TEST_CASE("format_double round-trips doubles exactly") {
    check::Rng rng(61);
    for (int i = 0; i < 2000; ++i) {
        double v;
        switch (i % 4) {
            case 0: v = rng.uniform(-1, 1); break;
            case 1: v = rng.gaussian() * 1e-12; break;
            case 2: v = rng.gaussian() * 1e12; break;
            default: v = rng.gaussian(); break;
        }
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(std::stod(io::format_double(0.0)) == 0.0);
}

TEST_CASE("CsvTable") {
    SUBCASE("write/read round-trip preserves every value") {
        io::CsvTable table({"a", "b", "c"});
        check::Rng rng(62);
        for (int i = 0; i < 50; ++i) {
            table.add_row({rng.gaussian(), rng.gaussian() * 1e-9, rng.uniform(-1, 1)});
        }
        std::stringstream ss;
        table.write(ss, {"comment line", "another"});
        const io::CsvTable back = io::CsvTable::read(ss);
        REQUIRE(back.header() == table.header());
        REQUIRE(back.row_count() == table.row_count());
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            for (std::size_t c = 0; c < 3; ++c) {
                CHECK(back.rows()[r][c] == table.rows()[r][c]);
            }
        }
    }
    SUBCASE("column lookup") {
        io::CsvTable table({"t", "x"});
        table.add_row({0.0, 1.5});
        CHECK(table.at(0, "x") == 1.5);
        CHECK_THROWS_AS(table.at(0, "missing"), std::out_of_range);
    }
    SUBCASE("row width is enforced") {
        io::CsvTable table({"a", "b"});
        CHECK_THROWS_AS(table.add_row({1.0}), std::invalid_argument);
    }
    SUBCASE("missing files are reported") {
        CHECK_THROWS_AS(io::CsvTable::read_file("/nonexistent/path.csv"), std::runtime_error);
    }
}
