/*
 Copyright 2026 The tablefuse Authors
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "doctest.h"

#include <random>

#include "tablefuse/csv.hpp"

using namespace tablefuse;

TEST_CASE("csv escaping")
{
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("") == "");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
    CHECK(csv_escape("cr\r") == "\"cr\r\"");
    CHECK(csv_escape("  spaced  ") == "  spaced  ");
}

TEST_CASE("csv writer uses LF and one record per row")
{
    CHECK(write_csv({{"a", "b"}, {"", "c"}}) == "a,b\n,c\n");
    CHECK(write_csv({{""}}) == "\n");
    CHECK(write_csv({}) == "");
}

TEST_CASE("quoting torture set survives a round trip")
{
    const std::vector<CsvRecord> records{
        {"comma, inside", "\"quoted\"", "\"\"", "\""},
        {"line\nbreak", "crlf\r\nend", "", "trailing,"},
        {"ünïcödé", "日本語のテキスト", "emoji 🙂", "Ελληνικά"},
        {",", "\n", "a\"b,c\nd", "=SUM(A1)"},
        {"", "", "", ""},
    };
    CHECK(parse_csv(write_csv(records)) == records);
}

TEST_CASE("single empty column rows")
{
    const std::vector<CsvRecord> records{{""}, {"x"}, {""}};
    CHECK(parse_csv(write_csv(records)) == records);
}

TEST_CASE("parser accepts a missing final newline")
{
    CHECK(parse_csv("a,b") == std::vector<CsvRecord>{{"a", "b"}});
    CHECK(parse_csv("\"a\"") == std::vector<CsvRecord>{{"a"}});
    CHECK(parse_csv("a,") == std::vector<CsvRecord>{{"a", ""}});
}

TEST_CASE("malformed csv")
{
    CHECK_THROWS_AS(parse_csv("\"open"), ParseError);
    CHECK_THROWS_AS(parse_csv("ab\"c\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("\"a\"b\n"), ParseError);
    try
    {
        parse_csv("ok\n\"multi\nline");
        FAIL("expected ParseError");
    }
    catch (const ParseError& e)
    {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("grid_to_csv joins tokens and leaves empty cells empty")
{
    TableGrid grid(2, 3, BBoxd(0, 0, 30, 20));
    grid.cell(0, 0).contents = {"alpha", "beta"};
    grid.cell(0, 2).contents = {"x,y"};
    grid.cell(1, 1).contents = {"say", "\"hi\""};
    CHECK(grid_to_csv(grid) == "alpha beta,,\"x,y\"\n,\"say \"\"hi\"\"\",\n");
}

TEST_CASE("property: random field contents round-trip")
{
    std::mt19937_64 rng(12);
    const std::string alphabet = "ab ,\"\n\r\t;x\xc3\xa9";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(0, 8), width(1, 5), height(1, 5);
    for (int trial = 0; trial < 500; ++trial)
    {
        std::vector<CsvRecord> records(height(rng));
        const std::size_t w = width(rng);
        for (auto& rec : records)
            for (std::size_t c = 0; c < w; ++c)
            {
                std::string f;
                for (std::size_t k = len(rng); k > 0; --k)
                    f += alphabet[pick(rng)];
                rec.push_back(f);
            }
        CHECK(parse_csv(write_csv(records)) == records);
    }
}
