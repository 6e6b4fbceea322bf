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

#include "tablefuse/documents.hpp"
#include "tablefuse/synth.hpp"
#include "test_support.hpp"

using namespace tablefuse;

namespace
{

const char* const k_detection = R"({
 "version": 1, "image_w": 400, "image_h": 300,
 "tables": [{
  "box": [10, 10, 250, 90],
  "class": "borderless",
  "cells": [
   {"box": [10, 10, 130, 50]},
   {"box": [130, 10, 250, 50], "score": 0.5, "source": "borderless"}
  ],
  "texts": [{"box": [20, 20, 60, 40], "text": "  alpha "}]
 }]
})";

const char* const k_truth = R"({
 "version": 1, "image_w": 400, "image_h": 300,
 "tables": [{
  "box": [10, 10, 250, 90], "class": "bordered",
  "grid": {"n_rows": 2, "n_cols": 2,
           "cell_texts": {"0,0": "a", "0,1": "b c", "1,0": "", "1,1": "d"}}
 }]
})";

template <class F>
ParseError catch_parse(F&& f)
{
    try
    {
        f();
    }
    catch (const ParseError& e)
    {
        return e;
    }
    FAIL("expected ParseError");
    return ParseError("", 0, "", "");
}

} // namespace

TEST_CASE("detection document parses with defaults")
{
    const DetectionDocument doc = parse_detection(k_detection);
    CHECK(doc.image_w == 400);
    REQUIRE(doc.tables.size() == 1);
    const DetectedTable& t = doc.tables.front();
    CHECK(t.table_class == CellSource::borderless);
    CHECK(t.score == 1.0);
    CHECK_FALSE(t.class_probs.has_value());
    REQUIRE(t.cells.size() == 2);
    CHECK(t.cells[0].source == CellSource::bordered);
    CHECK(t.cells[1].score == 0.5);
    CHECK(t.cells[1].source == CellSource::borderless);
    REQUIRE(t.texts.size() == 1);
    CHECK(t.texts[0].text == "alpha");
}

TEST_CASE("truth document parses into a row-major lattice")
{
    const TruthDocument doc = parse_truth(k_truth);
    const TruthTable& t = doc.tables.front();
    CHECK(t.n_rows == 2);
    CHECK(t.text(0, 1) == "b c");
    CHECK(t.text(1, 0).empty());
    const TableGrid g = to_grid(t);
    CHECK(g.cell(1, 0).contents.empty());
    CHECK(g.text(1, 1) == "d");
    CHECK(g.cell(1, 0).occupied);
}

TEST_CASE("unknown fields: ignored by default, rejected when strict")
{
    std::string text = k_detection;
    text.insert(text.find("\"tables\""), "\"producer\": \"x\", ");
    CHECK_NOTHROW(parse_detection(text));
    const ParseError e = catch_parse([&] { parse_detection(text, {true, "doc.json"}); });
    CHECK(e.field() == "producer");
    CHECK(std::string(e.what()).find("doc.json") != std::string::npos);
}

TEST_CASE("byte-order mark is rejected")
{
    const std::string text = "\xEF\xBB\xBF" + std::string(k_detection);
    CHECK_THROWS_AS(parse_detection(text), ParseError);
}

TEST_CASE("syntax errors report the line")
{
    const std::string text = "{\n \"version\": 1,\n \"image_w\": ,\n}";
    const ParseError e = catch_parse([&] { parse_detection(text); });
    CHECK(e.line() == 3);
}

TEST_CASE("invalid UTF-8 is a parse error")
{
    std::string text = k_detection;
    text.replace(text.find("alpha"), 5, "al\xff\xfe");
    CHECK_THROWS_AS(parse_detection(text), ParseError);
}

TEST_CASE("semantic errors name the offending field")
{
    auto field_of = [](std::string text, const std::string& from, const std::string& to) {
        text.replace(text.find(from), from.size(), to);
        return catch_parse([&] { parse_detection(text); }).field();
    };
    CHECK(field_of(k_detection, "\"version\": 1", "\"version\": 2") == "version");
    CHECK(field_of(k_detection, "[20, 20, 60, 40]", "[60, 20, 20, 40]") == "tables[0].texts[0].box");
    CHECK(field_of(k_detection, "\"score\": 0.5", "\"score\": 1.5") == "tables[0].cells[1].score");
    CHECK(field_of(k_detection, "\"borderless\",\n  \"cells\"", "\"ruled\",\n  \"cells\"") ==
          "tables[0].class");
    CHECK(field_of(k_detection, "\"  alpha \"", "\"   \"") == "tables[0].texts[0].text");
    CHECK(field_of(k_detection, "\"image_h\": 300", "\"image_h\": 0") == "image_h");
}

TEST_CASE("class probabilities are validated")
{
    std::string ok = k_detection;
    ok.insert(ok.find("\"cells\""), "\"class_probs\": [0.2, 0.7, 0.1],\n  ");
    const DetectionDocument doc = parse_detection(ok);
    REQUIRE(doc.tables[0].class_probs.has_value());
    CHECK((*doc.tables[0].class_probs)[1] == doctest::Approx(0.7));

    std::string bad = k_detection;
    bad.insert(bad.find("\"cells\""), "\"class_probs\": [0.2, 0.7],\n  ");
    CHECK_THROWS_AS(parse_detection(bad), ParseError);
    bad = k_detection;
    bad.insert(bad.find("\"cells\""), "\"class_probs\": [0.5, 0.7, 0.1],\n  ");
    CHECK_THROWS_AS(parse_detection(bad), ParseError);
}

TEST_CASE("boxes are clamped to the image")
{
    std::string text = k_detection;
    text.replace(text.find("[10, 10, 250, 90]"), 17, "[-5, 10, 450, 90]");
    const DetectionDocument doc = parse_detection(text);
    CHECK(doc.tables[0].box == BBoxd(0, 10, 400, 90));
}

TEST_CASE("truth lattice must be complete and unique")
{
    std::string missing = k_truth;
    missing.replace(missing.find(", \"1,1\": \"d\""), 12, "");
    CHECK(catch_parse([&] { parse_truth(missing); }).field() == "tables[0].grid.cell_texts.1,1");

    std::string outside = k_truth;
    outside.replace(outside.find("\"1,1\""), 5, "\"2,1\"");
    CHECK_THROWS_AS(parse_truth(outside), ParseError);

    std::string dup = k_truth;
    dup.replace(dup.find("\"1,1\""), 5, "\"00,0\"");
    CHECK_THROWS_AS(parse_truth(dup), ParseError);

    std::string malformed = k_truth;
    malformed.replace(malformed.find("\"1,1\""), 5, "\"1;1\"");
    CHECK_THROWS_AS(parse_truth(malformed), ParseError);
}

TEST_CASE("property: dump then parse is the identity on generated documents")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed)
    {
        SynthConfig cfg;
        cfg.rows = 1 + seed % 5;
        cfg.cols = 1 + seed % 3;
        cfg.centroid_jitter = 0.3;
        cfg.text_dropout = 0.2;
        cfg.seed = seed;
        const SynthInstance inst = generate(cfg);
        const std::string det = dump_detection(inst.detections);
        const std::string tru = dump_truth(inst.truth);
        CHECK(dump_detection(parse_detection(det, {true, {}})) == det);
        CHECK(dump_truth(parse_truth(tru, {true, {}})) == tru);
        CHECK(det.back() == '\n');
    }
}

TEST_CASE("file helpers")
{
    test_support::TempDir dir("docs");
    write_file(dir / "t.json", k_truth);
    CHECK(load_truth(dir / "t.json").tables.size() == 1);
    CHECK_THROWS_AS(read_file(dir / "missing.json"), IoError);
    CHECK_THROWS_AS(load_detection(dir / "t.json"), ParseError);
}
