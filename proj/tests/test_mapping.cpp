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

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "tablefuse/mapping.hpp"
#include "tablefuse/synth.hpp"

using namespace tablefuse;

namespace
{

TableGrid two_by_two()
{
    std::vector<CellBox> cells{CellBox(BBoxd(0, 0, 40, 20)), CellBox(BBoxd(40, 0, 80, 20)),
                               CellBox(BBoxd(0, 20, 40, 40)), CellBox(BBoxd(40, 20, 80, 40))};
    return infer_grid(cells, BBoxd(0, 0, 80, 40));
}

TextBox text_at(double cx, double cy, const std::string& s, double half_w = 4, double half_h = 2)
{
    return TextBox(BBoxd(cx - half_w, cy - half_h, cx + half_w, cy + half_h), s);
}

std::vector<oracle::Rect> rects(const TableGrid& grid)
{
    std::vector<oracle::Rect> out;
    for (const auto& c : grid.cells())
        out.push_back({c.box.x1(), c.box.y1(), c.box.x2(), c.box.y2()});
    return out;
}

std::vector<oracle::Rect> rects(const std::vector<TextBox>& texts)
{
    std::vector<oracle::Rect> out;
    for (const auto& t : texts)
        out.push_back({t.box.x1(), t.box.y1(), t.box.x2(), t.box.y2()});
    return out;
}

std::vector<long> flat_assignment(const AssignmentResult& r, std::size_t n_texts, std::size_t n_cols)
{
    std::vector<long> out(n_texts, -1);
    for (const auto& a : r.assignments)
        out[a.text_index] = static_cast<long>(a.row * n_cols + a.col);
    return out;
}

} // namespace

TEST_CASE("text box validation trims and rejects blanks")
{
    CHECK(TextBox(BBoxd(0, 0, 1, 1), "  hello \n").text == "hello");
    CHECK_THROWS_AS(TextBox(BBoxd(0, 0, 1, 1), " \t "), InvalidArgument);
    CHECK_THROWS_AS(TextBox(BBoxd(0, 0, 1, 1), "x", -0.1), InvalidArgument);
}

TEST_CASE("text on a cell centroid lands there with distance 0")
{
    const std::vector<TextBox> texts{text_at(60, 30, "hit")};
    const AssignmentResult r = assign_text(two_by_two(), texts);
    REQUIRE(r.assignments.size() == 1);
    CHECK(r.assignments[0] == TextAssignment{0, 1, 1, 0.0});
    CHECK(r.grid.cell(1, 1).contents == std::vector<std::string>{"hit"});
    CHECK(r.unassigned.empty());
}

TEST_CASE("text outside every gate stays unassigned")
{
    const std::vector<TextBox> texts{text_at(200, 10, "stray"), text_at(20, 10, "ok")};
    const AssignmentResult r = assign_text(two_by_two(), texts);
    REQUIRE(r.unassigned.size() == 1);
    CHECK(r.unassigned[0].text == "stray");
    CHECK(r.unassigned_indices == std::vector<std::size_t>{0});
    CHECK(r.assignments.size() == 1);
    for (const auto& c : r.grid.cells())
        for (const auto& t : c.contents)
            CHECK(t != "stray");
}

TEST_CASE("prose and literal gates differ on tall offsets")
{
    // cell 40 wide, 20 tall; centroid (20,10). Text 15 below the centroid:
    // outside H/2 = 10 but inside W/2 = 20.
    TableGrid grid(1, 1, BBoxd(0, 0, 40, 60));
    grid.cell(0, 0).box = BBoxd(0, 0, 40, 20);
    grid.cell(0, 0).occupied = true;
    const std::vector<TextBox> texts{text_at(20, 25, "low")};
    CHECK(assign_text(grid, texts, GateMode::prose).unassigned.size() == 1);
    CHECK(assign_text(grid, texts, GateMode::literal).assignments.size() == 1);
    CHECK(passes_gate(BBoxd(0, 0, 40, 20), Point2d(40, 20)));
    CHECK_FALSE(passes_gate(BBoxd(0, 0, 40, 20), Point2d(40.001, 20)));
}

TEST_CASE("shared border ties go to the lower row, then the lower column")
{
    const std::vector<TextBox> texts{text_at(40, 10, "edge"), text_at(40, 20, "corner")};
    const AssignmentResult r = assign_text(two_by_two(), texts);
    REQUIRE(r.assignments.size() == 2);
    CHECK(r.assignments[0].row == 0);
    CHECK(r.assignments[0].col == 0);
    CHECK(r.assignments[1].row == 0);
    CHECK(r.assignments[1].col == 0);
}

TEST_CASE("order_cell_contents")
{
    auto at = [](double x1, double y1, const std::string& s, std::size_t idx) {
        return IndexedText{TextBox(BBoxd(x1, y1, x1 + 10, y1 + 5), s), idx};
    };
    CHECK(order_cell_contents({at(20, 0, "right", 0), at(5, 0, "left", 1)}) ==
          std::vector<std::string>{"left", "right"});
    CHECK(order_cell_contents({at(0, 10, "lower", 0), at(50, 0, "upper", 1)}) ==
          std::vector<std::string>{"upper", "lower"});

    // permutations of up to six tokens against a full lexicographic sort
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coord(0, 5), count(1, 6);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::vector<std::pair<int, int>> keys;
        while (static_cast<int>(keys.size()) < count(rng))
        {
            const std::pair<int, int> k{coord(rng), coord(rng)};
            if (std::find(keys.begin(), keys.end(), k) == keys.end())
                keys.push_back(k);
        }
        std::vector<IndexedText> items;
        for (std::size_t i = 0; i < keys.size(); ++i)
            items.push_back(at(keys[i].second, keys[i].first, "t" + std::to_string(i), i));
        std::shuffle(items.begin(), items.end(), rng);

        auto sorted = keys;
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::string> want;
        for (const auto& k : sorted)
            want.push_back("t" + std::to_string(std::find(keys.begin(), keys.end(), k) - keys.begin()));
        CHECK(order_cell_contents(items) == want);
    }
}

TEST_CASE("assignment replaces existing contents")
{
    TableGrid grid = two_by_two();
    grid.cell(0, 0).contents.push_back("stale");
    const std::vector<TextBox> texts{text_at(60, 10, "fresh")};
    const AssignmentResult r = assign_text(grid, texts);
    CHECK(r.grid.cell(0, 0).contents.empty());
    const AssignmentResult again = assign_text(r.grid, texts);
    CHECK(again.grid == r.grid);
    CHECK(again.assignments == r.assignments);
}

TEST_CASE("gate oracle agreement on synthetic tables")
{
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<std::size_t> dim(1, 8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial)
    {
        SynthConfig cfg;
        cfg.rows = dim(rng);
        cfg.cols = dim(rng);
        cfg.centroid_jitter = 0.4 * u(rng);
        cfg.seed = 9000 + static_cast<std::uint64_t>(trial);
        const SynthInstance inst = generate(cfg);
        const auto& table = inst.detections.tables.front();
        const TableGrid grid = infer_grid(table.cells, table.box);

        for (GateMode mode : {GateMode::prose, GateMode::literal})
        {
            const AssignmentResult r = assign_text(grid, table.texts, mode);
            CHECK(r.assignments.size() + r.unassigned.size() == table.texts.size());
            CHECK(flat_assignment(r, table.texts.size(), grid.n_cols()) ==
                  oracle::gate_assign(rects(grid), rects(table.texts), mode == GateMode::literal));
        }

        // every token sits in its generating cell
        const AssignmentResult r = assign_text(grid, table.texts);
        for (std::size_t k = 0; k < r.assignments.size(); ++k)
            CHECK(r.assignments[k].row * cfg.cols + r.assignments[k].col == k);
    }
}

TEST_CASE("property: soundness, order independence, shrink monotonicity")
{
    std::mt19937_64 rng(43);
    std::uniform_int_distribution<std::size_t> dim(1, 6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial)
    {
        SynthConfig cfg;
        cfg.rows = dim(rng);
        cfg.cols = dim(rng);
        cfg.centroid_jitter = 1.4 * u(rng);
        cfg.seed = 123 + static_cast<std::uint64_t>(trial);
        const SynthInstance inst = generate(cfg);
        const auto& table = inst.detections.tables.front();
        const TableGrid grid = infer_grid(table.cells, table.box);
        const AssignmentResult r = assign_text(grid, table.texts);

        for (const auto& a : r.assignments)
        {
            const BBoxd& cell = grid.cell(a.row, a.col).box;
            const Point2d e = centroid(table.texts[a.text_index].box);
            CHECK(std::abs(e.x() - centroid(cell).x()) <= cell.width() / 2);
            CHECK(std::abs(e.y() - centroid(cell).y()) <= cell.height() / 2);
        }

        std::vector<std::size_t> perm(table.texts.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<TextBox> shuffled;
        for (std::size_t k : perm)
            shuffled.push_back(table.texts[k]);
        CHECK(assign_text(grid, shuffled).grid == r.grid);

        const double s = 0.2 + 0.79 * u(rng);
        TableGrid shrunk = grid;
        for (std::size_t row = 0; row < grid.n_rows(); ++row)
            for (std::size_t col = 0; col < grid.n_cols(); ++col)
            {
                const BBoxd& b = grid.cell(row, col).box;
                const Point2d c = centroid(b);
                shrunk.cell(row, col).box = BBoxd(c.x() - s * b.width() / 2, c.y() - s * b.height() / 2,
                                                  c.x() + s * b.width() / 2, c.y() + s * b.height() / 2);
            }
        const AssignmentResult rs = assign_text(shrunk, table.texts);
        std::vector<bool> was_assigned(table.texts.size(), false);
        for (const auto& a : r.assignments)
            was_assigned[a.text_index] = true;
        for (const auto& a : rs.assignments)
            CHECK(was_assigned[a.text_index]);
    }
}
