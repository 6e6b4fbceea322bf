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

#include "tablefuse/grid.hpp"
#include "tablefuse/synth.hpp"

using namespace tablefuse;

namespace
{

CellBox square(double cx, double cy, double half = 7.5)
{
    return CellBox(BBoxd(cx - half, cy - half, cx + half, cy + half));
}

std::vector<CellBox> regular_2x2()
{
    return {square(10, 10), square(30, 10), square(10, 30), square(30, 30)};
}

} // namespace

TEST_CASE("regular 2x2 grid")
{
    const auto cells = regular_2x2();
    const TableGrid grid = infer_grid(cells, BBoxd(0, 0, 40, 40));
    REQUIRE(grid.n_rows() == 2);
    REQUIRE(grid.n_cols() == 2);
    CHECK(grid.cell(0, 0).box == cells[0].box);
    CHECK(grid.cell(0, 1).box == cells[1].box);
    CHECK(grid.cell(1, 0).box == cells[2].box);
    CHECK(grid.cell(1, 1).box == cells[3].box);
    for (const auto& c : grid.cells())
    {
        CHECK(c.occupied);
        CHECK(c.contents.empty());
    }
    CHECK(grid.warnings().empty());
}

TEST_CASE("centroid jitter below tolerance merges into one row")
{
    // median height 10, row_tol 0.5 -> threshold 5
    const std::vector<CellBox> cells{CellBox(BBoxd(0, 5, 20, 15)), CellBox(BBoxd(25, 6, 45, 16)),
                                     CellBox(BBoxd(50, 5.5, 70, 15.5))};
    const TableGrid grid = infer_grid(cells, BBoxd(0, 0, 80, 20));
    CHECK(grid.n_rows() == 1);
    CHECK(grid.n_cols() == 3);
}

TEST_CASE("row and column ordering follows centroids")
{
    const auto cells = regular_2x2();
    const GridLayout layout = infer_layout(cells);
    CHECK(layout.slots == std::vector<Slot>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

TEST_CASE("input validation")
{
    std::vector<CellBox> none;
    CHECK_THROWS_AS(infer_grid(none, BBoxd(0, 0, 1, 1)), EmptyInput);
    CHECK_THROWS_AS(infer_grid(regular_2x2(), BBoxd(100, 100, 200, 200)), InvalidArgument);
    GridOptions bad;
    bad.row_tol = 0.0;
    CHECK_THROWS_AS(infer_grid(regular_2x2(), BBoxd(0, 0, 40, 40), bad), InvalidArgument);
    bad.row_tol = 1.5;
    CHECK_THROWS_AS(infer_grid(regular_2x2(), BBoxd(0, 0, 40, 40), bad), InvalidArgument);
    CHECK_THROWS_AS(CellBox(BBoxd(0, 0, 1, 1), 1.5), InvalidArgument);
}

TEST_CASE("slot conflicts: merge keeps the union, strict throws")
{
    auto cells = regular_2x2();
    cells.push_back(CellBox(BBoxd(3.5, 3.5, 16.5, 18.5), 0.5, CellSource::borderless));

    const TableGrid merged = infer_grid(cells, BBoxd(0, 0, 40, 40));
    CHECK(merged.n_rows() == 2);
    CHECK(merged.cell(0, 0).box == BBoxd(2.5, 2.5, 17.5, 18.5));
    CHECK(merged.cell(0, 0).source == CellSource::bordered);
    REQUIRE(merged.warnings().size() == 1);
    CHECK(merged.warnings()[0] == "slot (0,0): merged 2 detected cells");

    GridOptions strict;
    strict.conflicts = ConflictPolicy::strict;
    CHECK_THROWS_AS(infer_grid(cells, BBoxd(0, 0, 40, 40), strict), SlotConflict);
}

TEST_CASE("empty slots get synthesized boxes")
{
    auto cells = regular_2x2();
    cells.pop_back();
    const TableGrid grid = infer_grid(cells, BBoxd(0, 0, 40, 40));
    REQUIRE(grid.n_rows() == 2);
    REQUIRE(grid.n_cols() == 2);
    const GridCell& hole = grid.cell(1, 1);
    CHECK_FALSE(hole.occupied);
    // y-band of row 1 from (1,0), x-band of column 1 from (0,1)
    CHECK(hole.box == BBoxd(22.5, 22.5, 37.5, 37.5));
    CHECK_THROWS_AS(synthesize_empty_box(grid, 0, 0), InvalidArgument);
}

TEST_CASE("synthesize_empty_box falls back to the uniform partition")
{
    TableGrid single(1, 1, BBoxd(5, 5, 25, 15));
    CHECK(synthesize_empty_box(single, 0, 0) == BBoxd(5, 5, 25, 15));

    TableGrid grid(2, 2, BBoxd(0, 0, 40, 20));
    grid.cell(0, 0).occupied = true;
    grid.cell(0, 0).box = BBoxd(1, 1, 19, 9);
    // row 1 and column 1 have no occupied cells
    CHECK(synthesize_empty_box(grid, 1, 1) == BBoxd(20, 10, 40, 20));
    CHECK(synthesize_empty_box(grid, 0, 1) == BBoxd(20, 1, 40, 9));
    CHECK(synthesize_empty_box(grid, 1, 0) == BBoxd(1, 10, 19, 20));
}

TEST_CASE("synthesized boxes stay inside the table box")
{
    // cells overhang the table region
    std::vector<CellBox> cells{CellBox(BBoxd(-5, -5, 10, 10)), CellBox(BBoxd(20, 20, 45, 45))};
    const TableGrid grid = infer_grid(cells, BBoxd(0, 0, 40, 40));
    REQUIRE(grid.n_rows() == 2);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c)
            if (!grid.cell(r, c).occupied)
                CHECK(contains(grid.table_box(), grid.cell(r, c).box));
}

TEST_CASE("closed loop: infer_grid recovers generated lattices")
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> dim(1, 8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial)
    {
        SynthConfig cfg;
        cfg.rows = dim(rng);
        cfg.cols = dim(rng);
        cfg.cell_w = 40 + 160 * u(rng);
        cfg.cell_h = 15 + 45 * u(rng);
        cfg.cell_jitter = 0.45 * u(rng);
        cfg.seed = 1000 + static_cast<std::uint64_t>(trial);
        const SynthInstance inst = generate(cfg);
        const auto& table = inst.detections.tables.front();

        const GridLayout layout = infer_layout(table.cells);
        REQUIRE(layout.n_rows == cfg.rows);
        REQUIRE(layout.n_cols == cfg.cols);
        for (std::size_t k = 0; k < layout.slots.size(); ++k)
            CHECK(layout.slots[k] == Slot{k / cfg.cols, k % cfg.cols});
    }
}

TEST_CASE("property: permutation, translation and scaling invariance")
{
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> dim(1, 8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        SynthConfig cfg;
        cfg.rows = dim(rng);
        cfg.cols = dim(rng);
        cfg.cell_jitter = 0.4 * u(rng);
        cfg.cell_dropout = 0.3 * u(rng);
        cfg.seed = 77 + static_cast<std::uint64_t>(trial);
        const SynthInstance inst = generate(cfg);
        const auto& table = inst.detections.tables.front();
        const TableGrid base = infer_grid(table.cells, table.box);
        const GridLayout base_layout = infer_layout(table.cells);

        std::vector<std::size_t> perm(table.cells.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<CellBox> shuffled;
        for (std::size_t k : perm)
            shuffled.push_back(table.cells[k]);
        CHECK(infer_grid(shuffled, table.box) == base);

        const double dx = 500 * u(rng) - 250, dy = 500 * u(rng) - 250;
        std::vector<CellBox> moved;
        for (const auto& c : table.cells)
            moved.emplace_back(c.box.translated(dx, dy), c.score, c.source);
        const TableGrid moved_grid = infer_grid(moved, table.box.translated(dx, dy));
        CHECK(infer_layout(moved) == base_layout);
        for (std::size_t k = 0; k < base.cells().size(); ++k)
        {
            const auto want = base.cells()[k].box.translated(dx, dy).corners();
            CHECK((moved_grid.cells()[k].box.corners() - want).cwiseAbs().maxCoeff() <= 1e-9);
        }

        const double s = 0.1 + 10 * u(rng);
        std::vector<CellBox> scaled;
        for (const auto& c : table.cells)
            scaled.emplace_back(c.box.scaled(s), c.score, c.source);
        CHECK(infer_layout(scaled) == base_layout);

        CHECK(base.n_rows() * base.n_cols() >= table.cells.size());
    }
}
