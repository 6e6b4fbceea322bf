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

#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tablefuse/geometry.hpp"

namespace tablefuse
{

/// Ruling-based vs. ruling-free origin of a cell or table. Carried through
/// for diagnostics; the grid algorithm treats both the same.
enum class CellSource
{
    bordered,
    borderless
};

const char* to_string(CellSource source);

enum class ConflictPolicy
{
    merge,
    strict
};

struct CellBox
{
    CellBox(const BBoxd& box, double score = 1.0, CellSource source = CellSource::bordered);

    BBoxd box;
    double score;
    CellSource source;
};

struct Slot
{
    std::size_t row = 0;
    std::size_t col = 0;

    friend auto operator<=>(const Slot&, const Slot&) = default;
};

struct GridCell
{
    BBoxd box;
    std::vector<std::string> contents;
    bool occupied = false;
    CellSource source = CellSource::bordered;

    friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// Complete R x C lattice stored row-major. Every slot exists; empty slots
/// carry a synthesized box and no contents.
class TableGrid
{
public:
    /// Lattice with every slot empty and boxed by a uniform partition of
    /// `table_box`.
    TableGrid(std::size_t n_rows, std::size_t n_cols, const BBoxd& table_box);

    std::size_t n_rows() const { return m_rows; }
    std::size_t n_cols() const { return m_cols; }
    const BBoxd& table_box() const { return m_table_box; }

    const GridCell& cell(std::size_t row, std::size_t col) const;
    GridCell& cell(std::size_t row, std::size_t col);
    std::span<const GridCell> cells() const { return m_cells; }

    /// Cell contents joined with single spaces, outer whitespace trimmed.
    std::string text(std::size_t row, std::size_t col) const;

    /// Box of slot (row, col) in an even R x C split of the table box.
    BBoxd uniform_box(std::size_t row, std::size_t col) const;

    void clear_contents();

    const std::vector<std::string>& warnings() const { return m_warnings; }
    void add_warning(std::string warning) { m_warnings.push_back(std::move(warning)); }

    friend bool operator==(const TableGrid&, const TableGrid&) = default;

private:
    std::size_t m_rows;
    std::size_t m_cols;
    BBoxd m_table_box;
    std::vector<GridCell> m_cells;
    std::vector<std::string> m_warnings;
};

struct GridOptions
{
    /// New row when the sorted centroid-y gap exceeds row_tol x median cell height.
    double row_tol = 0.5;
    /// New column when the sorted centroid-x gap exceeds col_tol x median cell width.
    double col_tol = 0.5;
    ConflictPolicy conflicts = ConflictPolicy::merge;
};

/// Row/column index of every input cell plus the lattice extent.
struct GridLayout
{
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<Slot> slots;

    friend bool operator==(const GridLayout&, const GridLayout&) = default;
};

/// 1-D gap clustering of `values`: sorted ascending, a new cluster starts
/// whenever the gap to the previous value exceeds `threshold`. Returns the
/// cluster index of each value in input order and the cluster count.
std::vector<std::size_t> cluster_gaps(std::span<const double> values, double threshold,
                                      std::size_t& n_clusters);

double median(std::vector<double> values);

GridLayout infer_layout(std::span<const CellBox> cells, const GridOptions& options = {});

/// Builds the full lattice from unordered detected cells. Throws EmptyInput on
/// an empty list, InvalidArgument on bad tolerances or a cell disjoint from
/// the table, and SlotConflict when two cells share a slot under the strict
/// policy.
TableGrid infer_grid(std::span<const CellBox> cells, const BBoxd& table_box,
                     const GridOptions& options = {});

/// Geometry for an unoccupied slot: row r's y-band crossed with column c's
/// x-band, bands taken from the occupied cells of that row / column. A band
/// with no occupied cells falls back to the uniform partition. The result is
/// clamped into the table box.
BBoxd synthesize_empty_box(const TableGrid& grid, std::size_t row, std::size_t col);

} // namespace tablefuse
