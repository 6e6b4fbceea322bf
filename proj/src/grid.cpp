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

#include "tablefuse/grid.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace tablefuse
{

const char* to_string(CellSource source)
{
    return source == CellSource::bordered ? "bordered" : "borderless";
}

CellBox::CellBox(const BBoxd& box_, double score_, CellSource source_)
    : box(box_), score(score_), source(source_)
{
    if (!(score >= 0.0 && score <= 1.0))
        throw InvalidArgument("cell score outside [0,1]");
}

TableGrid::TableGrid(std::size_t n_rows, std::size_t n_cols, const BBoxd& table_box)
    : m_rows(n_rows), m_cols(n_cols), m_table_box(table_box)
{
    if (n_rows == 0 || n_cols == 0)
        throw InvalidArgument("grid needs at least one row and one column");
    m_cells.resize(n_rows * n_cols);
    for (std::size_t r = 0; r < n_rows; ++r)
        for (std::size_t c = 0; c < n_cols; ++c)
            m_cells[r * n_cols + c].box = uniform_box(r, c);
}

const GridCell& TableGrid::cell(std::size_t row, std::size_t col) const
{
    if (row >= m_rows || col >= m_cols)
        throw InvalidArgument("grid slot out of range");
    return m_cells[row * m_cols + col];
}

GridCell& TableGrid::cell(std::size_t row, std::size_t col)
{
    if (row >= m_rows || col >= m_cols)
        throw InvalidArgument("grid slot out of range");
    return m_cells[row * m_cols + col];
}

std::string TableGrid::text(std::size_t row, std::size_t col) const
{
    std::string joined;
    for (const auto& token : cell(row, col).contents)
    {
        if (!joined.empty())
            joined += ' ';
        joined += token;
    }
    const auto first = joined.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string::npos)
        return {};
    const auto last = joined.find_last_not_of(" \t\r\n\f\v");
    return joined.substr(first, last - first + 1);
}

BBoxd TableGrid::uniform_box(std::size_t row, std::size_t col) const
{
    const double w = m_table_box.width() / static_cast<double>(m_cols);
    const double h = m_table_box.height() / static_cast<double>(m_rows);
    const double x1 = m_table_box.x1() + w * static_cast<double>(col);
    const double y1 = m_table_box.y1() + h * static_cast<double>(row);
    // last band ends exactly on the table edge
    const double x2 = col + 1 == m_cols ? m_table_box.x2() : x1 + w;
    const double y2 = row + 1 == m_rows ? m_table_box.y2() : y1 + h;
    return BBoxd(x1, y1, std::max(x1, x2), std::max(y1, y2));
}

void TableGrid::clear_contents()
{
    for (auto& c : m_cells)
        c.contents.clear();
}

double median(std::vector<double> values)
{
    if (values.empty())
        throw EmptyInput("median of empty list");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1)
        return values[mid];
    return (values[mid - 1] + values[mid]) / 2.0;
}

std::vector<std::size_t> cluster_gaps(std::span<const double> values, double threshold,
                                      std::size_t& n_clusters)
{
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<std::size_t> cluster(values.size(), 0);
    n_clusters = 0;
    for (std::size_t k = 0; k < order.size(); ++k)
    {
        if (k == 0 || values[order[k]] - values[order[k - 1]] > threshold)
            ++n_clusters;
        cluster[order[k]] = n_clusters - 1;
    }
    return cluster;
}

GridLayout infer_layout(std::span<const CellBox> cells, const GridOptions& options)
{
    if (cells.empty())
        throw EmptyInput("no cell boxes to build a grid from");
    if (!(options.row_tol > 0.0 && options.row_tol <= 1.0) ||
        !(options.col_tol > 0.0 && options.col_tol <= 1.0))
        throw InvalidArgument("row/column tolerance must lie in (0,1]");

    std::vector<double> xs, ys, widths, heights;
    xs.reserve(cells.size());
    ys.reserve(cells.size());
    for (const auto& c : cells)
    {
        const Point2d p = centroid(c.box);
        xs.push_back(p.x());
        ys.push_back(p.y());
        widths.push_back(c.box.width());
        heights.push_back(c.box.height());
    }

    GridLayout layout;
    const auto rows = cluster_gaps(ys, options.row_tol * median(heights), layout.n_rows);
    const auto cols = cluster_gaps(xs, options.col_tol * median(widths), layout.n_cols);
    layout.slots.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
        layout.slots.push_back({rows[i], cols[i]});
    return layout;
}

TableGrid infer_grid(std::span<const CellBox> cells, const BBoxd& table_box,
                     const GridOptions& options)
{
    if (cells.empty())
        throw EmptyInput("no cell boxes to build a grid from");
    for (const auto& c : cells)
        if (!intersects(c.box, table_box))
            throw InvalidArgument("cell box does not intersect the table region");

    const GridLayout layout = infer_layout(cells, options);

    std::map<Slot, std::vector<std::size_t>> by_slot;
    for (std::size_t i = 0; i < cells.size(); ++i)
        by_slot[layout.slots[i]].push_back(i);

    TableGrid grid(layout.n_rows, layout.n_cols, table_box);
    for (const auto& [slot, members] : by_slot)
    {
        if (members.size() > 1 && options.conflicts == ConflictPolicy::strict)
        {
            std::ostringstream msg;
            msg << members.size() << " detected cells map to slot (" << slot.row << ','
                << slot.col << ')';
            throw SlotConflict(msg.str());
        }
        GridCell& cell = grid.cell(slot.row, slot.col);
        cell.occupied = true;
        cell.box = cells[members.front()].box;
        cell.source = cells[members.front()].source;
        for (std::size_t k = 1; k < members.size(); ++k)
        {
            const CellBox& other = cells[members[k]];
            cell.box = enclose(cell.box, other.box);
            if (other.source == CellSource::bordered)
                cell.source = CellSource::bordered;
        }
        if (members.size() > 1)
        {
            std::ostringstream msg;
            msg << "slot (" << slot.row << ',' << slot.col << "): merged " << members.size()
                << " detected cells";
            grid.add_warning(msg.str());
        }
    }

    for (std::size_t r = 0; r < grid.n_rows(); ++r)
        for (std::size_t c = 0; c < grid.n_cols(); ++c)
            if (!grid.cell(r, c).occupied)
                grid.cell(r, c).box = synthesize_empty_box(grid, r, c);
    return grid;
}

BBoxd synthesize_empty_box(const TableGrid& grid, std::size_t row, std::size_t col)
{
    if (grid.cell(row, col).occupied)
        throw InvalidArgument("slot is occupied; nothing to synthesize");

    constexpr double inf = std::numeric_limits<double>::infinity();
    double y1 = inf, y2 = -inf;
    for (std::size_t c = 0; c < grid.n_cols(); ++c)
    {
        const GridCell& cell = grid.cell(row, c);
        if (!cell.occupied)
            continue;
        y1 = std::min(y1, cell.box.y1());
        y2 = std::max(y2, cell.box.y2());
    }
    double x1 = inf, x2 = -inf;
    for (std::size_t r = 0; r < grid.n_rows(); ++r)
    {
        const GridCell& cell = grid.cell(r, col);
        if (!cell.occupied)
            continue;
        x1 = std::min(x1, cell.box.x1());
        x2 = std::max(x2, cell.box.x2());
    }

    const BBoxd uniform = grid.uniform_box(row, col);
    if (y1 == inf)
    {
        y1 = uniform.y1();
        y2 = uniform.y2();
    }
    if (x1 == inf)
    {
        x1 = uniform.x1();
        x2 = uniform.x2();
    }
    return clamp_to(BBoxd(x1, y1, x2, y2), grid.table_box());
}

} // namespace tablefuse
