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

#include "tablefuse/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace tablefuse
{

namespace
{

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(first, last - first + 1);
}

} // namespace

TextBox::TextBox(const BBoxd& box_, std::string text_, double score_)
    : box(box_), text(trim(std::move(text_))), score(score_)
{
    if (text.empty())
        throw InvalidArgument("text box has empty text");
    if (!(score >= 0.0 && score <= 1.0))
        throw InvalidArgument("text score outside [0,1]");
}

bool passes_gate(const BBoxd& cell, const Point2d& text_centroid, GateMode mode)
{
    const Point2d c = centroid(cell);
    const double half_w = cell.width() / 2.0;
    const double half_h = (mode == GateMode::prose ? cell.height() : cell.width()) / 2.0;
    return std::abs(text_centroid.x() - c.x()) <= half_w &&
           std::abs(text_centroid.y() - c.y()) <= half_h;
}

AssignmentResult assign_text(TableGrid grid, std::span<const TextBox> texts, GateMode mode)
{
    grid.clear_contents();
    AssignmentResult result{std::move(grid), {}, {}, {}};
    const TableGrid& g = result.grid;

    std::map<Slot, std::vector<IndexedText>> per_cell;
    for (std::size_t k = 0; k < texts.size(); ++k)
    {
        const Point2d e = centroid(texts[k].box);
        bool found = false;
        TextAssignment best;
        for (std::size_t r = 0; r < g.n_rows(); ++r)
        {
            for (std::size_t c = 0; c < g.n_cols(); ++c)
            {
                const BBoxd& box = g.cell(r, c).box;
                if (!passes_gate(box, e, mode))
                    continue;
                const double d = (e - centroid(box)).norm();
                // row-major scan with strict < keeps the lowest (row, col) on ties
                if (!found || d < best.distance)
                {
                    best = {k, r, c, d};
                    found = true;
                }
            }
        }
        if (found)
        {
            result.assignments.push_back(best);
            per_cell[{best.row, best.col}].push_back({texts[k], k});
        }
        else
        {
            result.unassigned.push_back(texts[k]);
            result.unassigned_indices.push_back(k);
        }
    }

    for (auto& [slot, members] : per_cell)
        result.grid.cell(slot.row, slot.col).contents = order_cell_contents(std::move(members));
    return result;
}

std::vector<std::string> order_cell_contents(std::vector<IndexedText> contents)
{
    std::sort(contents.begin(), contents.end(), [](const IndexedText& a, const IndexedText& b) {
        return std::forward_as_tuple(a.text.box.y1(), a.text.box.x1(), a.text.text, a.index) <
               std::forward_as_tuple(b.text.box.y1(), b.text.box.x1(), b.text.text, b.index);
    });
    std::vector<std::string> tokens;
    tokens.reserve(contents.size());
    for (auto& item : contents)
        tokens.push_back(std::move(item.text.text));
    return tokens;
}

} // namespace tablefuse
