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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tablefuse/grid.hpp"

namespace tablefuse
{

/// One OCR output unit. Text is stored trimmed and must be non-empty.
struct TextBox
{
    TextBox(const BBoxd& box, std::string text, double score = 1.0);

    BBoxd box;
    std::string text;
    double score;
};

/// Which half-extent bounds the vertical test: the cell height (`prose`) or
/// the cell width in both directions (`literal`).
enum class GateMode
{
    prose,
    literal
};

struct TextAssignment
{
    std::size_t text_index = 0;
    std::size_t row = 0;
    std::size_t col = 0;
    double distance = 0.0;

    friend bool operator==(const TextAssignment&, const TextAssignment&) = default;
};

struct AssignmentResult
{
    TableGrid grid;
    /// Texts that passed no cell's gate, in input order.
    std::vector<TextBox> unassigned;
    std::vector<std::size_t> unassigned_indices;
    /// Sorted by text index.
    std::vector<TextAssignment> assignments;
};

/// |dx| <= W/2 and |dy| <= H/2 (or W/2 under the literal gate), measured
/// between the text centroid and the cell centroid.
bool passes_gate(const BBoxd& cell, const Point2d& text_centroid, GateMode mode = GateMode::prose);

/// Maps every text onto the gated cell with the nearest centroid; ties go to
/// the lower row, then the lower column. Texts admitted by no cell are kept
/// as unassigned. Existing grid contents are discarded first.
AssignmentResult assign_text(TableGrid grid, std::span<const TextBox> texts,
                             GateMode mode = GateMode::prose);

struct IndexedText
{
    TextBox text;
    std::size_t index = 0;
};

/// Reading order inside one cell: top edge, then left edge, then text, then
/// original index.
std::vector<std::string> order_cell_contents(std::vector<IndexedText> contents);

} // namespace tablefuse
