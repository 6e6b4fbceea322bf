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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tablefuse/grid.hpp"
#include "tablefuse/mapping.hpp"

namespace tablefuse
{

inline constexpr int document_version = 1;

/// One table as reported by the upstream detectors.
struct DetectedTable
{
    BBoxd box;
    CellSource table_class = CellSource::bordered;
    double score = 1.0;
    /// Optional distribution over {bordered, borderless, no-object}.
    std::optional<Eigen::VectorXd> class_probs;
    std::vector<CellBox> cells;
    std::vector<TextBox> texts;
};

struct DetectionDocument
{
    double image_w = 0.0;
    double image_h = 0.0;
    std::vector<DetectedTable> tables;
};

struct TruthTable
{
    BBoxd box;
    CellSource table_class = CellSource::bordered;
    std::size_t n_rows = 1;
    std::size_t n_cols = 1;
    /// Row-major, n_rows * n_cols entries; empty string for empty cells.
    std::vector<std::string> cell_texts;

    const std::string& text(std::size_t row, std::size_t col) const
    {
        return cell_texts.at(row * n_cols + col);
    }
};

struct TruthDocument
{
    double image_w = 0.0;
    double image_h = 0.0;
    std::vector<TruthTable> tables;
};

/// Ground-truth grid for evaluation: uniform lattice boxes, one content entry
/// per non-empty cell.
TableGrid to_grid(const TruthTable& table);

struct ParseOptions
{
    /// Reject unknown fields instead of ignoring them.
    bool strict = false;
    /// Name used in error messages.
    std::string source;
};

DetectionDocument parse_detection(std::string_view text, const ParseOptions& options = {});
TruthDocument parse_truth(std::string_view text, const ParseOptions& options = {});

/// Serialized forms end with a newline and are byte-stable.
std::string dump_detection(const DetectionDocument& doc);
std::string dump_truth(const TruthDocument& doc);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

DetectionDocument load_detection(const std::filesystem::path& path, bool strict = false);
TruthDocument load_truth(const std::filesystem::path& path, bool strict = false);

} // namespace tablefuse
