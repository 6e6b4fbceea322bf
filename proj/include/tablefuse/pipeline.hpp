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
#include <ostream>
#include <string>
#include <vector>

#include "tablefuse/documents.hpp"
#include "tablefuse/evaluation.hpp"
#include "tablefuse/grid.hpp"
#include "tablefuse/mapping.hpp"
#include "tablefuse/synth.hpp"

namespace tablefuse
{

enum class OutputFormat
{
    csv,
    report_only
};

struct PipelineOptions
{
    GridOptions grid;
    GateMode gate = GateMode::prose;
    MatchOptions match;
    WordAccuracyMode wordacc = WordAccuracyMode::positional;
    /// Unknown document fields, per-table failures and shape mismatches
    /// become hard errors.
    bool strict = false;
    OutputFormat format = OutputFormat::csv;
    /// Adds wall-clock stage timings to reports (makes them non-reproducible).
    bool timings = false;
};

struct TableAssembly
{
    std::size_t index = 0;
    /// Empty when grid inference failed for this table.
    std::optional<AssignmentResult> result;
    std::string error;
    std::size_t n_cells = 0;
    std::size_t n_bordered_cells = 0;
    std::size_t n_texts = 0;

    bool ok() const { return result.has_value(); }
};

/// infer_grid + assign_text for every table, in document order. Failures
/// are recorded per table unless options.strict, which rethrows.
std::vector<TableAssembly> assemble(const DetectionDocument& doc, const PipelineOptions& options);

struct TableEval
{
    std::size_t truth_index = 0;
    /// -1 when no prediction overlaps this truth table.
    long prediction_index = -1;
    double iou = 0.0;
    std::size_t pred_rows = 0, pred_cols = 0;
    std::size_t truth_rows = 0, truth_cols = 0;
    /// Mode actually used for the positional figure (bag after a shape mismatch).
    WordAccuracyMode positional_mode = WordAccuracyMode::positional;
    WordCounts positional;
    WordCounts bag;
    WordCounts rows;
};

struct EvalReport
{
    std::vector<double> per_table_iou;
    double mean_table_iou = 0.0;
    WordAccuracyMode mode = WordAccuracyMode::positional;
    WordCounts positional;
    WordCounts bag;
    WordCounts rows;
    std::optional<MatchReport> hungarian;
    std::vector<TableEval> tables;
    std::vector<std::string> warnings;

    /// Counts of the configured word-accuracy mode.
    const WordCounts& counts() const { return mode == WordAccuracyMode::positional ? positional : bag; }
};

/// Assembles `pred`, pairs its tables with the truth tables by IoU and scores
/// detection, words, rows and (when every predicted table carries class
/// probabilities) the set-matching loss.
EvalReport evaluate(const DetectionDocument& pred, const TruthDocument& truth,
                    const PipelineOptions& options);

std::string assembly_report(const std::string& input_name, const std::vector<TableAssembly>& tables,
                            const PipelineOptions& options);
std::string eval_report_json(const EvalReport& report);
std::string match_report_json(const MatchReport& report);

// Command entry points shared by the CLI and the integration tests. Each
// returns the process exit status and writes diagnostics to `err`.

inline constexpr const char* assembly_report_filename = "assembly_report.json";
inline constexpr const char* eval_report_filename = "eval_report.json";
inline constexpr const char* match_report_filename = "match_report.json";

std::string table_csv_filename(std::size_t index);

int cmd_assemble(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                 const PipelineOptions& options, std::ostream& err);

/// Writes eval_report.json into `out_dir`, or prints it to `out` when no
/// directory is given.
int cmd_evaluate(const std::filesystem::path& pred, const std::filesystem::path& truth,
                 const std::optional<std::filesystem::path>& out_dir,
                 const PipelineOptions& options, std::ostream& out, std::ostream& err);

/// Evaluates every instance of a synthetic corpus manifest and writes one
/// aggregate report with per-instance entries.
int cmd_evaluate_manifest(const std::filesystem::path& manifest,
                          const std::optional<std::filesystem::path>& out_dir,
                          const PipelineOptions& options, std::ostream& out, std::ostream& err);

/// Without a config file a single default instance is generated.
int cmd_synth(const std::optional<std::filesystem::path>& config,
              const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

std::vector<Prediction> parse_predictions(std::string_view text, const std::string& source = {});
std::vector<Truth> parse_truths(std::string_view text, const std::string& source = {});

int cmd_match(const std::filesystem::path& pred, const std::filesystem::path& truth,
              const MatchOptions& options, const std::optional<std::filesystem::path>& out_dir,
              std::ostream& out, std::ostream& err);

} // namespace tablefuse
