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
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tablefuse/assignment.hpp"
#include "tablefuse/geometry.hpp"
#include "tablefuse/grid.hpp"

namespace tablefuse
{

/// Probability floor applied before taking logs.
inline constexpr double probability_floor = 1e-12;

/// One element of a fixed-size prediction set. `class_probs` covers the real
/// classes followed by the no-object class in the last slot.
struct Prediction
{
    Prediction(Eigen::VectorXd class_probs, const NormBoxd& box);

    Eigen::Index no_object_index() const { return class_probs.size() - 1; }

    Eigen::VectorXd class_probs;
    NormBoxd box;
};

struct Truth
{
    Eigen::Index class_id = 0;
    NormBoxd box;
};

struct MatchOptions
{
    double lambda_iou = 2.0;
    double lambda_l1 = 5.0;
};

/// Loss terms of one matched (truth, prediction) pair. `l1` and `giou_loss`
/// are unweighted.
struct PairTerms
{
    std::size_t truth = 0;
    std::size_t prediction = 0;
    double l1 = 0.0;
    double giou_loss = 0.0;
    double class_nll = 0.0;
    double cost = 0.0;
};

struct MatchReport
{
    /// truth index -> prediction index
    std::vector<std::size_t> assignment;
    double total_match_cost = 0.0;
    double hungarian_loss = 0.0;
    std::vector<PairTerms> per_pair;
    std::vector<std::size_t> unmatched_predictions;
    /// Sum of -log p(no-object) over the unmatched predictions.
    double no_object_loss = 0.0;
};

double class_nll(const Eigen::VectorXd& probs, Eigen::Index class_id);

/// |truths| x |preds| matrix of -log p_j(c_i) + L_box(b_i, b_j).
Eigen::MatrixXd match_cost_matrix(std::span<const Prediction> preds, std::span<const Truth> truths,
                                  const MatchOptions& options = {});

/// Optimal bipartite matching of truths onto predictions plus the Hungarian
/// loss over that matching. Throws SizeMismatch when there are fewer
/// predictions than truths.
MatchReport match_sets(std::span<const Prediction> preds, std::span<const Truth> truths,
                       const MatchOptions& options = {});

enum class WordAccuracyMode
{
    positional,
    bag
};

const char* to_string(WordAccuracyMode mode);

/// X correct words out of Y ground-truth words.
struct WordCounts
{
    std::size_t correct = 0;
    std::size_t total = 0;

    /// 100 X / Y, or 100 when Y = 0.
    double percent() const;
    /// percent() rounded to the nearest integer, as reported in tables.
    long rounded() const;

    WordCounts& operator+=(const WordCounts& o)
    {
        correct += o.correct;
        total += o.total;
        return *this;
    }
    friend bool operator==(const WordCounts&, const WordCounts&) = default;
};

std::vector<std::string> tokenize(std::string_view text);

/// Word-level accuracy of `pred` against `truth`. Positional mode intersects
/// token multisets slot by slot and throws ShapeMismatch on different
/// shapes; bag mode intersects whole-table multisets.
WordCounts word_accuracy(const TableGrid& pred, const TableGrid& truth,
                         WordAccuracyMode mode = WordAccuracyMode::positional);

/// A truth row counts as matched when the predicted row at the same index
/// has identical text in every column.
WordCounts row_accuracy(const TableGrid& pred, const TableGrid& truth);

struct DetectionIou
{
    std::vector<double> per_table;
    double mean = 0.0;
    /// truth index -> prediction index, -1 when the truth is unmatched
    std::vector<Eigen::Index> truth_to_pred;
};

/// IoU of each truth table with its optimally paired prediction (cost
/// 1 - IoU); unmatched truths score 0. With no truths the mean is 1 when
/// there are also no predictions and 0 otherwise.
DetectionIou detection_iou(std::span<const BBoxd> preds, std::span<const BBoxd> truths);

} // namespace tablefuse
