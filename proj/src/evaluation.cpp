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

#include "tablefuse/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace tablefuse
{

Prediction::Prediction(Eigen::VectorXd probs, const NormBoxd& box_)
    : class_probs(std::move(probs)), box(box_)
{
    if (class_probs.size() < 2)
        throw InvalidArgument("class distribution needs at least one class plus no-object");
    if (!class_probs.allFinite() || (class_probs.array() < 0.0).any())
        throw InvalidArgument("class probabilities must be finite and non-negative");
    if (std::abs(class_probs.sum() - 1.0) > 1e-6)
        throw InvalidArgument("class probabilities must sum to 1");
}

double class_nll(const Eigen::VectorXd& probs, Eigen::Index class_id)
{
    return -std::log(std::max(probs[class_id], probability_floor));
}

namespace
{

void check_compatible(std::span<const Prediction> preds, std::span<const Truth> truths)
{
    if (preds.empty())
        return;
    const Eigen::Index n_probs = preds.front().class_probs.size();
    for (const auto& p : preds)
        if (p.class_probs.size() != n_probs)
            throw InvalidArgument("predictions disagree on the number of classes");
    for (const auto& t : truths)
        if (t.class_id < 0 || t.class_id >= n_probs - 1)
            throw InvalidArgument("truth class id is not a real class");
}

} // namespace

Eigen::MatrixXd match_cost_matrix(std::span<const Prediction> preds, std::span<const Truth> truths,
                                  const MatchOptions& options)
{
    check_compatible(preds, truths);
    Eigen::MatrixXd cost(static_cast<Eigen::Index>(truths.size()),
                         static_cast<Eigen::Index>(preds.size()));
    for (std::size_t i = 0; i < truths.size(); ++i)
        for (std::size_t j = 0; j < preds.size(); ++j)
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                class_nll(preds[j].class_probs, truths[i].class_id) +
                l_box(truths[i].box, preds[j].box, options.lambda_iou, options.lambda_l1);
    return cost;
}

MatchReport match_sets(std::span<const Prediction> preds, std::span<const Truth> truths,
                       const MatchOptions& options)
{
    if (preds.size() < truths.size())
        throw SizeMismatch("prediction set smaller than ground-truth set (" +
                           std::to_string(preds.size()) + " < " + std::to_string(truths.size()) +
                           ")");
    if (!(options.lambda_iou >= 0.0) || !(options.lambda_l1 >= 0.0))
        throw InvalidArgument("box-loss weights must be non-negative");

    const Eigen::MatrixXd cost = match_cost_matrix(preds, truths, options);
    const Assignment solved = solve_assignment(cost);

    MatchReport report;
    std::vector<bool> used(preds.size(), false);
    for (std::size_t i = 0; i < truths.size(); ++i)
    {
        const auto j = static_cast<std::size_t>(solved.row_to_col[i]);
        used[j] = true;
        report.assignment.push_back(j);

        const BBoxd tb = to_corner(truths[i].box, 1.0, 1.0);
        const BBoxd pb = to_corner(preds[j].box, 1.0, 1.0);
        PairTerms terms;
        terms.truth = i;
        terms.prediction = j;
        terms.l1 = (truths[i].box.vec() - preds[j].box.vec()).lpNorm<1>();
        terms.giou_loss = 1.0 - giou(tb, pb);
        terms.class_nll = class_nll(preds[j].class_probs, truths[i].class_id);
        terms.cost = cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        report.per_pair.push_back(terms);
        report.total_match_cost += terms.cost;
    }
    for (std::size_t j = 0; j < preds.size(); ++j)
    {
        if (used[j])
            continue;
        report.unmatched_predictions.push_back(j);
        report.no_object_loss += class_nll(preds[j].class_probs, preds[j].no_object_index());
    }
    report.hungarian_loss = report.total_match_cost + report.no_object_loss;
    return report;
}

const char* to_string(WordAccuracyMode mode)
{
    return mode == WordAccuracyMode::positional ? "positional" : "bag";
}

double WordCounts::percent() const
{
    if (total == 0)
        return 100.0;
    return static_cast<double>(correct) / static_cast<double>(total) * 100.0;
}

long WordCounts::rounded() const { return std::lround(percent()); }

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::size_t i = 0;
    auto is_space = [](char ch) {
        return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v';
    };
    while (i < text.size())
    {
        while (i < text.size() && is_space(text[i]))
            ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i]))
            ++i;
        if (i > start)
            tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

namespace
{

using Multiset = std::map<std::string, std::size_t>;

void add_tokens(Multiset& bag, const GridCell& cell)
{
    for (const auto& entry : cell.contents)
        for (auto& token : tokenize(entry))
            ++bag[std::move(token)];
}

WordCounts intersect(const Multiset& pred, const Multiset& truth)
{
    WordCounts counts;
    for (const auto& [token, n] : truth)
    {
        counts.total += n;
        const auto it = pred.find(token);
        if (it != pred.end())
            counts.correct += std::min(n, it->second);
    }
    return counts;
}

} // namespace

WordCounts word_accuracy(const TableGrid& pred, const TableGrid& truth, WordAccuracyMode mode)
{
    if (mode == WordAccuracyMode::bag)
    {
        Multiset p, t;
        for (const auto& cell : pred.cells())
            add_tokens(p, cell);
        for (const auto& cell : truth.cells())
            add_tokens(t, cell);
        return intersect(p, t);
    }

    if (pred.n_rows() != truth.n_rows() || pred.n_cols() != truth.n_cols())
        throw ShapeMismatch("positional word accuracy needs equal grid shapes (" +
                            std::to_string(pred.n_rows()) + "x" + std::to_string(pred.n_cols()) +
                            " vs " + std::to_string(truth.n_rows()) + "x" +
                            std::to_string(truth.n_cols()) + ")");
    WordCounts counts;
    for (std::size_t k = 0; k < truth.cells().size(); ++k)
    {
        Multiset p, t;
        add_tokens(p, pred.cells()[k]);
        add_tokens(t, truth.cells()[k]);
        counts += intersect(p, t);
    }
    return counts;
}

WordCounts row_accuracy(const TableGrid& pred, const TableGrid& truth)
{
    WordCounts counts;
    counts.total = truth.n_rows();
    if (pred.n_cols() != truth.n_cols())
        return counts;
    for (std::size_t r = 0; r < truth.n_rows() && r < pred.n_rows(); ++r)
    {
        bool same = true;
        for (std::size_t c = 0; c < truth.n_cols() && same; ++c)
            same = pred.text(r, c) == truth.text(r, c);
        if (same)
            ++counts.correct;
    }
    return counts;
}

DetectionIou detection_iou(std::span<const BBoxd> preds, std::span<const BBoxd> truths)
{
    DetectionIou out;
    if (truths.empty())
    {
        out.mean = preds.empty() ? 1.0 : 0.0;
        return out;
    }
    out.per_table.assign(truths.size(), 0.0);
    out.truth_to_pred.assign(truths.size(), -1);
    if (!preds.empty())
    {
        Eigen::MatrixXd overlap(static_cast<Eigen::Index>(truths.size()),
                                static_cast<Eigen::Index>(preds.size()));
        for (std::size_t i = 0; i < truths.size(); ++i)
            for (std::size_t j = 0; j < preds.size(); ++j)
                overlap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    iou(truths[i], preds[j]);
        const Assignment solved = solve_assignment((1.0 - overlap.array()).matrix());
        for (std::size_t i = 0; i < truths.size(); ++i)
        {
            const Eigen::Index j = solved.row_to_col[i];
            out.truth_to_pred[i] = j;
            if (j >= 0)
                out.per_table[i] = overlap(static_cast<Eigen::Index>(i), j);
        }
    }
    double sum = 0.0;
    for (double v : out.per_table)
        sum += v;
    out.mean = sum / static_cast<double>(truths.size());
    return out;
}

} // namespace tablefuse
