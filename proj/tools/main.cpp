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

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tablefuse/pipeline.hpp"

namespace
{

using tablefuse::PipelineOptions;

void add_grid_options(CLI::App* cmd, PipelineOptions& opts)
{
    const std::map<std::string, tablefuse::GateMode> gates{{"prose", tablefuse::GateMode::prose},
                                                           {"literal", tablefuse::GateMode::literal}};
    const std::map<std::string, tablefuse::ConflictPolicy> conflicts{
        {"merge", tablefuse::ConflictPolicy::merge}, {"strict", tablefuse::ConflictPolicy::strict}};

    cmd->add_option("--gate", opts.gate, "Vertical gate bound: cell height (prose) or width (literal)")
        ->transform(CLI::CheckedTransformer(gates, CLI::ignore_case));
    cmd->add_option("--row-tol", opts.grid.row_tol, "Row gap tolerance, fraction of median cell height")
        ->check(CLI::Range(1e-9, 1.0));
    cmd->add_option("--col-tol", opts.grid.col_tol, "Column gap tolerance, fraction of median cell width")
        ->check(CLI::Range(1e-9, 1.0));
    cmd->add_option("--conflicts", opts.grid.conflicts, "Two cells on one slot: merge or strict")
        ->transform(CLI::CheckedTransformer(conflicts, CLI::ignore_case));
    cmd->add_flag("--strict", opts.strict, "Treat unknown fields, table failures and shape mismatches as errors");
    cmd->add_flag("--timings", opts.timings, "Record wall-clock stage timings in the report");
}

void add_lambda_options(CLI::App* cmd, tablefuse::MatchOptions& match)
{
    cmd->add_option("--lambda-iou", match.lambda_iou, "Weight of the GIoU box term")->check(CLI::NonNegativeNumber);
    cmd->add_option("--lambda-l1", match.lambda_l1, "Weight of the L1 box term")->check(CLI::NonNegativeNumber);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Assemble tables from detector outputs and score them against ground truth"};
    app.require_subcommand(1);

    PipelineOptions opts;
    std::string input, pred, truth, manifest, config;
    std::string out_dir;

    auto* assemble = app.add_subcommand("assemble", "Build grids, map text into cells, write CSV per table");
    assemble->add_option("input", input, "Detection document")->required()->check(CLI::ExistingFile);
    assemble->add_option("--out-dir", out_dir, "Output directory")->required();
    const std::map<std::string, tablefuse::OutputFormat> formats{{"csv", tablefuse::OutputFormat::csv},
                                                                 {"report-only", tablefuse::OutputFormat::report_only}};
    assemble->add_option("--format", opts.format, "csv or report-only")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    add_grid_options(assemble, opts);

    auto* evaluate = app.add_subcommand("evaluate", "Score a detection document against ground truth");
    auto* pred_opt = evaluate->add_option("--pred", pred, "Predicted detection document")->check(CLI::ExistingFile);
    auto* truth_opt = evaluate->add_option("--truth", truth, "Truth document")->check(CLI::ExistingFile);
    auto* manifest_opt =
        evaluate->add_option("--manifest", manifest, "Synthetic corpus manifest")->check(CLI::ExistingFile);
    pred_opt->needs(truth_opt)->excludes(manifest_opt);
    truth_opt->needs(pred_opt);
    evaluate->add_option("--out-dir", out_dir, "Write eval_report.json here instead of stdout");
    const std::map<std::string, tablefuse::WordAccuracyMode> modes{
        {"positional", tablefuse::WordAccuracyMode::positional}, {"bag", tablefuse::WordAccuracyMode::bag}};
    evaluate->add_option("--wordacc", opts.wordacc, "positional or bag")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
    add_lambda_options(evaluate, opts.match);
    add_grid_options(evaluate, opts);

    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus and its manifest");
    synth->add_option("config", config, "Config file (one object, an array, or {\"configs\": [...]})")
        ->check(CLI::ExistingFile);
    synth->add_option("--out-dir", out_dir, "Output directory")->required();

    auto* match = app.add_subcommand("match", "Optimal set matching between normalized box sets");
    match->add_option("--pred", pred, "Predictions file")->required()->check(CLI::ExistingFile);
    match->add_option("--truth", truth, "Truths file")->required()->check(CLI::ExistingFile);
    match->add_option("--out-dir", out_dir, "Write match_report.json here instead of stdout");
    add_lambda_options(match, opts.match);

    CLI11_PARSE(app, argc, argv);

    const std::optional<std::filesystem::path> maybe_out =
        out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir);

    if (assemble->parsed())
        return tablefuse::cmd_assemble(input, out_dir, opts, std::cerr);
    if (evaluate->parsed())
    {
        if (!manifest.empty())
            return tablefuse::cmd_evaluate_manifest(manifest, maybe_out, opts, std::cout, std::cerr);
        if (pred.empty())
        {
            std::cerr << "error: evaluate needs --pred and --truth, or --manifest\n";
            return 2;
        }
        return tablefuse::cmd_evaluate(pred, truth, maybe_out, opts, std::cout, std::cerr);
    }
    if (synth->parsed())
    {
        const std::optional<std::filesystem::path> cfg =
            config.empty() ? std::nullopt : std::optional<std::filesystem::path>(config);
        return tablefuse::cmd_synth(cfg, out_dir, std::cout, std::cerr);
    }
    if (match->parsed())
        return tablefuse::cmd_match(pred, truth, opts.match, maybe_out, std::cout, std::cerr);
    return 2;
}
