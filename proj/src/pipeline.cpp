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

#include "tablefuse/pipeline.hpp"

#include <chrono>

#include "json.hpp"
#include "tablefuse/csv.hpp"

namespace tablefuse
{

namespace
{

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

ordered_json counts_json(const WordCounts& c)
{
    return ordered_json{{"X", c.correct}, {"Y", c.total}};
}

ordered_json match_json(const MatchReport& m)
{
    ordered_json j;
    j["assignment"] = m.assignment;
    j["total_cost"] = m.total_match_cost;
    j["loss"] = m.hungarian_loss;
    ordered_json pairs = ordered_json::array();
    for (const auto& p : m.per_pair)
    {
        ordered_json pj;
        pj["truth"] = p.truth;
        pj["prediction"] = p.prediction;
        pj["l1"] = p.l1;
        pj["giou_loss"] = p.giou_loss;
        pj["class_nll"] = p.class_nll;
        pj["cost"] = p.cost;
        pairs.push_back(std::move(pj));
    }
    j["per_pair"] = pairs;
    j["unmatched_predictions"] = m.unmatched_predictions;
    j["no_object_loss"] = m.no_object_loss;
    return j;
}

ordered_json eval_fields(const EvalReport& r)
{
    ordered_json j;
    j["mean_table_iou"] = r.mean_table_iou;
    j["per_table_iou"] = r.per_table_iou;
    j["word_accuracy"] = r.counts().percent();
    j["word_accuracy_rounded"] = r.counts().rounded();
    j["word_accuracy_mode"] = to_string(r.mode);
    j["word_accuracy_positional"] = r.positional.percent();
    j["word_accuracy_bag"] = r.bag.percent();
    j["row_accuracy"] = r.rows.percent();
    j["counts"] = counts_json(r.counts());
    j["counts_positional"] = counts_json(r.positional);
    j["counts_bag"] = counts_json(r.bag);
    j["rows"] = ordered_json{{"matched", r.rows.correct}, {"total", r.rows.total}};
    j["hungarian"] = r.hungarian ? match_json(*r.hungarian) : ordered_json(nullptr);
    ordered_json tables = ordered_json::array();
    for (const auto& t : r.tables)
    {
        ordered_json tj;
        tj["truth_index"] = t.truth_index;
        tj["prediction_index"] = t.prediction_index < 0 ? ordered_json(nullptr) : ordered_json(t.prediction_index);
        tj["iou"] = t.iou;
        tj["pred_shape"] = ordered_json::array({t.pred_rows, t.pred_cols});
        tj["truth_shape"] = ordered_json::array({t.truth_rows, t.truth_cols});
        tj["positional_mode"] = to_string(t.positional_mode);
        tj["counts_positional"] = counts_json(t.positional);
        tj["counts_bag"] = counts_json(t.bag);
        tj["rows"] = ordered_json{{"matched", t.rows.correct}, {"total", t.rows.total}};
        tables.push_back(std::move(tj));
    }
    j["tables"] = tables;
    j["warnings"] = r.warnings;
    return j;
}

std::string shape(std::size_t r, std::size_t c) { return std::to_string(r) + "x" + std::to_string(c); }

void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

void emit(const std::string& text, const std::optional<std::filesystem::path>& out_dir,
          const char* filename, std::ostream& out)
{
    if (out_dir)
    {
        ensure_dir(*out_dir);
        write_file(*out_dir / filename, text);
    }
    else
    {
        out << text;
    }
}

} // namespace

std::vector<TableAssembly> assemble(const DetectionDocument& doc, const PipelineOptions& options)
{
    std::vector<TableAssembly> out;
    out.reserve(doc.tables.size());
    for (std::size_t t = 0; t < doc.tables.size(); ++t)
    {
        const DetectedTable& table = doc.tables[t];
        TableAssembly a;
        a.index = t;
        a.n_cells = table.cells.size();
        a.n_texts = table.texts.size();
        for (const auto& c : table.cells)
            if (c.source == CellSource::bordered)
                ++a.n_bordered_cells;
        try
        {
            TableGrid grid = infer_grid(table.cells, table.box, options.grid);
            a.result = assign_text(std::move(grid), table.texts, options.gate);
        }
        catch (const Error& e)
        {
            if (options.strict)
                throw Error("table " + std::to_string(t) + ": " + e.what());
            a.error = e.what();
        }
        out.push_back(std::move(a));
    }
    return out;
}

EvalReport evaluate(const DetectionDocument& pred, const TruthDocument& truth,
                    const PipelineOptions& options)
{
    EvalReport report;
    report.mode = options.wordacc;

    const std::vector<TableAssembly> assembled = assemble(pred, options);
    for (const auto& a : assembled)
        if (!a.ok())
            report.warnings.push_back("prediction table " + std::to_string(a.index) +
                                      ": assembly failed: " + a.error);

    std::vector<BBoxd> pred_boxes, truth_boxes;
    for (const auto& t : pred.tables)
        pred_boxes.push_back(t.box);
    for (const auto& t : truth.tables)
        truth_boxes.push_back(t.box);
    const DetectionIou det = detection_iou(pred_boxes, truth_boxes);
    report.per_table_iou = det.per_table;
    report.mean_table_iou = det.mean;

    const bool have_probs = !pred.tables.empty() &&
                            std::all_of(pred.tables.begin(), pred.tables.end(),
                                        [](const DetectedTable& t) { return t.class_probs.has_value(); });
    if (have_probs && !truth.tables.empty())
    {
        if (pred.tables.size() < truth.tables.size())
        {
            report.warnings.push_back("set matching skipped: fewer predicted tables than truth tables");
        }
        else
        {
            std::vector<Prediction> preds;
            std::vector<Truth> truths;
            for (const auto& t : pred.tables)
                preds.emplace_back(*t.class_probs, normalize(t.box, pred.image_w, pred.image_h));
            for (const auto& t : truth.tables)
                truths.push_back({t.table_class == CellSource::bordered ? 0 : 1,
                                  normalize(t.box, truth.image_w, truth.image_h)});
            try
            {
                report.hungarian = match_sets(preds, truths, options.match);
            }
            catch (const DegeneratePair& e)
            {
                report.warnings.push_back(std::string("set matching skipped: ") + e.what());
            }
        }
    }

    for (std::size_t i = 0; i < truth.tables.size(); ++i)
    {
        const TruthTable& tt = truth.tables[i];
        const TableGrid truth_grid = to_grid(tt);

        TableEval te;
        te.truth_index = i;
        te.truth_rows = tt.n_rows;
        te.truth_cols = tt.n_cols;
        te.iou = det.per_table[i];

        // empty stand-in when nothing usable overlaps this truth table
        TableGrid pred_grid(tt.n_rows, tt.n_cols, tt.box);
        const Eigen::Index j = det.truth_to_pred[i];
        if (j >= 0 && te.iou > 0.0)
        {
            te.prediction_index = static_cast<long>(j);
            const TableAssembly& a = assembled[static_cast<std::size_t>(j)];
            if (a.ok())
                pred_grid = a.result->grid;
        }
        te.pred_rows = pred_grid.n_rows();
        te.pred_cols = pred_grid.n_cols();

        te.bag = word_accuracy(pred_grid, truth_grid, WordAccuracyMode::bag);
        if (pred_grid.n_rows() == tt.n_rows && pred_grid.n_cols() == tt.n_cols)
        {
            te.positional = word_accuracy(pred_grid, truth_grid, WordAccuracyMode::positional);
        }
        else
        {
            const std::string msg = "truth table " + std::to_string(i) + ": shape mismatch (pred " +
                                    shape(te.pred_rows, te.pred_cols) + " vs truth " +
                                    shape(tt.n_rows, tt.n_cols) + ")";
            if (options.strict)
                throw ShapeMismatch(msg);
            report.warnings.push_back(msg + ", positional accuracy falls back to bag mode");
            te.positional_mode = WordAccuracyMode::bag;
            te.positional = te.bag;
        }
        te.rows = row_accuracy(pred_grid, truth_grid);

        report.positional += te.positional;
        report.bag += te.bag;
        report.rows += te.rows;
        report.tables.push_back(te);
    }
    return report;
}

std::string table_csv_filename(std::size_t index) { return "table_" + std::to_string(index) + ".csv"; }

std::string assembly_report(const std::string& input_name, const std::vector<TableAssembly>& tables,
                            const PipelineOptions& options)
{
    ordered_json root;
    root["version"] = document_version;
    root["input"] = input_name;
    root["n_tables"] = tables.size();
    std::size_t failed = 0;
    ordered_json list = ordered_json::array();
    for (const auto& a : tables)
    {
        ordered_json tj;
        tj["index"] = a.index;
        tj["status"] = a.ok() ? "ok" : "error";
        tj["n_cells"] = a.n_cells;
        tj["n_bordered_cells"] = a.n_bordered_cells;
        tj["n_borderless_cells"] = a.n_cells - a.n_bordered_cells;
        tj["n_texts"] = a.n_texts;
        if (a.ok())
        {
            const AssignmentResult& r = *a.result;
            tj["n_rows"] = r.grid.n_rows();
            tj["n_cols"] = r.grid.n_cols();
            tj["n_assigned_texts"] = r.assignments.size();
            tj["n_unassigned_texts"] = r.unassigned.size();
            ordered_json unassigned = ordered_json::array();
            for (std::size_t k = 0; k < r.unassigned.size(); ++k)
                unassigned.push_back({{"index", r.unassigned_indices[k]}, {"text", r.unassigned[k].text}});
            tj["unassigned"] = unassigned;
            tj["csv"] = options.format == OutputFormat::csv ? ordered_json(table_csv_filename(a.index))
                                                            : ordered_json(nullptr);
            tj["warnings"] = r.grid.warnings();
        }
        else
        {
            ++failed;
            tj["error"] = a.error;
        }
        list.push_back(std::move(tj));
    }
    root["n_failed"] = failed;
    root["tables"] = list;
    return root.dump(1) + "\n";
}

std::string eval_report_json(const EvalReport& report)
{
    ordered_json root;
    root["version"] = document_version;
    const ordered_json fields = eval_fields(report);
    for (const auto& [key, value] : fields.items())
        root[key] = value;
    return root.dump(1) + "\n";
}

std::string match_report_json(const MatchReport& report)
{
    ordered_json root;
    root["version"] = document_version;
    const ordered_json fields = match_json(report);
    for (const auto& [key, value] : fields.items())
        root[key] = value;
    return root.dump(1) + "\n";
}

int cmd_assemble(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                 const PipelineOptions& options, std::ostream& err)
{
    try
    {
        const auto start = Clock::now();
        const DetectionDocument doc = load_detection(input, options.strict);
        const auto tables = assemble(doc, options);
        std::string report = assembly_report(input.filename().string(), tables, options);
        if (options.timings)
        {
            ordered_json j = ordered_json::parse(report);
            j["timings_ms"] = {{"total", elapsed_ms(start)}};
            report = j.dump(1) + "\n";
        }

        ensure_dir(out_dir);
        bool failed = false;
        for (const auto& a : tables)
        {
            if (!a.ok())
            {
                err << "error: " << input.string() << ": table " << a.index << ": " << a.error << '\n';
                failed = true;
                continue;
            }
            for (const auto& w : a.result->grid.warnings())
                err << "warning: table " << a.index << ": " << w << '\n';
            if (options.format == OutputFormat::csv)
                write_file(out_dir / table_csv_filename(a.index), grid_to_csv(a.result->grid));
        }
        write_file(out_dir / assembly_report_filename, report);
        return failed ? 1 : 0;
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_evaluate(const std::filesystem::path& pred, const std::filesystem::path& truth,
                 const std::optional<std::filesystem::path>& out_dir,
                 const PipelineOptions& options, std::ostream& out, std::ostream& err)
{
    try
    {
        const auto start = Clock::now();
        const DetectionDocument pdoc = load_detection(pred, options.strict);
        const TruthDocument tdoc = load_truth(truth, options.strict);
        const double parse_ms = elapsed_ms(start);
        const auto eval_start = Clock::now();
        const EvalReport report = evaluate(pdoc, tdoc, options);
        for (const auto& w : report.warnings)
            err << "warning: " << w << '\n';

        std::string text = eval_report_json(report);
        if (options.timings)
        {
            ordered_json j = ordered_json::parse(text);
            j["timings_ms"] = {{"parse", parse_ms}, {"evaluate", elapsed_ms(eval_start)}};
            text = j.dump(1) + "\n";
        }
        emit(text, out_dir, eval_report_filename, out);
        return 0;
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_evaluate_manifest(const std::filesystem::path& manifest_path,
                          const std::optional<std::filesystem::path>& out_dir,
                          const PipelineOptions& options, std::ostream& out, std::ostream& err)
{
    try
    {
        const auto start = Clock::now();
        const Manifest manifest = parse_manifest(read_file(manifest_path), manifest_path.string());
        const std::filesystem::path base = manifest_path.parent_path();

        WordCounts positional, bag, rows;
        double iou_sum = 0.0;
        std::size_t n_truth_tables = 0;
        double cost_sum = 0.0, loss_sum = 0.0;
        std::size_t n_matched = 0;
        ordered_json instances = ordered_json::array();
        ordered_json warnings = ordered_json::array();

        for (const auto& entry : manifest.entries)
        {
            const DetectionDocument pdoc = load_detection(base / entry.detection_file, options.strict);
            const TruthDocument tdoc = load_truth(base / entry.truth_file, options.strict);
            const EvalReport report = evaluate(pdoc, tdoc, options);

            positional += report.positional;
            bag += report.bag;
            rows += report.rows;
            for (double v : report.per_table_iou)
                iou_sum += v;
            n_truth_tables += report.per_table_iou.size();
            if (report.hungarian)
            {
                cost_sum += report.hungarian->total_match_cost;
                loss_sum += report.hungarian->hungarian_loss;
                ++n_matched;
            }
            for (const auto& w : report.warnings)
            {
                err << "warning: " << entry.id << ": " << w << '\n';
                warnings.push_back(entry.id + ": " + w);
            }

            ordered_json ij;
            ij["id"] = entry.id;
            ij["seed"] = entry.config.seed;
            ij["generator_tokens"] = {{"total", entry.tokens.total},
                                      {"retained", entry.tokens.retained},
                                      {"intact", entry.tokens.intact}};
            const ordered_json fields = eval_fields(report);
            for (const auto& [key, value] : fields.items())
                ij[key] = value;
            instances.push_back(std::move(ij));
        }

        const WordCounts& selected = options.wordacc == WordAccuracyMode::positional ? positional : bag;
        ordered_json root;
        root["version"] = document_version;
        root["n_instances"] = manifest.entries.size();
        root["mean_table_iou"] = n_truth_tables == 0 ? 1.0 : iou_sum / static_cast<double>(n_truth_tables);
        root["word_accuracy"] = selected.percent();
        root["word_accuracy_rounded"] = selected.rounded();
        root["word_accuracy_mode"] = to_string(options.wordacc);
        root["word_accuracy_positional"] = positional.percent();
        root["word_accuracy_bag"] = bag.percent();
        root["row_accuracy"] = rows.percent();
        root["counts"] = counts_json(selected);
        root["counts_positional"] = counts_json(positional);
        root["counts_bag"] = counts_json(bag);
        root["rows"] = ordered_json{{"matched", rows.correct}, {"total", rows.total}};
        root["hungarian"] = {{"instances", n_matched}, {"total_cost", cost_sum}, {"loss", loss_sum}};
        root["warnings"] = warnings;
        if (options.timings)
            root["timings_ms"] = {{"total", elapsed_ms(start)}};
        root["instances"] = instances;
        emit(root.dump(1) + "\n", out_dir, eval_report_filename, out);
        return 0;
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_synth(const std::optional<std::filesystem::path>& config,
              const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err)
{
    try
    {
        std::vector<SynthConfig> configs;
        if (config)
            configs = parse_synth_configs(read_file(*config), config->string());
        else
            configs.emplace_back();
        const Manifest m = corpus(configs, out_dir);
        out << (out_dir / manifest_filename).string() << " (" << m.entries.size() << " instances)\n";
        return 0;
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

namespace
{

json parse_box_file(std::string_view text, const std::string& source, const char* list_key)
{
    json root;
    try
    {
        root = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e)
    {
        throw ParseError(source, 0, "", e.what());
    }
    if (!root.is_object() || !root.contains("version") || root["version"] != document_version)
        throw ParseError(source, 0, "version", "expected version 1");
    if (!root.contains(list_key) || !root[list_key].is_array())
        throw ParseError(source, 0, list_key, "expected an array");
    return root[list_key];
}

NormBoxd norm_box(const json& j, const std::string& source, const std::string& path)
{
    if (!j.is_array() || j.size() != 4 || !std::all_of(j.begin(), j.end(), [](const json& v) { return v.is_number(); }))
        throw ParseError(source, 0, path, "expected [cx, cy, w, h]");
    try
    {
        return NormBoxd(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
    }
    catch (const InvalidBox& e)
    {
        throw ParseError(source, 0, path, e.what());
    }
}

} // namespace

std::vector<Prediction> parse_predictions(std::string_view text, const std::string& source)
{
    const json list = parse_box_file(text, source, "predictions");
    std::vector<Prediction> preds;
    for (std::size_t i = 0; i < list.size(); ++i)
    {
        const std::string path = "predictions[" + std::to_string(i) + "]";
        const json& j = list[i];
        if (!j.is_object() || !j.contains("class_probs") || !j["class_probs"].is_array())
            throw ParseError(source, 0, path + ".class_probs", "expected an array");
        Eigen::VectorXd probs(static_cast<Eigen::Index>(j["class_probs"].size()));
        for (std::size_t k = 0; k < j["class_probs"].size(); ++k)
        {
            const json& v = j["class_probs"][k];
            if (!v.is_number())
                throw ParseError(source, 0, path + ".class_probs", "expected numbers");
            probs[static_cast<Eigen::Index>(k)] = v.get<double>();
        }
        try
        {
            preds.emplace_back(probs, norm_box(j.value("box", json()), source, path + ".box"));
        }
        catch (const InvalidArgument& e)
        {
            throw ParseError(source, 0, path, e.what());
        }
    }
    return preds;
}

std::vector<Truth> parse_truths(std::string_view text, const std::string& source)
{
    const json list = parse_box_file(text, source, "truths");
    std::vector<Truth> truths;
    for (std::size_t i = 0; i < list.size(); ++i)
    {
        const std::string path = "truths[" + std::to_string(i) + "]";
        const json& j = list[i];
        if (!j.is_object() || !j.contains("class_id") || !j["class_id"].is_number_unsigned())
            throw ParseError(source, 0, path + ".class_id", "expected a non-negative integer");
        truths.push_back({j["class_id"].get<Eigen::Index>(), norm_box(j.value("box", json()), source, path + ".box")});
    }
    return truths;
}

int cmd_match(const std::filesystem::path& pred, const std::filesystem::path& truth,
              const MatchOptions& options, const std::optional<std::filesystem::path>& out_dir,
              std::ostream& out, std::ostream& err)
{
    try
    {
        const auto preds = parse_predictions(read_file(pred), pred.string());
        const auto truths = parse_truths(read_file(truth), truth.string());
        emit(match_report_json(match_sets(preds, truths, options)), out_dir, match_report_filename, out);
        return 0;
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace tablefuse
