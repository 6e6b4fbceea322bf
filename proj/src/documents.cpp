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

#include "tablefuse/documents.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace tablefuse
{

namespace
{

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Walks a parsed document and raises ParseError with the dotted field path.
class Reader
{
public:
    explicit Reader(const ParseOptions& options)
        : m_options(options)
    {
    }

    [[noreturn]] void fail(const std::string& field, const std::string& what) const
    {
        throw ParseError(m_options.source, 0, field, what);
    }

    void check_keys(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) const
    {
        if (!obj.is_object())
            fail(path, "expected an object");
        if (!m_options.strict)
            return;
        for (const auto& item : obj.items())
        {
            const bool known = std::any_of(allowed.begin(), allowed.end(),
                                           [&](const char* k) { return item.key() == k; });
            if (!known)
                fail(join(path, item.key()), "unknown field");
        }
    }

    const json& require(const json& obj, const std::string& path, const char* key) const
    {
        const auto it = obj.find(key);
        if (it == obj.end())
            fail(join(path, key), "missing required field");
        return *it;
    }

    double number(const json& value, const std::string& path) const
    {
        if (!value.is_number())
            fail(path, "expected a number");
        return value.get<double>();
    }

    double number_or(const json& obj, const std::string& path, const char* key,
                     double fallback) const
    {
        const auto it = obj.find(key);
        return it == obj.end() ? fallback : number(*it, join(path, key));
    }

    double score_or(const json& obj, const std::string& path, const char* key) const
    {
        const double s = number_or(obj, path, key, 1.0);
        if (!(s >= 0.0 && s <= 1.0))
            fail(join(path, key), "score outside [0,1]");
        return s;
    }

    std::size_t count(const json& value, const std::string& path) const
    {
        if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0))
            fail(path, "expected a non-negative integer");
        return value.get<std::size_t>();
    }

    std::string string(const json& value, const std::string& path) const
    {
        if (!value.is_string())
            fail(path, "expected a string");
        return value.get<std::string>();
    }

    const json& array(const json& value, const std::string& path) const
    {
        if (!value.is_array())
            fail(path, "expected an array");
        return value;
    }

    BBoxd box(const json& value, const std::string& path) const
    {
        if (!value.is_array() || value.size() != 4)
            fail(path, "expected [x1, y1, x2, y2]");
        double v[4];
        for (std::size_t i = 0; i < 4; ++i)
            v[i] = number(value[i], path + "[" + std::to_string(i) + "]");
        try
        {
            return BBoxd(v[0], v[1], v[2], v[3]);
        }
        catch (const InvalidBox& e)
        {
            fail(path, e.what());
        }
    }

    CellSource source(const json& obj, const std::string& path, const char* key) const
    {
        const auto it = obj.find(key);
        if (it == obj.end())
            return CellSource::bordered;
        const std::string s = string(*it, join(path, key));
        if (s == "bordered")
            return CellSource::bordered;
        if (s == "borderless")
            return CellSource::borderless;
        fail(join(path, key), "expected \"bordered\" or \"borderless\"");
    }

    void version(const json& root) const
    {
        const json& v = require(root, "", "version");
        if (!v.is_number_integer() || v.get<long long>() != document_version)
            fail("version", "unsupported document version (expected 1)");
    }

    static std::string join(const std::string& path, const std::string& key)
    {
        return path.empty() ? key : path + "." + key;
    }

    static std::string index(const std::string& path, std::size_t i)
    {
        return path + "[" + std::to_string(i) + "]";
    }

private:
    const ParseOptions& m_options;
};

json parse_root(std::string_view text, const ParseOptions& options)
{
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF)
        throw ParseError(options.source, 1, "", "byte-order mark not allowed");
    try
    {
        return json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e)
    {
        const std::size_t end = std::min<std::size_t>(e.byte, text.size());
        const std::size_t line = 1 + static_cast<std::size_t>(
                                         std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
        throw ParseError(options.source, line, "", e.what());
    }
}

BBoxd image_bounds(double w, double h) { return BBoxd(0.0, 0.0, w, h); }

void read_image_dims(const Reader& rd, const json& root, double& w, double& h)
{
    w = rd.number(rd.require(root, "", "image_w"), "image_w");
    h = rd.number(rd.require(root, "", "image_h"), "image_h");
    if (!(w > 0.0))
        rd.fail("image_w", "must be positive");
    if (!(h > 0.0))
        rd.fail("image_h", "must be positive");
}

ordered_json box_json(const BBoxd& b) { return ordered_json::array({b.x1(), b.y1(), b.x2(), b.y2()}); }

bool parse_slot_key(const std::string& key, std::size_t& row, std::size_t& col)
{
    const auto comma = key.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == key.size())
        return false;
    const char* begin = key.data();
    const char* end = key.data() + key.size();
    auto r = std::from_chars(begin, begin + comma, row);
    if (r.ec != std::errc() || r.ptr != begin + comma)
        return false;
    auto c = std::from_chars(begin + comma + 1, end, col);
    return c.ec == std::errc() && c.ptr == end;
}

} // namespace

TableGrid to_grid(const TruthTable& table)
{
    TableGrid grid(table.n_rows, table.n_cols, table.box);
    for (std::size_t r = 0; r < table.n_rows; ++r)
    {
        for (std::size_t c = 0; c < table.n_cols; ++c)
        {
            GridCell& cell = grid.cell(r, c);
            cell.occupied = true;
            const std::string& text = table.text(r, c);
            if (!text.empty())
                cell.contents.push_back(text);
        }
    }
    return grid;
}

DetectionDocument parse_detection(std::string_view text, const ParseOptions& options)
{
    const json root = parse_root(text, options);
    const Reader rd(options);
    rd.check_keys(root, "", {"version", "image_w", "image_h", "tables"});
    rd.version(root);

    DetectionDocument doc;
    read_image_dims(rd, root, doc.image_w, doc.image_h);
    const BBoxd bounds = image_bounds(doc.image_w, doc.image_h);

    const json& tables = rd.array(rd.require(root, "", "tables"), "tables");
    for (std::size_t t = 0; t < tables.size(); ++t)
    {
        const std::string tpath = Reader::index("tables", t);
        const json& tj = tables[t];
        rd.check_keys(tj, tpath, {"box", "class", "score", "class_probs", "cells", "texts"});

        DetectedTable table;
        table.box = clamp_to(rd.box(rd.require(tj, tpath, "box"), Reader::join(tpath, "box")), bounds);
        table.table_class = rd.source(tj, tpath, "class");
        table.score = rd.score_or(tj, tpath, "score");
        if (const auto it = tj.find("class_probs"); it != tj.end())
        {
            const std::string ppath = Reader::join(tpath, "class_probs");
            const json& arr = rd.array(*it, ppath);
            Eigen::VectorXd probs(static_cast<Eigen::Index>(arr.size()));
            for (std::size_t k = 0; k < arr.size(); ++k)
                probs[static_cast<Eigen::Index>(k)] = rd.number(arr[k], Reader::index(ppath, k));
            if (probs.size() != 3)
                rd.fail(ppath, "expected [p_bordered, p_borderless, p_no_object]");
            if ((probs.array() < 0.0).any() || std::abs(probs.sum() - 1.0) > 1e-6)
                rd.fail(ppath, "probabilities must be non-negative and sum to 1");
            table.class_probs = probs;
        }

        const std::string cpath = Reader::join(tpath, "cells");
        const json& cells = rd.array(rd.require(tj, tpath, "cells"), cpath);
        for (std::size_t k = 0; k < cells.size(); ++k)
        {
            const std::string path = Reader::index(cpath, k);
            rd.check_keys(cells[k], path, {"box", "score", "source"});
            table.cells.emplace_back(
                clamp_to(rd.box(rd.require(cells[k], path, "box"), Reader::join(path, "box")), bounds),
                rd.score_or(cells[k], path, "score"), rd.source(cells[k], path, "source"));
        }

        const std::string xpath = Reader::join(tpath, "texts");
        const json& texts = rd.array(rd.require(tj, tpath, "texts"), xpath);
        for (std::size_t k = 0; k < texts.size(); ++k)
        {
            const std::string path = Reader::index(xpath, k);
            rd.check_keys(texts[k], path, {"box", "text", "score"});
            const BBoxd box =
                clamp_to(rd.box(rd.require(texts[k], path, "box"), Reader::join(path, "box")), bounds);
            std::string content = rd.string(rd.require(texts[k], path, "text"), Reader::join(path, "text"));
            const double score = rd.score_or(texts[k], path, "score");
            try
            {
                table.texts.emplace_back(box, std::move(content), score);
            }
            catch (const InvalidArgument& e)
            {
                rd.fail(Reader::join(path, "text"), e.what());
            }
        }
        doc.tables.push_back(std::move(table));
    }
    return doc;
}

TruthDocument parse_truth(std::string_view text, const ParseOptions& options)
{
    const json root = parse_root(text, options);
    const Reader rd(options);
    rd.check_keys(root, "", {"version", "image_w", "image_h", "tables"});
    rd.version(root);

    TruthDocument doc;
    read_image_dims(rd, root, doc.image_w, doc.image_h);
    const BBoxd bounds = image_bounds(doc.image_w, doc.image_h);

    const json& tables = rd.array(rd.require(root, "", "tables"), "tables");
    for (std::size_t t = 0; t < tables.size(); ++t)
    {
        const std::string tpath = Reader::index("tables", t);
        const json& tj = tables[t];
        rd.check_keys(tj, tpath, {"box", "class", "grid"});

        TruthTable table;
        table.box = clamp_to(rd.box(rd.require(tj, tpath, "box"), Reader::join(tpath, "box")), bounds);
        table.table_class = rd.source(tj, tpath, "class");

        const std::string gpath = Reader::join(tpath, "grid");
        const json& gj = rd.require(tj, tpath, "grid");
        rd.check_keys(gj, gpath, {"n_rows", "n_cols", "cell_texts"});
        table.n_rows = rd.count(rd.require(gj, gpath, "n_rows"), Reader::join(gpath, "n_rows"));
        table.n_cols = rd.count(rd.require(gj, gpath, "n_cols"), Reader::join(gpath, "n_cols"));
        if (table.n_rows == 0 || table.n_cols == 0)
            rd.fail(gpath, "grid needs at least one row and one column");

        const std::string mpath = Reader::join(gpath, "cell_texts");
        const json& texts = rd.require(gj, gpath, "cell_texts");
        if (!texts.is_object())
            rd.fail(mpath, "expected an object keyed \"r,c\"");
        table.cell_texts.assign(table.n_rows * table.n_cols, std::string());
        std::vector<bool> seen(table.cell_texts.size(), false);
        for (const auto& item : texts.items())
        {
            const std::string path = Reader::join(mpath, item.key());
            std::size_t r = 0, c = 0;
            if (!parse_slot_key(item.key(), r, c))
                rd.fail(path, "key must have the form \"r,c\"");
            if (r >= table.n_rows || c >= table.n_cols)
                rd.fail(path, "slot outside the lattice");
            const std::size_t k = r * table.n_cols + c;
            if (seen[k])
                rd.fail(path, "duplicate slot");
            seen[k] = true;
            table.cell_texts[k] = rd.string(item.value(), path);
        }
        for (std::size_t k = 0; k < seen.size(); ++k)
            if (!seen[k])
                rd.fail(Reader::join(mpath, std::to_string(k / table.n_cols) + "," +
                                                std::to_string(k % table.n_cols)),
                        "lattice incomplete: missing slot");
        doc.tables.push_back(std::move(table));
    }
    return doc;
}

std::string dump_detection(const DetectionDocument& doc)
{
    ordered_json root;
    root["version"] = document_version;
    root["image_w"] = doc.image_w;
    root["image_h"] = doc.image_h;
    ordered_json tables = ordered_json::array();
    for (const auto& t : doc.tables)
    {
        ordered_json tj;
        tj["box"] = box_json(t.box);
        tj["class"] = to_string(t.table_class);
        tj["score"] = t.score;
        if (t.class_probs)
        {
            ordered_json probs = ordered_json::array();
            for (Eigen::Index k = 0; k < t.class_probs->size(); ++k)
                probs.push_back((*t.class_probs)[k]);
            tj["class_probs"] = probs;
        }
        ordered_json cells = ordered_json::array();
        for (const auto& c : t.cells)
            cells.push_back({{"box", box_json(c.box)}, {"score", c.score}, {"source", to_string(c.source)}});
        tj["cells"] = cells;
        ordered_json texts = ordered_json::array();
        for (const auto& x : t.texts)
            texts.push_back({{"box", box_json(x.box)}, {"text", x.text}, {"score", x.score}});
        tj["texts"] = texts;
        tables.push_back(std::move(tj));
    }
    root["tables"] = tables;
    return root.dump(1) + "\n";
}

std::string dump_truth(const TruthDocument& doc)
{
    ordered_json root;
    root["version"] = document_version;
    root["image_w"] = doc.image_w;
    root["image_h"] = doc.image_h;
    ordered_json tables = ordered_json::array();
    for (const auto& t : doc.tables)
    {
        ordered_json texts = ordered_json::object();
        for (std::size_t r = 0; r < t.n_rows; ++r)
            for (std::size_t c = 0; c < t.n_cols; ++c)
                texts[std::to_string(r) + "," + std::to_string(c)] = t.text(r, c);
        ordered_json grid;
        grid["n_rows"] = t.n_rows;
        grid["n_cols"] = t.n_cols;
        grid["cell_texts"] = texts;
        ordered_json tj;
        tj["box"] = box_json(t.box);
        tj["class"] = to_string(t.table_class);
        tj["grid"] = grid;
        tables.push_back(std::move(tj));
    }
    root["tables"] = tables;
    return root.dump(1) + "\n";
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw IoError("error reading '" + path.string() + "'");
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
        throw IoError("error writing '" + path.string() + "'");
}

DetectionDocument load_detection(const std::filesystem::path& path, bool strict)
{
    return parse_detection(read_file(path), ParseOptions{strict, path.string()});
}

TruthDocument load_truth(const std::filesystem::path& path, bool strict)
{
    return parse_truth(read_file(path), ParseOptions{strict, path.string()});
}

} // namespace tablefuse
