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

#include "tablefuse/csv.hpp"

namespace tablefuse
{

std::string csv_escape(std::string_view field)
{
    if (field.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out += '"';
    for (char ch : field)
    {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string write_csv(const std::vector<CsvRecord>& records)
{
    std::string out;
    for (const auto& record : records)
    {
        for (std::size_t i = 0; i < record.size(); ++i)
        {
            if (i > 0)
                out += ',';
            out += csv_escape(record[i]);
        }
        out += '\n';
    }
    return out;
}

std::vector<CsvRecord> parse_csv(std::string_view text)
{
    std::vector<CsvRecord> records;
    CsvRecord record;
    std::string field;
    std::size_t line = 1;
    std::size_t i = 0;
    bool pending = false;

    while (i < text.size())
    {
        pending = text[i] != '\n';
        if (text[i] == '"')
        {
            if (!field.empty())
                throw ParseError("csv", line, "", "quote inside unquoted field");
            const std::size_t opened = line;
            ++i;
            for (;;)
            {
                if (i >= text.size())
                    throw ParseError("csv", opened, "", "unterminated quoted field");
                if (text[i] == '"')
                {
                    if (i + 1 < text.size() && text[i + 1] == '"')
                    {
                        field += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                if (text[i] == '\n')
                    ++line;
                field += text[i++];
            }
            if (i < text.size() && text[i] != ',' && text[i] != '\n')
                throw ParseError("csv", line, "", "garbage after closing quote");
            continue;
        }
        if (text[i] == ',')
        {
            record.push_back(std::move(field));
            field.clear();
            ++i;
            continue;
        }
        if (text[i] == '\n')
        {
            record.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(record));
            record.clear();
            ++line;
            ++i;
            continue;
        }
        field += text[i++];
    }
    // final record without trailing newline
    if (pending)
    {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    return records;
}

std::string grid_to_csv(const TableGrid& grid)
{
    std::vector<CsvRecord> records(grid.n_rows());
    for (std::size_t r = 0; r < grid.n_rows(); ++r)
        for (std::size_t c = 0; c < grid.n_cols(); ++c)
            records[r].push_back(grid.text(r, c));
    return write_csv(records);
}

} // namespace tablefuse
