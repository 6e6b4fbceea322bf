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

#include <string>
#include <string_view>
#include <vector>

#include "tablefuse/grid.hpp"

namespace tablefuse
{

using CsvRecord = std::vector<std::string>;

/// Quotes the field when it holds a comma, quote, CR or LF; embedded quotes
/// are doubled.
std::string csv_escape(std::string_view field);

/// One record per line, LF terminated.
std::string write_csv(const std::vector<CsvRecord>& records);

/// Inverse of write_csv. Throws ParseError on an unterminated quoted field or
/// a quote inside an unquoted field.
std::vector<CsvRecord> parse_csv(std::string_view text);

/// Row-major CSV of the grid's cell texts; empty cells become empty fields.
std::string grid_to_csv(const TableGrid& grid);

} // namespace tablefuse
