// Copyright 2026 The rsucoal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RSUCOAL_CSV_HPP
#define RSUCOAL_CSV_HPP

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace rsucoal {

// Quotes a field when it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Strict reader: RFC-style quoting, every row must match the header's
// column count; throws std::runtime_error otherwise.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

}  // namespace rsucoal

#endif  // RSUCOAL_CSV_HPP
