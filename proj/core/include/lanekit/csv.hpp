// Copyright 2026 The Lanekit Authors
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

#ifndef LANEKIT_CSV_HPP
#define LANEKIT_CSV_HPP

#include <functional>
#include <string>
#include <vector>

namespace lanekit {

/// Plain comma-separated reader. No quoting support; none of the formats
/// produced or consumed here quote fields.
class CsvReader {
 public:
  explicit CsvReader(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }

  /// Column index for `name`, or -1.
  int column(const std::string& name) const;

  /// Calls `fn(row_index, fields)` for every data row (row_index counts data
  /// rows from 0; the header is row -1). Returns the number of rows visited.
  std::size_t for_each_row(
      const std::function<void(std::size_t, const std::vector<std::string>&)>& fn) const;

  bool empty() const { return lines_.empty(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::string> lines_;
};

/// Writer with round-trip double formatting (shortest representation that
/// parses back to the same bits), so reruns produce byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& fields);

  static std::string format(double v);
  static std::string format(long v);

 private:
  struct Impl;
  Impl* impl_;
  std::size_t width_;
};

double parse_double(const std::string& s, std::size_t row);  // throws ParseError
long parse_long(const std::string& s, std::size_t row);      // throws ParseError

}  // namespace lanekit

#endif  // LANEKIT_CSV_HPP
