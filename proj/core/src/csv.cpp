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

#include "lanekit/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lanekit/errors.hpp"

namespace lanekit {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvReader::CsvReader(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open file: " + path);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (first) {
      header_ = split_line(line);
      first = false;
    } else {
      lines_.push_back(line);
    }
  }
}

int CsvReader::column(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t CsvReader::for_each_row(
    const std::function<void(std::size_t, const std::vector<std::string>&)>& fn) const {
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    fn(i, split_line(lines_[i]));
  }
  return lines_.size();
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : impl_(new Impl), width_(header.size()) {
  impl_->out.open(path);
  if (!impl_->out) throw SchemaError("cannot open file for writing: " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    impl_->out << header[i];
    if (i + 1 < header.size()) impl_->out << ',';
  }
  impl_->out << '\n';
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw ShapeError("csv row width does not match header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    impl_->out << fields[i];
    if (i + 1 < fields.size()) impl_->out << ',';
  }
  impl_->out << '\n';
}

std::string CsvWriter::format(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string CsvWriter::format(long v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, std::size_t row) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  while (begin != end && *begin == ' ') ++begin;
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError("non-numeric cell '" + s + "' at row " + std::to_string(row));
  }
  return v;
}

long parse_long(const std::string& s, std::size_t row) {
  // Trajectory exports sometimes carry integer columns as "12.0".
  const double v = parse_double(s, row);
  const long l = static_cast<long>(v);
  if (static_cast<double>(l) != v) {
    throw ParseError("non-integer cell '" + s + "' at row " + std::to_string(row));
  }
  return l;
}

}  // namespace lanekit
