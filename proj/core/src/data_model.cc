/*
 * Copyright 2026 The CAPCE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "capce/data_model.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "capce/error.h"

namespace capce {
namespace {

std::string Trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

// Splits one CSV line. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(Trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(Trim(current));
  return fields;
}

// "NA", "" and any token that is not a complete finite real are missing.
std::optional<double> ParseCell(const std::string& cell) {
  if (cell.empty() || cell == "NA") return std::nullopt;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<size_t> line_numbers;
};

Table ReadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIoError, "cannot open '" + path + "'");
  Table table;
  std::string line;
  size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!have_header) {
      // Strip a UTF-8 byte order mark.
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      table.header = SplitCsvLine(line);
      have_header = true;
      continue;
    }
    if (Trim(line).empty()) continue;
    auto fields = SplitCsvLine(line);
    if (fields.size() != table.header.size()) {
      std::ostringstream msg;
      msg << path << ": row " << line_no << " has " << fields.size()
          << " fields, header has " << table.header.size();
      Fail(ErrorCode::kParseError, msg.str());
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) Fail(ErrorCode::kParseError, path + ": missing header row");
  return table;
}

size_t ColumnIndex(const Table& table, const std::string& name,
                   const std::string& path) {
  auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) {
    Fail(ErrorCode::kMissingColumn, "'" + name + "' not found in " + path);
  }
  return static_cast<size_t>(it - table.header.begin());
}

// Returns the numeric matrix of the requested columns over rows where every
// requested cell is present.
Eigen::MatrixXd ExtractComplete(const Table& table,
                                const std::vector<std::string>& columns,
                                const std::string& path) {
  std::vector<size_t> idx;
  for (const auto& c : columns) idx.push_back(ColumnIndex(table, c, path));
  std::vector<std::vector<double>> kept;
  for (const auto& row : table.rows) {
    std::vector<double> values;
    values.reserve(idx.size());
    bool complete = true;
    for (size_t k : idx) {
      auto v = ParseCell(row[k]);
      if (!v) {
        complete = false;
        break;
      }
      values.push_back(*v);
    }
    if (complete) kept.push_back(std::move(values));
  }
  if (kept.empty()) {
    Fail(ErrorCode::kEmptyAfterFiltering,
         path + ": no row has all of the requested columns");
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(kept.size()),
                      static_cast<Eigen::Index>(idx.size()));
  for (size_t i = 0; i < kept.size(); ++i) {
    for (size_t j = 0; j < idx.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          kept[i][j];
    }
  }
  return out;
}

void CheckFinite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    Fail(ErrorCode::kInvalidArgument, std::string(what) + " has non-finite values");
  }
}

std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIoError, "cannot write '" + path + "'");
  return out;
}

std::vector<Eigen::Index> Permutation(Eigen::Index n, std::mt19937_64& rng) {
  std::vector<Eigen::Index> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

Eigen::Index TestCount(Eigen::Index n, double fraction, const char* which) {
  const auto n_test = static_cast<Eigen::Index>(
      std::floor(fraction * static_cast<double>(n) + 1e-9));
  if (n < 2 || n_test < 1 || n - n_test < 1) {
    std::ostringstream msg;
    msg << which << " has " << n << " records; fraction " << fraction
        << " leaves an empty side";
    Fail(ErrorCode::kTooFewRecords, msg.str());
  }
  return n_test;
}

}  // namespace

TwoSampleDataset::TwoSampleDataset(Sample1 sample1, Sample2 sample2,
                                   bool shared_rows)
    : sample1_(std::move(sample1)),
      sample2_(std::move(sample2)),
      shared_rows_(shared_rows) {
  const auto n1 = sample1_.x.size();
  if (n1 < 1 || sample2_.y.size() < 1) {
    Fail(ErrorCode::kTooFewRecords, "both samples need at least one record");
  }
  if (sample1_.z.size() != n1 || sample1_.w.rows() != n1) {
    Fail(ErrorCode::kDimensionMismatch, "sample1 columns differ in length");
  }
  if (sample2_.z.size() != sample2_.y.size()) {
    Fail(ErrorCode::kDimensionMismatch, "sample2 columns differ in length");
  }
  if (shared_rows_ && n1 != sample2_.y.size()) {
    Fail(ErrorCode::kDimensionMismatch, "shared-row samples differ in length");
  }
  CheckFinite(sample1_.x, "x");
  CheckFinite(sample1_.w, "w");
  CheckFinite(sample1_.z, "z (sample1)");
  CheckFinite(sample2_.y, "y");
  CheckFinite(sample2_.z, "z (sample2)");
}

TwoSampleDataset TwoSampleDataset::Joint(Eigen::VectorXd x, Eigen::MatrixXd w,
                                         Eigen::VectorXd z, Eigen::VectorXd y) {
  Sample1 s1{std::move(x), std::move(w), z};
  Sample2 s2{std::move(y), std::move(z)};
  return TwoSampleDataset(std::move(s1), std::move(s2), /*shared_rows=*/true);
}

Eigen::VectorXd TwoSampleDataset::StackedInstruments() const {
  Eigen::VectorXd out(n1() + n2());
  out << sample1_.z, sample2_.z;
  return out;
}

TwoSampleDataset TwoSampleDataset::Subset(
    const std::vector<Eigen::Index>& rows1,
    const std::vector<Eigen::Index>& rows2, bool shared_rows) const {
  const auto m1 = static_cast<Eigen::Index>(rows1.size());
  const auto m2 = static_cast<Eigen::Index>(rows2.size());
  Sample1 s1{Eigen::VectorXd(m1), Eigen::MatrixXd(m1, d()),
             Eigen::VectorXd(m1)};
  for (Eigen::Index i = 0; i < m1; ++i) {
    const auto r = rows1[static_cast<size_t>(i)];
    s1.x(i) = sample1_.x(r);
    s1.w.row(i) = sample1_.w.row(r);
    s1.z(i) = sample1_.z(r);
  }
  Sample2 s2{Eigen::VectorXd(m2), Eigen::VectorXd(m2)};
  for (Eigen::Index i = 0; i < m2; ++i) {
    const auto r = rows2[static_cast<size_t>(i)];
    s2.y(i) = sample2_.y(r);
    s2.z(i) = sample2_.z(r);
  }
  return TwoSampleDataset(std::move(s1), std::move(s2), shared_rows);
}

void ColumnSchema::Validate() const {
  std::vector<std::string> all = {treatment, outcome, instrument};
  all.insert(all.end(), covariates.begin(), covariates.end());
  std::set<std::string> seen;
  for (const auto& name : all) {
    if (name.empty()) {
      Fail(ErrorCode::kInvalidArgument, "column schema has an empty name");
    }
    if (!seen.insert(name).second) {
      Fail(ErrorCode::kInvalidArgument,
           "column '" + name + "' is assigned to more than one role");
    }
  }
}

ColumnSchema DefaultSchema(Eigen::Index d) {
  ColumnSchema schema{"x", "y", "z", {}};
  if (d == 1) {
    schema.covariates.push_back("w");
  } else {
    for (Eigen::Index k = 1; k <= d; ++k) {
      schema.covariates.push_back("w" + std::to_string(k));
    }
  }
  return schema;
}

TwoSampleDataset LoadJointCsv(const std::string& path,
                              const ColumnSchema& schema) {
  schema.Validate();
  const Table table = ReadCsv(path);
  std::vector<std::string> columns = {schema.treatment, schema.instrument,
                                      schema.outcome};
  columns.insert(columns.end(), schema.covariates.begin(),
                 schema.covariates.end());
  const Eigen::MatrixXd m = ExtractComplete(table, columns, path);
  const auto d = static_cast<Eigen::Index>(schema.covariates.size());
  return TwoSampleDataset::Joint(m.col(0), m.rightCols(d), m.col(1), m.col(2));
}

TwoSampleDataset LoadTwoSampleCsv(const std::string& path1,
                                  const std::string& path2,
                                  const ColumnSchema& schema) {
  schema.Validate();
  const Table t1 = ReadCsv(path1);
  std::vector<std::string> cols1 = {schema.treatment, schema.instrument};
  cols1.insert(cols1.end(), schema.covariates.begin(), schema.covariates.end());
  const Eigen::MatrixXd m1 = ExtractComplete(t1, cols1, path1);
  const Table t2 = ReadCsv(path2);
  const Eigen::MatrixXd m2 =
      ExtractComplete(t2, {schema.outcome, schema.instrument}, path2);
  const auto d = static_cast<Eigen::Index>(schema.covariates.size());
  Sample1 s1{m1.col(0), m1.rightCols(d), m1.col(1)};
  Sample2 s2{m2.col(0), m2.col(1)};
  return TwoSampleDataset(std::move(s1), std::move(s2), false);
}

void WriteJointCsv(const TwoSampleDataset& data, const ColumnSchema& schema,
                   const std::string& path) {
  if (!data.shared_rows()) {
    Fail(ErrorCode::kInvalidArgument,
         "joint CSV output needs a dataset whose samples share rows");
  }
  if (static_cast<Eigen::Index>(schema.covariates.size()) != data.d()) {
    Fail(ErrorCode::kDimensionMismatch, "schema covariate count != d");
  }
  auto out = OpenForWrite(path);
  out << schema.treatment;
  for (const auto& c : schema.covariates) out << ',' << c;
  out << ',' << schema.instrument << ',' << schema.outcome << '\n';
  const auto& s1 = data.sample1();
  const auto& s2 = data.sample2();
  for (Eigen::Index i = 0; i < data.n1(); ++i) {
    out << FormatDouble(s1.x(i));
    for (Eigen::Index k = 0; k < data.d(); ++k) {
      out << ',' << FormatDouble(s1.w(i, k));
    }
    out << ',' << FormatDouble(s1.z(i)) << ',' << FormatDouble(s2.y(i)) << '\n';
  }
  if (!out) Fail(ErrorCode::kIoError, "write to '" + path + "' failed");
}

void WriteSample1Csv(const TwoSampleDataset& data, const ColumnSchema& schema,
                     const std::string& path) {
  if (static_cast<Eigen::Index>(schema.covariates.size()) != data.d()) {
    Fail(ErrorCode::kDimensionMismatch, "schema covariate count != d");
  }
  auto out = OpenForWrite(path);
  out << schema.treatment;
  for (const auto& c : schema.covariates) out << ',' << c;
  out << ',' << schema.instrument << '\n';
  const auto& s1 = data.sample1();
  for (Eigen::Index i = 0; i < data.n1(); ++i) {
    out << FormatDouble(s1.x(i));
    for (Eigen::Index k = 0; k < data.d(); ++k) {
      out << ',' << FormatDouble(s1.w(i, k));
    }
    out << ',' << FormatDouble(s1.z(i)) << '\n';
  }
  if (!out) Fail(ErrorCode::kIoError, "write to '" + path + "' failed");
}

void WriteSample2Csv(const TwoSampleDataset& data, const ColumnSchema& schema,
                     const std::string& path) {
  auto out = OpenForWrite(path);
  out << schema.outcome << ',' << schema.instrument << '\n';
  const auto& s2 = data.sample2();
  for (Eigen::Index i = 0; i < data.n2(); ++i) {
    out << FormatDouble(s2.y(i)) << ',' << FormatDouble(s2.z(i)) << '\n';
  }
  if (!out) Fail(ErrorCode::kIoError, "write to '" + path + "' failed");
}

std::pair<TwoSampleDataset, TwoSampleDataset> SplitTrainTest(
    const TwoSampleDataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "test_fraction must lie in (0, 1)");
  }
  const auto t1 = TestCount(data.n1(), test_fraction, "sample1");
  const auto t2 = TestCount(data.n2(), test_fraction, "sample2");

  std::seed_seq seq1{seed, std::uint64_t{1}};
  std::seed_seq seq2{seed, std::uint64_t{2}};
  std::mt19937_64 rng1(seq1);
  std::mt19937_64 rng2(seq2);
  const auto p1 = Permutation(data.n1(), rng1);
  const auto p2 = Permutation(data.n2(), rng2);

  auto take = [](const std::vector<Eigen::Index>& p, Eigen::Index from,
                 Eigen::Index to) {
    std::vector<Eigen::Index> rows(p.begin() + from, p.begin() + to);
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  auto test = data.Subset(take(p1, 0, t1), take(p2, 0, t2), false);
  auto train = data.Subset(take(p1, t1, data.n1()), take(p2, t2, data.n2()),
                           false);
  return {std::move(train), std::move(test)};
}

}  // namespace capce
