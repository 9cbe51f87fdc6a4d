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

#ifndef CAPCE_DATA_MODEL_H_
#define CAPCE_DATA_MODEL_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace capce {

// Treatment/covariate/instrument records {x, w, z}. Row i of `w` is the
// covariate vector of record i; `w` has d columns (d may be 0).
struct Sample1 {
  Eigen::VectorXd x;
  Eigen::MatrixXd w;
  Eigen::VectorXd z;

  Eigen::Index size() const { return x.size(); }
  Eigen::Index dim() const { return w.cols(); }
};

// Outcome/instrument records {y, z}.
struct Sample2 {
  Eigen::VectorXd y;
  Eigen::VectorXd z;

  Eigen::Index size() const { return y.size(); }
};

// The two-sample IV input: D1 = {x, w, z} and D2 = {y, z}. The samples may
// have different sizes. When both samples were read from the same rows of one
// joint table, `shared_rows()` is true and row i of each sample describes the
// same unit; the bootstrap uses this to resample rows jointly.
class TwoSampleDataset {
 public:
  TwoSampleDataset(Sample1 sample1, Sample2 sample2, bool shared_rows = false);

  // Builds a dataset where both samples come from the same n rows.
  static TwoSampleDataset Joint(Eigen::VectorXd x, Eigen::MatrixXd w,
                                Eigen::VectorXd z, Eigen::VectorXd y);

  const Sample1& sample1() const { return sample1_; }
  const Sample2& sample2() const { return sample2_; }
  Eigen::Index n1() const { return sample1_.size(); }
  Eigen::Index n2() const { return sample2_.size(); }
  Eigen::Index d() const { return sample1_.dim(); }
  bool shared_rows() const { return shared_rows_; }

  // Instrument values of both samples, sample1 first (length n1 + n2).
  Eigen::VectorXd StackedInstruments() const;

  // Row subsets. Indices may repeat (bootstrap resampling).
  TwoSampleDataset Subset(const std::vector<Eigen::Index>& rows1,
                          const std::vector<Eigen::Index>& rows2,
                          bool shared_rows) const;

 private:
  Sample1 sample1_;
  Sample2 sample2_;
  bool shared_rows_;
};

struct ColumnSchema {
  std::string treatment;
  std::string outcome;
  std::string instrument;
  std::vector<std::string> covariates;

  // Throws kInvalidArgument unless all roles name distinct, non-empty columns.
  void Validate() const;
};

// Reads a joint observational table. Rows with a missing ("NA", empty) or
// non-numeric value in any schema column are dropped; every surviving row
// feeds both samples.
TwoSampleDataset LoadJointCsv(const std::string& path,
                              const ColumnSchema& schema);

// Reads pre-split two-sample input: `path1` holds treatment, covariates and
// instrument; `path2` holds outcome and instrument.
TwoSampleDataset LoadTwoSampleCsv(const std::string& path1,
                                  const std::string& path2,
                                  const ColumnSchema& schema);

// Writers use shortest round-trip formatting, so reloading reproduces every
// value bit for bit.
void WriteJointCsv(const TwoSampleDataset& data, const ColumnSchema& schema,
                   const std::string& path);
void WriteSample1Csv(const TwoSampleDataset& data, const ColumnSchema& schema,
                     const std::string& path);
void WriteSample2Csv(const TwoSampleDataset& data, const ColumnSchema& schema,
                     const std::string& path);

// Default column names for synthetic data: x, y, z, and w (d = 1) or
// w1..wd.
ColumnSchema DefaultSchema(Eigen::Index d);

// Seeded split of each sample into (train, test). The test side of a sample
// of size n gets floor(test_fraction * n) records and the remainder goes to
// train; the two samples are permuted independently.
std::pair<TwoSampleDataset, TwoSampleDataset> SplitTrainTest(
    const TwoSampleDataset& data, double test_fraction, std::uint64_t seed);

}  // namespace capce

#endif  // CAPCE_DATA_MODEL_H_
