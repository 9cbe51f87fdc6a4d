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

#ifndef CAPCE_STATS_H_
#define CAPCE_STATS_H_

#include <vector>

namespace capce {

double Mean(const std::vector<double>& v);
// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double SampleSd(const std::vector<double>& v);
// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double Quantile(std::vector<double> v, double q);

}  // namespace capce

#endif  // CAPCE_STATS_H_
