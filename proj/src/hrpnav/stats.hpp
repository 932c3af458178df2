// Copyright (c) 2026 The hrpnav Authors
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

#ifndef HRPNAV__STATS_HPP_
#define HRPNAV__STATS_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hrpnav
{

enum class Alternative
{
  TwoSided,
  Greater,  // condition_a tends to exceed condition_b
  Less,
};

enum class StatMethod
{
  Exact,
  NormalApproximation,
};

enum class MethodChoice
{
  Auto,  // exact up to kExactLimit nonzero differences
  Exact,
  Normal,
};

constexpr int kExactLimit = 25;

struct PairedSample
{
  std::vector<double> condition_a;
  std::vector<double> condition_b;
};

struct StatResult
{
  double w_statistic{0.0};  // min(W+, W-) two-sided, W+ one-sided
  double w_plus{0.0};
  double w_minus{0.0};
  double p_value{1.0};
  double z{0.0};  // continuity-corrected deviate of W+
  double effect_size_r{0.0};
  int n_effective{0};
  StatMethod method{StatMethod::Exact};
};

std::string_view alternative_name(Alternative alternative);
Alternative parse_alternative(std::string_view text);
std::string_view method_name(StatMethod method);

/**
 * Wilcoxon signed-rank test on paired samples. Zero differences are discarded,
 * tied magnitudes share average ranks. The exact null distribution comes from a
 * subset-sum count over doubled ranks, which stays integral under ties.
 *
 * Throws DegenerateSample when every difference is zero and InvalidArgument on
 * unequal lengths or non-finite values.
 */
StatResult wilcoxon_signed_rank(
  const PairedSample & sample, Alternative alternative = Alternative::TwoSided,
  MethodChoice method = MethodChoice::Auto);

/// |z| / sqrt(n_effective).
double effect_size_r(const StatResult & result);

/// Reads `participant,condition_a,condition_b` rows after a header line.
PairedSample read_paired_csv(const std::filesystem::path & file);
PairedSample parse_paired_csv(std::string_view text);

std::string stat_result_to_json(const StatResult & result, Alternative alternative);

}  // namespace hrpnav

#endif  // HRPNAV__STATS_HPP_
