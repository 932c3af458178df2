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

#include "hrpnav/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "hrpnav/error.hpp"

namespace hrpnav
{

std::string_view alternative_name(Alternative alternative)
{
  switch (alternative) {
    case Alternative::TwoSided: return "two-sided";
    case Alternative::Greater: return "greater";
    case Alternative::Less: return "less";
  }
  return "two-sided";
}

Alternative parse_alternative(std::string_view text)
{
  if (text == "two-sided") {
    return Alternative::TwoSided;
  }
  if (text == "greater") {
    return Alternative::Greater;
  }
  if (text == "less") {
    return Alternative::Less;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown alternative '" + std::string(text) + "'");
}

std::string_view method_name(StatMethod method)
{
  return method == StatMethod::Exact ? "exact" : "normal-approximation";
}

namespace
{

struct RankedDifferences
{
  std::vector<int64_t> doubled_ranks;  // 2 * average rank, always integral
  std::vector<bool> positive;
  double tie_term{0.0};  // sum over tie groups of t^3 - t
};

RankedDifferences rank_differences(const PairedSample & s)
{
  if (s.condition_a.size() != s.condition_b.size()) {
    throw Error(ErrorCode::InvalidArgument, "paired conditions differ in length");
  }
  if (s.condition_a.empty()) {
    throw Error(ErrorCode::InvalidArgument, "paired sample is empty");
  }
  std::vector<double> diffs;
  for (size_t i = 0; i < s.condition_a.size(); ++i) {
    const double d = s.condition_a[i] - s.condition_b[i];
    if (!std::isfinite(d)) {
      throw Error(ErrorCode::InvalidArgument, "paired values must be finite");
    }
    if (d != 0.0) {
      diffs.push_back(d);
    }
  }
  if (diffs.empty()) {
    throw Error(ErrorCode::DegenerateSample, "all paired differences are zero");
  }

  const size_t n = diffs.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(
    order.begin(), order.end(),
    [&](size_t l, size_t r) {return std::abs(diffs[l]) < std::abs(diffs[r]);});

  RankedDifferences out;
  out.doubled_ranks.assign(n, 0);
  out.positive.assign(n, false);
  size_t k = 0;
  while (k < n) {
    size_t end = k + 1;
    while (end < n && std::abs(diffs[order[end]]) == std::abs(diffs[order[k]])) {
      ++end;
    }
    // ranks k+1 .. end share (k+1+end)/2
    const auto doubled = static_cast<int64_t>(k + 1 + end);
    for (size_t m = k; m < end; ++m) {
      out.doubled_ranks[m] = doubled;
      out.positive[m] = diffs[order[m]] > 0.0;
    }
    const auto t = static_cast<double>(end - k);
    out.tie_term += t * t * t - t;
    k = end;
  }
  return out;
}

// dist[s] = P(sum of doubled ranks carrying a + sign == s) under the null.
std::vector<double> null_distribution(const std::vector<int64_t> & doubled_ranks)
{
  const int64_t total = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), int64_t{0});
  std::vector<double> dist(static_cast<size_t>(total) + 1, 0.0);
  dist[0] = 1.0;
  int64_t reach = 0;
  for (const int64_t r : doubled_ranks) {
    for (int64_t s = reach; s >= 0; --s) {
      const double mass = dist[static_cast<size_t>(s)] * 0.5;
      dist[static_cast<size_t>(s)] = mass;
      dist[static_cast<size_t>(s + r)] += mass;
    }
    reach += r;
  }
  return dist;
}

double lower_tail(const std::vector<double> & dist, int64_t upto)
{
  double p = 0.0;
  for (int64_t s = 0; s <= upto && s < static_cast<int64_t>(dist.size()); ++s) {
    p += dist[static_cast<size_t>(s)];
  }
  return p;
}

double upper_tail(const std::vector<double> & dist, int64_t from)
{
  double p = 0.0;
  for (int64_t s = std::max<int64_t>(from, 0); s < static_cast<int64_t>(dist.size()); ++s) {
    p += dist[static_cast<size_t>(s)];
  }
  return p;
}

double standard_normal_cdf(double z)
{
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double corrected_deviate(double diff, double sd, double correction)
{
  const double magnitude = std::max(std::abs(diff) - correction, 0.0);
  return std::copysign(magnitude, diff) / sd;
}

}  // namespace

StatResult wilcoxon_signed_rank(
  const PairedSample & sample, Alternative alternative, MethodChoice method)
{
  const RankedDifferences ranked = rank_differences(sample);
  const auto n = static_cast<int64_t>(ranked.doubled_ranks.size());

  int64_t w2_plus = 0;
  int64_t w2_total = 0;
  for (int64_t k = 0; k < n; ++k) {
    w2_total += ranked.doubled_ranks[static_cast<size_t>(k)];
    if (ranked.positive[static_cast<size_t>(k)]) {
      w2_plus += ranked.doubled_ranks[static_cast<size_t>(k)];
    }
  }
  const int64_t w2_minus = w2_total - w2_plus;

  StatResult r;
  r.n_effective = static_cast<int>(n);
  r.w_plus = static_cast<double>(w2_plus) / 2.0;
  r.w_minus = static_cast<double>(w2_minus) / 2.0;
  r.w_statistic = alternative == Alternative::TwoSided ? std::min(r.w_plus, r.w_minus) : r.w_plus;

  const double nd = static_cast<double>(n);
  const double mean = nd * (nd + 1.0) / 4.0;
  const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - ranked.tie_term / 48.0;
  const double sd = std::sqrt(var);
  const double diff = r.w_plus - mean;
  r.z = sd > 0.0 ? corrected_deviate(diff, sd, 0.5) : 0.0;
  r.effect_size_r = effect_size_r(r);

  const bool exact = method == MethodChoice::Exact ||
    (method == MethodChoice::Auto && n <= kExactLimit);
  if (exact) {
    r.method = StatMethod::Exact;
    const auto dist = null_distribution(ranked.doubled_ranks);
    switch (alternative) {
      case Alternative::TwoSided:
        r.p_value = std::min(1.0, 2.0 * lower_tail(dist, std::min(w2_plus, w2_minus)));
        break;
      case Alternative::Greater:
        r.p_value = upper_tail(dist, w2_plus);
        break;
      case Alternative::Less:
        r.p_value = lower_tail(dist, w2_plus);
        break;
    }
  } else {
    r.method = StatMethod::NormalApproximation;
    if (!(sd > 0.0)) {
      r.p_value = 1.0;
    } else {
      switch (alternative) {
        case Alternative::TwoSided:
          r.p_value = std::min(1.0, 2.0 * (1.0 - standard_normal_cdf(std::abs(r.z))));
          break;
        case Alternative::Greater:
          r.p_value = 1.0 - standard_normal_cdf((diff - 0.5) / sd);
          break;
        case Alternative::Less:
          r.p_value = standard_normal_cdf((diff + 0.5) / sd);
          break;
      }
    }
  }
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  return r;
}

double effect_size_r(const StatResult & result)
{
  if (result.n_effective <= 0) {
    throw Error(ErrorCode::DegenerateSample, "effect size needs at least one nonzero difference");
  }
  return std::abs(result.z) / std::sqrt(static_cast<double>(result.n_effective));
}

PairedSample parse_paired_csv(std::string_view text)
{
  PairedSample out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  auto parse_field = [](const std::string & field, double & value) {
      try {
        size_t used = 0;
        value = std::stod(field, &used);
        while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) {
          ++used;
        }
        return used == field.size();
      } catch (const std::exception &) {
        return false;
      }
    };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      fields.push_back(field);
    }
    double a = 0.0;
    double b = 0.0;
    const bool ok = fields.size() == 3 && parse_field(fields[1], a) && parse_field(fields[2], b);
    if (!ok) {
      if (!header_seen && out.condition_a.empty()) {
        header_seen = true;
        continue;
      }
      throw Error(
        ErrorCode::Parse,
        "line " + std::to_string(lineno) + ": expected participant,condition_a,condition_b");
    }
    header_seen = true;
    out.condition_a.push_back(a);
    out.condition_b.push_back(b);
  }
  if (out.condition_a.empty()) {
    throw Error(ErrorCode::Parse, "no paired rows found");
  }
  return out;
}

PairedSample read_paired_csv(const std::filesystem::path & file)
{
  std::ifstream in(file);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open '" + file.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_paired_csv(buf.str());
}

std::string stat_result_to_json(const StatResult & r, Alternative alternative)
{
  nlohmann::ordered_json j;
  j["w_statistic"] = r.w_statistic;
  j["w_plus"] = r.w_plus;
  j["w_minus"] = r.w_minus;
  j["p_value"] = r.p_value;
  j["z"] = r.z;
  j["effect_size_r"] = r.effect_size_r;
  j["n_effective"] = r.n_effective;
  j["method"] = method_name(r.method);
  j["alternative"] = alternative_name(alternative);
  return j.dump();
}

}  // namespace hrpnav
