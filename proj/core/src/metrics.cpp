#include "implausify/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "implausify/errors.hpp"
#include "implausify/rng.hpp"

namespace implausify {

using nlohmann::json;

double normalize_judgments(std::span<const int> ratings) {
  if (ratings.empty()) throw Error("ratings must be non-empty");
  double sum = 0.0;
  for (const int rating : ratings) {
    if (rating < 0 || rating > 5)
      throw Error("rating out of range [0, 5]: " + std::to_string(rating));
    sum += rating;
  }
  return sum / (5.0 * static_cast<double>(ratings.size()));
}

namespace {

void check_inputs(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error("input vectors differ in length");
  if (xs.size() < 3) throw Error("correlation requires at least 3 pairs");
  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(xs) || constant(ys))
    throw Error("correlation undefined for a constant input");
}

/// Average (tie-shared) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("correlation undefined for a constant input");
  return sxy / std::sqrt(sxx * syy);
}

/// Counts strict inversions in-place by merge sort.
std::uint64_t count_inversions(std::vector<double>& values, std::vector<double>& scratch,
                               std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inversions = count_inversions(values, scratch, lo, mid) +
                             count_inversions(values, scratch, mid, hi);
  std::size_t a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (values[b] < values[a]) {
      inversions += mid - a;
      scratch[out++] = values[b++];
    } else {
      scratch[out++] = values[a++];
    }
  }
  while (a < mid) scratch[out++] = values[a++];
  while (b < hi) scratch[out++] = values[b++];
  std::copy(scratch.begin() + static_cast<long>(lo), scratch.begin() + static_cast<long>(hi),
            values.begin() + static_cast<long>(lo));
  return inversions;
}

std::uint64_t tie_pairs(std::span<const double> sorted) {
  std::uint64_t pairs = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const std::uint64_t run = j - i + 1;
    pairs += run * (run - 1) / 2;
    i = j + 1;
  }
  return pairs;
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
  check_inputs(xs, ys);
  const auto rank_x = average_ranks(xs);
  const auto rank_y = average_ranks(ys);
  return pearson(rank_x, rank_y);
}

double kendall(std::span<const double> xs, std::span<const double> ys) {
  check_inputs(xs, ys);
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (xs[a] != xs[b]) return xs[a] < xs[b];
    return ys[a] < ys[b];
  });

  std::uint64_t ntie_x = 0, ntie_xy = 0;
  {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
      const std::uint64_t run = j - i + 1;
      ntie_x += run * (run - 1) / 2;
      std::size_t k = i;
      while (k <= j) {
        std::size_t m = k;
        while (m + 1 <= j && ys[order[m + 1]] == ys[order[k]]) ++m;
        const std::uint64_t joint = m - k + 1;
        ntie_xy += joint * (joint - 1) / 2;
        k = m + 1;
      }
      i = j + 1;
    }
  }

  // After sorting by (x, y), y-inversions are exactly the discordant pairs:
  // ties in x contribute none because their y values are ascending.
  std::vector<double> y_sequence(n);
  for (std::size_t i = 0; i < n; ++i) y_sequence[i] = ys[order[i]];
  std::vector<double> scratch(n);
  const std::uint64_t discordant = count_inversions(y_sequence, scratch, 0, n);

  std::vector<double> y_sorted(ys.begin(), ys.end());
  std::sort(y_sorted.begin(), y_sorted.end());
  const std::uint64_t ntie_y = tie_pairs(y_sorted);

  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const double con_minus_dis = static_cast<double>(total) - static_cast<double>(ntie_x) -
                               static_cast<double>(ntie_y) + static_cast<double>(ntie_xy) -
                               2.0 * static_cast<double>(discordant);
  const double denom = std::sqrt(static_cast<double>(total - ntie_x)) *
                       std::sqrt(static_cast<double>(total - ntie_y));
  if (denom == 0.0) throw Error("correlation undefined for a constant input");
  return con_minus_dis / denom;
}

double fleiss_kappa(const std::vector<std::vector<int>>& ratings_matrix) {
  if (ratings_matrix.empty()) throw Error("ratings matrix is empty");
  const std::size_t annotators = ratings_matrix.front().size();
  if (annotators < 2) throw Error("fleiss kappa requires at least 2 annotators");
  constexpr int kCategories = 6;

  double sum_pi = 0.0;
  std::vector<double> category_mass(kCategories, 0.0);
  for (const auto& row : ratings_matrix) {
    if (row.size() != annotators) throw Error("ragged ratings matrix");
    std::vector<int> counts(kCategories, 0);
    for (const int rating : row) {
      if (rating < 0 || rating >= kCategories)
        throw Error("rating out of range [0, 5]: " + std::to_string(rating));
      ++counts[static_cast<std::size_t>(rating)];
    }
    double agreement = 0.0;
    for (int c = 0; c < kCategories; ++c) {
      agreement += static_cast<double>(counts[c]) * (counts[c] - 1);
      category_mass[static_cast<std::size_t>(c)] += counts[c];
    }
    const double m = static_cast<double>(annotators);
    sum_pi += agreement / (m * (m - 1.0));
  }

  const double items = static_cast<double>(ratings_matrix.size());
  const double p_bar = sum_pi / items;
  double p_expected = 0.0;
  const double total_ratings = items * static_cast<double>(annotators);
  for (const double mass : category_mass) {
    const double share = mass / total_ratings;
    p_expected += share * share;
  }
  if (p_expected == 1.0) return 1.0;  // a single category everywhere
  return (p_bar - p_expected) / (1.0 - p_expected);
}

CorrelationReport evaluate_metric(const std::map<std::string, double>& scores,
                                  std::span<const JudgedText> judged, int bootstrap,
                                  std::uint64_t seed) {
  std::vector<double> xs;  // metric scores
  std::vector<double> ys;  // normalized judgments
  int dropped = 0;
  std::size_t matched_scores = 0;
  for (const auto& item : judged) {
    auto it = scores.find(item.id);
    if (it == scores.end()) {
      ++dropped;
      continue;
    }
    ++matched_scores;
    xs.push_back(it->second);
    ys.push_back(item.normalized);
  }
  dropped += static_cast<int>(scores.size() - matched_scores);
  if (xs.size() < 3)
    throw Error("fewer than 3 matched id pairs (" + std::to_string(xs.size()) + ")");

  CorrelationReport report;
  report.n = static_cast<int>(xs.size());
  report.dropped = dropped;
  report.rho = spearman(xs, ys);
  report.tau = kendall(xs, ys);

  if (bootstrap > 0) {
    Rng rng(mix_seed(seed, stable_hash64("bootstrap")));
    std::vector<double> rhos, taus;
    rhos.reserve(static_cast<std::size_t>(bootstrap));
    taus.reserve(static_cast<std::size_t>(bootstrap));
    std::vector<double> rx(xs.size()), ry(ys.size());
    for (int b = 0; b < bootstrap; ++b) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const std::size_t j = rng.below(xs.size());
        rx[i] = xs[j];
        ry[i] = ys[j];
      }
      try {
        const double r = spearman(rx, ry);
        const double t = kendall(rx, ry);
        rhos.push_back(r);
        taus.push_back(t);
      } catch (const Error&) {
        // degenerate resample (constant side); skipped
      }
    }
    if (!rhos.empty()) {
      const auto percentile_interval = [](std::vector<double>& values) {
        std::sort(values.begin(), values.end());
        const auto at = [&](double q) {
          const double pos = q * static_cast<double>(values.size() - 1);
          const auto lo = static_cast<std::size_t>(pos);
          const std::size_t hi = std::min(lo + 1, values.size() - 1);
          const double frac = pos - static_cast<double>(lo);
          return values[lo] * (1.0 - frac) + values[hi] * frac;
        };
        return Interval{at(0.025), at(0.975)};
      };
      BootstrapCi ci;
      ci.rho = percentile_interval(rhos);
      ci.tau = percentile_interval(taus);
      ci.resamples = static_cast<int>(rhos.size());
      report.bootstrap_ci = ci;
    }
  }
  return report;
}

std::vector<JudgedText> load_judgments(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<JudgedText> judged;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json row = json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.contains("id") || !row.contains("ratings"))
      throw ParseError("line " + std::to_string(lineno) + ": malformed judgments row");
    JudgedText item;
    item.id = row["id"].get<std::string>();
    if (row.contains("text")) item.text = tokenize(row["text"].get<std::string>());
    item.ratings = row["ratings"].get<std::vector<int>>();
    item.normalized = normalize_judgments(item.ratings);
    judged.push_back(std::move(item));
  }
  return judged;
}

std::map<std::string, double> load_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<std::string, double> scores;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json row = json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.contains("id") || !row.contains("score"))
      throw ParseError("line " + std::to_string(lineno) + ": malformed scores row");
    scores[row["id"].get<std::string>()] = row["score"].get<double>();
  }
  return scores;
}

void write_scores(const std::map<std::string, double>& scores,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [id, value] : scores)
    out << json{{"id", id}, {"score", value}}.dump() << '\n';
}

std::string report_to_json(const CorrelationReport& report) {
  json doc{{"rho", report.rho}, {"tau", report.tau}, {"n", report.n}, {"dropped", report.dropped}};
  if (report.bootstrap_ci) {
    doc["bootstrap_ci"] = {{"rho", {report.bootstrap_ci->rho.lo, report.bootstrap_ci->rho.hi}},
                           {"tau", {report.bootstrap_ci->tau.lo, report.bootstrap_ci->tau.hi}},
                           {"resamples", report.bootstrap_ci->resamples}};
  }
  return doc.dump(2);
}

std::string report_table(const CorrelationReport& report) {
  std::ostringstream out;
  char buffer[160];
  std::snprintf(buffer, sizeof(buffer), "%-12s %10s\n", "statistic", "value");
  out << buffer;
  std::snprintf(buffer, sizeof(buffer), "%-12s %10.4f\n", "spearman", report.rho);
  out << buffer;
  std::snprintf(buffer, sizeof(buffer), "%-12s %10.4f\n", "kendall", report.tau);
  out << buffer;
  std::snprintf(buffer, sizeof(buffer), "%-12s %10d\n", "pairs", report.n);
  out << buffer;
  std::snprintf(buffer, sizeof(buffer), "%-12s %10d\n", "dropped", report.dropped);
  out << buffer;
  if (report.bootstrap_ci) {
    std::snprintf(buffer, sizeof(buffer), "%-12s [%7.4f, %7.4f]\n", "rho 95% ci",
                  report.bootstrap_ci->rho.lo, report.bootstrap_ci->rho.hi);
    out << buffer;
    std::snprintf(buffer, sizeof(buffer), "%-12s [%7.4f, %7.4f]\n", "tau 95% ci",
                  report.bootstrap_ci->tau.lo, report.bootstrap_ci->tau.hi);
    out << buffer;
  }
  return out.str();
}

}  // namespace implausify
