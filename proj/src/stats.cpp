#include "porogen/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace porogen {

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty input");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BoxPlotStats box_plot(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("box_plot: empty input");
  std::vector<double> v = values;
  std::sort(v.begin(), v.end());

  BoxPlotStats b;
  b.min = v.front();
  b.max = v.back();
  double acc = 0.0;
  for (double x : v) acc += x;
  b.mean = acc / static_cast<double>(v.size());
  b.q1 = quantile(v, 0.25);
  b.median = quantile(v, 0.5);
  b.q3 = quantile(v, 0.75);

  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  for (double x : v) {
    if (x >= lo_fence) {
      b.whisker_low = x;  // sorted: first hit is the lowest in-fence point
      break;
    }
  }
  for (auto it = v.rbegin(); it != v.rend(); ++it) {
    if (*it <= hi_fence) {
      b.whisker_high = *it;
      break;
    }
  }
  // Whiskers never retreat inside the box.
  b.whisker_low = std::min(b.whisker_low, b.q1);
  b.whisker_high = std::max(b.whisker_high, b.q3);
  for (double x : v)
    if (x < lo_fence || x > hi_fence) b.outliers.push_back(x);
  return b;
}

std::vector<double> metric_values(const std::vector<MorphologyReport>& rs,
                                  const std::string& metric) {
  std::vector<double> out;
  out.reserve(rs.size());
  for (const auto& r : rs) {
    if (metric == "porosity")
      out.push_back(r.porosity);
    else if (metric == "V")
      out.push_back(r.V);
    else if (metric == "S")
      out.push_back(r.S);
    else if (metric == "B")
      out.push_back(r.B);
    else if (metric == "chi")
      out.push_back(r.chi);
    else
      throw std::invalid_argument("unknown metric '" + metric + "'");
  }
  return out;
}

namespace {

double interval_overlap(const BoxPlotStats& a, const BoxPlotStats& b) {
  const double la = a.q3 - a.q1;
  const double lb = b.q3 - b.q1;
  const double inter =
      std::max(0.0, std::min(a.q3, b.q3) - std::max(a.q1, b.q1));
  const double uni = la + lb - inter;
  if (uni <= 0.0) return a.q1 == b.q1 && a.q3 == b.q3 ? 1.0 : 0.0;
  return inter / uni;
}

double relative_median_diff(double real, double synth) {
  if (real == 0.0 && synth == 0.0) return 0.0;
  if (real == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(real - synth) / std::abs(real);
}

nlohmann::json box_to_json_obj(const BoxPlotStats& b) {
  return {{"min", b.min},
          {"q1", b.q1},
          {"median", b.median},
          {"mean", b.mean},
          {"q3", b.q3},
          {"max", b.max},
          {"whisker_low", b.whisker_low},
          {"whisker_high", b.whisker_high},
          {"outliers", b.outliers}};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ComparisonReport compare_populations(
    const std::vector<MorphologyReport>& real,
    const std::vector<MorphologyReport>& synth) {
  if (real.empty() || synth.empty())
    throw std::invalid_argument("compare_populations: empty population");
  ComparisonReport report;
  for (const char* metric : {"porosity", "V", "S", "B", "chi"}) {
    MetricComparison mc;
    mc.metric = metric;
    mc.real = box_plot(metric_values(real, metric));
    mc.synth = box_plot(metric_values(synth, metric));
    mc.relative_median_difference =
        relative_median_diff(mc.real.median, mc.synth.median);
    mc.iqr_overlap = interval_overlap(mc.real, mc.synth);
    report.metrics.push_back(std::move(mc));
  }
  return report;
}

std::string box_plot_to_json(const BoxPlotStats& b) {
  return box_to_json_obj(b).dump(2) + "\n";
}

std::string comparison_to_json(const ComparisonReport& r) {
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& m : r.metrics) {
    nlohmann::json jm;
    jm["metric"] = m.metric;
    jm["real"] = box_to_json_obj(m.real);
    jm["synthetic"] = box_to_json_obj(m.synth);
    if (std::isfinite(m.relative_median_difference))
      jm["relative_median_difference"] = m.relative_median_difference;
    else
      jm["relative_median_difference"] = "infinite";
    jm["iqr_overlap"] = m.iqr_overlap;
    metrics.push_back(std::move(jm));
  }
  return nlohmann::json{{"metrics", metrics}}.dump(2) + "\n";
}

std::string population_csv(const std::string&,
                           const std::vector<double>& real,
                           const std::vector<double>& synth) {
  std::string out = "population,value\n";
  for (double v : real) out += "real," + format_double(v) + "\n";
  for (double v : synth) out += "synthetic," + format_double(v) + "\n";
  return out;
}

}  // namespace porogen
