#pragma once

#include <string>
#include <vector>

#include "porogen/morphology.hpp"

namespace porogen {

// Tukey box-plot summary. Quartiles interpolate linearly between order
// statistics; whiskers sit on the most extreme data points within
// 1.5 * IQR of the quartiles, everything beyond is an outlier.
struct BoxPlotStats {
  double min = 0, q1 = 0, median = 0, mean = 0, q3 = 0, max = 0;
  double whisker_low = 0, whisker_high = 0;
  std::vector<double> outliers;
};

struct MetricComparison {
  std::string metric;
  BoxPlotStats real;
  BoxPlotStats synth;
  double relative_median_difference = 0.0;
  double iqr_overlap = 0.0;  // Jaccard overlap of the [q1,q3] intervals
};

struct ComparisonReport {
  std::vector<MetricComparison> metrics;  // porosity, V, S, B, chi
};

// Linear interpolation between order statistics of a sorted sample.
double quantile(const std::vector<double>& sorted, double q);

BoxPlotStats box_plot(const std::vector<double>& values);

ComparisonReport compare_populations(
    const std::vector<MorphologyReport>& real,
    const std::vector<MorphologyReport>& synth);

std::string box_plot_to_json(const BoxPlotStats& b);
std::string comparison_to_json(const ComparisonReport& r);
// One metric per call, rows "population,value" for external plotting.
std::string population_csv(const std::string& metric,
                           const std::vector<double>& real,
                           const std::vector<double>& synth);
std::vector<double> metric_values(const std::vector<MorphologyReport>& rs,
                                  const std::string& metric);

}  // namespace porogen
