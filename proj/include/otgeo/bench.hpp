#pragma once

#include <map>
#include <string>
#include <vector>

#include "otgeo/config.hpp"
#include "otgeo/debias.hpp"
#include "otgeo/synth.hpp"

namespace otgeo::bench {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double variance = 0.0;  // unbiased; 0 for a single value
};

/// Quartiles by linear interpolation between order statistics. NaNs are
/// skipped (they mark missing cells). Throws if no finite value remains.
Summary summarize(std::vector<double> values);

/// Least-squares slope of log y on log x. Needs >= 3 points, all positive.
double fit_decay_slope(const std::vector<double>& xs, const std::vector<double>& ys);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

struct SummaryLine {
  std::string group;
  std::string statistic;  // what was summarized
  Summary stats;
};

struct RunRecord {
  std::string config_hash;
  ExperimentKind kind = ExperimentKind::discr_error_curve;
  CsvTable csv;
  std::vector<SummaryLine> summary;
  /// Headline numbers (e.g. the fitted slope, the error-minimizing d).
  std::map<std::string, double> results;
  std::vector<std::string> notes;
  /// Wall time per repeat; kept out of the CSV so reruns are byte-identical.
  std::vector<double> wall_ms;

  std::string summary_text() const;
};

/// A pair of clouds of equal size with its exact W2^2.
struct W2Instance {
  PointCloud x;
  PointCloud y;
  double truth;
};

/// The affine Brenier map used by the brenier_mixture pair.
synth::BrenierPair brenier_mixture_pair();

W2Instance make_instance(PairKind pair, std::size_t dim, std::size_t size, SeedSpec seed);

/// d_int from the dimension estimator on `cloud` (half the rows as Monte
/// Carlo points, eta = 1.5).
double estimate_schedule_dimension(const PointCloud& cloud, SeedSpec seed);

/// One estimator on one instance.
EstimateReport run_w2_method(W2Method method, const PointCloud& x, const PointCloud& y,
                             const Schedule& sched, std::size_t bags, SeedSpec seed,
                             const DebiasOptions& opts);

RunRecord run_experiment(const ExperimentConfig& cfg);

/// Writes the CSV to cfg.output, the summary next to it (".summary.txt")
/// and the SVG plot when cfg.plot is set.
void write_run(const RunRecord& record, const ExperimentConfig& cfg);

}  // namespace otgeo::bench
