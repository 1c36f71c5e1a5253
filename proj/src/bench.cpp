#include "otgeo/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "otgeo/discretization.hpp"
#include "otgeo/intrinsic_dim.hpp"
#include "otgeo/io.hpp"
#include "otgeo/parallel.hpp"
#include "otgeo/svg.hpp"

namespace otgeo::bench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string cell(double v) { return std::isfinite(v) ? io::format_double(v) : "NA"; }
std::string cell(std::size_t v) { return std::to_string(v); }

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

using Clock = std::chrono::steady_clock;
double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

Summary summarize(std::vector<double> values) {
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  if (values.empty()) throw std::invalid_argument("summarize: no finite values");
  std::sort(values.begin(), values.end());
  Summary s;
  s.count = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  s.median = quantile_sorted(values, 0.5);
  s.q1 = quantile_sorted(values, 0.25);
  s.q3 = quantile_sorted(values, 0.75);
  s.iqr = s.q3 - s.q1;
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(s.count - 1);
  }
  return s;
}

double fit_decay_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_decay_slope: length mismatch");
  if (xs.size() < 3) throw std::invalid_argument("fit_decay_slope: need at least 3 points");
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw std::invalid_argument("fit_decay_slope: values must be positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_decay_slope: all x values are equal");
  return sxy / sxx;
}

std::string CsvTable::to_string() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::string RunRecord::summary_text() const {
  std::ostringstream os;
  os << "experiment: " << to_string(kind) << "\nconfig_hash: " << config_hash << "\n\n";
  os << "group,statistic,count,median,q1,q3,iqr,variance,mean\n";
  for (const auto& s : summary)
    os << s.group << ',' << s.statistic << ',' << s.stats.count << ',' << cell(s.stats.median) << ','
       << cell(s.stats.q1) << ',' << cell(s.stats.q3) << ',' << cell(s.stats.iqr) << ','
       << cell(s.stats.variance) << ',' << cell(s.stats.mean) << '\n';
  if (!results.empty()) {
    os << "\nresults:\n";
    for (const auto& [k, v] : results) os << "  " << k << " = " << cell(v) << '\n';
  }
  for (const auto& n : notes) os << "note: " << n << '\n';
  if (!wall_ms.empty()) {
    const Summary t = summarize(wall_ms);
    os << "\nwall time per repeat (ms): median " << cell(t.median) << ", total "
       << cell(t.mean * static_cast<double>(t.count)) << '\n';
  }
  return os.str();
}

synth::BrenierPair brenier_mixture_pair() {
  synth::BrenierPair pair;
  pair.source = synth::sensitivity_source();
  const std::size_t d = pair.source.ambient_d;
  const Eigen::MatrixXd q = synth::random_frame(d, d, SeedSpec{0x62726e72, 0});
  Eigen::VectorXd lambda(d);
  for (std::size_t i = 0; i < d; ++i)
    lambda[static_cast<Eigen::Index>(i)] = 0.5 + static_cast<double>(i) / static_cast<double>(d - 1);
  pair.A = q * lambda.asDiagonal() * q.transpose();
  pair.A = 0.5 * (pair.A + pair.A.transpose());
  pair.b = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), 0.5);
  return pair;
}

W2Instance make_instance(PairKind pair, std::size_t dim, std::size_t size, SeedSpec seed) {
  if (pair == PairKind::brenier_mixture) {
    static const synth::BrenierPair brenier = brenier_mixture_pair();
    auto s = synth::sample_brenier_pair(brenier, size, seed);
    return {std::move(s.source), std::move(s.target), s.true_w2sq};
  }
  auto gaussian = [&](double shift, SeedSpec stream) {
    Rng rng = make_rng(stream);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> coords(size * dim);
    for (double& c : coords) c = shift + z(rng);
    return PointCloud(size, dim, std::move(coords));
  };
  const auto d = static_cast<Eigen::Index>(dim);
  const double truth = synth::bures_w2sq(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d),
                                         Eigen::VectorXd::Ones(d), Eigen::MatrixXd::Identity(d, d));
  return {gaussian(0.0, seed.derive(0)), gaussian(1.0, seed.derive(1)), truth};
}

double estimate_schedule_dimension(const PointCloud& cloud, SeedSpec seed) {
  const auto [n, N] = default_split(cloud.size(), kDefaultEta);
  return estimate_dimension_from_cloud(cloud, n, kDefaultEta, N, 0.05, seed).d_hat;
}

EstimateReport run_w2_method(W2Method method, const PointCloud& x, const PointCloud& y,
                             const Schedule& sched, std::size_t bags, SeedSpec seed,
                             const DebiasOptions& opts) {
  switch (method) {
    case W2Method::base: return base_estimate(x, y, sched, opts);
    case W2Method::eps_rich: return eps_only_richardson(x, y, sched.epsilon(x.size()), opts);
    case W2Method::diag_rich: return diagonal_richardson(x, y, sched, seed, opts);
    case W2Method::bagged_diag_rich: return bagged_diagonal_richardson(x, y, sched, bags, seed, opts);
  }
  throw std::logic_error("unknown method");
}

namespace {

SeedSpec root_seed(const ExperimentConfig& cfg) { return SeedSpec{cfg.seed, 0}; }

void add_summary(RunRecord& rec, const std::string& group, const std::string& stat,
                 const std::vector<double>& values) {
  try {
    rec.summary.push_back({group, stat, summarize(values)});
  } catch (const std::invalid_argument&) {
    rec.notes.push_back(group + ": no finite " + stat + " values");
  }
}

// Repeats run concurrently; each fills its own slot and rows are appended in
// repeat order afterwards.
template <typename Fn>
std::vector<std::vector<std::vector<std::string>>> run_slots(std::size_t count, RunRecord& rec,
                                                              Fn&& fn) {
  std::vector<std::vector<std::vector<std::string>>> slots(count);
  rec.wall_ms.assign(count, 0.0);
  parallel_for(count, [&](std::size_t i) {
    const auto t0 = Clock::now();
    slots[i] = fn(i);
    rec.wall_ms[i] = ms_since(t0);
  });
  for (auto& s : slots)
    for (auto& row : s) rec.csv.rows.push_back(row);
  return slots;
}

double parse_cell(const std::string& s) { return s == "NA" ? kNaN : std::stod(s); }

std::vector<double> column(const RunRecord& rec, std::size_t col,
                           const std::function<bool(const std::vector<std::string>&)>& keep) {
  std::vector<double> out;
  for (const auto& row : rec.csv.rows)
    if (keep(row)) out.push_back(parse_cell(row[col]));
  return out;
}

RunRecord run_fig1(const ExperimentConfig& cfg) {
  RunRecord rec;
  const auto known = synth::dimension_benchmark_configs();
  std::vector<synth::ManifoldConfig> gens;
  for (const auto& name : cfg.generators) {
    auto it = std::find_if(known.begin(), known.end(), [&](const auto& p) { return p.first == name; });
    if (it == known.end()) throw ConfigError(0, "unknown generator '" + name + "'");
    gens.push_back(it->second);
  }
  std::vector<synth::ManifoldSampler> samplers;
  for (const auto& g : gens) samplers.emplace_back(g);

  rec.csv.header = {"generator", "repeat", "n", "eta_n", "N", "delta", "d_hat", "band_lo",
                    "band_hi", "ot_n", "ot_eta_n", "low_dimension", "seed"};
  const std::size_t baseline_n = static_cast<std::size_t>(
      std::floor(static_cast<double>(kMaxAssignmentSize) / cfg.eta));
  if (cfg.baseline) {
    rec.csv.header.push_back("baseline_n");
    rec.csv.header.push_back("baseline_d_hat");
  }
  const std::size_t total = gens.size() * cfg.repeats;
  run_slots(total, rec, [&](std::size_t idx) {
    const std::size_t g = idx / cfg.repeats, r = idx % cfg.repeats;
    const SeedSpec s = root_seed(cfg).derive(g).derive(r);
    std::vector<std::string> row{cfg.generators[g], cell(r), cell(cfg.n),
                                 cell(scaled_size(cfg.n, cfg.eta)), cell(cfg.N), cell(cfg.delta)};
    try {
      const auto est = estimate_dimension(samplers[g], cfg.n, cfg.eta, cfg.N, cfg.delta,
                                          s.derive(0), s.derive(1));
      for (double v : {est.d_hat, est.band_lo, est.band_hi, est.ot_n.value, est.ot_eta_n.value})
        row.push_back(cell(v));
      row.push_back(est.low_dimension ? "1" : "0");
    } catch (const DegenerateRatioError&) {
      for (int k = 0; k < 6; ++k) row.push_back("NA");
    }
    row.push_back(cell(cfg.seed));
    if (cfg.baseline) {
      row.push_back(cell(baseline_n));
      try {
        row.push_back(cell(discrete_w1_dimension_baseline(samplers[g], baseline_n, cfg.eta, s.derive(2))));
      } catch (const DegenerateRatioError&) {
        row.push_back("NA");
      }
    }
    return std::vector<std::vector<std::string>>{row};
  });
  for (const auto& name : cfg.generators) {
    auto keep = [&](const std::vector<std::string>& row) { return row[0] == name; };
    const auto d_hat = column(rec, 6, keep);
    add_summary(rec, name, "d_hat", d_hat);
    if (!rec.summary.empty() && rec.summary.back().group == name) {
      rec.results["median/" + name] = rec.summary.back().stats.median;
      rec.results["iqr/" + name] = rec.summary.back().stats.iqr;
    }
    rec.results["missing/" + name] = static_cast<double>(
        std::count_if(d_hat.begin(), d_hat.end(), [](double v) { return !std::isfinite(v); }));
    if (cfg.baseline) add_summary(rec, name, "baseline_d_hat", column(rec, 14, keep));
  }
  return rec;
}

RunRecord run_curve(const ExperimentConfig& cfg) {
  RunRecord rec;
  const synth::ManifoldSampler sampler(synth::ManifoldConfig::uniform_cube(cfg.dim));
  rec.csv.header = {"repeat", "n", "N", "delta", "value", "half_width", "sigma2", "C_rho", "seed"};
  std::vector<double> slopes(cfg.repeats, kNaN);
  run_slots(cfg.repeats, rec, [&](std::size_t r) {
    const SeedSpec s = root_seed(cfg).derive(r);
    const auto prof = dimension_profile(sampler, cfg.grid, cfg.N, cfg.delta, s.derive(0), s.derive(1));
    std::vector<std::vector<std::string>> rows;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
      const auto& e = prof.curve[i];
      rows.push_back({cell(r), cell(cfg.grid[i]), cell(cfg.N), cell(cfg.delta), cell(e.value),
                      cell(e.band.half_width), cell(e.sample_variance), cell(e.c_rho), cell(cfg.seed)});
      xs.push_back(static_cast<double>(cfg.grid[i]));
      ys.push_back(e.value);
    }
    if (cfg.grid.size() >= 3) slopes[r] = fit_decay_slope(xs, ys);
    return rows;
  });
  for (std::size_t n : cfg.grid)
    add_summary(rec, "n=" + std::to_string(n), "value",
                column(rec, 4, [&](const auto& row) { return row[1] == std::to_string(n); }));
  if (cfg.grid.size() >= 3) {
    add_summary(rec, "all", "slope", slopes);
    rec.results["slope_median"] = rec.summary.back().stats.median;
    rec.results["slope_target"] = -1.0 / static_cast<double>(cfg.dim);
  }
  return rec;
}

struct PreparedInstance {
  W2Instance inst;
  double d_int = kNaN;
  double eps0 = kNaN;
};

PreparedInstance prepare(const ExperimentConfig& cfg, SeedSpec s) {
  PreparedInstance p{make_instance(cfg.pair, cfg.pair_dim, cfg.full_size, s.derive(0))};
  if (cfg.d_int) {
    p.d_int = *cfg.d_int;
  } else {
    try {
      p.d_int = estimate_schedule_dimension(p.inst.x, s.derive(2));
    } catch (const DegenerateRatioError&) {
    }
  }
  p.eps0 = cfg.eps0 ? *cfg.eps0 : auto_eps0(p.inst.x, p.inst.y, s.derive(3));
  return p;
}

RunRecord run_table1(const ExperimentConfig& cfg) {
  RunRecord rec;
  rec.csv.header = {"method", "n", "d_int_used", "eps_hi", "eps_lo", "estimate", "truth",
                    "abs_error", "wall_time_ms", "seed", "repeat", "bags"};
  const DebiasOptions opts{cfg.sinkhorn, CostSpec::p2_squared()};
  run_slots(cfg.repeats, rec, [&](std::size_t r) {
    const SeedSpec s = root_seed(cfg).derive(r);
    const PreparedInstance p = prepare(cfg, s);
    std::vector<std::vector<std::string>> rows;
    for (W2Method m : cfg.methods) {
      const std::size_t bags = m == W2Method::bagged_diag_rich ? cfg.bags : 1;
      std::vector<std::string> row{to_string(m), cell(cfg.full_size), cell(p.d_int)};
      if (!std::isfinite(p.d_int)) {
        for (int k = 0; k < 3; ++k) row.push_back("NA");
        row.push_back(cell(p.inst.truth));
        row.push_back("NA");
      } else {
        const Schedule sched = make_schedule(p.d_int, p.eps0);
        const auto rep = run_w2_method(m, p.inst.x, p.inst.y, sched, bags, s.derive(1), opts);
        const double eps_lo = rep.meta.count("eps_lo") ? rep.meta.at("eps_lo") : kNaN;
        row.push_back(cell(rep.meta.at("eps_hi")));
        row.push_back(cell(eps_lo));
        row.push_back(cell(rep.value));
        row.push_back(cell(p.inst.truth));
        row.push_back(cell(std::abs(rep.value - p.inst.truth)));
      }
      row.push_back("NA");
      row.push_back(cell(cfg.seed));
      row.push_back(cell(r));
      row.push_back(cell(bags));
      rows.push_back(std::move(row));
    }
    return rows;
  });
  for (W2Method m : cfg.methods) {
    const std::string name = to_string(m);
    const auto err = column(rec, 7, [&](const auto& row) { return row[0] == name; });
    add_summary(rec, name, "abs_error", err);
    if (!rec.summary.empty() && rec.summary.back().group == name)
      rec.results["mae/" + name] = rec.summary.back().stats.mean;
  }
  return rec;
}

RunRecord run_fig2(const ExperimentConfig& cfg) {
  RunRecord rec;
  rec.csv.header = {"repeat", "d_schedule", "eps_hi", "eps_lo", "estimate", "truth", "abs_error", "seed"};
  const DebiasOptions opts{cfg.sinkhorn, CostSpec::p2_squared()};
  run_slots(cfg.repeats, rec, [&](std::size_t r) {
    const SeedSpec s = root_seed(cfg).derive(r);
    const PreparedInstance p = prepare(cfg, s);
    std::vector<std::vector<std::string>> rows;
    for (double d : cfg.schedule_dims) {
      const Schedule sched = make_schedule(d, p.eps0);
      const auto rep = diagonal_richardson(p.inst.x, p.inst.y, sched, s.derive(1), opts);
      rows.push_back({cell(r), cell(d), cell(rep.meta.at("eps_hi")), cell(rep.meta.at("eps_lo")),
                      cell(rep.value), cell(p.inst.truth), cell(std::abs(rep.value - p.inst.truth)),
                      cell(cfg.seed)});
    }
    return rows;
  });
  double best = std::numeric_limits<double>::infinity();
  for (double d : cfg.schedule_dims) {
    const std::string key = cell(d);
    const auto err = column(rec, 6, [&](const auto& row) { return row[1] == key; });
    add_summary(rec, "d=" + key, "abs_error", err);
    const double mae = rec.summary.back().stats.mean;
    rec.results["mae/d=" + key] = mae;
    if (mae < best) {
      best = mae;
      rec.results["argmin_d"] = d;
    }
  }
  return rec;
}

RunRecord run_fig3(const ExperimentConfig& cfg) {
  RunRecord rec;
  rec.csv.header = {"repetition", "run", "K", "estimate", "s_hi", "d_int_used", "seed"};
  const DebiasOptions opts{cfg.sinkhorn, CostSpec::p2_squared()};
  const std::size_t max_k = cfg.bag_counts.back();
  const std::size_t total = cfg.repeats * cfg.runs;
  // estimates[rep][run][k], s_hi[rep][run]
  std::vector<std::vector<double>> s_hi(cfg.repeats, std::vector<double>(cfg.runs, kNaN));
  std::vector<std::vector<std::vector<double>>> est(
      cfg.repeats, std::vector<std::vector<double>>(cfg.runs, std::vector<double>(cfg.bag_counts.size(), kNaN)));
  run_slots(total, rec, [&](std::size_t idx) {
    const std::size_t rep = idx / cfg.runs, run = idx % cfg.runs;
    const SeedSpec s = root_seed(cfg).derive(rep).derive(run);
    const PreparedInstance p = prepare(cfg, s);
    std::vector<std::vector<std::string>> rows;
    if (!std::isfinite(p.d_int)) {
      for (std::size_t K : cfg.bag_counts)
        rows.push_back({cell(rep), cell(run), cell(K), "NA", "NA", "NA", cell(cfg.seed)});
      return rows;
    }
    const Schedule sched = make_schedule(p.d_int, p.eps0);
    const RichardsonWeights w = richardson_weights(sched.gamma);
    const BagSolves solves = bag_divergences(p.inst.x, p.inst.y, sched, max_k, s.derive(1), opts);
    s_hi[rep][run] = solves.s_hi;
    for (std::size_t k = 0; k < cfg.bag_counts.size(); ++k) {
      const std::size_t K = cfg.bag_counts[k];
      double lo = 0.0;
      for (std::size_t b = 0; b < K; ++b) lo += solves.s_lo[b];
      lo /= static_cast<double>(K);
      const double value = richardson_combine(w, solves.s_hi, lo);
      est[rep][run][k] = value;
      rows.push_back({cell(rep), cell(run), cell(K), cell(value), cell(solves.s_hi), cell(p.d_int),
                      cell(cfg.seed)});
    }
    return rows;
  });
  std::vector<double> ks, medians;
  for (std::size_t k = 0; k < cfg.bag_counts.size(); ++k) {
    std::vector<double> overhead;
    for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
      std::vector<double> rk;
      for (std::size_t run = 0; run < cfg.runs; ++run) rk.push_back(est[rep][run][k]);
      try {
        const double v_hi = summarize(s_hi[rep]).variance;
        const double v_k = summarize(rk).variance;
        overhead.push_back(v_hi > 0.0 ? v_k / v_hi - 1.0 : kNaN);
      } catch (const std::invalid_argument&) {
        overhead.push_back(kNaN);
      }
    }
    const std::string group = "K=" + std::to_string(cfg.bag_counts[k]);
    add_summary(rec, group, "variance_overhead", overhead);
    if (!rec.summary.empty() && rec.summary.back().group == group) {
      rec.results["median_overhead/" + group] = rec.summary.back().stats.median;
      ks.push_back(static_cast<double>(cfg.bag_counts[k]));
      medians.push_back(rec.summary.back().stats.median);
    }
  }
  try {
    if (ks.size() == cfg.bag_counts.size()) rec.results["slope"] = fit_decay_slope(ks, medians);
  } catch (const std::invalid_argument& e) {
    rec.notes.push_back(std::string("slope not fitted: ") + e.what());
  }
  return rec;
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& cfg) {
  if (cfg.repeats == 0) throw ConfigError(0, "repeats must be >= 1");
  RunRecord rec;
  switch (cfg.kind) {
    case ExperimentKind::fig1_dim_benchmark: rec = run_fig1(cfg); break;
    case ExperimentKind::discr_error_curve: rec = run_curve(cfg); break;
    case ExperimentKind::table1_w2_benchmark: rec = run_table1(cfg); break;
    case ExperimentKind::fig2_d_sensitivity: rec = run_fig2(cfg); break;
    case ExperimentKind::fig3_bagging_variance: rec = run_fig3(cfg); break;
  }
  rec.kind = cfg.kind;
  rec.config_hash = cfg.hash;
  return rec;
}

namespace {

PlotSeries summary_series(const RunRecord& rec, const std::string& name, const std::string& stat,
                          const std::function<double(const std::string&, std::size_t)>& x_of) {
  PlotSeries s;
  s.name = name;
  std::size_t i = 0;
  for (const auto& line : rec.summary) {
    if (line.statistic != stat) continue;
    s.xs.push_back(x_of(line.group, i++));
    s.ys.push_back(line.stats.median);
    s.lo.push_back(line.stats.q1);
    s.hi.push_back(line.stats.q3);
  }
  return s;
}

double after_eq(const std::string& group, std::size_t) {
  return std::stod(group.substr(group.find('=') + 1));
}

std::string render_plot(const RunRecord& rec) {
  PlotSpec spec;
  std::vector<PlotSeries> series;
  auto index = [](const std::string&, std::size_t i) { return static_cast<double>(i + 1); };
  switch (rec.kind) {
    case ExperimentKind::fig1_dim_benchmark:
      spec = {"dimension estimate (median, IQR)", "generator #", "d_hat"};
      series.push_back(summary_series(rec, "d_hat", "d_hat", index));
      break;
    case ExperimentKind::discr_error_curve:
      spec = {"discretization error", "n", "OT estimate", true, true};
      series.push_back(summary_series(rec, "median", "value", after_eq));
      break;
    case ExperimentKind::table1_w2_benchmark:
      spec = {"absolute error by method", "method #", "|estimate - truth|"};
      series.push_back(summary_series(rec, "abs error", "abs_error", index));
      break;
    case ExperimentKind::fig2_d_sensitivity:
      spec = {"schedule dimension sensitivity", "d", "|estimate - truth|"};
      series.push_back(summary_series(rec, "abs error", "abs_error", after_eq));
      break;
    case ExperimentKind::fig3_bagging_variance:
      spec = {"variance overhead vs bags", "K", "Var ratio - 1", true, true};
      series.push_back(summary_series(rec, "overhead", "variance_overhead", after_eq));
      break;
  }
  return render_line_plot(spec, series);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void write_run(const RunRecord& record, const ExperimentConfig& cfg) {
  write_file(cfg.output, record.csv.to_string());
  write_file(cfg.output + ".summary.txt", record.summary_text());
  if (!cfg.plot.empty()) write_file(cfg.plot, render_plot(record));
}

}  // namespace otgeo::bench
