#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "otgeo/bench.hpp"
#include "otgeo/config.hpp"
#include "otgeo/debias.hpp"
#include "otgeo/discretization.hpp"
#include "otgeo/intrinsic_dim.hpp"
#include "otgeo/io.hpp"
#include "otgeo/sinkhorn.hpp"
#include "otgeo/synth.hpp"

using namespace otgeo;

namespace {

using Clock = std::chrono::steady_clock;

std::string cell(double v) { return std::isfinite(v) ? io::format_double(v) : "NA"; }

class CsvOut {
 public:
  explicit CsvOut(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) stream() << (i ? "," : "") << cells[i];
    stream() << '\n';
  }

 private:
  std::ofstream file_;
};

// Either a point file or a generator config.
struct Source {
  std::string input;
  std::string synth;

  void add_options(CLI::App* app) {
    auto* in = app->add_option("--input", input, "Point cloud (CSV, or .bin binary)");
    auto* sy = app->add_option("--synth", synth, "Generator config file ([manifold] section)");
    in->excludes(sy);
  }
  void require() const {
    if (input.empty() == synth.empty()) throw CLI::ValidationError("exactly one of --input / --synth is required");
  }
};

std::vector<std::size_t> permutation(std::size_t rows, SeedSpec seed) {
  std::vector<std::size_t> idx(rows);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = make_rng(seed);
  for (std::size_t i = rows; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(idx[i - 1], idx[pick(rng)]);
  }
  return idx;
}

double parse_auto(const std::string& text, const char* flag) {
  if (text == "auto") return NAN;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && v > 0.0 && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError(std::string(flag) + " must be 'auto' or a positive number");
}

// ---- discr-error ---------------------------------------------------------

struct DiscrArgs {
  Source src;
  std::size_t n = 0, N = 0;
  double delta = 0.05;
  std::optional<double> c_rho;
  std::string cost = "p1";
  std::uint64_t seed = 0;
  std::string output = "-";
  std::string weights_out;
  bool joint = false;
};

void run_discr(const DiscrArgs& a) {
  a.src.require();
  const CostSpec spec{parse_cost_kind(a.cost)};
  DiscretizationOptions opts;
  opts.delta = a.delta;
  opts.c_rho = a.c_rho;
  const SeedSpec root{a.seed, 0};

  std::optional<PointCloud> support, mc_points;
  std::optional<synth::ManifoldSampler> sampler;
  if (!a.src.input.empty()) {
    const PointCloud cloud = io::read_points(a.src.input);
    if (a.n + a.N > cloud.size())
      throw std::invalid_argument("input has " + std::to_string(cloud.size()) + " rows; need n + N = " +
                                  std::to_string(a.n + a.N));
    const auto idx = permutation(cloud.size(), root);
    const PointCloud perm = cloud.subset(std::span<const std::size_t>(idx.data(), a.n + a.N));
    support = perm.head(a.n);
    mc_points = perm.slice(a.n, a.N);
  } else {
    sampler.emplace(bench::load_manifold_config(a.src.synth));
    support = sampler->sample(a.n, root.derive(0));
  }
  const McSource mc = mc_points ? McSource::from_cloud(*mc_points)
                                : McSource::from_sampler(*sampler, root.derive(1));
  const SupportIndex index(*support, spec);
  const auto est = estimate_discretization_error(index, mc, a.N, opts);

  CsvOut out(a.output);
  out.row({"n", "N", "delta", "value", "half_width", "sigma2", "C_rho", "seed"});
  out.row({std::to_string(a.n), std::to_string(a.N), cell(a.delta), cell(est.value),
           cell(est.band.half_width), cell(est.sample_variance), cell(est.c_rho), std::to_string(a.seed)});

  if (!a.weights_out.empty()) {
    const auto w = estimate_optimal_weights(index, mc, a.N, a.delta, a.joint);
    CsvOut wout(a.weights_out);
    wout.row({"index", "weight", "count", "half_width", "delta"});
    for (std::size_t i = 0; i < w.weights.size(); ++i)
      wout.row({std::to_string(i), cell(w.weights[i]), std::to_string(w.counts[i]), cell(w.half_widths[i]),
                cell(w.delta)});
  }
}

// ---- dim ----------------------------------------------------------------

struct DimArgs {
  Source src;
  std::size_t n = 2000, N = 20000, repeats = 1;
  double eta = kDefaultEta, delta = 0.05;
  std::vector<std::size_t> grid;
  std::uint64_t seed = 0;
  std::string output = "-";
  bool timing = false;
};

void run_dim(const DimArgs& a) {
  a.src.require();
  std::optional<PointCloud> cloud;
  std::optional<synth::ManifoldSampler> sampler;
  if (!a.src.input.empty())
    cloud = io::read_points(a.src.input);
  else
    sampler.emplace(bench::load_manifold_config(a.src.synth));

  CsvOut out(a.output);
  out.row({"repeat", "n", "eta", "N", "ot_n", "ot_eta_n", "d_hat", "band_lo", "band_hi", "wall_time_ms"});
  for (std::size_t r = 0; r < a.repeats; ++r) {
    const SeedSpec s = SeedSpec{a.seed, 0}.derive(r);
    const auto t0 = Clock::now();
    auto wall = [&] {
      return a.timing ? cell(std::chrono::duration<double, std::milli>(Clock::now() - t0).count()) : "NA";
    };
    if (!a.grid.empty()) {
      const auto prof = cloud ? dimension_profile_from_cloud(*cloud, a.grid, a.N, a.delta, s)
                              : dimension_profile(*sampler, a.grid, a.N, a.delta, s.derive(0), s.derive(1));
      const std::string w = wall();
      for (std::size_t i = 0; i + 1 < a.grid.size(); ++i) {
        const auto& lo = prof.curve[i];
        const auto& hi = prof.curve[i + 1];
        const double eta = static_cast<double>(a.grid[i + 1]) / static_cast<double>(a.grid[i]);
        const double d = prof.pairwise[i] ? *prof.pairwise[i] : NAN;
        const auto band = propagate_dimension_band(lo.value, lo.band.half_width, hi.value,
                                                   hi.band.half_width, eta);
        out.row({std::to_string(r), std::to_string(a.grid[i]), cell(eta), std::to_string(a.N), cell(lo.value),
                 cell(hi.value), cell(d), cell(prof.pairwise[i] ? band.first : NAN),
                 cell(prof.pairwise[i] ? band.second : NAN), w});
      }
      continue;
    }
    try {
      const auto est = cloud ? estimate_dimension_from_cloud(*cloud, a.n, a.eta, a.N, a.delta, s)
                             : estimate_dimension(*sampler, a.n, a.eta, a.N, a.delta, s.derive(0), s.derive(1));
      out.row({std::to_string(r), std::to_string(a.n), cell(a.eta), std::to_string(a.N), cell(est.ot_n.value),
               cell(est.ot_eta_n.value), cell(est.d_hat), cell(est.band_lo), cell(est.band_hi), wall()});
      if (est.low_dimension)
        std::cerr << "warning: repeat " << r << ": d_hat <= 2, outside the estimator's regime\n";
    } catch (const DegenerateRatioError& e) {
      std::cerr << "warning: repeat " << r << ": " << e.what() << '\n';
      out.row({std::to_string(r), std::to_string(a.n), cell(a.eta), std::to_string(a.N), "NA", "NA", "NA", "NA",
               "NA", wall()});
    }
  }
}

// ---- sinkhorn -----------------------------------------------------------

struct SinkArgs {
  std::string x, y;
  double epsilon = 0.0;
  SinkhornOptions opts;
  std::string cost = "p2_squared";
  std::string output = "-";
};

void run_sinkhorn(const SinkArgs& a) {
  const CostSpec spec{parse_cost_kind(a.cost)};
  const auto mu = empirical_measure(io::read_points(a.x));
  const auto nu = empirical_measure(io::read_points(a.y));
  const auto div = sinkhorn_divergence(mu, nu, spec, a.epsilon, a.opts);
  if (!div.converged) std::cerr << "warning: at least one Sinkhorn solve did not converge\n";
  CsvOut out(a.output);
  out.row({"epsilon", "tol", "iterations", "converged", "ot_eps", "s_eps"});
  out.row({cell(a.epsilon), cell(a.opts.tol), std::to_string(div.cross.state.iterations),
           div.converged ? "1" : "0", cell(div.cross.ot_eps), cell(div.value)});
}

// ---- w2 -----------------------------------------------------------------

struct W2Args {
  std::string x, y;
  std::string pair = "gaussian_shift";
  std::size_t pair_dim = 5, full_size = 2000;
  std::vector<std::string> methods{"diag-rich"};
  std::string dint = "auto", eps0 = "auto";
  std::size_t bags = 1, repeats = 1;
  std::uint64_t seed = 0;
  SinkhornOptions opts;
  std::string output = "-";
  bool timing = false;
};

void run_w2(const W2Args& a) {
  if (a.x.empty() != a.y.empty()) throw CLI::ValidationError("--x and --y go together");
  const bool files = !a.x.empty();
  std::vector<bench::W2Method> methods;
  for (const auto& m : a.methods) methods.push_back(bench::parse_w2_method(m));
  const double dint_fixed = parse_auto(a.dint, "--dint");
  const double eps0_fixed = parse_auto(a.eps0, "--eps0");
  const DebiasOptions opts{a.opts, CostSpec::p2_squared()};

  std::optional<bench::W2Instance> fixed;
  if (files) fixed = bench::W2Instance{io::read_points(a.x), io::read_points(a.y), NAN};

  CsvOut out(a.output);
  out.row({"method", "n", "d_int_used", "eps_hi", "eps_lo", "estimate", "truth", "abs_error", "wall_time_ms",
           "seed", "repeat"});
  for (std::size_t r = 0; r < a.repeats; ++r) {
    const SeedSpec s = SeedSpec{a.seed, 0}.derive(r);
    const bench::W2Instance inst =
        files ? *fixed : bench::make_instance(bench::parse_pair_kind(a.pair), a.pair_dim, a.full_size, s.derive(0));
    double d_int = dint_fixed;
    if (std::isnan(d_int)) d_int = bench::estimate_schedule_dimension(inst.x, s.derive(2));
    const double e0 = std::isnan(eps0_fixed) ? auto_eps0(inst.x, inst.y, s.derive(3)) : eps0_fixed;
    const Schedule sched = make_schedule(d_int, e0);
    for (auto m : methods) {
      const auto t0 = Clock::now();
      const auto rep = bench::run_w2_method(m, inst.x, inst.y, sched, a.bags, s.derive(1), opts);
      const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      if (rep.has_flag("not_converged"))
        std::cerr << "warning: " << bench::to_string(m) << ": a Sinkhorn solve did not converge\n";
      if (rep.has_flag("epsilon_ge_1"))
        std::cerr << "warning: eps-rich with epsilon >= 1; sqrt(epsilon) is not larger than epsilon\n";
      const double eps_lo = rep.meta.count("eps_lo") ? rep.meta.at("eps_lo") : NAN;
      out.row({bench::to_string(m), std::to_string(inst.x.size()), cell(d_int), cell(rep.meta.at("eps_hi")),
               cell(eps_lo), cell(rep.value), cell(inst.truth), cell(std::abs(rep.value - inst.truth)),
               a.timing ? cell(ms) : "NA", std::to_string(a.seed), std::to_string(r)});
    }
  }
}

// ---- bench / generate ---------------------------------------------------

void run_bench(const std::string& path) {
  const auto cfg = bench::load_experiment_config(path);
  const auto rec = bench::run_experiment(cfg);
  bench::write_run(rec, cfg);
  std::cout << rec.summary_text();
}

struct GenArgs {
  std::string synth;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string output;
};

void run_generate(const GenArgs& a) {
  const synth::ManifoldSampler sampler(bench::load_manifold_config(a.synth));
  const PointCloud cloud = sampler.sample(a.n, SeedSpec{a.seed, 0});
  std::ofstream out(a.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + a.output);
  if (a.output.ends_with(".bin"))
    io::write_binary(out, cloud);
  else
    io::write_csv(out, cloud);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discretization error, intrinsic dimension and debiased W2 estimation.\n"
               "OTGEO_THREADS caps the number of worker threads."};
  app.require_subcommand(1);

  DiscrArgs discr;
  auto* c_discr = app.add_subcommand("discr-error", "Monte Carlo estimate of the discretization error of a support");
  discr.src.add_options(c_discr);
  c_discr->add_option("--n", discr.n, "Support size (first n points)")->required()->check(CLI::PositiveNumber);
  c_discr->add_option("--mc-n,-N", discr.N, "Monte Carlo sample size")->required()->check(CLI::Range(2, 2000000000));
  c_discr->add_option("--delta", discr.delta, "Confidence level of the band")->check(CLI::Range(1e-12, 1.0 - 1e-12));
  c_discr->add_option("--c-rho", discr.c_rho, "Override of the range constant");
  c_discr->add_option("--cost", discr.cost, "p1 or p2_squared")->check(CLI::IsMember({"p1", "p2_squared"}));
  c_discr->add_option("--seed", discr.seed, "Master seed");
  c_discr->add_option("--output,-o", discr.output, "CSV path, - for stdout");
  c_discr->add_option("--weights-out", discr.weights_out, "Also write estimated Voronoi weights here");
  c_discr->add_flag("--joint", discr.joint, "Bonferroni-split delta over the weight bands");

  DimArgs dim;
  auto* c_dim = app.add_subcommand("dim", "Two-scale intrinsic dimension estimate");
  dim.src.add_options(c_dim);
  c_dim->add_option("--n", dim.n, "Smaller support size")->check(CLI::PositiveNumber);
  c_dim->add_option("--eta", dim.eta, "Support size ratio (> 1)");
  c_dim->add_option("--mc-n,-N", dim.N, "Monte Carlo sample size")->check(CLI::Range(2, 2000000000));
  c_dim->add_option("--delta", dim.delta, "Confidence level of the band")->check(CLI::Range(1e-12, 1.0 - 1e-12));
  c_dim->add_option("--repeats", dim.repeats, "Independent repeats")->check(CLI::PositiveNumber);
  c_dim->add_option("--profile-grid", dim.grid, "Increasing support sizes; prints consecutive-pair estimates")
      ->delimiter(',');
  c_dim->add_option("--seed", dim.seed, "Master seed");
  c_dim->add_option("--output,-o", dim.output, "CSV path, - for stdout");
  c_dim->add_flag("--timing", dim.timing, "Fill wall_time_ms (otherwise NA, keeping output reproducible)");

  SinkArgs sink;
  auto* c_sink = app.add_subcommand("sinkhorn", "Entropic OT and Sinkhorn divergence between two clouds");
  c_sink->add_option("--x", sink.x, "First cloud")->required();
  c_sink->add_option("--y", sink.y, "Second cloud")->required();
  c_sink->add_option("--epsilon", sink.epsilon, "Regularization (cost units)")->required()->check(CLI::PositiveNumber);
  c_sink->add_option("--tol", sink.opts.tol, "L1 marginal violation tolerance")->check(CLI::PositiveNumber);
  c_sink->add_option("--max-iter", sink.opts.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  c_sink->add_option("--cost", sink.cost, "p1 or p2_squared")->check(CLI::IsMember({"p1", "p2_squared"}));
  c_sink->add_option("--output,-o", sink.output, "CSV path, - for stdout");

  W2Args w2;
  auto* c_w2 = app.add_subcommand("w2", "Debiased W2^2 estimation");
  c_w2->add_option("--x", w2.x, "Source cloud (size 2n)");
  c_w2->add_option("--y", w2.y, "Target cloud (size 2n)");
  c_w2->add_option("--pair", w2.pair, "Built-in pair with known W2^2 when no files are given")
      ->check(CLI::IsMember({"gaussian_shift", "brenier_mixture"}));
  c_w2->add_option("--pair-dim", w2.pair_dim, "Dimension of gaussian_shift")->check(CLI::PositiveNumber);
  c_w2->add_option("--full-size", w2.full_size, "Points per cloud (2n) for built-in pairs")->check(CLI::Range(4, 1 << 30));
  c_w2->add_option("--method", w2.methods, "base, eps-rich, diag-rich, bagged-diag-rich (repeatable)")
      ->check(CLI::IsMember({"base", "eps-rich", "diag-rich", "bagged-diag-rich"}));
  c_w2->add_option("--dint", w2.dint, "Schedule dimension: auto (estimated from the source) or a value");
  c_w2->add_option("--eps0", w2.eps0, "Schedule scale: auto (0.05 x squared diameter) or a value");
  c_w2->add_option("--bags", w2.bags, "Bags for bagged-diag-rich")->check(CLI::PositiveNumber);
  c_w2->add_option("--repeats", w2.repeats, "Repeats (fresh pair draws for built-in pairs)")->check(CLI::PositiveNumber);
  c_w2->add_option("--seed", w2.seed, "Master seed");
  c_w2->add_option("--tol", w2.opts.tol, "Sinkhorn tolerance")->check(CLI::PositiveNumber);
  c_w2->add_option("--max-iter", w2.opts.max_iter, "Sinkhorn iteration cap")->check(CLI::PositiveNumber);
  c_w2->add_option("--output,-o", w2.output, "CSV path, - for stdout");
  c_w2->add_flag("--timing", w2.timing, "Fill wall_time_ms (otherwise NA, keeping output reproducible)");

  std::string config;
  auto* c_bench = app.add_subcommand("bench", "Run an experiment config");
  c_bench->add_option("--config", config, "Experiment config file")->required();

  GenArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Sample a generator config to CSV or .bin");
  c_gen->add_option("--synth", gen.synth, "Generator config file")->required();
  c_gen->add_option("--n", gen.n, "Number of points")->check(CLI::PositiveNumber);
  c_gen->add_option("--seed", gen.seed, "Master seed");
  c_gen->add_option("--output,-o", gen.output, "Output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_discr) run_discr(discr);
    if (*c_dim) run_dim(dim);
    if (*c_sink) run_sinkhorn(sink);
    if (*c_w2) run_w2(w2);
    if (*c_bench) run_bench(config);
    if (*c_gen) run_generate(gen);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const bench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
