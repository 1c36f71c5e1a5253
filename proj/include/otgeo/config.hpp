#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "otgeo/sinkhorn.hpp"
#include "otgeo/synth.hpp"

namespace otgeo::bench {

/// Invalid configuration; `line` is 1-based (0 when not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class ExperimentKind {
  fig1_dim_benchmark,
  fig2_d_sensitivity,
  fig3_bagging_variance,
  table1_w2_benchmark,
  discr_error_curve,
};

const char* to_string(ExperimentKind kind);

enum class W2Method { base, eps_rich, diag_rich, bagged_diag_rich };

const char* to_string(W2Method method);
W2Method parse_w2_method(const std::string& text);

/// Test pairs with a closed-form W2^2:
///  gaussian_shift    N(0, I_d) vs N(1, I_d)
///  brenier_mixture   the 90/10 rank-5/rank-1 source in R^10 and its image
///                    under a fixed affine Brenier map
enum class PairKind { gaussian_shift, brenier_mixture };

const char* to_string(PairKind kind);
PairKind parse_pair_kind(const std::string& text);

/// Parsed [experiment] table plus the kind-specific keys. Keys not used by
/// the selected kind are rejected.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::discr_error_curve;
  std::size_t repeats = 0;
  std::uint64_t seed = 0;
  std::string output;
  std::string plot;  // optional SVG path

  // dimension estimation
  std::vector<std::string> generators;
  std::size_t n = 2000;
  double eta = 1.5;
  std::size_t N = 20000;
  double delta = 0.05;
  bool baseline = false;

  // discretization curve on U[0,1]^dim
  std::size_t dim = 3;
  std::vector<std::size_t> grid;

  // W2 estimation
  PairKind pair = PairKind::gaussian_shift;
  std::size_t pair_dim = 5;
  std::size_t full_size = 2000;  // 2n
  std::optional<double> d_int;   // empty: estimate from the source cloud
  std::optional<double> eps0;    // empty: 0.05 x squared pooled diameter
  std::vector<W2Method> methods;
  std::size_t bags = 1;
  std::vector<double> schedule_dims;
  std::vector<std::size_t> bag_counts;
  std::size_t runs = 20;
  SinkhornOptions sinkhorn;

  /// FNV-1a of the file content, hex.
  std::string hash;
};

ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

std::string fnv1a_hex(const std::string& text);

/// Generator description, either a named preset
///
///   [manifold]
///   preset = "lowrank_gaussian_mixture"   # or uniform_cube (with ambient_d),
///                                         # hypercube_mixture, lowrank_gaussian,
///                                         # intro_mixture, sensitivity_source
///
/// or explicit components:
///
///   [manifold]
///   kind = "hypercube_mixture"
///   ambient_d = 20
///   [[manifold.components]]
///   intrinsic_dim = 2
///   proportion = 0.8
///   offset = [...]      # optional, length ambient_d
///   scale = 1.0         # optional
synth::ManifoldConfig parse_manifold_config(const std::string& text);
synth::ManifoldConfig load_manifold_config(const std::string& path);

}  // namespace otgeo::bench
