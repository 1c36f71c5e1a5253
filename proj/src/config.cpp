#include "otgeo/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace otgeo::bench {

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::fig1_dim_benchmark: return "fig1_dim_benchmark";
    case ExperimentKind::fig2_d_sensitivity: return "fig2_d_sensitivity";
    case ExperimentKind::fig3_bagging_variance: return "fig3_bagging_variance";
    case ExperimentKind::table1_w2_benchmark: return "table1_w2_benchmark";
    case ExperimentKind::discr_error_curve: return "discr_error_curve";
  }
  return "?";
}

const char* to_string(W2Method method) {
  switch (method) {
    case W2Method::base: return "base";
    case W2Method::eps_rich: return "eps-rich";
    case W2Method::diag_rich: return "diag-rich";
    case W2Method::bagged_diag_rich: return "bagged-diag-rich";
  }
  return "?";
}

W2Method parse_w2_method(const std::string& text) {
  for (W2Method m : {W2Method::base, W2Method::eps_rich, W2Method::diag_rich,
                     W2Method::bagged_diag_rich})
    if (text == to_string(m)) return m;
  throw std::invalid_argument("unknown method '" + text +
                              "' (base, eps-rich, diag-rich, bagged-diag-rich)");
}

const char* to_string(PairKind kind) {
  return kind == PairKind::gaussian_shift ? "gaussian_shift" : "brenier_mixture";
}

PairKind parse_pair_kind(const std::string& text) {
  if (text == "gaussian_shift") return PairKind::gaussian_shift;
  if (text == "brenier_mixture") return PairKind::brenier_mixture;
  throw std::invalid_argument("unknown pair '" + text + "' (gaussian_shift, brenier_mixture)");
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::size_t line_of(const toml::node& node) { return node.source().begin.line; }

ExperimentKind parse_kind(const std::string& text, std::size_t line) {
  for (ExperimentKind k :
       {ExperimentKind::fig1_dim_benchmark, ExperimentKind::fig2_d_sensitivity,
        ExperimentKind::fig3_bagging_variance, ExperimentKind::table1_w2_benchmark,
        ExperimentKind::discr_error_curve})
    if (text == to_string(k)) return k;
  throw ConfigError(line, "unknown experiment kind '" + text + "'");
}

// Typed accessors that report the offending line.
class Section {
 public:
  Section(const toml::table* table, std::string name, std::set<std::string> allowed)
      : table_(table), name_(std::move(name)) {
    if (!table_) return;
    for (auto&& [key, value] : *table_) {
      const std::string k(key.str());
      if (!allowed.count(k))
        throw ConfigError(line_of(value), "unknown key '" + k + "' in [" + name_ + "]");
    }
  }

  const toml::node* find(const std::string& key) const {
    return table_ ? table_->get(key) : nullptr;
  }

  std::string string(const std::string& key, const std::string& fallback, bool required = false) const {
    const toml::node* n = find(key);
    if (!n) return missing(key, required, fallback);
    if (auto v = n->value<std::string>()) return *v;
    throw ConfigError(line_of(*n), name_ + "." + key + " must be a string");
  }

  double real(const std::string& key, double fallback) const {
    const toml::node* n = find(key);
    if (!n) return fallback;
    return as_real(*n, key);
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback, bool required = false,
                       std::int64_t min = 0) const {
    const toml::node* n = find(key);
    if (!n) return missing(key, required, fallback);
    auto v = n->value_exact<std::int64_t>();
    if (!v) throw ConfigError(line_of(*n), name_ + "." + key + " must be an integer");
    if (*v < min)
      throw ConfigError(line_of(*n), name_ + "." + key + " must be >= " + std::to_string(min));
    return *v;
  }

  bool boolean(const std::string& key, bool fallback) const {
    const toml::node* n = find(key);
    if (!n) return fallback;
    if (auto v = n->value_exact<bool>()) return *v;
    throw ConfigError(line_of(*n), name_ + "." + key + " must be true or false");
  }

  /// Number or the string "auto" (empty optional).
  std::optional<double> real_or_auto(const std::string& key) const {
    const toml::node* n = find(key);
    if (!n) return std::nullopt;
    if (auto s = n->value<std::string>()) {
      if (*s == "auto") return std::nullopt;
      throw ConfigError(line_of(*n), name_ + "." + key + " must be a number or \"auto\"");
    }
    const double v = as_real(*n, key);
    if (!(v > 0.0)) throw ConfigError(line_of(*n), name_ + "." + key + " must be > 0");
    return v;
  }

  template <typename T, typename F>
  std::vector<T> list(const std::string& key, std::vector<T> fallback, F&& convert) const {
    const toml::node* n = find(key);
    if (!n) return fallback;
    const toml::array* arr = n->as_array();
    if (!arr || arr->empty())
      throw ConfigError(line_of(*n), name_ + "." + key + " must be a non-empty array");
    std::vector<T> out;
    for (const toml::node& item : *arr) out.push_back(convert(item));
    return out;
  }

  const std::string& name() const { return name_; }

  double as_real(const toml::node& n, const std::string& key) const {
    if (auto v = n.value<double>()) {
      if (std::isfinite(*v)) return *v;
    }
    throw ConfigError(line_of(n), name_ + "." + key + " must be a finite number");
  }

 private:
  template <typename T>
  T missing(const std::string& key, bool required, T fallback) const {
    if (required) throw ConfigError(0, "missing required key " + name_ + "." + key);
    return fallback;
  }

  const toml::table* table_;
  std::string name_;
};

std::size_t positive_size(const toml::node& n, const std::string& what) {
  auto v = n.value_exact<std::int64_t>();
  if (!v || *v < 1) throw ConfigError(line_of(n), what + " entries must be positive integers");
  return static_cast<std::size_t>(*v);
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(e.source().begin.line, std::string(e.description()));
  }

  const std::set<std::string> sections{"experiment", "dimension", "curve", "w2", "sinkhorn"};
  for (auto&& [key, value] : root) {
    if (!sections.count(std::string(key.str())))
      throw ConfigError(line_of(value), "unknown section [" + std::string(key.str()) + "]");
    if (!value.is_table())
      throw ConfigError(line_of(value), "'" + std::string(key.str()) + "' must be a section");
  }

  ExperimentConfig cfg;
  cfg.hash = fnv1a_hex(text);

  const toml::table* exp_table = root["experiment"].as_table();
  if (!exp_table) throw ConfigError(0, "missing [experiment] section");
  Section exp(exp_table, "experiment", {"kind", "repeats", "seed", "output", "plot"});
  {
    const toml::node* k = exp.find("kind");
    if (!k) throw ConfigError(line_of(*exp_table), "missing required key experiment.kind");
    cfg.kind = parse_kind(exp.string("kind", ""), line_of(*k));
  }
  if (!exp.find("repeats"))
    throw ConfigError(line_of(*exp_table), "missing required key experiment.repeats");
  cfg.repeats = static_cast<std::size_t>(exp.integer("repeats", 0, true, 1));
  cfg.seed = static_cast<std::uint64_t>(exp.integer("seed", 0, false, 0));
  cfg.output = exp.string("output", "");
  if (cfg.output.empty()) throw ConfigError(line_of(*exp_table), "missing required key experiment.output");
  cfg.plot = exp.string("plot", "");

  auto forbid = [&](const char* section) {
    if (const toml::node* n = root.get(section))
      throw ConfigError(line_of(*n), std::string("section [") + section + "] is not used by " +
                                         to_string(cfg.kind));
  };

  const bool is_w2 = cfg.kind == ExperimentKind::fig2_d_sensitivity ||
                     cfg.kind == ExperimentKind::fig3_bagging_variance ||
                     cfg.kind == ExperimentKind::table1_w2_benchmark;

  if (cfg.kind == ExperimentKind::fig1_dim_benchmark) {
    forbid("curve");
    forbid("w2");
    forbid("sinkhorn");
    Section s(root["dimension"].as_table(), "dimension",
              {"generators", "n", "eta", "N", "delta", "baseline"});
    cfg.generators = s.list<std::string>(
        "generators", {"hypercube_mixture", "lowrank_gaussian_mixture", "lowrank_gaussian"},
        [&](const toml::node& item) {
          auto v = item.value<std::string>();
          if (!v) throw ConfigError(line_of(item), "generators must be strings");
          return *v;
        });
    cfg.n = static_cast<std::size_t>(s.integer("n", 2000, false, 1));
    cfg.eta = s.real("eta", 1.5);
    if (!(cfg.eta > 1.0)) throw ConfigError(line_of(*s.find("eta")), "dimension.eta must be > 1");
    cfg.N = static_cast<std::size_t>(s.integer("N", 20000, false, 2));
    cfg.delta = s.real("delta", 0.05);
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
      throw ConfigError(line_of(*s.find("delta")), "dimension.delta must be in (0, 1)");
    cfg.baseline = s.boolean("baseline", false);
  } else if (cfg.kind == ExperimentKind::discr_error_curve) {
    forbid("dimension");
    forbid("w2");
    forbid("sinkhorn");
    Section s(root["curve"].as_table(), "curve", {"dim", "grid", "N", "delta"});
    cfg.dim = static_cast<std::size_t>(s.integer("dim", 3, false, 1));
    cfg.grid = s.list<std::size_t>("grid", {250, 500, 1000, 2000},
                                   [](const toml::node& item) { return positive_size(item, "curve.grid"); });
    for (std::size_t i = 0; i + 1 < cfg.grid.size(); ++i)
      if (cfg.grid[i + 1] <= cfg.grid[i])
        throw ConfigError(line_of(*s.find("grid")), "curve.grid must be strictly increasing");
    cfg.N = static_cast<std::size_t>(s.integer("N", 50000, false, 2));
    cfg.delta = s.real("delta", 0.05);
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
      throw ConfigError(line_of(*s.find("delta")), "curve.delta must be in (0, 1)");
  } else if (is_w2) {
    forbid("dimension");
    forbid("curve");
    Section s(root["w2"].as_table(), "w2",
              {"pair", "pair_dim", "full_size", "d_int", "eps0", "methods", "bags", "schedule_dims",
               "bag_counts", "runs"});
    if (const toml::node* n = s.find("pair")) {
      try {
        cfg.pair = parse_pair_kind(s.string("pair", ""));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(line_of(*n), e.what());
      }
    }
    cfg.pair_dim = static_cast<std::size_t>(s.integer("pair_dim", 5, false, 1));
    if (cfg.pair == PairKind::brenier_mixture && s.find("pair_dim") && cfg.pair_dim != 10)
      throw ConfigError(line_of(*s.find("pair_dim")), "brenier_mixture lives in R^10");
    if (cfg.pair == PairKind::brenier_mixture) cfg.pair_dim = 10;
    cfg.full_size = static_cast<std::size_t>(s.integer("full_size", 2000, false, 4));
    if (cfg.full_size % 2 != 0)
      throw ConfigError(line_of(*s.find("full_size")), "w2.full_size (2n) must be even");
    cfg.d_int = s.real_or_auto("d_int");
    cfg.eps0 = s.real_or_auto("eps0");
    cfg.bags = static_cast<std::size_t>(s.integer("bags", 1, false, 1));
    cfg.runs = static_cast<std::size_t>(s.integer("runs", 20, false, 2));

    auto only_for = [&](const char* key, ExperimentKind kind) {
      if (const toml::node* n = s.find(key); n && cfg.kind != kind)
        throw ConfigError(line_of(*n), std::string("w2.") + key + " is not used by " + to_string(cfg.kind));
    };
    only_for("methods", ExperimentKind::table1_w2_benchmark);
    only_for("bags", ExperimentKind::table1_w2_benchmark);
    only_for("schedule_dims", ExperimentKind::fig2_d_sensitivity);
    only_for("bag_counts", ExperimentKind::fig3_bagging_variance);
    only_for("runs", ExperimentKind::fig3_bagging_variance);

    cfg.methods = s.list<W2Method>(
        "methods",
        {W2Method::base, W2Method::eps_rich, W2Method::diag_rich, W2Method::bagged_diag_rich},
        [&](const toml::node& item) {
          auto v = item.value<std::string>();
          if (!v) throw ConfigError(line_of(item), "methods must be strings");
          try {
            return parse_w2_method(*v);
          } catch (const std::invalid_argument& e) {
            throw ConfigError(line_of(item), e.what());
          }
        });
    cfg.schedule_dims = s.list<double>("schedule_dims", {2, 3, 4, 5, 6, 7, 8, 9, 10},
                                       [&](const toml::node& item) {
                                         const double v = s.as_real(item, "schedule_dims");
                                         if (!(v > 0.0))
                                           throw ConfigError(line_of(item), "schedule_dims must be > 0");
                                         return v;
                                       });
    cfg.bag_counts = s.list<std::size_t>("bag_counts", {1, 2, 4, 8, 16}, [](const toml::node& item) {
      return positive_size(item, "w2.bag_counts");
    });
    for (std::size_t i = 0; i + 1 < cfg.bag_counts.size(); ++i)
      if (cfg.bag_counts[i + 1] <= cfg.bag_counts[i])
        throw ConfigError(line_of(*s.find("bag_counts")), "w2.bag_counts must be strictly increasing");

    Section sk(root["sinkhorn"].as_table(), "sinkhorn", {"tol", "max_iter"});
    cfg.sinkhorn.tol = sk.real("tol", 1e-6);
    if (!(cfg.sinkhorn.tol > 0.0))
      throw ConfigError(line_of(*sk.find("tol")), "sinkhorn.tol must be > 0");
    cfg.sinkhorn.max_iter = static_cast<std::size_t>(sk.integer("max_iter", 10000, false, 1));
  }
  return cfg;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(slurp(path));
}

synth::ManifoldConfig parse_manifold_config(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(e.source().begin.line, std::string(e.description()));
  }
  for (auto&& [key, value] : root)
    if (key.str() != "manifold")
      throw ConfigError(line_of(value), "unknown section [" + std::string(key.str()) + "]");
  const toml::table* table = root["manifold"].as_table();
  if (!table) throw ConfigError(0, "missing [manifold] section");
  Section m(table, "manifold", {"preset", "kind", "ambient_d", "frame_seed", "components"});

  synth::ManifoldConfig cfg;
  const toml::node* preset = m.find("preset");
  if (preset) {
    if (m.find("kind") || m.find("components"))
      throw ConfigError(line_of(*preset), "use either preset or kind/components, not both");
    const std::string name = m.string("preset", "");
    if (name == "uniform_cube") {
      if (!m.find("ambient_d")) throw ConfigError(line_of(*preset), "uniform_cube needs ambient_d");
      cfg = synth::ManifoldConfig::uniform_cube(static_cast<std::size_t>(m.integer("ambient_d", 0, true, 1)));
    } else if (name == "intro_mixture") {
      cfg = synth::ManifoldConfig::intro_mixture();
    } else if (name == "sensitivity_source") {
      cfg = synth::sensitivity_source();
    } else {
      bool found = false;
      for (auto& [n, c] : synth::dimension_benchmark_configs())
        if (n == name) {
          cfg = c;
          found = true;
        }
      if (!found) throw ConfigError(line_of(*preset), "unknown preset '" + name + "'");
    }
    if (name != "uniform_cube" && m.find("ambient_d"))
      throw ConfigError(line_of(*m.find("ambient_d")), "ambient_d is fixed by preset '" + name + "'");
  } else {
    const toml::node* kind = m.find("kind");
    if (!kind) throw ConfigError(line_of(*table), "missing manifold.kind or manifold.preset");
    try {
      cfg.kind = synth::parse_manifold_kind(m.string("kind", ""));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line_of(*kind), e.what());
    }
    if (!m.find("ambient_d")) throw ConfigError(line_of(*table), "missing manifold.ambient_d");
    cfg.ambient_d = static_cast<std::size_t>(m.integer("ambient_d", 0, true, 1));
    const toml::node* comps = m.find("components");
    const toml::array* arr = comps ? comps->as_array() : nullptr;
    if (!arr || arr->empty())
      throw ConfigError(comps ? line_of(*comps) : line_of(*table),
                        "manifold.components must be a non-empty array of tables");
    for (const toml::node& item : *arr) {
      const toml::table* t = item.as_table();
      if (!t) throw ConfigError(line_of(item), "each component must be a table");
      Section c(t, "manifold.components", {"intrinsic_dim", "proportion", "offset", "scale"});
      synth::Component comp;
      if (!c.find("intrinsic_dim")) throw ConfigError(line_of(item), "component needs intrinsic_dim");
      comp.intrinsic_dim = static_cast<std::size_t>(c.integer("intrinsic_dim", 1, true, 1));
      comp.proportion = c.real("proportion", 1.0);
      comp.scale = c.real("scale", 1.0);
      comp.offset = c.list<double>("offset", {}, [&](const toml::node& v) { return c.as_real(v, "offset"); });
      cfg.components.push_back(std::move(comp));
    }
  }
  if (m.find("frame_seed"))
    cfg.frame_seed = static_cast<std::uint64_t>(m.integer("frame_seed", 0, false, 0));
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line_of(*table), e.what());
  }
  return cfg;
}

synth::ManifoldConfig load_manifold_config(const std::string& path) {
  return parse_manifold_config(slurp(path));
}

}  // namespace otgeo::bench
