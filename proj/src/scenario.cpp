#include "paritysim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <variant>

#include <toml.hpp>

#include "paritysim/channels.hpp"
#include "paritysim/error.hpp"
#include "paritysim/kernels.hpp"
#include "paritysim/rng.hpp"
#include "paritysim/tomography.hpp"

namespace paritysim {

namespace fs = std::filesystem;

DensityMatrix build_state(const StateSpec& spec) {
  const FockSpace space(spec.n_max);
  if (spec.kind == "vacuum") return DensityMatrix::fock(0, space);
  if (spec.kind == "fock") {
    if (spec.n > spec.n_max) throw Error(ErrorKind::ConfigError, "state.n exceeds state.n_max");
    return DensityMatrix::fock(spec.n, space);
  }
  if (spec.kind == "coherent") return DensityMatrix::pure(coherent_state(spec.alpha(), space));
  if (spec.kind == "cat-even") return DensityMatrix::pure(cat_state(spec.alpha(), +1, space));
  if (spec.kind == "cat-odd") return DensityMatrix::pure(cat_state(spec.alpha(), -1, space));
  if (spec.kind == "gamma") {
    SourceScenario source;
    source.theta = spec.theta;
    source.two_photon_contamination = spec.two_photon_contamination;
    return source_state(source, space);
  }
  throw Error(ErrorKind::ConfigError, "unknown state.kind '" + spec.kind + "'");
}

// -- schema ------------------------------------------------------------------------

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Range {
  double lo = -kInf;
  double hi = kInf;
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double x) const {
    if (std::isnan(x)) return false;
    const bool above = lo_open ? x > lo : x >= lo;
    const bool below = hi_open ? x < hi : x <= hi;
    return above && below;
  }
  std::string describe() const {
    auto num = [](double v) {
      if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
      std::ostringstream s;
      s << v;
      return s.str();
    };
    return std::string(lo_open ? "(" : "[") + num(lo) + ", " + num(hi) + (hi_open ? ")" : "]");
  }
};

using Target = std::variant<double*, int*, std::int64_t*, std::uint64_t*, bool*, std::string*,
                            std::vector<double>*>;

struct Binding {
  std::string section;
  std::string key;
  Target target;
  Range range{};
  std::vector<std::string> choices{};

  std::string name() const { return section + "." + key; }
};

Range open_closed(double lo, double hi) { return {lo, hi, true, false}; }
Range closed(double lo, double hi) { return {lo, hi, false, false}; }
Range open(double lo, double hi) { return {lo, hi, true, true}; }

std::vector<Binding> bindings(ScenarioConfig& c) {
  const double big = 1e12;
  return {
      {"detector", "t_w", &c.detector.t_w, open(0.0, kInf)},
      {"detector", "t2_star", &c.detector.t2_star, open_closed(0.0, kInf)},
      {"detector", "t1", &c.detector.t1, open_closed(0.0, kInf)},
      {"detector", "f_ro", &c.detector.f_ro, closed(0.5, 1.0)},
      {"detector", "p_e_th", &c.detector.p_e_th, {0.0, 1.0, false, true}},
      {"detector", "delta", &c.detector.delta, open(-1.0, 1.0)},
      {"detector", "eta", &c.detector.eta, open_closed(0.0, 1.0)},
      {"channels", "eta", &c.loss_eta, open_closed(0.0, 1.0)},
      {"channels", "f_mm", &c.f_mm, open_closed(0.0, 1.0)},
      {"noise", "n0", &c.noise.n0, {0.0, kInf, false, true}},
      {"grid", "half_width", &c.grid_half_width, open_closed(0.0, 20.0)},
      {"grid", "points", &c.grid_points, closed(2, 401)},
      {"state", "kind", &c.state.kind, {}, {"vacuum", "fock", "coherent", "cat-even", "cat-odd", "gamma"}},
      {"state", "n", &c.state.n, closed(0, 80)},
      {"state", "alpha_re", &c.state.alpha_re, closed(-10.0, 10.0)},
      {"state", "alpha_im", &c.state.alpha_im, closed(-10.0, 10.0)},
      {"state", "theta", &c.state.theta, closed(-4.0 * std::numbers::pi, 4.0 * std::numbers::pi)},
      {"state", "two_photon_contamination", &c.state.two_photon_contamination, closed(0.0, 0.1)},
      {"state", "n_max", &c.state.n_max, closed(2, 80)},
      {"solver", "n_max", &c.n_max, closed(1, 12)},
      {"solver", "max_iterations", &c.mle.max_iterations, closed(1, 1e8)},
      {"solver", "relative_tolerance", &c.mle.relative_tolerance, open(0.0, 1.0)},
      {"solver", "restarts", &c.mle.restarts, closed(1, 100)},
      {"solver", "kkt_tolerance", &c.mle.kkt_tolerance, open(0.0, 1.0)},
      {"solver", "seed", &c.mle.seed, closed(0, 9.2e18)},
      {"parity-train", "max_pulses", &c.parity_train.max_pulses, closed(0, 100)},
      {"parity-train", "shots", &c.parity_train.shots, closed(1, big)},
      {"wigner-map", "shots", &c.wigner_map.shots, closed(0, big)},
      {"wigner-map", "reconstruct", &c.wigner_map.reconstruct},
      {"wigner-map", "cross_check", &c.wigner_map.cross_check},
      {"theta-sweep", "theta_over_pi", &c.theta_sweep.theta_over_pi, closed(-4.0, 4.0)},
      {"theta-sweep", "shots", &c.theta_sweep.shots, closed(0, big)},
      {"theta-sweep", "two_photon_contamination", &c.theta_sweep.two_photon_contamination, closed(0.0, 0.1)},
      {"herald-cats", "alpha", &c.herald_cats.alpha, closed(-5.0, 5.0)},
      {"herald-cats", "shots", &c.herald_cats.shots, closed(0, big)},
      {"herald-cats", "vacuum_shots", &c.herald_cats.vacuum_shots, closed(kBatchCount, big)},
      {"herald-cats", "max_order", &c.herald_cats.max_order, closed(2, 7)},
      {"g2-sweep", "mean_photons", &c.g2_sweep.mean_photons, open_closed(0.0, 10.0)},
      {"g2-sweep", "shots", &c.g2_sweep.shots, closed(kBatchCount, big)},
      {"g2-sweep", "vacuum_shots", &c.g2_sweep.vacuum_shots, closed(kBatchCount, big)},
      {"g2-sweep", "ideal_detector", &c.g2_sweep.ideal_detector},
      {"moments", "shots", &c.moments.shots, closed(kBatchCount, big)},
      {"moments", "vacuum_shots", &c.moments.vacuum_shots, closed(kBatchCount, big)},
      {"moments", "max_order", &c.moments.max_order, closed(1, 7)},
      {"moments", "heralded", &c.moments.heralded},
      {"moments", "write_records", &c.moments.write_records},
  };
}

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

double as_number(const toml::node& node, const std::string& name) {
  if (const auto v = node.value_exact<double>()) return *v;
  if (const auto v = node.value_exact<std::int64_t>()) return static_cast<double>(*v);
  config_error("key '" + name + "' must be a number");
}

std::int64_t as_integer(const toml::node& node, const std::string& name) {
  if (const auto v = node.value_exact<std::int64_t>()) return *v;
  config_error("key '" + name + "' must be an integer");
}

void check_range(double x, const Binding& b) {
  if (!b.range.contains(x)) {
    std::ostringstream s;
    s << "key '" << b.name() << "' = " << x << " is outside " << b.range.describe();
    config_error(s.str());
  }
}

void assign(const Binding& b, const toml::node& node) {
  const std::string name = b.name();
  std::visit(
      [&](auto* target) {
        using T = std::remove_pointer_t<decltype(target)>;
        if constexpr (std::is_same_v<T, double>) {
          const double x = as_number(node, name);
          check_range(x, b);
          *target = x;
        } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::int64_t> ||
                             std::is_same_v<T, std::uint64_t>) {
          const std::int64_t x = as_integer(node, name);
          check_range(static_cast<double>(x), b);
          *target = static_cast<T>(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          const auto v = node.value_exact<bool>();
          if (!v) config_error("key '" + name + "' must be true or false");
          *target = *v;
        } else if constexpr (std::is_same_v<T, std::string>) {
          const auto v = node.value_exact<std::string>();
          if (!v) config_error("key '" + name + "' must be a string");
          if (std::find(b.choices.begin(), b.choices.end(), *v) == b.choices.end()) {
            config_error("key '" + name + "' has unknown value '" + *v + "'");
          }
          *target = *v;
        } else {
          const toml::array* arr = node.as_array();
          if (!arr || arr->empty()) config_error("key '" + name + "' must be a non-empty array of numbers");
          std::vector<double> values;
          for (const auto& item : *arr) {
            const double x = as_number(item, name);
            check_range(x, b);
            values.push_back(x);
          }
          *target = std::move(values);
        }
      },
      b.target);
}

std::uint64_t parse_seed(const toml::node& node) {
  if (const auto v = node.value_exact<std::int64_t>()) {
    if (*v < 0) config_error("key 'seed' must be >= 0");
    return static_cast<std::uint64_t>(*v);
  }
  if (const auto s = node.value_exact<std::string>()) {
    std::uint64_t seed = 0;
    std::istringstream in(*s);
    if (in >> seed && in.eof()) return seed;
  }
  config_error("key 'seed' must be a non-negative integer");
}

void check_consistency(ScenarioConfig& c) {
  if (std::find(kScenarioNames.begin(), kScenarioNames.end(), c.scenario) == kScenarioNames.end()) {
    config_error("key 'scenario' has unknown value '" + c.scenario + "'");
  }
  if (c.state.kind == "fock" && c.state.n > c.state.n_max) {
    config_error("key 'state.n' exceeds state.n_max");
  }
  if (c.state.kind == "cat-odd" && c.state.alpha_re == 0.0 && c.state.alpha_im == 0.0) {
    config_error("key 'state.alpha_re' must be nonzero for an odd cat");
  }
  if (c.herald_cats.alpha == 0.0) config_error("key 'herald-cats.alpha' must be nonzero");
  if (c.scenario == "herald-cats" && c.herald_cats.shots > 0 && c.herald_cats.shots < kBatchCount) {
    config_error("key 'herald-cats.shots' must be 0 or >= " + std::to_string(kBatchCount));
  }
  const std::size_t unknowns = static_cast<std::size_t>(c.n_max + 1) * (c.n_max + 1);
  if (static_cast<std::size_t>(c.grid_points) * c.grid_points < unknowns) {
    config_error("key 'grid.points' gives fewer grid points than solver unknowns");
  }
  try {
    c.detector.validate();
  } catch (const Error& e) {
    config_error(std::string("section 'detector': ") + e.what());
  }
  for (const auto& w : c.detector.warnings()) c.warnings.push_back("detector: " + w);
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream s;
    s << source << ": " << e.description() << " (line " << e.source().begin.line << ")";
    config_error(s.str());
  }

  ScenarioConfig c;
  std::vector<Binding> schema = bindings(c);
  std::set<std::string> sections;
  for (const auto& b : schema) sections.insert(b.section);
  std::set<std::string> provided;
  bool have_scenario = false;

  for (const auto& [key, node] : root) {
    const std::string k(key.str());
    if (k == "scenario") {
      const auto v = node.value_exact<std::string>();
      if (!v) config_error("key 'scenario' must be a string");
      c.scenario = *v;
      have_scenario = true;
      continue;
    }
    if (k == "seed") {
      c.seed = parse_seed(node);
      provided.insert("seed");
      continue;
    }
    const toml::table* table = node.as_table();
    if (!table || !sections.count(k)) config_error("unknown key '" + k + "'");
    for (const auto& [sub, value] : *table) {
      const std::string s(sub.str());
      const auto it = std::find_if(schema.begin(), schema.end(),
                                   [&](const Binding& b) { return b.section == k && b.key == s; });
      if (it == schema.end()) config_error("unknown key '" + k + "." + s + "'");
      assign(*it, value);
      provided.insert(it->name());
    }
  }
  if (!have_scenario) config_error("missing key 'scenario'");
  if (!provided.count("seed")) c.defaulted.push_back("seed");
  for (const auto& b : schema) {
    if (!provided.count(b.name())) c.defaulted.push_back(b.name());
  }
  check_consistency(c);
  return c;
}

ScenarioConfig parse_scenario(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot read config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path.string());
}

Json resolved_json(const ScenarioConfig& config) {
  ScenarioConfig copy = config;
  Json j{{"scenario", copy.scenario}, {"seed", copy.seed}};
  for (const auto& b : bindings(copy)) {
    std::visit([&](auto* target) { j[b.section][b.key] = *target; }, b.target);
  }
  return j;
}

std::string resolved_toml(const ScenarioConfig& config) {
  ScenarioConfig copy = config;
  toml::table root;
  root.insert("scenario", copy.scenario);
  if (copy.seed <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    root.insert("seed", static_cast<std::int64_t>(copy.seed));
  } else {
    root.insert("seed", std::to_string(copy.seed));
  }
  for (const auto& b : bindings(copy)) {
    if (!root.contains(b.section)) root.insert(b.section, toml::table{});
    toml::table& section = *root[b.section].as_table();
    std::visit(
        [&](auto* target) {
          using T = std::remove_pointer_t<decltype(target)>;
          if constexpr (std::is_same_v<T, std::vector<double>>) {
            toml::array arr;
            for (double x : *target) arr.push_back(x);
            section.insert(b.key, std::move(arr));
          } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
            section.insert(b.key, static_cast<std::int64_t>(*target));
          } else {
            section.insert(b.key, *target);
          }
        },
        b.target);
  }
  std::ostringstream out;
  out << root << '\n';
  return out.str();
}

// -- scenario runners --------------------------------------------------------------

namespace {

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) { return derived_rng(seed, tag)(); }

Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

struct RunContext {
  const ScenarioConfig& config;
  fs::path out_dir;
  std::vector<std::string> outputs;

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return out_dir / name;
  }
  Json sidecar_extra() const { return Json{{"scenario", config.scenario}, {"seed", config.seed}}; }
};

void write_density_matrix(RunContext& ctx, const std::string& name, const DensityMatrix& rho) {
  std::vector<std::vector<double>> rows;
  for (int n = 0; n < rho.dim(); ++n) {
    for (int m = 0; m < rho.dim(); ++m) {
      rows.push_back({double(n), double(m), rho(n, m).real(), rho(n, m).imag()});
    }
  }
  write_table(ctx.file(name), {"n", "m", "re", "im"}, rows, ctx.sidecar_extra());
}

Json run_parity_train(RunContext& ctx) {
  const ScenarioConfig& c = ctx.config;
  const auto shots = static_cast<std::size_t>(c.parity_train.shots);
  std::vector<std::vector<double>> rows;
  Json per_n = Json::array();
  for (int n = 0; n <= c.parity_train.max_pulses; ++n) {
    const std::uint64_t seed = sub_seed(c.seed, static_cast<std::uint64_t>(n));
    const double expected = parity_train_expected(n, c.detector.eta);
    const double binomial = parity_train_binomial_sum(n, c.detector.eta);
    const double analytic_raw = parity_train_analytic(n, c.detector);
    const ParityEstimate raw = parity_train_sample(n, c.detector, shots, seed);
    const ParityEstimate corrected = parity_train_corrected(n, c.detector, shots, seed);
    rows.push_back({double(n), expected, binomial, analytic_raw, raw.mean, raw.std_error,
                    corrected.mean, corrected.std_error});
    per_n.push_back({{"n_pulses", n},
                     {"expected", expected},
                     {"corrected", corrected.mean},
                     {"corrected_std_error", corrected.std_error},
                     {"raw", raw.mean},
                     {"raw_std_error", raw.std_error}});
  }
  write_table(ctx.file("parity_train.csv"),
              {"n_pulses", "expected", "binomial_sum", "analytic_raw", "sampled_raw",
               "sampled_raw_stderr", "corrected", "corrected_stderr"},
              rows, ctx.sidecar_extra());
  return Json{{"eta", c.detector.eta}, {"shots", c.parity_train.shots}, {"parity", per_n}};
}

Json run_wigner_map(RunContext& ctx) {
  const ScenarioConfig& c = ctx.config;
  const DensityMatrix rho = build_state(c.state);
  const std::optional<std::size_t> shots =
      c.wigner_map.shots > 0 ? std::optional<std::size_t>(c.wigner_map.shots) : std::nullopt;
  Tomogram t = synthesize_tomogram(rho, c.loss_eta, c.f_mm, c.grid(), shots, sub_seed(c.seed, 0));
  if (c.wigner_map.cross_check && c.loss_eta < 1.0) attach_cross_check(t, rho);
  write_tomogram(ctx.file("wigner_map.csv"), t, ctx.sidecar_extra());

  const auto max_it = std::max_element(t.values.begin(), t.values.end());
  const auto min_it = std::min_element(t.values.begin(), t.values.end());
  const ComplexAmplitude at_max = t.grid.point(static_cast<std::size_t>(max_it - t.values.begin()));
  Json summary{{"state", c.state.kind},
               {"points", t.values.size()},
               {"max_value", *max_it},
               {"max_at", complex_json(at_max)},
               {"min_value", *min_it},
               {"forward_model", t.forward_model}};
  if (t.cross_check) {
    summary["cross_check"] = {{"max_abs_difference", t.cross_check->max_abs_difference},
                              {"convolution_normalization", t.cross_check->convolution_normalization},
                              {"kraus_normalization", t.cross_check->kraus_normalization}};
  }
  if (c.wigner_map.reconstruct) {
    const TomographyReconstruction rec = mle_reconstruct(t, c.n_max, c.mle);
    write_density_matrix(ctx, "rho_ml.csv", rec.mle.rho);
    summary["reconstruction"] = {{"fidelity", fidelity(rec.mle.rho, rho)},
                                 {"kkt_residual", rec.mle.kkt_residual},
                                 {"iterations", rec.mle.iterations},
                                 {"objective", rec.mle.objective}};
  }
  return summary;
}

Json run_theta_sweep(RunContext& ctx) {
  const ScenarioConfig& c = ctx.config;
  ThetaSweepSettings s;
  s.eta = c.loss_eta;
  s.f_mm = c.f_mm;
  s.grid = c.grid();
  s.shots = c.theta_sweep.shots > 0 ? std::optional<std::size_t>(c.theta_sweep.shots) : std::nullopt;
  s.seed = c.seed;
  s.n_max = c.n_max;
  s.two_photon_contamination = c.theta_sweep.two_photon_contamination;
  s.mle = c.mle;
  std::vector<double> thetas;
  for (double x : c.theta_sweep.theta_over_pi) thetas.push_back(x * std::numbers::pi);
  const ThetaSweepResult result = theta_sweep_entries(thetas, s);

  std::vector<std::vector<double>> rows;
  Json entries = Json::array();
  for (std::size_t k = 0; k < result.entries.size(); ++k) {
    const ThetaSweepEntry& e = result.entries[k];
    const double ideal11 = std::pow(std::sin(0.5 * e.theta), 2);
    const double ideal01 = std::sin(0.5 * e.theta) * std::cos(0.5 * e.theta);
    rows.push_back({e.theta, c.theta_sweep.theta_over_pi[k], e.rho11, e.re_rho01, e.im_rho01,
                    e.fidelity, e.kkt_residual, ideal11, ideal01});
    entries.push_back({{"theta_over_pi", c.theta_sweep.theta_over_pi[k]},
                       {"rho11", e.rho11},
                       {"re_rho01", e.re_rho01},
                       {"fidelity", e.fidelity}});
  }
  write_table(ctx.file("theta_sweep.csv"),
              {"theta", "theta_over_pi", "rho11", "re_rho01", "im_rho01", "fidelity",
               "kkt_residual", "ideal_rho11", "ideal_re_rho01"},
              rows, ctx.sidecar_extra());
  return Json{{"phase_correction", result.phase_correction}, {"entries", entries}};
}

Json herald_json(const HeraldPair& pair, const DensityMatrix& cat_e, const DensityMatrix& cat_o,
                 std::vector<std::vector<double>>& rows, double corrected) {
  Json j;
  const HeraldResult* results[2] = {&pair.even, &pair.odd};
  const DensityMatrix* cats[2] = {&cat_e, &cat_o};
  std::optional<double> parity[2];
  for (int k = 0; k < 2; ++k) {
    const HeraldResult& r = *results[k];
    const char* name = k == 0 ? "even" : "odd";
    double f = std::nan(""), p = std::nan("");
    if (r.post_state) {
      f = fidelity(*r.post_state, *cats[k]);
      p = expectation_parity(*r.post_state);
      parity[k] = p;
    }
    rows.push_back({corrected, double(k), r.probability, f, p});
    j[name] = {{"probability", r.probability},
               {"fidelity", r.post_state ? Json(f) : Json(nullptr)},
               {"parity", r.post_state ? Json(p) : Json(nullptr)}};
  }
  j["visibility"] = parity[0] && parity[1] ? Json(*parity[0] - *parity[1]) : Json(nullptr);
  return j;
}

Json run_herald_cats(RunContext& ctx) {
  const ScenarioConfig& c = ctx.config;
  const FockSpace space(c.state.n_max);
  const ComplexAmplitude alpha(c.herald_cats.alpha, 0.0);
  const DensityMatrix rho = DensityMatrix::pure(coherent_state(alpha, space));
  const DensityMatrix cat_e = DensityMatrix::pure(cat_state(alpha, +1, space));
  const DensityMatrix cat_o = DensityMatrix::pure(cat_state(alpha, -1, space));

  std::vector<std::vector<double>> rows;
  Json summary{{"alpha", c.herald_cats.alpha}};
  summary["uncorrected"] = herald_json(herald(rho, c.detector), cat_e, cat_o, rows, 0.0);
  summary["readout_corrected"] =
      herald_json(herald_readout_corrected(rho, c.detector), cat_e, cat_o, rows, 1.0);
  write_table(ctx.file("herald.csv"), {"readout_corrected", "outcome_odd", "probability", "fidelity", "parity"},
              rows, ctx.sidecar_extra());

  if (c.herald_cats.shots > 0) {
    const auto records = simulate_heralded_heterodyne(
        rho, c.detector, c.noise, static_cast<std::size_t>(c.herald_cats.shots), sub_seed(c.seed, 1));
    const auto vacuum = simulate_heterodyne(DensityMatrix::fock(0, FockSpace(1)), c.noise,
                                            static_cast<std::size_t>(c.herald_cats.vacuum_shots),
                                            sub_seed(c.seed, 2));
    const ConditionedMoments cm = conditioned_moments(records, vacuum, 0.0,
                                                      ConfusionMatrix::readout(c.detector.f_ro),
                                                      c.herald_cats.max_order);
    write_moment_table(ctx.file("moments_even.csv"), cm.even, ctx.sidecar_extra());
    write_moment_table(ctx.file("moments_odd.csv"), cm.odd, ctx.sidecar_extra());
    Json sampled{{"shots", c.herald_cats.shots},
                 {"even_fraction", cm.even_fraction},
                 {"phase_correction", cm.phase_correction}};
    if (c.herald_cats.max_order >= 4) {
      const MleResult even = mle_from_moments(cm.even, c.n_max, c.mle);
      const MleResult odd = mle_from_moments(cm.odd, c.n_max, c.mle);
      write_density_matrix(ctx, "rho_even_ml.csv", even.rho);
      write_density_matrix(ctx, "rho_odd_ml.csv", odd.rho);
      sampled["fidelity_even"] = fidelity(even.rho, cat_e);
      sampled["fidelity_odd"] = fidelity(odd.rho, cat_o);
      sampled["visibility"] = visibility(even.rho, odd.rho);
    }
    summary["sampled"] = sampled;
  }
  return summary;
}

Json run_g2_sweep(RunContext& ctx) {
  const ScenarioConfig& c = ctx.config;
  const DetectorParams det = c.g2_sweep.ideal_detector ? DetectorParams::ideal() : c.detector;
  const ConfusionMatrix confusion =
      c.g2_sweep.ideal_detector ? ConfusionMatrix::identity() : ConfusionMatrix::readout(det.f_ro);
  const auto shots = static_cast<std::size_t>(c.g2_sweep.shots);
  const auto vacuum = simulate_heterodyne(DensityMatrix::fock(0, FockSpace(1)), c.noise,
                                          static_cast<std::size_t>(c.g2_sweep.vacuum_shots),
                                          sub_seed(c.seed, 0));
  const FockSpace space(c.state.n_max);
  std::vector<std::vector<double>> rows;
  Json points = Json::array();
  for (std::size_t k = 0; k < c.g2_sweep.mean_photons.size(); ++k) {
    const double x = c.g2_sweep.mean_photons[k];
    const DensityMatrix rho = DensityMatrix::pure(coherent_state({std::sqrt(x), 0.0}, space));
    const auto coherent = simulate_heterodyne(rho, c.noise, shots, sub_seed(c.seed, 2 * k + 1));
    const auto heralded = simulate_heralded_heterodyne(rho, det, c.noise, 2 * shots, sub_seed(c.seed, 2 * k + 2));
    const G2Estimate g_coh = g2_from_moments(moments_from_records(coherent, vacuum, 4));
    const G2Estimate g_mix = g2_from_moments(moments_from_records(heralded, vacuum, 4));
    const ConditionedMoments cm = conditioned_moments(heralded, vacuum, 0.0, confusion, 4);
    const G2Estimate g_even = g2_from_moments(cm.even);
    const G2Estimate g_odd = g2_from_moments(cm.odd);
    const double t = std::tanh(x);
    rows.push_back({x, g_coh.value, g_coh.std_error, g_mix.value, g_mix.std_error, g_even.value,
                    g_even.std_error, g_odd.value, g_odd.std_error, 1.0 / (t * t), t * t});
    points.push_back({{"mean_photons", x},
                      {"coherent", g_coh.value},
                      {"mixture", g_mix.value},
                      {"even", g_even.value},
                      {"even_std_error", g_even.std_error},
                      {"odd", g_odd.value},
                      {"odd_std_error", g_odd.std_error}});
  }
  write_table(ctx.file("g2_sweep.csv"),
              {"mean_photons", "coherent", "coherent_stderr", "mixture", "mixture_stderr", "even",
               "even_stderr", "odd", "odd_stderr", "even_analytic", "odd_analytic"},
              rows, ctx.sidecar_extra());
  return Json{{"n0", c.noise.n0}, {"shots", c.g2_sweep.shots}, {"points", points}};
}

double max_abs_imag_at_order(const MomentTable& t, int order) {
  double worst = 0.0;
  for (int n = 0; n <= order; ++n) worst = std::max(worst, std::abs(t.value(n, order - n).imag()));
  return worst;
}

Json table_summary(const MomentTable& t) {
  Json j{{"n_photons", t.value(1, 1).real()}};
  if (t.order >= 3) j["max_abs_imag_third_order"] = max_abs_imag_at_order(t, 3);
  if (t.order >= 4 && std::abs(t.value(1, 1).real()) > 1e-12) j["g2"] = g2_from_moments(t).value;
  return j;
}

Json run_moments(RunContext& ctx) {
  const ScenarioConfig& c = ctx.config;
  const DensityMatrix rho = build_state(c.state);
  const int order = c.moments.max_order;
  const auto shots = static_cast<std::size_t>(c.moments.shots);
  const auto vacuum = simulate_heterodyne(DensityMatrix::fock(0, FockSpace(1)), c.noise,
                                          static_cast<std::size_t>(c.moments.vacuum_shots),
                                          sub_seed(c.seed, 0));
  write_moment_table(ctx.file("moments_exact.csv"),
                     exact_moment_table(rho, std::min(order, c.state.n_max)), ctx.sidecar_extra());
  Json summary{{"state", c.state.kind}, {"heralded", c.moments.heralded}, {"max_order", order}};
  std::vector<HeterodyneRecord> records;
  if (c.moments.heralded) {
    records = simulate_heralded_heterodyne(rho, c.detector, c.noise, shots, sub_seed(c.seed, 1));
    const ConditionedMoments cm = conditioned_moments(
        records, vacuum, 0.0, ConfusionMatrix::readout(c.detector.f_ro), std::max(order, 2));
    write_moment_table(ctx.file("moments_even.csv"), cm.even, ctx.sidecar_extra());
    write_moment_table(ctx.file("moments_odd.csv"), cm.odd, ctx.sidecar_extra());
    summary["even"] = table_summary(cm.even);
    summary["odd"] = table_summary(cm.odd);
    summary["phase_correction"] = cm.phase_correction;
  } else {
    records = simulate_heterodyne(rho, c.noise, shots, sub_seed(c.seed, 1));
    const MomentTable t = moments_from_records(records, vacuum, order);
    write_moment_table(ctx.file("moments.csv"), t, ctx.sidecar_extra());
    summary["table"] = table_summary(t);
  }
  if (c.moments.write_records) {
    write_records(ctx.file("records.csv"), records, ctx.sidecar_extra());
    write_records(ctx.file("vacuum_records.csv"), vacuum, ctx.sidecar_extra());
  }
  return summary;
}

}  // namespace

Json run_scenario(const ScenarioConfig& config, const fs::path& out_dir, int threads) {
  if (threads > 0) set_worker_threads(threads);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  RunContext ctx{config, out_dir, {}};
  Json summary;
  const std::string& s = config.scenario;
  if (s == "parity-train") summary = run_parity_train(ctx);
  else if (s == "wigner-map") summary = run_wigner_map(ctx);
  else if (s == "theta-sweep") summary = run_theta_sweep(ctx);
  else if (s == "herald-cats") summary = run_herald_cats(ctx);
  else if (s == "g2-sweep") summary = run_g2_sweep(ctx);
  else if (s == "moments") summary = run_moments(ctx);
  else config_error("key 'scenario' has unknown value '" + s + "'");

  Json out{{"scenario", s}, {"seed", config.seed}};
  for (const auto& [k, v] : summary.items()) out[k] = v;
  if (!config.warnings.empty()) out["warnings"] = config.warnings;
  write_json(ctx.file("summary.json"), out);

  Json provenance{{"tool", "parity_sim"},
                  {"scenario", s},
                  {"seed", config.seed},
                  {"threads", worker_threads()},
                  {"outputs", ctx.outputs},
                  {"parameters", resolved_json(config)},
                  {"config_toml", resolved_toml(config)}};
  write_json(out_dir / "provenance.json", provenance);
  return out;
}

}  // namespace paritysim
