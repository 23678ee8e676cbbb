#pragma once

// Command-line scenarios: each reproduces one simulated quantity as a
// machine-readable table (CSV or JSON) with a reproducibility header,
// plus optional SVG plots.  cli_main() wires argv to run_scenario().

#include "spinpart/angular.hpp"
#include "spinpart/dynamics.hpp"
#include "spinpart/grid.hpp"
#include "spinpart/io.hpp"
#include "spinpart/nonclassical.hpp"
#include "spinpart/partition.hpp"
#include "spinpart/states.hpp"
#include "spinpart/tomography.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spinpart {
namespace cli {

using angular::AngularMomentum;
using angular::Direction;
using angular::SpinState;
using io::json;

// ---------------------------------------------------------------------------
// Config plumbing
// ---------------------------------------------------------------------------

inline void deep_merge(json& base, const json& overlay) {
  if (!overlay.is_object() || !base.is_object()) {
    base = overlay;
    return;
  }
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object())
      deep_merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

// Angles may be plain radians or strings like "pi", "2pi", "0.5pi".
inline double parse_angle(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw std::domain_error("config: angle must be a number or pi-string");
  std::string s = v.get<std::string>();
  double sign = 1.0;
  if (!s.empty() && s[0] == '-') {
    sign = -1.0;
    s = s.substr(1);
  }
  const size_t pos = s.find("pi");
  if (pos == std::string::npos) return sign * io::parse_quantity(s);
  if (pos + 2 != s.size())
    throw std::domain_error("config: cannot parse angle '" + v.get<std::string>() + "'");
  const std::string coef = s.substr(0, pos);
  return sign * (coef.empty() ? 1.0 : std::stod(coef)) * angular::pi;
}

inline double angle_of(const json& config, const std::string& key, double fallback) {
  if (!config.contains(key)) return fallback;
  return parse_angle(config.at(key));
}

// "start:end:count" with pi-expressions, e.g. "0:pi:25".
inline std::array<double, 3> parse_grid_spec(const std::string& text) {
  const size_t c1 = text.find(':');
  const size_t c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::domain_error("grid spec must be start:end:count, got '" + text + "'");
  const double a = parse_angle(json(text.substr(0, c1)));
  const double b = parse_angle(json(text.substr(c1 + 1, c2 - c1 - 1)));
  const int n = std::stoi(text.substr(c2 + 1));
  if (n < 2) throw std::domain_error("grid spec needs at least 2 points");
  return {a, b, double(n)};
}

inline std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw std::domain_error("linspace: need at least one point");
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = a + (b - a) * i / double(n - 1);
  v.front() = a;
  if (n > 1) v.back() = b;  // pin the endpoint against round-off
  return v;
}

inline SpinState state_from_config(const AngularMomentum& j, const json& spec) {
  const std::string name = spec.value("name", "coherent");
  if (name == "dicke") return states::dicke(j, spec.value("two_m", -j.two_j));
  if (name == "w") return states::dicke(j, -j.two_j + 2);
  if (name == "coherent")
    return states::coherent(
        j, Direction(angle_of(spec, "theta", angular::pi), angle_of(spec, "phi", 0.0)));
  if (name == "cat") return states::cat_state(j, angle_of(spec, "alpha", 0.0));
  if (name == "mixed") return states::maximally_mixed(j);
  if (name == "amplitudes") {
    const auto& re = spec.at("re");
    Vector amp = Vector::Zero(j.dim());
    if (int(re.size()) != j.dim())
      throw std::domain_error("state amplitudes must have length " + std::to_string(j.dim()));
    for (int i = 0; i < j.dim(); ++i) {
      const double im_part =
          spec.contains("im") ? spec.at("im").at(size_t(i)).get<double>() : 0.0;
      amp(i) = cd(re.at(size_t(i)).get<double>(), im_part);
    }
    return states::superposition(j, amp);
  }
  throw std::domain_error("unknown state name '" + name + "'");
}

inline dynamics::DrivePolarization polarization_from_name(const std::string& name) {
  if (name == "pi" || name == "z") return dynamics::pol_pi();
  if (name == "x") return dynamics::pol_x();
  if (name == "sigma-" || name == "sigma_minus") return dynamics::pol_sigma_minus();
  if (name == "sigma+" || name == "sigma_plus") return dynamics::pol_sigma_plus();
  throw std::domain_error("unknown polarization '" + name + "' (use pi, x, sigma-, sigma+)");
}

// ---------------------------------------------------------------------------
// Run context and writers
// ---------------------------------------------------------------------------

struct RunContext {
  std::string scenario;
  json config;       // effective physics config (hashed + embedded in outputs)
  std::string output_dir = ".";
  std::string format = "csv";
  bool plot = false;

  io::Metadata metadata(const std::string& reproduces) const {
    io::Metadata meta;
    meta.scenario = scenario;
    meta.reproduces = reproduces;
    meta.config_dump = config.dump();
    if (config.contains("seed")) meta.seed = config.at("seed").get<std::uint64_t>();
    return meta;
  }
  std::string path_for(const std::string& filename) const {
    return (std::filesystem::path(output_dir) / filename).string();
  }
};

// Writes the main table of a scenario in the selected format.
inline std::string write_table(const RunContext& ctx, const io::Metadata& meta,
                               const std::string& basename,
                               const std::vector<std::string>& columns,
                               const std::vector<std::vector<double>>& rows) {
  if (ctx.format == "csv") {
    const std::string path = ctx.path_for(basename + ".csv");
    io::write_csv(path, meta, columns, rows);
    return path;
  }
  if (ctx.format == "json") {
    json doc;
    doc["metadata"] = io::metadata_json(meta);
    doc["columns"] = columns;
    json data = json::array();
    for (const auto& row : rows) data.push_back(row);
    doc["rows"] = std::move(data);
    const std::string path = ctx.path_for(basename + ".json");
    io::write_json(path, doc);
    return path;
  }
  throw std::domain_error("unknown output format '" + ctx.format + "' (use csv or json)");
}

inline std::string write_summary(const RunContext& ctx, const io::Metadata& meta,
                                 const std::string& basename, json body) {
  body["metadata"] = io::metadata_json(meta);
  const std::string path = ctx.path_for(basename + ".json");
  io::write_json(path, body);
  return path;
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

using FileList = std::vector<std::string>;

// --- qm-table: pair-excitation probability per Dicke level -----------------

inline json defaults_qm_table() { return json{{"two_j", 16}}; }

inline FileList run_qm_table(const RunContext& ctx) {
  const AngularMomentum j(ctx.config.at("two_j").get<int>());
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < j.dim(); ++i) {
    const int two_m = j.two_m_at(i);
    rows.push_back({0.5 * two_m, partition::q_dicke(j, two_m)});
  }
  const auto meta = ctx.metadata("pair-excitation-probability-table");
  FileList files{write_table(ctx, meta, "qm_table", {"m", "q_m"}, rows)};
  if (ctx.plot) {
    io::PlotSeries s{"q_m", {}, {}};
    for (const auto& r : rows) {
      s.x.push_back(r[0]);
      s.y.push_back(r[1]);
    }
    const std::string path = ctx.path_for("qm_table.svg");
    io::write_svg_plot(path, "pair excitation probability", "m", "q_m", {s});
    files.push_back(path);
  }
  return files;
}

// --- husimi: pair Husimi function along a theta scan ------------------------

inline json defaults_husimi() {
  return json{{"two_j", 16},
              {"state", {{"name", "coherent"}, {"theta", "pi"}, {"phi", 0.0}}},
              {"theta_start", 0.0},
              {"theta_end", "pi"},
              {"theta_points", 101},
              {"phi", 0.0}};
}

inline FileList run_husimi(const RunContext& ctx) {
  const AngularMomentum j(ctx.config.at("two_j").get<int>());
  const SpinState state = state_from_config(j, ctx.config.at("state"));
  const double phi = angle_of(ctx.config, "phi", 0.0);
  const auto thetas = linspace(angle_of(ctx.config, "theta_start", 0.0),
                               angle_of(ctx.config, "theta_end", angular::pi),
                               ctx.config.at("theta_points").get<int>());
  std::vector<std::vector<double>> rows;
  for (double theta : thetas)
    rows.push_back({theta, phi, partition::pair_husimi(state, Direction(theta, phi))});
  const auto meta = ctx.metadata("pair-husimi-scan");
  FileList files{write_table(ctx, meta, "husimi", {"theta_rad", "phi_rad", "q_value"}, rows)};
  if (ctx.plot) {
    io::PlotSeries s{"q_pair", {}, {}};
    for (const auto& r : rows) {
      s.x.push_back(r[0]);
      s.y.push_back(r[2]);
    }
    const std::string path = ctx.path_for("husimi.svg");
    io::write_svg_plot(path, "pair Husimi function", "theta (rad)", "Q_pair", {s});
    files.push_back(path);
  }
  return files;
}

// --- cdist: concurrence distribution C_n and its sphere maximum -------------

inline json defaults_cdist() {
  return json{{"two_j", 16},        {"state", {{"name", "w"}}}, {"theta_start", 0.0},
              {"theta_end", "pi"},  {"theta_points", 181},      {"phi", 0.0},
              {"lattice_nodes", 512}};
}

inline FileList run_cdist(const RunContext& ctx) {
  const AngularMomentum j(ctx.config.at("two_j").get<int>());
  const SpinState state = state_from_config(j, ctx.config.at("state"));
  const double phi = angle_of(ctx.config, "phi", 0.0);
  const auto thetas = linspace(angle_of(ctx.config, "theta_start", 0.0),
                               angle_of(ctx.config, "theta_end", angular::pi),
                               ctx.config.at("theta_points").get<int>());
  std::vector<std::vector<double>> rows;
  for (double theta : thetas)
    rows.push_back({theta, phi, nonclassical::c_distribution(state, Direction(theta, phi))});
  const auto bound =
      nonclassical::concurrence_lower_bound(state, ctx.config.at("lattice_nodes").get<int>());
  const auto meta = ctx.metadata("pair-concurrence-distribution");
  FileList files{write_table(ctx, meta, "cdist", {"theta_rad", "phi_rad", "c_value"}, rows)};
  json summary;
  summary["concurrence_lower_bound"] = bound.value;
  summary["argmax"] = {{"theta_rad", bound.argmax.theta}, {"phi_rad", bound.argmax.phi}};
  files.push_back(write_summary(ctx, meta, "cdist_summary", std::move(summary)));
  if (ctx.plot) {
    io::PlotSeries s{"c_n", {}, {}};
    for (const auto& r : rows) {
      s.x.push_back(r[0]);
      s.y.push_back(r[2]);
    }
    const std::string path = ctx.path_for("cdist.svg");
    io::write_svg_plot(path, "concurrence distribution", "theta (rad)", "C_n", {s});
    files.push_back(path);
  }
  return files;
}

// --- squeeze-scan: twisting evolution of the squeezing minimum --------------

inline json defaults_squeeze_scan() {
  return json{{"two_j", 16},
              {"state", {{"name", "coherent"}, {"theta", "pi"}, {"phi", 0.0}}},
              {"chi", "2pi*32.1kHz"},
              {"larmor", "-2pi*130.3kHz"},
              {"t_start", "0ns"},
              {"t_end", "1400ns"},
              {"t_points", 281}};
}

inline FileList run_squeeze_scan(const RunContext& ctx) {
  const AngularMomentum j(ctx.config.at("two_j").get<int>());
  const SpinState initial = state_from_config(j, ctx.config.at("state"));
  const double chi = io::quantity(ctx.config, "chi");
  const double larmor = io::quantity(ctx.config, "larmor");
  const auto times = linspace(io::quantity(ctx.config, "t_start"),
                              io::quantity(ctx.config, "t_end"),
                              ctx.config.at("t_points").get<int>());

  const auto evaluate = [&](double t) {
    const SpinState evolved = states::one_axis_twisting(initial, {chi, larmor, t});
    const auto minimum = nonclassical::min_equatorial_uncertainty(evolved);
    const double wootters =
        nonclassical::wootters_concurrence(partition::reduced_pair_state(evolved));
    const double eq_c = nonclassical::concurrence_from_squeezing(minimum.delta_j_min, j);
    return std::tuple{minimum, wootters, eq_c};
  };

  std::vector<std::vector<double>> rows;
  double best_t = times.front(), best_width = 1e300;
  for (double t : times) {
    const auto [minimum, wootters, eq_c] = evaluate(t);
    rows.push_back({t * 1e9, minimum.delta_j_min, minimum.phi_min, wootters, eq_c});
    if (minimum.delta_j_min < best_width) {
      best_width = minimum.delta_j_min;
      best_t = t;
    }
  }
  // Refine the optimum in t around the best grid point.
  const double dt = times.size() > 1 ? times[1] - times[0] : 1e-9;
  const auto [t_opt, neg_width] = grid::maximize_scalar(
      [&](double t) { return -std::get<0>(evaluate(t)).delta_j_min; },
      std::max(0.0, best_t - dt), best_t + dt, 1e-12);
  const auto [minimum_opt, wootters_opt, eq_c_opt] = evaluate(t_opt);

  const auto meta = ctx.metadata("twisting-squeezing-scan");
  FileList files{write_table(
      ctx, meta, "squeeze_scan",
      {"t_ns", "delta_j_min", "phi_min_rad", "pair_concurrence", "squeezing_concurrence"}, rows)};
  json summary;
  summary["optimum"] = {{"t_ns", t_opt * 1e9},
                        {"delta_j_min", -neg_width},
                        {"phi_min_rad", minimum_opt.phi_min},
                        {"pair_concurrence", wootters_opt},
                        {"squeezing_concurrence", eq_c_opt}};
  files.push_back(write_summary(ctx, meta, "squeeze_scan_summary", std::move(summary)));
  if (ctx.plot) {
    io::PlotSeries s{"delta_j_min", {}, {}};
    for (const auto& r : rows) {
      s.x.push_back(r[0]);
      s.y.push_back(r[1]);
    }
    const std::string path = ctx.path_for("squeeze_scan.svg");
    io::write_svg_plot(path, "squeezing minimum vs twisting time", "t (ns)", "delta J_min", {s});
    files.push_back(path);
  }
  return files;
}

// --- cat-fringes: parity / sign fringes and their Fourier content -----------

inline json defaults_cat_fringes() {
  return json{{"two_j", 16},
              {"state", {{"name", "cat"}, {"alpha", 0.0}}},
              {"phi_points", 128},
              {"echo", {{"chi", "2pi*1.25MHz"}, {"larmor", 0.0}}}};
}

inline FileList run_cat_fringes(const RunContext& ctx) {
  const AngularMomentum j(ctx.config.at("two_j").get<int>());
  if (j.two_j % 2 != 0) throw std::domain_error("cat-fringes: needs integer J");
  const SpinState state = state_from_config(j, ctx.config.at("state"));
  const json& echo_cfg = ctx.config.at("echo");
  const double chi = io::quantity(echo_cfg, "chi");
  states::OatParams echo{chi, io::quantity(echo_cfg, "larmor"), 0.0};
  echo.duration = echo_cfg.contains("duration") ? io::quantity(echo_cfg, "duration")
                                                : angular::pi / (2.0 * chi);

  const int n_phi = ctx.config.at("phi_points").get<int>();
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<double, double>> parity_samples, sigma_samples;
  for (int i = 0; i < n_phi; ++i) {
    const double phi = 2.0 * angular::pi * i / double(n_phi);
    const double parity = nonclassical::parity_expectation(state, phi);
    const double sigma_eq = nonclassical::sign_expectation(state, phi);
    const double sigma_echo = nonclassical::sign_expectation(state, phi, echo);
    rows.push_back({phi, parity, sigma_eq, sigma_echo});
    parity_samples.emplace_back(phi, parity);
    sigma_samples.emplace_back(phi, sigma_echo);
  }
  const int order = j.two_j;  // fit up to the 2J harmonic
  const auto parity_fit = nonclassical::fourier_components(parity_samples, order);
  const auto sigma_fit = nonclassical::fourier_components(sigma_samples, order);
  const double pi_minus = angular::population(state, -j.two_j);
  const double pi_plus = angular::population(state, j.two_j);
  const double coherence = std::abs(angular::coherence(state, -j.two_j, j.two_j));

  const auto meta = ctx.metadata("cat-parity-fringes");
  FileList files{write_table(ctx, meta, "cat_fringes",
                             {"phi_rad", "parity", "sigma_equatorial", "sigma_echo"}, rows)};
  json summary;
  summary["pi_minus_j"] = pi_minus;
  summary["pi_plus_j"] = pi_plus;
  summary["coherence_abs"] = coherence;
  summary["parity_amplitude_2j"] = parity_fit.amplitude(order);
  summary["sigma_echo_amplitude_2j"] = sigma_fit.amplitude(order);
  summary["cat_overlap_bound"] =
      nonclassical::cat_overlap_bound(pi_minus, pi_plus, parity_fit.amplitude(order));
  files.push_back(write_summary(ctx, meta, "cat_fringes_summary", std::move(summary)));
  if (ctx.plot) {
    io::PlotSeries p{"parity", {}, {}}, s{"sigma_echo", {}, {}};
    for (const auto& r : rows) {
      p.x.push_back(r[0]);
      p.y.push_back(r[1]);
      s.x.push_back(r[0]);
      s.y.push_back(r[3]);
    }
    const std::string path = ctx.path_for("cat_fringes.svg");
    io::write_svg_plot(path, "cat fringes", "phi (rad)", "signal", {p, s});
    files.push_back(path);
  }
  return files;
}

// --- entropy-partition: min-entropies of the (2J-2)|2 partition -------------

inline json defaults_entropy_partition() {
  return json{{"two_j", 16}, {"states", json::array({"cat", "w", "mixed"})}};
}

inline FileList run_entropy_partition(const RunContext& ctx) {
  const AngularMomentum j(ctx.config.at("two_j").get<int>());
  json table = json::object();
  for (const auto& name : ctx.config.at("states")) {
    const SpinState state = state_from_config(j, json{{"name", name.get<std::string>()}});
    const double s_global = nonclassical::min_entropy(state);
    const double s_pair = nonclassical::min_entropy(partition::reduced_pair_state(state));
    table[name.get<std::string>()] = {{"s_min_global", s_global},
                                      {"s_min_pair", s_pair},
                                      {"s_min_conditional", s_global - s_pair}};
  }
  const auto meta = ctx.metadata("conditional-min-entropy-partition");
  json summary;
  summary["entropies"] = std::move(table);
  return {write_summary(ctx, meta, "entropy_partition", std::move(summary))};
}

// --- tomography: fit the pair state from Husimi samples ---------------------

inline json defaults_tomography() {
  return json{{"two_j", 16}, {"state", {{"name", "w"}}},       {"nodes", 50},
              {"shots", 0},  {"seed", std::uint64_t(12345)},   {"clip", false}};
}

inline FileList run_tomography(const RunContext& ctx) {
  std::vector<tomography::HusimiSample> samples;
  FileList files;
  const auto meta = ctx.metadata("pair-state-reconstruction");
  if (ctx.config.contains("input") && !ctx.config.at("input").is_null()) {
    samples = tomography::read_husimi_samples(ctx.config.at("input").get<std::string>());
  } else {
    const AngularMomentum j(ctx.config.at("two_j").get<int>());
    const SpinState state = state_from_config(j, ctx.config.at("state"));
    const long shots = ctx.config.at("shots").get<long>();
    DeterministicRng rng(ctx.config.at("seed").get<std::uint64_t>());
    std::vector<std::vector<double>> sample_rows;
    for (const auto& n : grid::fibonacci_lattice(ctx.config.at("nodes").get<int>())) {
      double q = partition::pair_husimi(state, n);
      if (shots > 0) {
        // Finite-statistics emulation: Bernoulli estimate of the Husimi value.
        long hits = 0;
        for (long s = 0; s < shots; ++s)
          if (rng.uniform() < q) ++hits;
        q = double(hits) / double(shots);
      }
      samples.push_back({n, q, 1.0});
      sample_rows.push_back({n.theta, n.phi, q});
    }
    files.push_back(write_table(ctx, meta, "tomography_samples",
                                {"theta_rad", "phi_rad", "q_value"}, sample_rows));
  }

  const auto fit = tomography::fit_husimi(samples);
  const auto rec = tomography::reconstruct_pair_state(fit.coefficients);
  json doc;
  doc["matrix_basis"] = "pair components (+1, 0, -1)";
  doc["matrix"] = io::matrix_to_json(rec.matrix);
  doc["eigenvalues"] = {rec.eigenvalues(0), rec.eigenvalues(1), rec.eigenvalues(2)};
  doc["physical"] = rec.physical;
  doc["diagnostics"] = {{"residual_norm", fit.residual_norm},
                        {"condition_number", fit.condition_number},
                        {"samples", samples.size()}};
  json lam = json::object();
  for (int m = -1; m <= 1; ++m)
    lam["lambda_1_" + std::to_string(m)] = {fit.coefficients.lambda(1, m).real(),
                                            fit.coefficients.lambda(1, m).imag()};
  for (int m = -2; m <= 2; ++m)
    lam["lambda_2_" + std::to_string(m)] = {fit.coefficients.lambda(2, m).real(),
                                            fit.coefficients.lambda(2, m).imag()};
  doc["coefficients"] = std::move(lam);
  if (ctx.config.value("clip", false)) {
    const auto clipped = rec.clipped();
    doc["clipped_matrix"] = io::matrix_to_json(clipped.matrix);
    doc["clipped_min_entropy"] = nonclassical::min_entropy(clipped);
  }
  files.push_back(write_summary(ctx, meta, "tomography", std::move(doc)));
  return files;
}

// --- decay scenarios ---------------------------------------------------------

inline json defaults_decay_w() {
  return json{{"two_j", 16}, {"excited", {{"name", "dicke"}, {"two_m", -16}}}};
}

inline FileList run_decay_w(const RunContext& ctx) {
  const AngularMomentum j(ctx.config.at("two_j").get<int>());
  const AngularMomentum j_exc(j.two_j + 2);
  const auto sys = dynamics::transition_system(j, j_exc, 1.0);
  const SpinState excited = state_from_config(j_exc, ctx.config.at("excited"));
  const SpinState ground = dynamics::spontaneous_emission_map(sys, excited);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < j.dim(); ++i)
    rows.push_back({0.5 * j.two_m_at(i), ground.matrix(i, i).real()});
  const auto meta = ctx.metadata("decay-branching-single-excitation");
  FileList files{write_table(ctx, meta, "decay_w", {"m", "population"}, rows)};
  if (ctx.plot) {
    io::PlotSeries s{"population", {}, {}};
    for (const auto& r : rows) {
      s.x.push_back(r[0]);
      s.y.push_back(r[1]);
    }
    const std::string path = ctx.path_for("decay_w.svg");
    io::write_svg_plot(path, "post-decay populations", "m", "population", {s});
    files.push_back(path);
  }
  return files;
}

namespace detail {

inline json decayed_cat_summary(int two_j, double alpha) {
  const AngularMomentum j(two_j), j_exc(two_j + 2);
  const auto sys = dynamics::transition_system(j, j_exc, 1.0);
  const SpinState excited = states::cat_state(j_exc, alpha);
  const SpinState ground = dynamics::spontaneous_emission_map(sys, excited);
  json out;
  json pops = json::object();
  for (int i = 0; i < j.dim(); ++i) {
    const double p = ground.matrix(i, i).real();
    if (p > 1e-15) pops[std::to_string(j.two_m_at(i) / 2)] = p;
  }
  out["populations"] = std::move(pops);
  const double coh = std::abs(angular::coherence(ground, -j.two_j, j.two_j));
  out["coherence_abs"] = coh;
  out["retention_ratio"] = coh / 0.5;
  return out;
}

}  // namespace detail

inline json defaults_decay_cat() { return json{{"two_j", 16}, {"alpha", 0.0}}; }

// Stretched-state cat on the excited manifold: which-path decay kills the
// ground coherence exactly.
inline FileList run_decay_cat(const RunContext& ctx) {
  const auto meta = ctx.metadata("decay-which-path-cat");
  json summary = detail::decayed_cat_summary(ctx.config.at("two_j").get<int>(),
                                             angle_of(ctx.config, "alpha", 0.0));
  return {write_summary(ctx, meta, "decay_cat", std::move(summary))};
}

inline json defaults_decay_psi2() { return json{{"two_j", 16}, {"alpha", 0.0}}; }

// Interior superposition (|J', -J> + |J', +J>)/sqrt(2): the pi decay channel
// carries no which-path information, so 1/(J+1) of the coherence survives.
inline FileList run_decay_psi2(const RunContext& ctx) {
  const int two_j = ctx.config.at("two_j").get<int>();
  const AngularMomentum j(two_j), j_exc(two_j + 2);
  const auto sys = dynamics::transition_system(j, j_exc, 1.0);
  Vector amp = Vector::Zero(j_exc.dim());
  amp(j_exc.index_of(-two_j)) = 1.0 / std::sqrt(2.0);
  amp(j_exc.index_of(two_j)) =
      std::exp(cd(0.0, angle_of(ctx.config, "alpha", 0.0))) / std::sqrt(2.0);
  const SpinState excited = states::superposition(j_exc, amp);
  const SpinState ground = dynamics::spontaneous_emission_map(sys, excited);
  json summary;
  json pops = json::object();
  for (int i = 0; i < j.dim(); ++i) {
    const double p = ground.matrix(i, i).real();
    if (p > 1e-15) pops[std::to_string(j.two_m_at(i) / 2)] = p;
  }
  summary["populations"] = std::move(pops);
  const double coh = std::abs(angular::coherence(ground, -j.two_j, j.two_j));
  summary["coherence_abs"] = coh;
  summary["retention_ratio"] = coh / 0.5;
  const auto meta = ctx.metadata("decay-coherence-retention");
  return {write_summary(ctx, meta, "decay_psi2", std::move(summary))};
}

// --- rabi-lindblad: driven pulse with spontaneous emission ------------------

inline json defaults_rabi_lindblad() {
  return json{{"two_j", 16},
              {"state", {{"name", "dicke"}, {"two_m", -16}}},
              {"polarization", "pi"},
              {"area", "pi"},
              {"t_pulse", "62ns"},
              {"tau_exc", "1.2us"},
              {"detuning", 0.0},
              {"trajectory_points", 63},
              {"target_two_m", -16}};
}

inline FileList run_rabi_lindblad(const RunContext& ctx) {
  const AngularMomentum j(ctx.config.at("two_j").get<int>());
  const AngularMomentum j_exc(j.two_j + 2);
  const double tau = io::quantity(ctx.config, "tau_exc");
  const auto sys = dynamics::transition_system(j, j_exc, 1.0 / tau);
  const SpinState ground = state_from_config(j, ctx.config.at("state"));
  const auto pol = polarization_from_name(ctx.config.at("polarization").get<std::string>());
  const double area = angle_of(ctx.config, "area", angular::pi);
  const double t_pulse = io::quantity(ctx.config, "t_pulse");
  const double detuning = io::quantity(ctx.config, "detuning");

  // Rabi frequency calibrated so the dominant CG-weighted transition of the
  // initial state accumulates the requested area over the pulse.
  const double weight =
      dynamics::detail::dominant_coupling_weight(sys.drive_op(pol), ground);
  if (weight < 1e-12)
    throw std::domain_error("rabi-lindblad: initial state is not coupled by this polarization");
  const double rabi = area / (weight * t_pulse);

  const int points = ctx.config.at("trajectory_points").get<int>();
  const int target = j_exc.index_of(ctx.config.at("target_two_m").get<int>());
  dynamics::JointState joint = dynamics::joint_from_ground(sys, ground);
  std::vector<std::vector<double>> rows;
  rows.push_back({0.0, 1.0, 0.0, 0.0});
  for (int i = 1; i <= points; ++i) {
    const double t_prev = t_pulse * (i - 1) / double(points);
    const double t_now = t_pulse * i / double(points);
    joint = dynamics::lindblad_evolve(sys, joint, pol, rabi, detuning, t_now - t_prev);
    const Matrix exc = joint.excited_block();
    rows.push_back({t_now * 1e9, joint.ground_population(), joint.excited_population(),
                    exc(target, target).real()});
  }
  const auto meta = ctx.metadata("rabi-pulse-master-equation");
  FileList files{write_table(ctx, meta, "rabi_lindblad",
                             {"t_ns", "p_ground", "p_excited", "target_fidelity"}, rows)};
  json summary;
  summary["rabi_rad_per_s"] = rabi;
  summary["dominant_coupling"] = weight;
  summary["final"] = {{"p_ground", rows.back()[1]},
                      {"p_excited", rows.back()[2]},
                      {"target_fidelity", rows.back()[3]}};
  files.push_back(write_summary(ctx, meta, "rabi_lindblad_summary", std::move(summary)));
  if (ctx.plot) {
    io::PlotSeries pg{"p_ground", {}, {}}, pe{"p_excited", {}, {}}, f{"target_fidelity", {}, {}};
    for (const auto& r : rows) {
      pg.x.push_back(r[0]);
      pg.y.push_back(r[1]);
      pe.x.push_back(r[0]);
      pe.y.push_back(r[2]);
      f.x.push_back(r[0]);
      f.y.push_back(r[3]);
    }
    const std::string path = ctx.path_for("rabi_lindblad.svg");
    io::write_svg_plot(path, "driven pulse with decay", "t (ns)", "population", {pg, pe, f});
    files.push_back(path);
  }
  return files;
}

// --- two-pi-coherence: closed-loop pulse coherence retention ----------------

inline json defaults_two_pi_coherence() {
  return json{{"two_j", 16},
              {"state", {{"name", "cat"}, {"alpha", 0.0}}},
              {"t_pulse_pi", "62ns"},
              {"tau_exc", "1.2us"},
              {"pi_pulse_weight", 0.0},  // 0 = calibrate on the stretched pi transition
              {"polarizations", json::array({"pi", "x"})}};
}

inline FileList run_two_pi_coherence(const RunContext& ctx) {
  const AngularMomentum j(ctx.config.at("two_j").get<int>());
  const AngularMomentum j_exc(j.two_j + 2);
  const double tau = io::quantity(ctx.config, "tau_exc");
  const auto sys = dynamics::transition_system(j, j_exc, 1.0 / tau);
  const SpinState cat = state_from_config(j, ctx.config.at("state"));
  const double initial_coh = std::abs(angular::coherence(cat, -j.two_j, j.two_j));

  // The Rabi frequency is fixed by the pi-pulse calibration on the
  // stretched-state pi transition (CG weight 1/3 for J -> J+1 at m = -J),
  // then reused for every polarization below.
  double calib_weight = ctx.config.value("pi_pulse_weight", 0.0);
  if (calib_weight <= 0.0)
    calib_weight = std::abs(angular::clebsch_gordan(j.two_j, -j.two_j, 2, 0, j_exc.two_j,
                                                    -j.two_j));
  const double rabi = angular::pi / (calib_weight * io::quantity(ctx.config, "t_pulse_pi"));

  json per_pol = json::object();
  for (const auto& entry : ctx.config.at("polarizations")) {
    const std::string name = entry.get<std::string>();
    const auto pol = polarization_from_name(name);
    const double weight =
        dynamics::detail::dominant_coupling_weight(sys.drive_op(pol), cat);
    if (weight < 1e-12)
      throw std::domain_error("two-pi-coherence: cat state is not coupled by '" + name + "'");
    const double duration = 2.0 * angular::pi / (rabi * weight);
    dynamics::JointState joint = dynamics::joint_from_ground(sys, cat);
    joint = dynamics::lindblad_evolve(sys, joint, pol, rabi, 0.0, duration);
    const Matrix ground = joint.ground_block();
    const double coh =
        std::abs(ground(j.index_of(-j.two_j), j.index_of(j.two_j)));
    per_pol[name] = {{"duration_ns", duration * 1e9},
                     {"ground_population", joint.ground_population()},
                     {"final_coherence_abs", coh},
                     {"retention", coh / initial_coh}};
  }
  const auto meta = ctx.metadata("closed-loop-pulse-coherence");
  json summary;
  summary["initial_coherence_abs"] = initial_coh;
  summary["rabi_rad_per_s"] = rabi;
  summary["by_polarization"] = std::move(per_pol);
  return {write_summary(ctx, meta, "two_pi_coherence", std::move(summary))};
}

// ---------------------------------------------------------------------------
// Registry and entry points
// ---------------------------------------------------------------------------

struct Scenario {
  std::string description;
  std::function<json()> defaults;
  std::function<FileList(const RunContext&)> run;
};

inline const std::map<std::string, Scenario>& scenario_registry() {
  static const std::map<std::string, Scenario> registry = {
      {"qm-table",
       {"table of pair-excitation probabilities Q_m", defaults_qm_table, run_qm_table}},
      {"husimi", {"pair Husimi function along a theta scan", defaults_husimi, run_husimi}},
      {"cdist",
       {"concurrence distribution C_n and its sphere maximum", defaults_cdist, run_cdist}},
      {"squeeze-scan",
       {"twisting-time scan of the equatorial squeezing minimum", defaults_squeeze_scan,
        run_squeeze_scan}},
      {"cat-fringes",
       {"parity and sign fringes of the stretched-state cat", defaults_cat_fringes,
        run_cat_fringes}},
      {"entropy-partition",
       {"min-entropies of the (2J-2)|2 partition for reference states",
        defaults_entropy_partition, run_entropy_partition}},
      {"tomography",
       {"pair-state reconstruction from Husimi samples", defaults_tomography, run_tomography}},
      {"decay-w",
       {"decay branching of the lowest single-excitation state", defaults_decay_w, run_decay_w}},
      {"decay-cat",
       {"decay of the stretched excited cat (which-path case)", defaults_decay_cat,
        run_decay_cat}},
      {"decay-psi2",
       {"decay of the interior excited superposition (coherence retention)", defaults_decay_psi2,
        run_decay_psi2}},
      {"rabi-lindblad",
       {"driven pulse with spontaneous emission (master equation)", defaults_rabi_lindblad,
        run_rabi_lindblad}},
      {"two-pi-coherence",
       {"cat coherence retention through closed-loop 2pi pulses", defaults_two_pi_coherence,
        run_two_pi_coherence}},
  };
  return registry;
}

// Applies "--set key.path=value" to the config; values parse as JSON when
// possible and fall back to strings.
inline void apply_override(json& config, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::domain_error("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &config;
  size_t start = 0;
  while (true) {
    const size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw std::domain_error("--set key has an empty path segment: '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

// Runs a scenario on a fully merged config; returns the written file paths.
inline FileList run_scenario(const std::string& name, const json& config) {
  const auto it = scenario_registry().find(name);
  if (it == scenario_registry().end())
    throw std::domain_error("unknown scenario '" + name + "'");
  RunContext ctx;
  ctx.scenario = name;
  ctx.config = it->second.defaults();
  deep_merge(ctx.config, config);
  ctx.output_dir = ctx.config.value("output_dir", std::string("."));
  ctx.format = ctx.config.value("format", std::string("csv"));
  if (ctx.format != "csv" && ctx.format != "json")
    throw std::domain_error("unknown output format '" + ctx.format + "' (use csv or json)");
  ctx.plot = ctx.config.value("plot", false);
  // Delivery options do not belong to the physics config that gets hashed.
  ctx.config.erase("output_dir");
  ctx.config.erase("plot");
  ctx.config.erase("format");
  std::filesystem::create_directories(ctx.output_dir);
  return it->second.run(ctx);
}

inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"spin-partition simulator: entanglement of a large spin's qubit pairs"};
  app.require_subcommand(1);

  struct SubOptions {
    std::string config_path;
    std::vector<std::string> sets;
    std::string output_dir;
    std::string format;
    std::string state_name;
    std::string theta_grid;
    bool plot = false;
    std::optional<std::uint64_t> seed;
  };
  std::map<std::string, SubOptions> options;
  for (const auto& [name, scenario] : scenario_registry()) {
    auto* sub = app.add_subcommand(name, scenario.description);
    auto& opt = options[name];
    sub->add_option("--config", opt.config_path, "JSON config file merged over defaults");
    sub->add_option("--set", opt.sets, "override a config key, e.g. --set state.name=cat");
    sub->add_option("--output", opt.output_dir, "output directory (default .)");
    sub->add_option("--format", opt.format, "table format: csv or json");
    sub->add_flag("--plot", opt.plot, "also render SVG plots");
    sub->add_option("--seed", opt.seed, "seed for sampling scenarios");
    sub->add_option("--state", opt.state_name, "shortcut for --set state.name=NAME");
    sub->add_option("--theta-grid", opt.theta_grid,
                    "theta scan as start:end:count, e.g. 0:pi:25");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const auto& opt = options.at(name);
  try {
    json config = json::object();
    if (!opt.config_path.empty()) {
      std::ifstream in(opt.config_path);
      if (!in) throw std::domain_error("cannot open config file '" + opt.config_path + "'");
      config = json::parse(in);
    }
    for (const auto& assignment : opt.sets) apply_override(config, assignment);
    if (!opt.state_name.empty()) config["state"] = {{"name", opt.state_name}};
    if (!opt.theta_grid.empty()) {
      const auto [a, b, n] = parse_grid_spec(opt.theta_grid);
      config["theta_start"] = a;
      config["theta_end"] = b;
      config["theta_points"] = int(n);
    }
    if (!opt.output_dir.empty()) config["output_dir"] = opt.output_dir;
    if (!opt.format.empty()) config["format"] = opt.format;
    if (opt.plot) config["plot"] = true;
    if (opt.seed) config["seed"] = *opt.seed;

    for (const auto& path : run_scenario(name, config)) std::printf("%s\n", path.c_str());
    return 0;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace cli
}  // namespace spinpart
