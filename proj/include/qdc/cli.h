#pragma once

// Batch command-line front end. run() is the whole program; tools/qdc.cpp
// only forwards argv and the standard streams.
//
// Exit status: 0 success, 2 usage error, 1 domain error (degenerate setting,
// insufficient statistics).

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdc/circuit.h"
#include "qdc/errors.h"
#include "qdc/experiment.h"
#include "qdc/hvm.h"
#include "qdc/noise.h"

namespace qdc::cli {

// Shortest decimal text that parses back to exactly the same double.
inline std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return {buf, end};
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row_strings(header); }

  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    s.reserve(values.size());
    for (double v : values) s.push_back(format_number(v));
    row_strings(s);
  }

  void row_strings(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += quote(cells[i]);
    }
    text_ += '\n';
  }

  const std::string& text() const { return text_; }

 private:
  static std::string quote(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string q = "\"";
    for (char ch : cell) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + '"';
  }

  std::size_t columns_;
  std::string text_;
};

struct RunConfig {
  std::string command;
  std::optional<double> alpha;
  std::vector<double> alphas;
  std::optional<double> phi;
  std::vector<double> phis;
  double phi_start = 0.0;
  double phi_end = 2 * kPi;
  int phi_steps = 21;
  double epsilon = 1.0;
  std::int64_t shots = 100000;
  std::uint64_t seed = 42;
  int grid = 21;
  int refine = 30;
  double tol = 1e-9;
  std::string format;
  std::string out_path;
};

namespace detail {

inline std::vector<double> linspace(double start, double end, int steps) {
  if (steps < 1) throw InvalidArgument("--phi-steps must be at least 1");
  if (steps == 1) return {start};
  std::vector<double> v(steps);
  for (int i = 0; i < steps; ++i) v[i] = i == steps - 1 ? end : start + (end - start) * i / (steps - 1);
  return v;
}

inline std::vector<double> alpha_values(const RunConfig& cfg) {
  if (!cfg.alphas.empty()) return cfg.alphas;
  if (cfg.alpha) return {*cfg.alpha};
  throw InvalidArgument("--alpha or --alphas is required");
}

inline std::vector<double> phi_values(const RunConfig& cfg) {
  if (!cfg.phis.empty()) return cfg.phis;
  if (cfg.phi) return {*cfg.phi};
  return linspace(cfg.phi_start, cfg.phi_end, cfg.phi_steps);
}

inline double single_alpha(const RunConfig& cfg) {
  if (!cfg.alpha) throw InvalidArgument("--alpha is required");
  return *cfg.alpha;
}

inline double single_phi(const RunConfig& cfg) {
  if (!cfg.phi) throw InvalidArgument("--phi is required");
  return *cfg.phi;
}

inline nlohmann::ordered_json params_json(const HvParameters& p) {
  return {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}, {"e", p.e}};
}

inline nlohmann::ordered_json setting_json(const ExperimentSetting& s) {
  return {{"alpha", s.alpha()}, {"phi", s.phi()}, {"epsilon", s.epsilon()}};
}

inline std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline std::string cmd_joint(const RunConfig& cfg) {
  const double alpha = single_alpha(cfg), phi = single_phi(cfg);
  const auto p = noisy_joint_distribution(ExperimentSetting::create(alpha, phi, cfg.epsilon));
  if (cfg.format == "json") {
    nlohmann::ordered_json j{{"alpha", alpha}, {"phi", phi}, {"epsilon", cfg.epsilon},
                             {"p00", p[0]}, {"p01", p[1]}, {"p10", p[2]}, {"p11", p[3]}};
    return dump(j);
  }
  CsvWriter csv({"alpha", "phi", "epsilon", "p00", "p01", "p10", "p11"});
  csv.row({alpha, phi, cfg.epsilon, p[0], p[1], p[2], p[3]});
  return csv.text();
}

inline std::string cmd_sweep(const RunConfig& cfg) {
  const auto alphas = alpha_values(cfg);
  const auto phis = phi_values(cfg);
  CsvWriter csv({"alpha", "phi", "epsilon", "p00", "p01", "p10", "p11", "p_s0_given_a0", "p_s0_given_a1",
                 "visibility_analytic"});
  auto rows = nlohmann::ordered_json::array();
  for (double alpha : alphas) {
    for (double phi : phis) {
      const auto p = noisy_joint_distribution(ExperimentSetting::create(alpha, phi, cfg.epsilon));
      const double c0 = conditional_system_distribution(p, 0)[0];
      const double c1 = conditional_system_distribution(p, 1)[0];
      const double v = analytic_visibility(alpha, cfg.epsilon);
      csv.row({alpha, phi, cfg.epsilon, p[0], p[1], p[2], p[3], c0, c1, v});
      rows.push_back({{"alpha", alpha}, {"phi", phi}, {"epsilon", cfg.epsilon}, {"p00", p[0]}, {"p01", p[1]},
                      {"p10", p[2]}, {"p11", p[3]}, {"p_s0_given_a0", c0}, {"p_s0_given_a1", c1},
                      {"visibility_analytic", v}});
    }
  }
  return cfg.format == "json" ? dump(rows) : csv.text();
}

inline std::string cmd_hv_check(const RunConfig& cfg) {
  std::vector<ExperimentSetting> settings;
  for (double alpha : alpha_values(cfg))
    for (double phi : phi_values(cfg)) settings.push_back(ExperimentSetting::create(alpha, phi, cfg.epsilon));
  const auto v = feasibility_scan(settings, cfg.grid, cfg.refine, cfg.tol);
  if (cfg.format == "csv") {
    CsvWriter csv({"feasible", "best_residual", "marginal_lower_bound", "a", "b", "c", "d", "e"});
    csv.row({v.feasible ? 1.0 : 0.0, v.best_residual, v.marginal_lower_bound, v.best.a, v.best.b, v.best.c, v.best.d,
             v.best.e});
    return csv.text();
  }
  nlohmann::ordered_json j;
  j["feasible"] = v.feasible;
  j["witness"] = v.witness ? nlohmann::ordered_json(params_json(*v.witness)) : nlohmann::ordered_json(nullptr);
  j["min_max_residual"] = v.min_max_residual ? nlohmann::ordered_json(*v.min_max_residual) : nlohmann::ordered_json(nullptr);
  j["settings"] = nlohmann::ordered_json::array();
  for (const auto& s : v.settings_used) j["settings"].push_back(setting_json(s));
  j["grid_density"] = v.grid_density;
  j["tol"] = v.tol;
  j["refine_steps"] = v.refine_steps;
  j["best"] = params_json(v.best);
  j["best_residual"] = v.best_residual;
  j["marginal_lower_bound"] = v.marginal_lower_bound;
  return dump(j);
}

inline std::string cmd_hv_branches(const RunConfig& cfg) {
  const auto setting = ExperimentSetting::create(single_alpha(cfg), single_phi(cfg), cfg.epsilon);
  const auto branches = enumerate_branches(setting);
  const auto q = derived_quantities(setting);
  if (cfg.format == "csv") {
    CsvWriter csv({"name", "admissible", "constraints", "labels"});
    for (const auto& b : branches) {
      std::string cons, labels;
      for (const auto& c : b.constraints) cons += (cons.empty() ? "" : "; ") + c;
      for (const auto& l : b.labels.names()) labels += (labels.empty() ? "" : ";") + l;
      csv.row_strings({b.name, b.admissible ? "1" : "0", cons, labels});
    }
    return csv.text();
  }
  nlohmann::ordered_json j;
  j["setting"] = setting_json(setting);
  j["p0"] = q.p0;
  j["p1"] = q.p1;
  j["beta"] = q.beta();
  j["branches"] = nlohmann::ordered_json::array();
  for (const auto& b : branches) {
    static constexpr const char* kNames[] = {"a", "b", "c", "d", "e"};
    nlohmann::ordered_json family;
    for (int i = 0; i < 5; ++i) family[kNames[i]] = b.family[i];
    j["branches"].push_back(
        {{"name", b.name}, {"admissible", b.admissible}, {"constraints", b.constraints}, {"family", family},
         {"labels", b.labels.names()}});
  }
  return dump(j);
}

inline std::string cmd_separability(const RunConfig& cfg) {
  const double alpha = single_alpha(cfg), phi = single_phi(cfg);
  const auto t = separability_threshold(alpha, phi);
  if (cfg.format == "json") {
    return dump(nlohmann::ordered_json{
        {"alpha", alpha}, {"phi", phi}, {"epsilon_threshold", t.epsilon}, {"never_entangled", t.never_entangled}});
  }
  CsvWriter csv({"alpha", "phi", "epsilon_threshold", "never_entangled"});
  csv.row({alpha, phi, t.epsilon, t.never_entangled ? 1.0 : 0.0});
  return csv.text();
}

inline std::string cmd_chsh(const RunConfig& cfg) {
  const double alpha = single_alpha(cfg), phi = single_phi(cfg);
  const auto s = ExperimentSetting::create(alpha, phi, cfg.epsilon);
  const double chsh = chsh_max(s), ppt = ppt_min_eigenvalue(s);
  if (cfg.format == "json") {
    return dump(nlohmann::ordered_json{
        {"alpha", alpha}, {"phi", phi}, {"epsilon", cfg.epsilon}, {"chsh_max", chsh}, {"ppt_min_eigenvalue", ppt}});
  }
  CsvWriter csv({"alpha", "phi", "epsilon", "chsh_max", "ppt_min_eigenvalue"});
  csv.row({alpha, phi, cfg.epsilon, chsh, ppt});
  return csv.text();
}

inline std::string cmd_sample(const RunConfig& cfg) {
  const double alpha = single_alpha(cfg), phi = single_phi(cfg);
  const auto rec = sample_shots(ExperimentSetting::create(alpha, phi, cfg.epsilon), cfg.shots, cfg.seed);
  if (cfg.format == "json") {
    return dump(nlohmann::ordered_json{{"alpha", alpha},       {"phi", phi},           {"epsilon", cfg.epsilon},
                                       {"shots", rec.shots},   {"seed", rec.seed},     {"n00", rec.counts[0]},
                                       {"n01", rec.counts[1]}, {"n10", rec.counts[2]}, {"n11", rec.counts[3]}});
  }
  CsvWriter csv({"alpha", "phi", "epsilon", "shots", "seed", "n00", "n01", "n10", "n11"});
  csv.row_strings({format_number(alpha), format_number(phi), format_number(cfg.epsilon), std::to_string(rec.shots),
                   std::to_string(rec.seed), std::to_string(rec.counts[0]), std::to_string(rec.counts[1]),
                   std::to_string(rec.counts[2]), std::to_string(rec.counts[3])});
  return csv.text();
}

inline std::string cmd_visibility(const RunConfig& cfg) {
  const double alpha = single_alpha(cfg);
  const auto grid = phase_grid(cfg.phi_steps);
  const auto est = estimate_visibility(alpha, cfg.epsilon, grid, cfg.shots, cfg.seed);
  const double analytic = analytic_visibility(alpha, cfg.epsilon);
  if (cfg.format == "json") {
    return dump(nlohmann::ordered_json{{"alpha", alpha},
                                       {"epsilon", cfg.epsilon},
                                       {"visibility", est.value},
                                       {"std_error", est.std_error},
                                       {"visibility_analytic", analytic}});
  }
  CsvWriter csv({"alpha", "epsilon", "visibility", "std_error", "visibility_analytic"});
  csv.row({alpha, cfg.epsilon, est.value, est.std_error, analytic});
  return csv.text();
}

// Writes to a sibling temporary file, then renames over the target.
inline void write_atomically(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delayed-choice interferometer under white noise: statistics, entanglement and hidden-variable checks",
               "qdc"};
  app.require_subcommand(1);
  RunConfig cfg;

  const auto add_alpha = [&](CLI::App* sub) { sub->add_option("--alpha", cfg.alpha, "ancilla angle (radians)"); };
  const auto add_phi = [&](CLI::App* sub) { sub->add_option("--phi", cfg.phi, "path phase (radians)"); };
  const auto add_phi_range = [&](CLI::App* sub) {
    sub->add_option("--phi-start", cfg.phi_start, "first phase of the range (radians)");
    sub->add_option("--phi-end", cfg.phi_end, "last phase of the range (radians)");
    sub->add_option("--phi-steps", cfg.phi_steps, "number of phase points, endpoints included")
        ->check(CLI::PositiveNumber);
  };
  const auto add_epsilon = [&](CLI::App* sub) {
    sub->add_option("--epsilon", cfg.epsilon, "pure-state weight in [0, 1]")->check(CLI::Range(0.0, 1.0));
  };
  const auto add_io = [&](CLI::App* sub, const std::string& default_format) {
    cfg.format.clear();
    sub->add_option("--format", cfg.format, "csv or json (default " + default_format + ")")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out_path, "write to this file instead of stdout");
  };

  std::map<std::string, std::string> default_format;
  auto make = [&](const std::string& name, const std::string& help, const std::string& fmt) {
    auto* sub = app.add_subcommand(name, help);
    default_format[name] = fmt;
    return sub;
  };

  auto* joint = make("joint", "joint distribution P(S, A) of the noisy interferometer", "csv");
  add_alpha(joint);
  add_phi(joint);
  add_epsilon(joint);
  add_io(joint, "csv");

  auto* sweep = make("sweep", "plot-ready sweep over alpha values and a phase range", "csv");
  add_alpha(sweep);
  add_phi(sweep);
  add_phi_range(sweep);
  add_epsilon(sweep);
  add_io(sweep, "csv");
  sweep->add_option("--alphas", cfg.alphas, "comma-separated alpha values")->delimiter(',');
  sweep->add_option("--phis", cfg.phis, "comma-separated phase values")->delimiter(',');

  auto* hv_check = make("hv-check", "search for one hidden-variable model valid at all settings", "json");
  add_alpha(hv_check);
  add_phi_range(hv_check);
  add_epsilon(hv_check);
  add_io(hv_check, "json");
  hv_check->add_option("--alphas", cfg.alphas, "comma-separated alpha values")->delimiter(',');
  hv_check->add_option("--phis", cfg.phis, "comma-separated phase values")->delimiter(',');
  hv_check->add_option("--grid", cfg.grid, "grid points per parameter axis")->check(CLI::Range(2, 201));
  hv_check->add_option("--refine", cfg.refine, "coordinate-descent rounds")->check(CLI::NonNegativeNumber);
  hv_check->add_option("--tol", cfg.tol, "feasibility residual tolerance")->check(CLI::PositiveNumber);

  auto* hv_branches = make("hv-branches", "exact solution branches of the hidden-variable constraints", "json");
  add_alpha(hv_branches);
  add_phi(hv_branches);
  add_epsilon(hv_branches);
  add_io(hv_branches, "json");

  auto* sep = make("separability", "epsilon at which the evolved state becomes entangled", "csv");
  add_alpha(sep);
  add_phi(sep);
  add_io(sep, "csv");

  auto* chsh = make("chsh", "maximal CHSH value and PPT minimum eigenvalue", "csv");
  add_alpha(chsh);
  add_phi(chsh);
  add_epsilon(chsh);
  add_io(chsh, "csv");

  auto* sample = make("sample", "seeded multinomial shot counts", "csv");
  add_alpha(sample);
  add_phi(sample);
  add_epsilon(sample);
  add_io(sample, "csv");
  sample->add_option("--shots", cfg.shots, "number of shots")->check(CLI::PositiveNumber);
  sample->add_option("--seed", cfg.seed, "generator seed");

  auto* vis = make("visibility", "fringe visibility of the closed branch from sampled shots", "csv");
  add_alpha(vis);
  add_epsilon(vis);
  add_io(vis, "csv");
  vis->add_option("--phi-steps", cfg.phi_steps, "phase points on [0, pi]")->check(CLI::Range(5, 100000));
  vis->add_option("--shots", cfg.shots, "shots per phase point")->check(CLI::Range(100, 1000000000));
  vis->add_option("--seed", cfg.seed, "generator seed");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "qdc: " << e.what() << "\n";
    err << "run 'qdc --help' for usage\n";
    return 2;
  }

  const auto* chosen = app.get_subcommands().front();
  cfg.command = chosen->get_name();
  if (cfg.format.empty()) cfg.format = default_format[cfg.command];
  if (cfg.command == "visibility" && chosen->count("--phi-steps") == 0) cfg.phi_steps = 5;

  try {
    std::string text;
    if (cfg.command == "joint") text = detail::cmd_joint(cfg);
    else if (cfg.command == "sweep") text = detail::cmd_sweep(cfg);
    else if (cfg.command == "hv-check") text = detail::cmd_hv_check(cfg);
    else if (cfg.command == "hv-branches") text = detail::cmd_hv_branches(cfg);
    else if (cfg.command == "separability") text = detail::cmd_separability(cfg);
    else if (cfg.command == "chsh") text = detail::cmd_chsh(cfg);
    else if (cfg.command == "sample") text = detail::cmd_sample(cfg);
    else if (cfg.command == "visibility") text = detail::cmd_visibility(cfg);

    if (cfg.out_path.empty()) out << text;
    else detail::write_atomically(cfg.out_path, text);
    return 0;
  } catch (const InvalidArgument& e) {
    err << "qdc " << cfg.command << ": " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "qdc " << cfg.command << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "qdc " << cfg.command << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qdc::cli
