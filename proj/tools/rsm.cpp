// rsm — command-line front end for the rsmkit library.
//
// Subcommands: fit, optimize, analyze, simulate. Reports go to stdout (or
// --out); failures produce a machine-readable JSON object on stderr. Exit
// status: 0 on success, 2 for data or usage problems, 3 for numerical
// failures.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rsmkit.h"

namespace {

int exit_code_for(rsm_status status) {
  switch (status) {
    case RSM_OK:
      return 0;
    case RSM_E_INVALID_ARGUMENT:
    case RSM_E_IO:
    case RSM_E_PARSE:
    case RSM_E_INSUFFICIENT_DATA:
      return 2;
    default:
      return 3;
  }
}

std::string json_escape(const std::string& text) {
  std::string escaped;
  escaped.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '"': escaped += "\\\""; break;
      case '\\': escaped += "\\\\"; break;
      case '\n': escaped += "\\n"; break;
      case '\r': escaped += "\\r"; break;
      case '\t': escaped += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buffer[8];
          std::snprintf(buffer, sizeof(buffer), "\\u%04x", c);
          escaped += buffer;
        } else {
          escaped += c;
        }
    }
  }
  return escaped;
}

int report_error(const std::string& code, const std::string& message, int exit_code) {
  std::cerr << "{\"error\": {\"code\": \"" << json_escape(code) << "\", \"message\": \""
            << json_escape(message) << "\"}}\n";
  return exit_code;
}

int report_status(rsm_status status) {
  return report_error(rsm_status_name(status), rsm_last_error(), exit_code_for(status));
}

int emit(const char* text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream stream(out_path, std::ios::binary);
  stream << text;
  if (!stream) {
    return report_error("Io", "cannot write '" + out_path + "'", 2);
  }
  return 0;
}

struct Options {
  std::string data_path;
  std::string truth_path;
  std::string design_path;
  std::string out_path;
  std::string replication_csv_path;
  double radius = 0.0;
  double level = 0.95;
  double step = 1e-6;
  double sigma = 0.0;
  int replications = 1000;
  std::uint64_t seed = 0;
  bool fd_check = false;
};

int run_fit(const Options& options) {
  rsm_dataset* data = nullptr;
  rsm_status status = rsm_dataset_read_csv(options.data_path.c_str(), &data);
  if (status != RSM_OK) return report_status(status);
  char* report = nullptr;
  status = rsm_fit_report_json(data, &report);
  rsm_dataset_free(data);
  if (status != RSM_OK) return report_status(status);
  const int code = emit(report, options.out_path);
  rsm_string_free(report);
  return code;
}

int run_optimize(const Options& options) {
  rsm_dataset* data = nullptr;
  rsm_status status = rsm_dataset_read_csv(options.data_path.c_str(), &data);
  if (status != RSM_OK) return report_status(status);
  char* report = nullptr;
  status = rsm_optimize_report_json(data, options.radius, &report);
  rsm_dataset_free(data);
  if (status != RSM_OK) return report_status(status);
  const int code = emit(report, options.out_path);
  rsm_string_free(report);
  return code;
}

int run_analyze(const Options& options) {
  rsm_dataset* data = nullptr;
  rsm_status status = rsm_dataset_read_csv(options.data_path.c_str(), &data);
  if (status != RSM_OK) return report_status(status);
  char* report = nullptr;
  status = rsm_analyze_report_json(data, options.radius, options.level,
                                   options.fd_check ? 1 : 0, options.step, &report);
  rsm_dataset_free(data);
  if (status != RSM_OK) return report_status(status);
  const int code = emit(report, options.out_path);
  rsm_string_free(report);
  return code;
}

int run_simulate(const Options& options) {
  rsm_surface* truth = nullptr;
  rsm_status status = rsm_surface_read_json(options.truth_path.c_str(), &truth);
  if (status != RSM_OK) return report_status(status);

  rsm_dataset* design = nullptr;
  status = rsm_dataset_read_csv(options.design_path.c_str(), &design);
  if (status != RSM_OK) {
    rsm_surface_free(truth);
    return report_status(status);
  }

  rsm_mc_study* study = nullptr;
  status = rsm_monte_carlo(truth, options.radius, design, options.sigma, options.replications,
                           options.seed, options.level, &study);
  rsm_dataset_free(design);
  rsm_surface_free(truth);
  if (status != RSM_OK) return report_status(status);

  char* report = nullptr;
  status = rsm_mc_study_json(study, &report);
  if (status != RSM_OK) {
    rsm_mc_study_free(study);
    return report_status(status);
  }
  int code = emit(report, options.out_path);
  rsm_string_free(report);

  if (code == 0 && !options.replication_csv_path.empty()) {
    char* csv = nullptr;
    status = rsm_mc_study_replications_csv(study, &csv);
    if (status != RSM_OK) {
      rsm_mc_study_free(study);
      return report_status(status);
    }
    code = emit(csv, options.replication_csv_path);
    rsm_string_free(csv);
  }
  rsm_mc_study_free(study);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order response surface fitting, constrained optimization of the "
               "fitted surface over a spherical region, and uncertainty of the optimum."};
  app.require_subcommand(1);
  Options options;

  CLI::App* fit = app.add_subcommand("fit", "Fit the second-order model to an experiment CSV");
  fit->add_option("--data", options.data_path, "experiment CSV (header x1,...,xn,y)")
      ->required();
  fit->add_option("--out", options.out_path, "write the report here instead of stdout");

  CLI::App* optimize =
      app.add_subcommand("optimize", "Fit, then minimize the surface over ||x|| <= radius");
  optimize->add_option("--data", options.data_path, "experiment CSV")->required();
  optimize->add_option("--radius", options.radius, "region radius (coded units)")->required();
  optimize->add_option("--out", options.out_path, "write the report here instead of stdout");

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Full pipeline: fit, optimum, sensitivities, covariance and intervals");
  analyze->set_help_flag("--help", "print help");  // frees -h for the step flag
  analyze->add_option("--data", options.data_path, "experiment CSV")->required();
  analyze->add_option("--radius", options.radius, "region radius (coded units)")->required();
  analyze->add_option("--level", options.level, "confidence level (default 0.95)");
  analyze->add_flag("--fd-check", options.fd_check,
                    "cross-check sensitivities with finite differences");
  analyze->add_option("--h", options.step, "finite-difference base step (default 1e-6)");
  analyze->add_option("--out", options.out_path, "write the report here instead of stdout");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo study of the optimum under a known truth surface");
  simulate->add_option("--truth", options.truth_path, "coefficient JSON {\"n\":..,\"beta\":[..]}")
      ->required();
  simulate->add_option("--design", options.design_path,
                       "design CSV; factor settings are reused, the y column is ignored")
      ->required();
  simulate->add_option("--radius", options.radius, "region radius (coded units)")->required();
  simulate->add_option("--sigma", options.sigma, "noise standard deviation")->required();
  simulate->add_option("--reps", options.replications, "number of replications (default 1000)");
  simulate->add_option("--seed", options.seed, "random seed (default 0)");
  simulate->add_option("--level", options.level, "confidence level (default 0.95)");
  simulate->add_option("--xstar-csv", options.replication_csv_path,
                       "also write per-replication critical points to this CSV");
  simulate->add_option("--out", options.out_path, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& err) {
    return report_error("InvalidArgument", err.what(), 2);
  }

  const bool needs_radius = optimize->parsed() || analyze->parsed() || simulate->parsed();
  if (needs_radius && !(options.radius > 0.0)) {
    return report_error("InvalidArgument", "--radius must be positive", 2);
  }
  if (!(options.level > 0.0 && options.level < 1.0)) {
    return report_error("InvalidArgument", "--level must lie strictly between 0 and 1", 2);
  }
  if (analyze->parsed() && !(options.step > 0.0)) {
    return report_error("InvalidArgument", "--h must be positive", 2);
  }
  if (simulate->parsed() && !(options.sigma >= 0.0)) {
    return report_error("InvalidArgument", "--sigma must be non-negative", 2);
  }

  if (fit->parsed()) return run_fit(options);
  if (optimize->parsed()) return run_optimize(options);
  if (analyze->parsed()) return run_analyze(options);
  return run_simulate(options);
}
