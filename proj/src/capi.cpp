#include "rsmkit.h"

#include <cstring>
#include <new>
#include <string>

#include "rsmkit/asymptotics.hpp"
#include "rsmkit/io.hpp"
#include "rsmkit/report.hpp"

struct rsm_dataset {
  rsm::Dataset data;
};
struct rsm_surface {
  rsm::SecondOrderSurface surface;
};
struct rsm_fit_result {
  rsm::FitResult fit;
};
struct rsm_critical_point {
  rsm::CriticalPoint point;
};
struct rsm_sensitivity {
  rsm::SensitivityMatrix sensitivity;
};
struct rsm_asymptotics {
  rsm::AsymptoticReport report;
  int factors;
};
struct rsm_mc_study {
  rsm::MonteCarloStudy study;
};

namespace {

thread_local std::string g_last_error;

rsm_status status_of(rsm::ErrorCode code) {
  switch (code) {
    case rsm::ErrorCode::InvalidArgument: return RSM_E_INVALID_ARGUMENT;
    case rsm::ErrorCode::Io: return RSM_E_IO;
    case rsm::ErrorCode::Parse: return RSM_E_PARSE;
    case rsm::ErrorCode::InsufficientData: return RSM_E_INSUFFICIENT_DATA;
    case rsm::ErrorCode::RankDeficient: return RSM_E_RANK_DEFICIENT;
    case rsm::ErrorCode::NotConvex: return RSM_E_NOT_CONVEX;
    case rsm::ErrorCode::HardCase: return RSM_E_HARD_CASE;
    case rsm::ErrorCode::SingularJacobian: return RSM_E_SINGULAR_JACOBIAN;
    case rsm::ErrorCode::StrictComplementarityViolated: return RSM_E_STRICT_COMPLEMENTARITY;
    case rsm::ErrorCode::StatusFlip: return RSM_E_STATUS_FLIP;
    case rsm::ErrorCode::Internal: return RSM_E_INTERNAL;
  }
  return RSM_E_INTERNAL;
}

rsm_status fail(rsm_status status, const char* message) {
  g_last_error = message;
  return status;
}

/* Runs a callable, translating exceptions into status codes. */
template <typename Fn>
rsm_status guarded(Fn&& fn) {
  try {
    fn();
    return RSM_OK;
  } catch (const rsm::Error& err) {
    g_last_error = err.what();
    return status_of(err.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RSM_E_INTERNAL;
  } catch (const std::exception& err) {
    g_last_error = err.what();
    return RSM_E_INTERNAL;
  }
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

rsm_status copy_matrix(const rsm::Matrix& matrix, double* out) {
  if (out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, "output buffer is null");
  for (Eigen::Index r = 0; r < matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) *out++ = matrix(r, c);
  return RSM_OK;
}

rsm_status copy_vector(const rsm::Vector& vector, double* out) {
  if (out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, "output buffer is null");
  for (Eigen::Index i = 0; i < vector.size(); ++i) *out++ = vector(i);
  return RSM_OK;
}

constexpr const char* kNullHandle = "handle argument is null";
constexpr const char* kNullOut = "output argument is null";

}  // namespace

extern "C" {

const char* rsm_status_name(rsm_status status) {
  switch (status) {
    case RSM_OK: return "Ok";
    case RSM_E_INVALID_ARGUMENT: return "InvalidArgument";
    case RSM_E_IO: return "Io";
    case RSM_E_PARSE: return "Parse";
    case RSM_E_INSUFFICIENT_DATA: return "InsufficientData";
    case RSM_E_RANK_DEFICIENT: return "RankDeficient";
    case RSM_E_NOT_CONVEX: return "NotConvex";
    case RSM_E_HARD_CASE: return "HardCase";
    case RSM_E_SINGULAR_JACOBIAN: return "SingularJacobian";
    case RSM_E_STRICT_COMPLEMENTARITY: return "StrictComplementarityViolated";
    case RSM_E_STATUS_FLIP: return "StatusFlip";
    case RSM_E_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* rsm_last_error(void) { return g_last_error.c_str(); }

void rsm_string_free(char* text) { delete[] text; }

/* ---- datasets ------------------------------------------------------- */

rsm_status rsm_dataset_create(int factors, int runs, const double* points,
                              const double* response, rsm_dataset** out) {
  if (out == nullptr || points == nullptr || response == nullptr) {
    return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  }
  return guarded([&] {
    if (factors < 1 || runs < 1) {
      throw rsm::Error(rsm::ErrorCode::InvalidArgument, "factors and runs must be positive");
    }
    rsm::Dataset data;
    data.points = rsm::Matrix(runs, factors);
    data.response = rsm::Vector(runs);
    for (int r = 0; r < runs; ++r) {
      for (int c = 0; c < factors; ++c) data.points(r, c) = points[r * factors + c];
      data.response(r) = response[r];
    }
    *out = new rsm_dataset{std::move(data)};
  });
}

rsm_status rsm_dataset_parse_csv(const char* text, rsm_dataset** out) {
  if (text == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] { *out = new rsm_dataset{rsm::parse_dataset_csv(text)}; });
}

rsm_status rsm_dataset_read_csv(const char* path, rsm_dataset** out) {
  if (path == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] { *out = new rsm_dataset{rsm::read_dataset_csv(path)}; });
}

int rsm_dataset_factors(const rsm_dataset* data) { return data ? data->data.factors() : 0; }
int rsm_dataset_runs(const rsm_dataset* data) { return data ? data->data.runs() : 0; }
void rsm_dataset_free(rsm_dataset* data) { delete data; }

/* ---- surfaces ------------------------------------------------------- */

rsm_status rsm_surface_create(int factors, const double* coefficients, rsm_surface** out) {
  if (coefficients == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] {
    const int p = rsm::coefficient_count(factors);
    rsm::Vector packed(p);
    for (int i = 0; i < p; ++i) packed(i) = coefficients[i];
    *out = new rsm_surface{rsm::unpack(packed, factors)};
  });
}

rsm_status rsm_surface_read_json(const char* path, rsm_surface** out) {
  if (path == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] { *out = new rsm_surface{rsm::read_surface_json(path)}; });
}

int rsm_surface_factors(const rsm_surface* surface) {
  return surface ? surface->surface.factors() : 0;
}

int rsm_surface_coefficient_count(const rsm_surface* surface) {
  return surface ? rsm::coefficient_count(surface->surface.factors()) : 0;
}

rsm_status rsm_surface_coefficients(const rsm_surface* surface, double* out) {
  if (surface == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullHandle);
  return guarded([&] {
    const rsm::Vector packed = rsm::pack(surface->surface);
    if (copy_vector(packed, out) != RSM_OK) {
      throw rsm::Error(rsm::ErrorCode::InvalidArgument, kNullOut);
    }
  });
}

rsm_status rsm_surface_predict(const rsm_surface* surface, const double* x, double* out) {
  if (surface == nullptr || x == nullptr || out == nullptr) {
    return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  }
  return guarded([&] {
    rsm::Vector point(surface->surface.factors());
    for (int i = 0; i < point.size(); ++i) point(i) = x[i];
    *out = rsm::predict(surface->surface, point);
  });
}

void rsm_surface_free(rsm_surface* surface) { delete surface; }

/* ---- least squares fit ---------------------------------------------- */

rsm_status rsm_fit(const rsm_dataset* data, rsm_fit_result** out) {
  if (data == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] { *out = new rsm_fit_result{rsm::fit(data->data)}; });
}

int rsm_fit_result_factors(const rsm_fit_result* fit) { return fit ? fit->fit.factors : 0; }

int rsm_fit_result_coefficient_count(const rsm_fit_result* fit) {
  return fit ? static_cast<int>(fit->fit.coefficients.size()) : 0;
}

int rsm_fit_result_dof(const rsm_fit_result* fit) { return fit ? fit->fit.dof : 0; }

double rsm_fit_result_sigma2(const rsm_fit_result* fit) { return fit ? fit->fit.sigma2 : 0.0; }

rsm_status rsm_fit_result_coefficients(const rsm_fit_result* fit, double* out) {
  if (fit == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullHandle);
  return copy_vector(fit->fit.coefficients, out);
}

rsm_status rsm_fit_result_covariance(const rsm_fit_result* fit, double* out) {
  if (fit == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullHandle);
  return copy_matrix(fit->fit.coefficient_cov, out);
}

rsm_status rsm_fit_result_surface(const rsm_fit_result* fit, rsm_surface** out) {
  if (fit == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] { *out = new rsm_surface{fit->fit.surface()}; });
}

rsm_status rsm_fit_result_json(const rsm_fit_result* fit, char** out) {
  if (fit == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] { *out = copy_string(rsm::fit_json(fit->fit)); });
}

void rsm_fit_result_free(rsm_fit_result* fit) { delete fit; }

/* ---- constrained optimum -------------------------------------------- */

rsm_status rsm_solve(const rsm_surface* surface, double radius, int allow_nonconvex,
                     rsm_critical_point** out) {
  if (surface == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] {
    *out = new rsm_critical_point{
        rsm::solve(surface->surface, rsm::Region{radius}, allow_nonconvex != 0)};
  });
}

int rsm_critical_point_factors(const rsm_critical_point* point) {
  return point ? static_cast<int>(point->point.x.size()) : 0;
}

rsm_status rsm_critical_point_x(const rsm_critical_point* point, double* out) {
  if (point == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullHandle);
  return copy_vector(point->point.x, out);
}

double rsm_critical_point_multiplier(const rsm_critical_point* point) {
  return point ? point->point.multiplier : 0.0;
}

int rsm_critical_point_status(const rsm_critical_point* point) {
  if (point == nullptr) return -1;
  return point->point.status == rsm::PointStatus::Interior ? RSM_STATUS_INTERIOR
                                                           : RSM_STATUS_BOUNDARY;
}

int rsm_critical_point_extension(const rsm_critical_point* point) {
  return point != nullptr && point->point.extension ? 1 : 0;
}

int rsm_critical_point_strict_complementarity(const rsm_critical_point* point) {
  return point != nullptr && point->point.strict_complementarity ? 1 : 0;
}

rsm_status rsm_critical_point_residuals(const rsm_critical_point* point, double out[4]) {
  if (point == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  out[0] = point->point.residuals.stationarity;
  out[1] = point->point.residuals.primal;
  out[2] = point->point.residuals.complementarity;
  out[3] = point->point.residuals.dual;
  return RSM_OK;
}

rsm_status rsm_critical_point_json(const rsm_critical_point* point, char** out) {
  if (point == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] { *out = copy_string(rsm::critical_point_json(point->point)); });
}

void rsm_critical_point_free(rsm_critical_point* point) { delete point; }

/* ---- sensitivity ----------------------------------------------------- */

rsm_status rsm_sensitivity_compute(const rsm_surface* surface, const rsm_critical_point* point,
                                   rsm_sensitivity** out) {
  if (surface == nullptr || point == nullptr || out == nullptr) {
    return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  }
  return guarded(
      [&] { *out = new rsm_sensitivity{rsm::sensitivity(surface->surface, point->point)}; });
}

rsm_status rsm_sensitivity_bordered(const rsm_surface* surface, const rsm_critical_point* point,
                                    rsm_sensitivity** out) {
  if (surface == nullptr || point == nullptr || out == nullptr) {
    return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  }
  return guarded([&] {
    *out = new rsm_sensitivity{rsm::sensitivity_bordered(surface->surface, point->point)};
  });
}

rsm_status rsm_sensitivity_finite_difference(const rsm_surface* surface, double radius,
                                             double step, int allow_nonconvex,
                                             rsm_sensitivity** out) {
  if (surface == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] {
    *out = new rsm_sensitivity{rsm::finite_difference_sensitivity(
        surface->surface, rsm::Region{radius}, step, allow_nonconvex != 0)};
  });
}

int rsm_sensitivity_rows(const rsm_sensitivity* sensitivity) {
  return sensitivity ? static_cast<int>(sensitivity->sensitivity.dx_dcoeff.rows()) : 0;
}

int rsm_sensitivity_cols(const rsm_sensitivity* sensitivity) {
  return sensitivity ? static_cast<int>(sensitivity->sensitivity.dx_dcoeff.cols()) : 0;
}

rsm_status rsm_sensitivity_dxdbeta(const rsm_sensitivity* sensitivity, double* out) {
  if (sensitivity == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullHandle);
  return copy_matrix(sensitivity->sensitivity.dx_dcoeff, out);
}

int rsm_sensitivity_has_dlambda(const rsm_sensitivity* sensitivity) {
  return sensitivity != nullptr && sensitivity->sensitivity.dmultiplier_dcoeff.size() > 0 ? 1
                                                                                          : 0;
}

rsm_status rsm_sensitivity_dlambdadbeta(const rsm_sensitivity* sensitivity, double* out) {
  if (sensitivity == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullHandle);
  if (sensitivity->sensitivity.dmultiplier_dcoeff.size() == 0) {
    return fail(RSM_E_INVALID_ARGUMENT, "multiplier derivative is only defined on the boundary");
  }
  return copy_vector(sensitivity->sensitivity.dmultiplier_dcoeff, out);
}

const char* rsm_sensitivity_method(const rsm_sensitivity* sensitivity) {
  return sensitivity ? rsm::sensitivity_method_name(sensitivity->sensitivity.method) : "unknown";
}

rsm_status rsm_sensitivity_json(const rsm_sensitivity* sensitivity, char** out) {
  if (sensitivity == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] { *out = copy_string(rsm::sensitivity_json(sensitivity->sensitivity)); });
}

void rsm_sensitivity_free(rsm_sensitivity* sensitivity) { delete sensitivity; }

/* ---- asymptotics ------------------------------------------------------ */

rsm_status rsm_asymptotics_compute(const rsm_critical_point* point,
                                   const rsm_sensitivity* sensitivity,
                                   const rsm_fit_result* fit, double level,
                                   rsm_asymptotics** out) {
  if (point == nullptr || sensitivity == nullptr || fit == nullptr || out == nullptr) {
    return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  }
  return guarded([&] {
    const rsm::Matrix covariance =
        rsm::critical_point_covariance(sensitivity->sensitivity, fit->fit);
    *out = new rsm_asymptotics{rsm::confidence_intervals(point->point, covariance, level),
                               static_cast<int>(point->point.x.size())};
  });
}

int rsm_asymptotics_factors(const rsm_asymptotics* report) { return report ? report->factors : 0; }

rsm_status rsm_asymptotics_covariance(const rsm_asymptotics* report, double* out) {
  if (report == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullHandle);
  return copy_matrix(report->report.covariance, out);
}

rsm_status rsm_asymptotics_std_errors(const rsm_asymptotics* report, double* out) {
  if (report == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullHandle);
  return copy_vector(report->report.std_errors, out);
}

rsm_status rsm_asymptotics_intervals(const rsm_asymptotics* report, double* out) {
  if (report == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullHandle);
  return copy_matrix(report->report.intervals, out);
}

rsm_status rsm_asymptotics_json(const rsm_asymptotics* report, char** out) {
  if (report == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] { *out = copy_string(rsm::asymptotic_report_json(report->report)); });
}

void rsm_asymptotics_free(rsm_asymptotics* report) { delete report; }

/* ---- Monte Carlo ------------------------------------------------------ */

rsm_status rsm_monte_carlo(const rsm_surface* truth, double radius, const rsm_dataset* design,
                           double sigma, int replications, uint64_t seed, double level,
                           rsm_mc_study** out) {
  if (truth == nullptr || design == nullptr || out == nullptr) {
    return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  }
  return guarded([&] {
    *out = new rsm_mc_study{rsm::monte_carlo_study(truth->surface, rsm::Region{radius},
                                                   design->data.points, sigma, replications,
                                                   seed, level)};
  });
}

int rsm_mc_study_factors(const rsm_mc_study* study) {
  return study ? static_cast<int>(study->study.truth_x.size()) : 0;
}

int rsm_mc_study_status_flips(const rsm_mc_study* study) {
  return study ? study->study.status_flips : 0;
}

int rsm_mc_study_solver_errors(const rsm_mc_study* study) {
  return study ? study->study.solver_errors : 0;
}

int rsm_mc_study_used(const rsm_mc_study* study) { return study ? study->study.used : 0; }

rsm_status rsm_mc_study_empirical_cov(const rsm_mc_study* study, double* out) {
  if (study == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullHandle);
  return copy_matrix(study->study.empirical_cov, out);
}

rsm_status rsm_mc_study_coverage(const rsm_mc_study* study, double* out) {
  if (study == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullHandle);
  return copy_vector(study->study.coverage, out);
}

rsm_status rsm_mc_study_json(const rsm_mc_study* study, char** out) {
  if (study == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] { *out = copy_string(rsm::monte_carlo_json(study->study)); });
}

rsm_status rsm_mc_study_replications_csv(const rsm_mc_study* study, char** out) {
  if (study == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] { *out = copy_string(rsm::replication_csv(study->study)); });
}

void rsm_mc_study_free(rsm_mc_study* study) { delete study; }

/* ---- pipeline reports -------------------------------------------------- */

rsm_status rsm_fit_report_json(const rsm_dataset* data, char** out) {
  if (data == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] { *out = copy_string(rsm::fit_report(data->data)); });
}

rsm_status rsm_optimize_report_json(const rsm_dataset* data, double radius, char** out) {
  if (data == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded(
      [&] { *out = copy_string(rsm::optimize_report(data->data, rsm::Region{radius})); });
}

rsm_status rsm_analyze_report_json(const rsm_dataset* data, double radius, double level,
                                   int fd_check, double fd_step, char** out) {
  if (data == nullptr || out == nullptr) return fail(RSM_E_INVALID_ARGUMENT, kNullOut);
  return guarded([&] {
    *out = copy_string(rsm::analyze_report(data->data, rsm::Region{radius}, level,
                                           fd_check != 0, fd_step));
  });
}

} /* extern "C" */
