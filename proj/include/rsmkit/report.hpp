#pragma once

#include <string>

#include "rsmkit/asymptotics.hpp"
#include "rsmkit/io.hpp"

namespace rsm {

std::string fit_json(const FitResult& fit);
std::string critical_point_json(const CriticalPoint& point);
std::string sensitivity_json(const SensitivityMatrix& sensitivity);
std::string asymptotic_report_json(const AsymptoticReport& report);
std::string monte_carlo_json(const MonteCarloStudy& study);

/// Pipeline reports behind the CLI commands. Output is deterministic:
/// identical inputs produce byte-identical documents.
std::string fit_report(const Dataset& data);
std::string optimize_report(const Dataset& data, const Region& region);
std::string analyze_report(const Dataset& data, const Region& region, double level,
                           bool fd_check, double fd_step);

}  // namespace rsm
