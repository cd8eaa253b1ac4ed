#pragma once

#include <string>
#include <string_view>

#include "rsmkit/surface.hpp"

namespace rsm {

/// Experiment CSV: mandatory header "x1,...,xn,y" (factor columns first,
/// response last), decimal-point reals, one run per line. Errors name the
/// offending 1-based row and column; the header is row 1.
Dataset parse_dataset_csv(std::string_view text);
Dataset read_dataset_csv(const std::string& path);

/// Emits a dataset in the same CSV dialect the parser accepts.
std::string dataset_csv(const Dataset& data);

/// Coefficient file: {"n": factors, "beta": [packed coefficients]}.
SecondOrderSurface parse_surface_json(std::string_view text);
SecondOrderSurface read_surface_json(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace rsm
