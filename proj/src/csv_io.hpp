// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>

#include "fda.hpp"

namespace covop {

// Curve CSV: a header row of grid points, then one row of G values per curve.
// Numbers are written in shortest round-trip form, so write -> read is exact.
CurveSample read_curves_csv(std::istream& in, const std::string& source = "<stream>");
CurveSample read_curves_csv_file(const std::string& path);

void write_curves_csv(std::ostream& out, const CurveSample& sample);
void write_curves_csv_file(const std::string& path, const CurveSample& sample);

std::string format_double(double v);

} // namespace covop
