// Copyright 2026 The platoon-risk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "platoon/scenario.hpp"

namespace platoon::report {

inline constexpr int kSchemaVersion = 1;

/// 12 significant digits; "inf" / "-inf" / "nan" for non-finite values.
std::string format_number(double x);
/// "inf" on the infinite branch, otherwise format_number(value).
std::string format_risk(const RiskValue& r);

// CSV documents start with a "# schema_version=1" line followed by the
// column header.
std::string analyze_csv(const Analysis& a);
std::string analyze_json(const Analysis& a);
std::string stability_csv(const StabilityVerdict& v);
std::string bounds_json(const SpectralBounds& b);
std::string variances_csv(const PairVariances& v);
std::string spectrum_json(const Matrix& laplacian, const LaplacianSpectrum& spec);
std::string sweep_csv(const SweepTable& t);
std::string sweep_json(const SweepTable& t, const PlatoonParams& params);
std::string simulation_json(const SimulationResult& r, const SimConfig& cfg, const PlatoonParams& params);
std::string samples_csv(const SimulationResult& r);
std::string validation_json(const ValidationReport& r);

/// Name of the environment variable holding the default output directory
/// for relative output paths.
inline constexpr const char* kOutputDirEnv = "PLATOON_RISK_OUTPUT_DIR";

/// Relative paths are resolved against $PLATOON_RISK_OUTPUT_DIR when set.
std::filesystem::path resolve_output_path(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`, so readers
/// never observe a partial file. Throws Error on I/O failure.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace platoon::report
