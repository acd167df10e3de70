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

#include <stdexcept>
#include <string>

namespace platoon {

/// Base class of every error raised by the library. The command line tool
/// maps the concrete subclasses onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad configuration, parameter outside its domain,
/// invalid graph description.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The platoon (or one of its modes) lies outside the delay stability region.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to reach its target: eigensolver did not
/// converge, quadrature budget exhausted, simulation diverged.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace platoon
