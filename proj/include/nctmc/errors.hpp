// Copyright 2026-present the nctmc project
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

#ifndef NCTMC_ERRORS_HPP
#define NCTMC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nctmc {

/// Rate evaluation at a point where the schedule degenerates (alpha_t = 0).
struct SingularityError : std::domain_error {
  explicit SingularityError(const std::string& what) : std::domain_error(what) {}
};

/// Reverse target requested at a state with zero forward mass.
struct UnreachableStateError : std::domain_error {
  explicit UnreachableStateError(const std::string& what) : std::domain_error(what) {}
};

/// Trajectory simulation hit a non-finite rate.
struct SimulationError : std::runtime_error {
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

/// Clean-token recovery clipped the whole vector to zero.
struct DegenerateRecoveryError : std::runtime_error {
  explicit DegenerateRecoveryError(const std::string& what) : std::runtime_error(what) {}
};

/// Operation defined only for a schedule family it was not given.
struct UnsupportedScheduleError : std::invalid_argument {
  explicit UnsupportedScheduleError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace nctmc

#endif  // NCTMC_ERRORS_HPP
