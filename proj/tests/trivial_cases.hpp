/*
   Copyright 2026 The ilattice Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ilat::testing {

/// Closed-form special cases: zero volatility, immediate exercise, empty sums
/// and the like. Each check returns true when the library reproduces the
/// expected value exactly (or to rounding where no exact value exists).
struct TrivialCase {
  std::string name;
  std::function<bool()> check;
};

const std::vector<TrivialCase>& trivial_cases();

}  // namespace ilat::testing
