// Copyright 2026 The boundrl Authors
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

#include <limits>
#include <vector>

namespace boundrl::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LessEq, GreaterEq, Equal };
enum class Status { Optimal, Infeasible, Unbounded };

const char* to_string(Status status);

struct Problem {
  bool maximize = true;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<Sense> senses;
  std::vector<double> rhs;
  std::vector<double> lower;  // per variable; -kInf allowed
  std::vector<double> upper;  // per variable; kInf allowed

  // Adds a variable with the given bounds and objective coefficient and
  // returns its index. Existing rows are padded with zeros.
  std::size_t add_variable(double lb, double ub, double cost = 0.0);
  void add_row(std::vector<double> coefficients, Sense sense, double b);
  std::size_t num_vars() const { return objective.size(); }
};

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

inline constexpr int kMaxPivots = 10000;

// Dense two-phase tableau simplex with Bland's rule. Throws
// Error{NumericalFailure} after kMaxPivots pivots and Error{InvalidArgument}
// for non-finite coefficients or crossed bounds.
Solution solve(const Problem& problem);

}  // namespace boundrl::lp
