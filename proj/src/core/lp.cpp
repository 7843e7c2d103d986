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

#include "core/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace boundrl::lp {

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "?";
}

std::size_t Problem::add_variable(double lb, double ub, double cost) {
  objective.push_back(cost);
  lower.push_back(lb);
  upper.push_back(ub);
  for (auto& row : rows) row.push_back(0.0);
  return objective.size() - 1;
}

void Problem::add_row(std::vector<double> coefficients, Sense sense, double b) {
  coefficients.resize(num_vars(), 0.0);
  rows.push_back(std::move(coefficients));
  senses.push_back(sense);
  rhs.push_back(b);
}

namespace {

constexpr double kTol = 1e-9;

// x_j = offset + sum(coef * y_k) over nonnegative columns y.
struct VarMap {
  double offset = 0.0;
  std::vector<std::pair<std::size_t, double>> terms;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (n_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, n_); }
  double& obj(std::size_t c) { return at(m_, c); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    if (++pivots_ > kMaxPivots) {
      throw Error(ErrorKind::NumericalFailure, "simplex: pivot limit exceeded");
    }
    const double p = at(r, c);
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  // Objective row holds reduced costs of a maximization written as
  // z - c.x = 0, so a negative entry improves z. Returns false if unbounded.
  bool optimize(const std::vector<bool>& allowed) {
    for (;;) {
      std::size_t enter = n_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (allowed[j] && obj(j) < -kTol) {
          enter = j;
          break;
        }
      }
      if (enter == n_) return true;
      std::size_t leave = m_;
      double best = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kTol) continue;
        const double ratio = rhs(i) / a;
        if (leave == m_ || ratio < best - kTol ||
            (ratio <= best + kTol && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

 private:
  std::size_t m_, n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  int pivots_ = 0;
};

}  // namespace

Solution solve(const Problem& problem) {
  const std::size_t n = problem.num_vars();
  const std::size_t m = problem.rows.size();
  if (problem.lower.size() != n || problem.upper.size() != n || problem.senses.size() != m ||
      problem.rhs.size() != m) {
    throw Error(ErrorKind::InvalidArgument, "lp: inconsistent problem dimensions");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(problem.objective[j]) || std::isnan(problem.lower[j]) ||
        std::isnan(problem.upper[j]) || problem.lower[j] > problem.upper[j] ||
        problem.lower[j] == kInf || problem.upper[j] == -kInf) {
      throw Error(ErrorKind::InvalidArgument, "lp: invalid bounds or cost for variable " + std::to_string(j));
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (problem.rows[i].size() != n || !std::isfinite(problem.rhs[i]) ||
        !std::all_of(problem.rows[i].begin(), problem.rows[i].end(), [](double v) { return std::isfinite(v); })) {
      throw Error(ErrorKind::InvalidArgument, "lp: invalid row " + std::to_string(i));
    }
  }

  // Substitute bounded variables by nonnegative columns.
  std::vector<VarMap> maps(n);
  std::size_t ny = 0;
  struct BoundRow {
    std::size_t col;
    double ub;
  };
  std::vector<BoundRow> bound_rows;
  for (std::size_t j = 0; j < n; ++j) {
    const double lb = problem.lower[j];
    const double ub = problem.upper[j];
    if (std::isfinite(lb)) {
      maps[j] = {lb, {{ny, 1.0}}};
      if (std::isfinite(ub)) bound_rows.push_back({ny, ub - lb});
      ++ny;
    } else if (std::isfinite(ub)) {
      maps[j] = {ub, {{ny, -1.0}}};
      ++ny;
    } else {
      maps[j] = {0.0, {{ny, 1.0}, {ny + 1, -1.0}}};
      ny += 2;
    }
  }

  struct Row {
    std::vector<double> a;
    Sense sense;
    double b;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < m; ++i) {
    Row row{std::vector<double>(ny, 0.0), problem.senses[i], problem.rhs[i]};
    for (std::size_t j = 0; j < n; ++j) {
      const double a = problem.rows[i][j];
      if (a == 0.0) continue;
      row.b -= a * maps[j].offset;
      for (const auto& [k, c] : maps[j].terms) row.a[k] += a * c;
    }
    rows.push_back(std::move(row));
  }
  for (const auto& br : bound_rows) {
    Row row{std::vector<double>(ny, 0.0), Sense::LessEq, br.ub};
    row.a[br.col] = 1.0;
    rows.push_back(std::move(row));
  }
  for (auto& row : rows) {
    if (row.b < 0.0) {
      for (auto& a : row.a) a = -a;
      row.b = -row.b;
      if (row.sense == Sense::LessEq) {
        row.sense = Sense::GreaterEq;
      } else if (row.sense == Sense::GreaterEq) {
        row.sense = Sense::LessEq;
      }
    }
  }

  std::vector<double> cost(ny, 0.0);
  const double sign = problem.maximize ? 1.0 : -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& [k, c] : maps[j].terms) cost[k] += sign * problem.objective[j] * c;
  }

  // Columns: y, then one slack/surplus per inequality, then artificials.
  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  for (const auto& row : rows) {
    if (row.sense != Sense::Equal) ++n_slack;
    if (row.sense != Sense::LessEq) ++n_art;
  }
  const std::size_t mr = rows.size();
  const std::size_t ncols = ny + n_slack + n_art;
  const std::size_t art_begin = ny + n_slack;
  Tableau t(mr, ncols);
  std::size_t s = ny;
  std::size_t a = art_begin;
  for (std::size_t i = 0; i < mr; ++i) {
    for (std::size_t k = 0; k < ny; ++k) t.at(i, k) = rows[i].a[k];
    t.rhs(i) = rows[i].b;
    switch (rows[i].sense) {
      case Sense::LessEq:
        t.at(i, s) = 1.0;
        t.basis()[i] = s++;
        break;
      case Sense::GreaterEq:
        t.at(i, s++) = -1.0;
        t.at(i, a) = 1.0;
        t.basis()[i] = a++;
        break;
      case Sense::Equal:
        t.at(i, a) = 1.0;
        t.basis()[i] = a++;
        break;
    }
  }

  std::vector<bool> allowed(ncols, true);
  if (n_art > 0) {
    // Phase 1: maximize -sum(artificials).
    for (std::size_t j = art_begin; j < ncols; ++j) t.obj(j) = 1.0;
    for (std::size_t i = 0; i < mr; ++i) {
      if (t.basis()[i] >= art_begin) {
        for (std::size_t j = 0; j <= ncols; ++j) t.obj(j) -= t.at(i, j);
      }
    }
    t.optimize(allowed);
    double scale = 1.0;
    for (const auto& row : rows) scale = std::max(scale, std::abs(row.b));
    if (t.obj(ncols) < -1e-9 * scale) {
      return {Status::Infeasible, 0.0, {}};
    }
    for (std::size_t i = 0; i < mr; ++i) {
      if (t.basis()[i] < art_begin) continue;
      for (std::size_t j = 0; j < art_begin; ++j) {
        if (std::abs(t.at(i, j)) > kTol) {
          t.pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t j = art_begin; j < ncols; ++j) allowed[j] = false;
  }

  // Phase 2.
  for (std::size_t j = 0; j <= ncols; ++j) t.obj(j) = 0.0;
  for (std::size_t k = 0; k < ny; ++k) t.obj(k) = -cost[k];
  for (std::size_t i = 0; i < mr; ++i) {
    const std::size_t b = t.basis()[i];
    const double f = t.obj(b);
    if (f == 0.0) continue;
    for (std::size_t j = 0; j <= ncols; ++j) t.obj(j) -= f * t.at(i, j);
  }
  if (!t.optimize(allowed)) return {Status::Unbounded, 0.0, {}};

  std::vector<double> y(ncols, 0.0);
  for (std::size_t i = 0; i < mr; ++i) y[t.basis()[i]] = t.rhs(i);
  Solution sol;
  sol.status = Status::Optimal;
  sol.x.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double v = maps[j].offset;
    for (const auto& [k, c] : maps[j].terms) v += c * y[k];
    // Snap onto bounds that were reached up to rounding.
    if (std::isfinite(problem.lower[j]) && v < problem.lower[j]) v = problem.lower[j];
    if (std::isfinite(problem.upper[j]) && v > problem.upper[j]) v = problem.upper[j];
    sol.x[j] = v;
  }
  for (std::size_t j = 0; j < n; ++j) sol.objective += problem.objective[j] * sol.x[j];
  return sol;
}

}  // namespace boundrl::lp
