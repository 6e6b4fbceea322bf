/*
 Copyright 2026 The tablefuse Authors
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

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "tablefuse/error.hpp"

namespace tablefuse
{

/// Result of a rectangular linear assignment: `row_to_col[i]` is the column
/// matched to row i, or -1 when row i is left unmatched (only possible when
/// there are more rows than columns).
struct Assignment
{
    std::vector<Eigen::Index> row_to_col;
    double total_cost = 0.0;
};

namespace detail
{

// Shortest-augmenting-path Hungarian method with row/column potentials.
// Requires rows <= cols; every row is matched.
template <typename Derived>
std::vector<Eigen::Index> solve_wide(const Eigen::MatrixBase<Derived>& cost)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = cost.rows();
    const Eigen::Index m = cost.cols();
    const Scalar inf = std::numeric_limits<Scalar>::infinity();

    // 1-based, slot 0 is the virtual source column.
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> u = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n + 1);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(m + 1);
    std::vector<Eigen::Index> owner(static_cast<std::size_t>(m + 1), 0);
    std::vector<Eigen::Index> way(static_cast<std::size_t>(m + 1), 0);

    for (Eigen::Index row = 1; row <= n; ++row)
    {
        owner[0] = row;
        Eigen::Index col0 = 0;
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> minv =
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(m + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(m + 1), 0);
        do
        {
            used[static_cast<std::size_t>(col0)] = 1;
            const Eigen::Index row0 = owner[static_cast<std::size_t>(col0)];
            Scalar delta = inf;
            Eigen::Index col1 = 0;
            for (Eigen::Index j = 1; j <= m; ++j)
            {
                if (used[static_cast<std::size_t>(j)])
                    continue;
                const Scalar reduced = cost(row0 - 1, j - 1) - u[row0] - v[j];
                if (reduced < minv[j])
                {
                    minv[j] = reduced;
                    way[static_cast<std::size_t>(j)] = col0;
                }
                if (minv[j] < delta)
                {
                    delta = minv[j];
                    col1 = j;
                }
            }
            for (Eigen::Index j = 0; j <= m; ++j)
            {
                if (used[static_cast<std::size_t>(j)])
                {
                    u[owner[static_cast<std::size_t>(j)]] += delta;
                    v[j] -= delta;
                }
                else
                {
                    minv[j] -= delta;
                }
            }
            col0 = col1;
        } while (owner[static_cast<std::size_t>(col0)] != 0);

        do
        {
            const Eigen::Index col1 = way[static_cast<std::size_t>(col0)];
            owner[static_cast<std::size_t>(col0)] = owner[static_cast<std::size_t>(col1)];
            col0 = col1;
        } while (col0 != 0);
    }

    std::vector<Eigen::Index> row_to_col(static_cast<std::size_t>(n), -1);
    for (Eigen::Index j = 1; j <= m; ++j)
        if (owner[static_cast<std::size_t>(j)] != 0)
            row_to_col[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)] - 1)] = j - 1;
    return row_to_col;
}

} // namespace detail

/// Minimum-cost assignment on a dense rectangular cost matrix. Every row is
/// matched when rows <= cols; otherwise every column is matched and the
/// surplus rows are reported as -1. Costs must be finite.
template <typename Derived>
Assignment solve_assignment(const Eigen::MatrixBase<Derived>& cost)
{
    if (!cost.allFinite())
        throw InvalidArgument("assignment cost matrix has non-finite entries");

    Assignment result;
    const Eigen::Index n = cost.rows();
    const Eigen::Index m = cost.cols();
    result.row_to_col.assign(static_cast<std::size_t>(n), -1);
    if (n == 0 || m == 0)
        return result;

    if (n <= m)
    {
        result.row_to_col = detail::solve_wide(cost);
    }
    else
    {
        const auto col_to_row = detail::solve_wide(cost.transpose());
        for (std::size_t j = 0; j < col_to_row.size(); ++j)
            result.row_to_col[static_cast<std::size_t>(col_to_row[j])] = static_cast<Eigen::Index>(j);
    }

    for (Eigen::Index i = 0; i < n; ++i)
    {
        const Eigen::Index j = result.row_to_col[static_cast<std::size_t>(i)];
        if (j >= 0)
            result.total_cost += static_cast<double>(cost(i, j));
    }
    return result;
}

} // namespace tablefuse
