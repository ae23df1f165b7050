#pragma once

#include <vector>

#include "covers/error.hpp"
#include "covers/rational.hpp"

namespace covers {

// Exact-rational primal simplex for problems already in slack-feasible form:
//
//   maximize c.y  subject to  A y <= b,  y >= 0,  with b >= 0.
//
// Bland's rule on both the entering and leaving choice, so no cycling.
// Besides the optimum it reports the optimal dual multipliers (read off the
// objective row under the slack columns), which is how the fractional edge
// cover weights are recovered from the fractional matching LP.
struct SimplexResult {
    Rational value;
    std::vector<Rational> primal; // one per variable
    std::vector<Rational> duals;  // one per constraint
};

inline SimplexResult simplex_maximize(const std::vector<std::vector<Rational>>& a,
                                      const std::vector<Rational>& b,
                                      const std::vector<Rational>& c) {
    const size_t m = a.size();
    const size_t n = c.size();
    const size_t cols = n + m + 1;

    std::vector<std::vector<Rational>> t(m + 1, std::vector<Rational>(cols, Rational(0)));
    for (size_t i = 0; i < m; ++i) {
        if (b[i] < Rational(0)) throw ValidationError("simplex: negative right-hand side");
        for (size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
        t[i][n + i] = Rational(1);
        t[i][cols - 1] = b[i];
    }
    for (size_t j = 0; j < n; ++j) t[m][j] = -c[j];

    std::vector<size_t> basis(m);
    for (size_t i = 0; i < m; ++i) basis[i] = n + i;

    for (;;) {
        size_t enter = cols - 1;
        for (size_t j = 0; j + 1 < cols; ++j) {
            if (t[m][j] < Rational(0)) {
                enter = j;
                break;
            }
        }
        if (enter == cols - 1) break; // optimal

        size_t leave = m;
        Rational best_ratio;
        for (size_t i = 0; i < m; ++i) {
            if (t[i][enter] > Rational(0)) {
                Rational ratio = t[i][cols - 1] / t[i][enter];
                if (leave == m || ratio < best_ratio ||
                    (ratio == best_ratio && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
        }
        if (leave == m) throw ValidationError("simplex: unbounded program");

        Rational pivot = t[leave][enter];
        for (size_t j = 0; j < cols; ++j) t[leave][j] /= pivot;
        for (size_t i = 0; i <= m; ++i) {
            if (i == leave || t[i][enter].is_zero()) continue;
            Rational f = t[i][enter];
            for (size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }

    SimplexResult res;
    res.value = t[m][cols - 1];
    res.primal.assign(n, Rational(0));
    for (size_t i = 0; i < m; ++i)
        if (basis[i] < n) res.primal[basis[i]] = t[i][cols - 1];
    res.duals.assign(m, Rational(0));
    for (size_t i = 0; i < m; ++i) res.duals[i] = t[m][n + i];
    return res;
}

} // namespace covers
