#pragma once
// Small dense linear algebra over big floats: determinants (cofactor expansion
// for small orders, LU with partial pivoting above), linear solves, and power
// iteration for the Perron root of a nonnegative matrix. System sizes here are
// the handful of unknowns of a characteristic system, so O(n^3) is plenty.

#include "subcrit/domain.hpp"

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace subcrit {

using fmatrix = std::vector<std::vector<bigfloat>>;

inline bigfloat det_cofactor(const fmatrix& m) {
    const size_t n = m.size();
    if (n == 0) return bigfloat(1);
    if (n == 1) return m[0][0];
    if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    bigfloat acc(0);
    // Expand along the first row; minors reuse a scratch matrix.
    for (size_t j = 0; j < n; ++j) {
        if (m[0][j] == 0) continue;
        fmatrix minor(n - 1, std::vector<bigfloat>(n - 1));
        for (size_t r = 1; r < n; ++r) {
            size_t cc = 0;
            for (size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor[r - 1][cc++] = m[r][c];
            }
        }
        bigfloat term = m[0][j] * det_cofactor(minor);
        if (j % 2) acc -= term;
        else acc += term;
    }
    return acc;
}

struct lu_factors {
    fmatrix lu;                 // packed L (unit diagonal) and U
    std::vector<size_t> perm;   // row permutation
    int sign = 1;
    bool singular = false;
};

inline lu_factors lu_decompose(fmatrix a) {
    const size_t n = a.size();
    lu_factors f;
    f.perm.resize(n);
    for (size_t i = 0; i < n; ++i) f.perm[i] = i;
    for (size_t k = 0; k < n; ++k) {
        size_t piv = k;
        bigfloat best = abs(a[k][k]);
        for (size_t i = k + 1; i < n; ++i) {
            bigfloat cand = abs(a[i][k]);
            if (cand > best) {
                best = cand;
                piv = i;
            }
        }
        if (best == 0) {
            f.singular = true;
            f.lu = std::move(a);
            return f;
        }
        if (piv != k) {
            std::swap(a[piv], a[k]);
            std::swap(f.perm[piv], f.perm[k]);
            f.sign = -f.sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            a[i][k] /= a[k][k];
            for (size_t j = k + 1; j < n; ++j) a[i][j] -= a[i][k] * a[k][j];
        }
    }
    f.lu = std::move(a);
    return f;
}

inline bigfloat det_lu(const fmatrix& m) {
    lu_factors f = lu_decompose(m);
    if (f.singular) return bigfloat(0);
    bigfloat acc(f.sign);
    for (size_t i = 0; i < f.lu.size(); ++i) acc *= f.lu[i][i];
    return acc;
}

inline bigfloat determinant(const fmatrix& m) {
    return m.size() <= 4 ? det_cofactor(m) : det_lu(m);
}

inline std::vector<bigfloat> lu_solve(const lu_factors& f, const std::vector<bigfloat>& b) {
    if (f.singular)
        throw std::runtime_error("linear solve: matrix is singular to working precision");
    const size_t n = b.size();
    std::vector<bigfloat> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
    for (size_t i = 1; i < n; ++i)
        for (size_t j = 0; j < i; ++j) x[i] -= f.lu[i][j] * x[j];
    for (size_t i = n; i-- > 0;) {
        for (size_t j = i + 1; j < n; ++j) x[i] -= f.lu[i][j] * x[j];
        x[i] /= f.lu[i][i];
    }
    return x;
}

inline std::vector<bigfloat> solve_linear(fmatrix a, const std::vector<bigfloat>& b) {
    return lu_solve(lu_decompose(std::move(a)), b);
}

struct perron_result {
    bigfloat lambda;
    std::vector<bigfloat> vec;  // nonnegative, sup-norm 1
    unsigned iterations = 0;
    bool converged = false;
};

// Power iteration for the dominant eigenvalue of a (componentwise) nonnegative
// matrix. For the left eigenvector, pass the transpose.
inline perron_result perron_power(const fmatrix& a, const bigfloat& tol,
                                  unsigned max_iterations = 20000) {
    const size_t n = a.size();
    perron_result out;
    out.vec.assign(n, bigfloat(1));
    out.lambda = 0;
    for (unsigned it = 1; it <= max_iterations; ++it) {
        std::vector<bigfloat> w(n, bigfloat(0));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                if (a[i][j] != 0) w[i] += a[i][j] * out.vec[j];
        bigfloat norm(0);
        for (const bigfloat& x : w)
            if (abs(x) > norm) norm = abs(x);
        out.iterations = it;
        if (norm == 0) {
            out.lambda = 0;
            out.converged = true;  // nilpotent direction: spectral radius 0
            return out;
        }
        for (bigfloat& x : w) x /= norm;
        bigfloat prev = out.lambda;
        out.lambda = norm;
        out.vec = std::move(w);
        if (it > 1 && abs(out.lambda - prev) <= tol * (bigfloat(1) + abs(out.lambda))) {
            out.converged = true;
            return out;
        }
    }
    return out;
}

inline fmatrix transpose(const fmatrix& a) {
    const size_t n = a.size();
    fmatrix t(n, std::vector<bigfloat>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) t[j][i] = a[i][j];
    return t;
}

} // namespace subcrit
