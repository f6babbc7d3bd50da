// Copyright 2026 The FockForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "fockforge/common.hpp"
#include "fockforge/fock.hpp"
#include "fockforge/interferometer.hpp"

#include <bit>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace fockforge {

inline constexpr int kMaxRyserDimension = 30;
inline constexpr int kMaxNaiveDimension = 9;

namespace detail {

// Neumaier summation on each component.
struct CompensatedSum {
    double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;

    static void add(double& s, double& c, double x) {
        const double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    void add(Complex z) {
        add(re, cre, z.real());
        add(im, cim, z.imag());
    }
    Complex value() const { return {re + cre, im + cim}; }
};

inline void require_square(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("permanent needs a square matrix");
}

}  // namespace detail

/// Ryser's formula with Gray-code subset order: each step adds or removes one
/// column from the running row sums.
inline Complex permanent_ryser(const ComplexMatrix& m) {
    detail::require_square(m);
    const int n = static_cast<int>(m.rows());
    if (n > kMaxRyserDimension) throw std::invalid_argument("permanent dimension exceeds 30");
    if (n == 0) return 1.0;
    if (n == 1) return m(0, 0);

    std::vector<Complex> row_sums(static_cast<std::size_t>(n), Complex{});
    const std::uint64_t subsets = std::uint64_t{1} << n;
    const bool compensated = n >= 20;
    detail::CompensatedSum acc;
    Complex plain{};
    std::uint64_t gray = 0;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        const int col = std::countr_zero(k);
        const std::uint64_t bit = std::uint64_t{1} << col;
        gray ^= bit;
        const double sign = (gray & bit) ? 1.0 : -1.0;
        Complex prod = 1.0;
        for (int i = 0; i < n; ++i) {
            row_sums[static_cast<std::size_t>(i)] += sign * m(i, col);
            prod *= row_sums[static_cast<std::size_t>(i)];
        }
        // (-1)^{|S|} with |S| = popcount(gray)
        const Complex term = (std::popcount(gray) & 1) ? -prod : prod;
        if (compensated) {
            acc.add(term);
        } else {
            plain += term;
        }
    }
    const Complex total = compensated ? acc.value() : plain;
    return (n & 1) ? -total : total;
}

/// Direct sum over all n! permutations. Used as the independent oracle.
inline Complex permanent_naive(const ComplexMatrix& m) {
    detail::require_square(m);
    const int n = static_cast<int>(m.rows());
    if (n > kMaxNaiveDimension) throw std::invalid_argument("naive permanent dimension exceeds 9");
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Complex sum{};
    do {
        Complex prod = 1.0;
        for (int i = 0; i < n; ++i) prod *= m(i, perm[static_cast<std::size_t>(i)]);
        sum += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sum;
}

/// Permanent after deleting the listed rows and columns (0-based).
inline Complex subpermanent(const ComplexMatrix& m, std::vector<int> delete_rows, std::vector<int> delete_cols) {
    auto keep = [](std::vector<int>& del, Eigen::Index size) {
        std::sort(del.begin(), del.end());
        if (std::adjacent_find(del.begin(), del.end()) != del.end()) {
            throw std::invalid_argument("duplicate index in deletion set");
        }
        std::vector<int> kept;
        for (int i = 0; i < static_cast<int>(size); ++i) {
            if (!std::binary_search(del.begin(), del.end(), i)) kept.push_back(i);
        }
        for (int d : del) {
            if (d < 0 || d >= static_cast<int>(size)) throw std::out_of_range("deletion index out of range");
        }
        return kept;
    };
    const auto rows = keep(delete_rows, m.rows());
    const auto cols = keep(delete_cols, m.cols());
    if (rows.size() != cols.size()) throw std::invalid_argument("remaining submatrix is not square");
    ComplexMatrix sub(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(rows[r], cols[c]);
        }
    }
    return permanent_ryser(sub);
}

/// Row i repeated row_mult[i] times, column j repeated col_mult[j] times.
inline ComplexMatrix expand_multiplicities(const ComplexMatrix& m, const OccupationVector& row_mult,
                                           const OccupationVector& col_mult) {
    if (static_cast<Eigen::Index>(row_mult.size()) != m.rows() ||
        static_cast<Eigen::Index>(col_mult.size()) != m.cols()) {
        throw std::invalid_argument("multiplicity length does not match matrix shape");
    }
    if (row_mult.total() != col_mult.total()) throw std::invalid_argument("photon-number mismatch");
    std::vector<int> rows, cols;
    for (std::size_t i = 0; i < row_mult.size(); ++i) rows.insert(rows.end(), static_cast<std::size_t>(row_mult[i]), static_cast<int>(i));
    for (std::size_t j = 0; j < col_mult.size(); ++j) cols.insert(cols.end(), static_cast<std::size_t>(col_mult[j]), static_cast<int>(j));
    const auto n = static_cast<Eigen::Index>(rows.size());
    ComplexMatrix e(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) e(r, c) = m(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
    }
    return e;
}

inline Complex repeated_index_permanent(const ComplexMatrix& m, const OccupationVector& row_mult,
                                        const OccupationVector& col_mult) {
    if (row_mult.total() > kMaxRyserDimension) throw std::invalid_argument("expanded dimension exceeds 30");
    return permanent_ryser(expand_multiplicities(m, row_mult, col_mult));
}

struct AppendixReport {
    int dimension = 0;
    int samples = 0;
    double max_permanent = 0.0;            // max |per U|
    double max_principal_subpermanent = 0.0;  // max over principal submatrices
    int marcus_newman_violations = 0;
    double min_sub11 = 1.0;  // range of |per U(1|1)|
    double max_sub11 = 0.0;
    int product_bound_violations = 0;  // |2 U12 U21 U13 U31| <= 8/(27|U11|^2), dimension 3
};

/// Random-sample check of the permanent inequalities for unitaries: |per U| <= 1,
/// principal sub-permanents bounded by 1, and Marcus-Newman
/// |per AB|^2 <= per(AA^dag) per(B^dag B) on Gaussian A, B.
inline AppendixReport check_appendix_bounds(int dimension, int samples, std::uint64_t seed) {
    if (dimension < 1 || dimension > 7) throw std::invalid_argument("appendix check supports dimension 1..7");
    if (samples < 0) throw std::invalid_argument("sample count must be non-negative");
    struct Sample {
        double per = 0.0, principal = 0.0, sub11 = 0.0;
        bool mn_violation = false, product_violation = false;
    };
    std::vector<Sample> results(static_cast<std::size_t>(samples));
    const unsigned masks = 1u << dimension;
    parallel_for(results.size(), [&](std::size_t i) {
        const std::uint64_t s = derive_seed(seed, i);
        const ModeUnitary u = random_unitary(dimension, s);
        const ComplexMatrix& m = u.matrix();
        Sample out;
        out.per = std::abs(permanent_ryser(m));
        // Every non-empty proper principal submatrix.
        for (unsigned mask = 1; mask + 1 < masks; ++mask) {
            std::vector<int> del;
            for (int k = 0; k < dimension; ++k) {
                if (mask & (1u << k)) del.push_back(k);
            }
            out.principal = std::max(out.principal, std::abs(subpermanent(m, del, del)));
        }
        if (dimension >= 2) out.sub11 = std::abs(subpermanent(m, {0}, {0}));
        if (dimension == 3 && std::abs(m(0, 0)) > 1e-3) {
            const double lhs = std::abs(2.0 * m(0, 1) * m(1, 0) * m(0, 2) * m(2, 0));
            out.product_violation = lhs > 8.0 / (27.0 * std::norm(m(0, 0))) + 1e-10;
        }
        std::mt19937_64 rng(derive_seed(s, 1));
        std::normal_distribution<double> g;
        ComplexMatrix a(dimension, dimension), b(dimension, dimension);
        for (int r = 0; r < dimension; ++r) {
            for (int c = 0; c < dimension; ++c) {
                const double ar = g(rng), ai = g(rng), br = g(rng), bi = g(rng);
                a(r, c) = {ar, ai};
                b(r, c) = {br, bi};
            }
        }
        const double lhs = std::norm(permanent_ryser(a * b));
        const double rhs = permanent_ryser(a * a.adjoint()).real() * permanent_ryser(b.adjoint() * b).real();
        out.mn_violation = lhs > rhs * (1.0 + 1e-10) + 1e-10;
        results[i] = out;
    });
    AppendixReport report;
    report.dimension = dimension;
    report.samples = samples;
    for (const auto& r : results) {
        report.max_permanent = std::max(report.max_permanent, r.per);
        report.max_principal_subpermanent = std::max(report.max_principal_subpermanent, r.principal);
        report.marcus_newman_violations += r.mn_violation ? 1 : 0;
        report.product_bound_violations += r.product_violation ? 1 : 0;
        report.min_sub11 = std::min(report.min_sub11, r.sub11);
        report.max_sub11 = std::max(report.max_sub11, r.sub11);
    }
    return report;
}

}  // namespace fockforge
