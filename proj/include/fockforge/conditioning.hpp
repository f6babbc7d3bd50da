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

// Fock-space lift of mode unitaries and post-selected conditional operators.

#pragma once

#include "fockforge/common.hpp"
#include "fockforge/fock.hpp"
#include "fockforge/interferometer.hpp"
#include "fockforge/permanent.hpp"

#include <array>
#include <bit>
#include <numeric>
#include <cmath>
#include <unordered_map>
#include <vector>

namespace fockforge {

/// Photons injected into each auxiliary mode (auxiliary modes in ascending order).
using AncillaSpec = OccupationVector;
/// Photons detected in each auxiliary mode.
using DetectionSpec = OccupationVector;

/// <output| U |input> = per(L[output, input]) / sqrt(prod input! prod output!).
inline Complex fock_lift_amplitude(const ModeUnitary& u, const OccupationVector& input,
                                   const OccupationVector& output) {
    const auto n = static_cast<std::size_t>(u.dimension());
    if (input.size() != n || output.size() != n) throw std::invalid_argument("occupation length does not match unitary");
    if (input.total() != output.total()) return 0.0;
    const Complex per = repeated_index_permanent(u.matrix(), output, input);
    return per / std::sqrt(input.factorial_product() * output.factorial_product());
}

inline constexpr int kMaxOraclePhotons = 10;

/// Output state from multinomial expansion of prod_j (sum_l L(l, j) a_l^dag)^{n_j}
/// acting on vacuum. Shares no code with the permanent path.
inline PureState fock_lift_oracle(const ModeUnitary& u, const OccupationVector& input) {
    const int modes = u.dimension();
    if (static_cast<int>(input.size()) != modes) throw std::invalid_argument("occupation length does not match unitary");
    if (input.total() > kMaxOraclePhotons) throw std::invalid_argument("oracle expansion limited to 10 photons");

    // Monomial coefficients keyed by creation-operator exponents.
    std::unordered_map<OccupationVector, Complex, OccupationHash> poly;
    poly.emplace(OccupationVector(std::vector<int>(static_cast<std::size_t>(modes), 0)), 1.0);
    for (int j = 0; j < modes; ++j) {
        for (int rep = 0; rep < input[static_cast<std::size_t>(j)]; ++rep) {
            std::unordered_map<OccupationVector, Complex, OccupationHash> next;
            for (const auto& [mono, coeff] : poly) {
                for (int l = 0; l < modes; ++l) {
                    const Complex w = u(l, j);
                    if (w == Complex{}) continue;
                    auto counts = mono.counts();
                    counts[static_cast<std::size_t>(l)] += 1;
                    next[OccupationVector(std::move(counts))] += coeff * w;
                }
            }
            poly = std::move(next);
        }
    }
    const FockBasis basis = FockBasis::fixed_total(modes, input.total());
    ComplexVector amps = ComplexVector::Zero(static_cast<Eigen::Index>(basis.size()));
    const double norm_in = std::sqrt(input.factorial_product());
    for (const auto& [mono, coeff] : poly) {
        // (a^dag)^p |0> = sqrt(p!) |p>
        amps[static_cast<Eigen::Index>(*basis.index_of(mono))] = coeff * std::sqrt(mono.factorial_product()) / norm_in;
    }
    return PureState(basis, std::move(amps));
}

/// Unitary lift restricted to the fixed-total sector with `total` photons.
inline FockOperator fock_lift_matrix(const ModeUnitary& u, int total) {
    const FockBasis basis = FockBasis::fixed_total(u.dimension(), total);
    const auto dim = static_cast<Eigen::Index>(basis.size());
    ComplexMatrix m(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) {
            m(r, c) = fock_lift_amplitude(u, basis[static_cast<std::size_t>(c)], basis[static_cast<std::size_t>(r)]);
        }
    }
    return FockOperator(basis, std::move(m));
}

/// Precomputed index patterns for a set of conditional-operator entries, so the
/// same entries can be re-evaluated cheaply for many unitaries.
class AmplitudePlan {
  public:
    struct Entry {
        Eigen::Index row = 0, col = 0;
        std::vector<int> rows, cols;  // expanded permanent indices
        double scale = 1.0;           // 1 / sqrt(prod in! prod out!)
    };

    /// Entries (out_signal, in_signal) of the conditional operator for every
    /// signal occupation in `basis` whose photon count balances.
    AmplitudePlan(int modes, std::vector<int> signal_modes, const AncillaSpec& aux, const DetectionSpec& det,
                  const FockBasis& basis, const std::vector<std::size_t>& columns)
        : modes_(modes), signal_modes_(std::move(signal_modes)), aux_(aux), det_(det), basis_(basis) {
        std::vector<bool> is_signal(static_cast<std::size_t>(modes), false);
        for (int s : signal_modes_) {
            if (s < 0 || s >= modes) throw std::out_of_range("signal mode out of range");
            if (is_signal[static_cast<std::size_t>(s)]) throw std::invalid_argument("duplicate signal mode");
            is_signal[static_cast<std::size_t>(s)] = true;
        }
        for (int m = 0; m < modes; ++m) {
            if (!is_signal[static_cast<std::size_t>(m)]) aux_modes_.push_back(m);
        }
        if (aux.size() != aux_modes_.size() || det.size() != aux_modes_.size()) {
            throw std::invalid_argument("ancilla/detection specs must cover exactly the non-signal modes");
        }
        if (basis.mode_count() != static_cast<int>(signal_modes_.size())) {
            throw std::invalid_argument("signal basis mode count mismatch");
        }
        const int shift = aux.total() - det.total();
        for (std::size_t c : columns) {
            const OccupationVector full_in = merge(basis[c], aux);
            for (std::size_t r = 0; r < basis.size(); ++r) {
                if (basis[r].total() != basis[c].total() + shift) continue;
                const OccupationVector full_out = merge(basis[r], det);
                Entry e;
                e.row = static_cast<Eigen::Index>(r);
                e.col = static_cast<Eigen::Index>(c);
                for (int m = 0; m < modes; ++m) {
                    e.rows.insert(e.rows.end(), static_cast<std::size_t>(full_out[static_cast<std::size_t>(m)]), m);
                    e.cols.insert(e.cols.end(), static_cast<std::size_t>(full_in[static_cast<std::size_t>(m)]), m);
                }
                if (e.rows.size() > static_cast<std::size_t>(kMaxRyserDimension)) {
                    throw std::invalid_argument("conditional operator needs more than 30 photons");
                }
                e.scale = 1.0 / std::sqrt(full_in.factorial_product() * full_out.factorial_product());
                entries_.push_back(std::move(e));
            }
        }
    }

    const FockBasis& basis() const { return basis_; }
    const std::vector<Entry>& entries() const { return entries_; }

    /// Conditional operator for mode matrix `l` (entries outside the plan are zero).
    ComplexMatrix evaluate(const ComplexMatrix& l) const {
        const auto dim = static_cast<Eigen::Index>(basis_.size());
        ComplexMatrix y = ComplexMatrix::Zero(dim, dim);
        for (const auto& e : entries_) y(e.row, e.col) = e.scale * gathered_permanent(l, e.rows, e.cols);
        return y;
    }

    /// Full occupation on all modes from a signal occupation and an aux/det pattern.
    OccupationVector merge(const OccupationVector& signal, const OccupationVector& ancilla) const {
        std::vector<int> counts(static_cast<std::size_t>(modes_), 0);
        for (std::size_t i = 0; i < signal_modes_.size(); ++i) counts[static_cast<std::size_t>(signal_modes_[i])] = signal[i];
        for (std::size_t i = 0; i < aux_modes_.size(); ++i) counts[static_cast<std::size_t>(aux_modes_[i])] = ancilla[i];
        return OccupationVector(std::move(counts));
    }

  private:
    // Ryser on the gathered submatrix; small sizes use a stack buffer.
    static Complex gathered_permanent(const ComplexMatrix& l, const std::vector<int>& rows,
                                      const std::vector<int>& cols) {
        const std::size_t n = rows.size();
        if (n == 0) return 1.0;
        if (n == 1) return l(rows[0], cols[0]);
        if (n == 2) return l(rows[0], cols[0]) * l(rows[1], cols[1]) + l(rows[0], cols[1]) * l(rows[1], cols[0]);
        if (n > 8) {
            ComplexMatrix sub(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < n; ++c) sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = l(rows[r], cols[c]);
            }
            return permanent_ryser(sub);
        }
        std::array<Complex, 64> a{};
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) a[r * 8 + c] = l(rows[r], cols[c]);
        }
        std::array<Complex, 8> sums{};
        Complex total{};
        unsigned gray = 0;
        for (unsigned k = 1; k < (1u << n); ++k) {
            const int col = std::countr_zero(k);
            gray ^= 1u << col;
            const double sign = (gray >> col) & 1u ? 1.0 : -1.0;
            Complex prod = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                sums[i] += sign * a[i * 8 + static_cast<std::size_t>(col)];
                prod *= sums[i];
            }
            total += (std::popcount(gray) & 1) ? -prod : prod;
        }
        return (n & 1) ? -total : total;
    }

    int modes_;
    std::vector<int> signal_modes_;
    std::vector<int> aux_modes_;
    AncillaSpec aux_;
    DetectionSpec det_;
    FockBasis basis_;
    std::vector<Entry> entries_;
};

/// Post-selected operator on the signal modes, stored exactly as projected.
struct ConditionalOperator {
    FockOperator op;
    ModeUnitary lambda;
    std::vector<int> signal_modes;
    AncillaSpec aux;
    DetectionSpec det;

    const ComplexMatrix& matrix() const { return op.matrix; }
    const FockBasis& basis() const { return op.basis; }
    Complex diagonal(int n) const { return op.matrix(n, n); }
};

/// Entries <out_s, det| U |in_s, aux> over the per-mode signal basis with the
/// given cutoff. Output components that would put more than `signal_cutoff`
/// photons into a signal mode fall outside the basis and are dropped; they
/// only arise for columns near the cutoff when the ancillas add photons.
inline ConditionalOperator extract_conditional_operator(const ModeUnitary& u, std::vector<int> signal_modes,
                                                        const AncillaSpec& aux, const DetectionSpec& det,
                                                        int signal_cutoff) {
    if (signal_modes.empty()) throw std::invalid_argument("at least one signal mode required");
    if (signal_cutoff < 0) throw std::invalid_argument("signal cutoff must be non-negative");
    if (signal_cutoff < std::abs(aux.total() - det.total())) {
        throw std::invalid_argument("signal cutoff is below the ancilla/detection photon imbalance");
    }
    const FockBasis basis = FockBasis::per_mode_max(static_cast<int>(signal_modes.size()), signal_cutoff);
    std::vector<std::size_t> columns(basis.size());
    std::iota(columns.begin(), columns.end(), std::size_t{0});
    const AmplitudePlan plan(u.dimension(), signal_modes, aux, det, basis, columns);
    return ConditionalOperator{FockOperator(basis, plan.evaluate(u.matrix())), u, std::move(signal_modes), aux, det};
}

/// ||Y psi||^2 for a normalized input.
inline double success_probability(const ConditionalOperator& y, const PureState& input) {
    if (std::abs(input.norm_squared() - 1.0) > 1e-9) throw std::invalid_argument("input state is not normalized");
    const PureState in = input.basis == y.basis() ? input : embed(input, y.basis());
    return (y.matrix() * in.amplitudes).squaredNorm();
}

struct PropositionReport {
    int which = 0;
    int n_aux = 0;
    std::uint64_t seed_used = 0;
    int reseeds = 0;
    double max_deviation = 0.0;  // relative to the largest analytic entry
};

/// Compares an extracted conditional operator with the analytic forms:
///   1: aux photons in, vacuum detected  -> prod L(0,i) (a^dag)^N L00^n
///   2: vacuum in, photons detected      -> prod L(i,0) L00^n a^N
///   3: photons in and detected          -> L00^n * (degree-N polynomial in n),
///      fitted on n = 0..N and checked on the remaining layers; the leading
///      coefficient must equal prod L(0,j) L(j,0) / L00^N.
/// Mode 0 is the signal; a draw with |L00| < 1e-6 is re-seeded.
inline PropositionReport verify_proposition(int which, int n_aux, std::uint64_t seed, int cutoff) {
    if (which < 1 || which > 3) throw std::invalid_argument("proposition must be 1, 2 or 3");
    if (n_aux < 1 || n_aux > 4) throw std::invalid_argument("n_aux must be in [1, 4]");
    if (cutoff < n_aux + (which == 3 ? 2 : 1)) throw std::invalid_argument("cutoff too small for the check");

    PropositionReport report;
    report.which = which;
    report.n_aux = n_aux;
    std::uint64_t s = seed;
    ModeUnitary u = random_unitary(n_aux + 1, s);
    while (std::abs(u(0, 0)) < 1e-6) {
        ++report.reseeds;
        s = derive_seed(seed, static_cast<std::uint64_t>(report.reseeds));
        u = random_unitary(n_aux + 1, s);
    }
    report.seed_used = s;
    const ComplexMatrix& l = u.matrix();
    const Complex l00 = l(0, 0);
    const OccupationVector ones(std::vector<int>(static_cast<std::size_t>(n_aux), 1));
    const OccupationVector zeros(std::vector<int>(static_cast<std::size_t>(n_aux), 0));
    const int big_n = n_aux;

    const AncillaSpec aux = which == 2 ? zeros : ones;
    const DetectionSpec det = which == 1 ? zeros : ones;
    const ConditionalOperator y = extract_conditional_operator(u, {0}, aux, det, cutoff);
    const ComplexMatrix& ym = y.matrix();
    const Eigen::Index dim = cutoff + 1;
    ComplexMatrix expected = ComplexMatrix::Zero(dim, dim);

    Complex row_prod = 1.0, col_prod = 1.0;
    for (int i = 1; i <= big_n; ++i) {
        row_prod *= l(0, i);
        col_prod *= l(i, 0);
    }
    auto falling = [](int n, int k) {  // n!/(n-k)!
        double f = 1.0;
        for (int i = 0; i < k; ++i) f *= n - i;
        return f;
    };

    if (which == 1) {
        for (int n = 0; n + big_n <= cutoff; ++n) {
            expected(n + big_n, n) = row_prod * std::sqrt(falling(n + big_n, big_n)) * std::pow(l00, n);
        }
    } else if (which == 2) {
        for (int n = big_n; n <= cutoff; ++n) {
            expected(n - big_n, n) = col_prod * std::pow(l00, n - big_n) * std::sqrt(falling(n, big_n));
        }
    } else {
        // Interpolate y(n) / L00^n on n = 0..N (Vandermonde), evaluate elsewhere.
        const int pts = big_n + 1;
        ComplexMatrix v(pts, pts);
        ComplexVector rhs(pts);
        for (int n = 0; n < pts; ++n) {
            for (int k = 0; k < pts; ++k) v(n, k) = std::pow(static_cast<double>(n), k);
            rhs[n] = ym(n, n) / std::pow(l00, n);
        }
        const ComplexVector coeffs = v.fullPivLu().solve(rhs);
        for (int n = 0; n <= cutoff; ++n) {
            Complex p{};
            for (int k = pts - 1; k >= 0; --k) p = p * static_cast<double>(n) + coeffs[k];
            expected(n, n) = p * std::pow(l00, n);
        }
        const Complex lead = row_prod * col_prod / std::pow(l00, big_n);
        report.max_deviation = std::abs(coeffs[big_n] - lead) / std::max(std::abs(lead), 1e-300);
    }
    const double scale = std::max(max_abs(expected), 1e-300);
    report.max_deviation = std::max(report.max_deviation, max_abs(ym - expected) / scale);
    return report;
}

}  // namespace fockforge
