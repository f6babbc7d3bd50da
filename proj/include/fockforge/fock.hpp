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

// Truncated Fock spaces: occupation bases, pure and mixed states, ladder
// operators, displacement, tensor products and partial traces.

#pragma once

#include "fockforge/common.hpp"

#include <cmath>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace fockforge {

/// Photon counts per mode.
class OccupationVector {
  public:
    OccupationVector() = default;
    explicit OccupationVector(std::vector<int> counts) : counts_(std::move(counts)) {
        for (int c : counts_) {
            if (c < 0) throw std::invalid_argument("occupation counts must be non-negative");
        }
    }
    OccupationVector(std::initializer_list<int> counts) : OccupationVector(std::vector<int>(counts)) {}

    std::size_t size() const { return counts_.size(); }
    int operator[](std::size_t mode) const { return counts_[mode]; }
    const std::vector<int>& counts() const { return counts_; }

    int total() const {
        int t = 0;
        for (int c : counts_) t += c;
        return t;
    }

    /// Product of factorials of the counts.
    double factorial_product() const {
        double f = 1.0;
        for (int c : counts_) f *= factorial(c);
        return f;
    }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(counts_[i]);
        }
        return s;
    }

    friend bool operator==(const OccupationVector&, const OccupationVector&) = default;
    friend auto operator<=>(const OccupationVector&, const OccupationVector&) = default;

  private:
    std::vector<int> counts_;
};

struct OccupationHash {
    std::size_t operator()(const OccupationVector& o) const noexcept {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (int c : o.counts()) {
            h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

enum class CutoffPolicy { FixedTotal, PerModeMax };

/// Ordered enumeration of occupation vectors: ascending total photon number,
/// lexicographic within each total. Immutable; copies share storage.
class FockBasis {
  public:
    static FockBasis fixed_total(int modes, int total) { return FockBasis(modes, CutoffPolicy::FixedTotal, total); }
    static FockBasis per_mode_max(int modes, int cutoff) {
        return FockBasis(modes, CutoffPolicy::PerModeMax, cutoff);
    }

    int mode_count() const { return impl_->modes; }
    CutoffPolicy policy() const { return impl_->policy; }
    /// Total photon number (FixedTotal) or per-mode maximum (PerModeMax).
    int cutoff() const { return impl_->cutoff; }
    std::size_t size() const { return impl_->states.size(); }
    const OccupationVector& operator[](std::size_t i) const { return impl_->states[i]; }
    const std::vector<OccupationVector>& states() const { return impl_->states; }

    std::optional<std::size_t> index_of(const OccupationVector& o) const {
        auto it = impl_->index.find(o);
        if (it == impl_->index.end()) return std::nullopt;
        return it->second;
    }
    bool contains(const OccupationVector& o) const { return impl_->index.count(o) != 0; }

    /// Largest occupation any single mode can carry in this basis.
    int max_occupation() const { return impl_->cutoff; }

    friend bool operator==(const FockBasis& a, const FockBasis& b) {
        return a.impl_->modes == b.impl_->modes && a.impl_->policy == b.impl_->policy &&
               a.impl_->cutoff == b.impl_->cutoff;
    }

  private:
    struct Impl {
        int modes;
        CutoffPolicy policy;
        int cutoff;
        std::vector<OccupationVector> states;
        std::unordered_map<OccupationVector, std::size_t, OccupationHash> index;
    };

    FockBasis(int modes, CutoffPolicy policy, int cutoff) {
        if (modes < 1) throw std::invalid_argument("basis needs at least one mode");
        if (cutoff < 0) throw std::invalid_argument("basis cutoff must be non-negative");
        auto impl = std::make_shared<Impl>();
        impl->modes = modes;
        impl->policy = policy;
        impl->cutoff = cutoff;
        const int lo = policy == CutoffPolicy::FixedTotal ? cutoff : 0;
        const int hi = policy == CutoffPolicy::FixedTotal ? cutoff : modes * cutoff;
        for (int total = lo; total <= hi; ++total) {
            std::vector<int> counts(modes, 0);
            enumerate(counts, 0, total, policy == CutoffPolicy::PerModeMax ? cutoff : total, impl->states);
        }
        for (std::size_t i = 0; i < impl->states.size(); ++i) impl->index.emplace(impl->states[i], i);
        impl_ = std::move(impl);
    }

    // Lexicographic ascending: the first mode varies slowest.
    static void enumerate(std::vector<int>& counts, int mode, int remaining, int cap,
                          std::vector<OccupationVector>& out) {
        const int n = static_cast<int>(counts.size());
        if (mode == n - 1) {
            if (remaining <= cap) {
                counts[mode] = remaining;
                out.emplace_back(counts);
            }
            return;
        }
        for (int c = 0; c <= std::min(cap, remaining); ++c) {
            counts[mode] = c;
            enumerate(counts, mode + 1, remaining - c, cap, out);
        }
        counts[mode] = 0;
    }

    std::shared_ptr<const Impl> impl_;
};

/// Amplitudes over a basis. Sub-normalized vectors are allowed (post-selection
/// output); normalization is always an explicit call.
struct PureState {
    FockBasis basis;
    ComplexVector amplitudes;

    PureState(FockBasis b, ComplexVector a) : basis(std::move(b)), amplitudes(std::move(a)) {
        if (static_cast<std::size_t>(amplitudes.size()) != basis.size()) {
            throw std::invalid_argument("amplitude count does not match basis size");
        }
        if (!amplitudes.allFinite()) throw std::invalid_argument("state amplitudes must be finite");
    }

    double norm_squared() const { return amplitudes.squaredNorm(); }

    Complex amplitude(const OccupationVector& o) const {
        auto idx = basis.index_of(o);
        return idx ? amplitudes[static_cast<Eigen::Index>(*idx)] : Complex{};
    }
};

/// Density matrix over a basis.
struct MixedState {
    FockBasis basis;
    ComplexMatrix matrix;

    MixedState(FockBasis b, ComplexMatrix m) : basis(std::move(b)), matrix(std::move(m)) {
        const auto n = static_cast<Eigen::Index>(basis.size());
        if (matrix.rows() != n || matrix.cols() != n) {
            throw std::invalid_argument("density matrix does not match basis size");
        }
        if (!matrix.allFinite()) throw std::invalid_argument("density matrix must be finite");
        const double scale = std::max(1.0, max_abs(matrix));
        if (max_abs(matrix - matrix.adjoint()) > 1e-12 * scale) {
            throw std::invalid_argument("density matrix is not Hermitian");
        }
        if (trace() > 1.0 + 1e-12) throw std::invalid_argument("density matrix trace exceeds one");
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (matrix + matrix.adjoint()), Eigen::EigenvaluesOnly);
        if (n > 0 && es.eigenvalues().minCoeff() < -1e-10) {
            throw std::invalid_argument("density matrix has a negative eigenvalue");
        }
    }

    double trace() const { return matrix.trace().real(); }
};

/// Matrix acting on a basis.
struct FockOperator {
    FockBasis basis;
    ComplexMatrix matrix;

    FockOperator(FockBasis b, ComplexMatrix m) : basis(std::move(b)), matrix(std::move(m)) {
        const auto n = static_cast<Eigen::Index>(basis.size());
        if (matrix.rows() != n || matrix.cols() != n) {
            throw std::invalid_argument("operator matrix does not match basis size");
        }
    }

    static FockOperator identity(const FockBasis& b) {
        const auto n = static_cast<Eigen::Index>(b.size());
        return FockOperator(b, ComplexMatrix::Identity(n, n));
    }

    Complex element(const OccupationVector& out, const OccupationVector& in) const {
        auto r = basis.index_of(out);
        auto c = basis.index_of(in);
        if (!r || !c) return {};
        return matrix(static_cast<Eigen::Index>(*r), static_cast<Eigen::Index>(*c));
    }
};

// ---------------------------------------------------------------------------
// Construction helpers

inline PureState basis_state(const FockBasis& basis, const OccupationVector& occ) {
    auto idx = basis.index_of(occ);
    if (!idx) throw std::out_of_range("occupation " + occ.to_string() + " is not in the basis");
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(basis.size()));
    v[static_cast<Eigen::Index>(*idx)] = 1.0;
    return PureState(basis, std::move(v));
}

inline PureState normalized(const PureState& s) {
    const double n = std::sqrt(s.norm_squared());
    if (n == 0.0) throw NumericError("cannot normalize the zero vector");
    return PureState(s.basis, s.amplitudes / n);
}

inline MixedState to_density(const PureState& s) {
    return MixedState(s.basis, s.amplitudes * s.amplitudes.adjoint());
}

inline PureState apply(const FockOperator& op, const PureState& s) {
    if (!(op.basis == s.basis)) throw std::invalid_argument("operator and state live on different bases");
    return PureState(s.basis, op.matrix * s.amplitudes);
}

inline FockOperator compose(const FockOperator& outer, const FockOperator& inner) {
    if (!(outer.basis == inner.basis)) throw std::invalid_argument("operators live on different bases");
    return FockOperator(outer.basis, outer.matrix * inner.matrix);
}

/// |<a|b>|^2 / (|a|^2 |b|^2).
inline double fidelity(const PureState& a, const PureState& b) {
    if (!(a.basis == b.basis)) throw std::invalid_argument("states live on different bases");
    const double na = a.norm_squared(), nb = b.norm_squared();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::norm(a.amplitudes.dot(b.amplitudes)) / (na * nb);
}

/// Trace distance 0.5 ||rho - sigma||_1 between the normalized pure states.
inline double trace_distance(const PureState& a, const PureState& b) {
    return std::sqrt(std::max(0.0, 1.0 - fidelity(a, b)));
}

/// Re-expresses a state on a larger basis (same mode count). Amplitudes on
/// occupations missing from the target are an error.
inline PureState embed(const PureState& s, const FockBasis& target) {
    if (s.basis.mode_count() != target.mode_count()) throw std::invalid_argument("mode count mismatch in embed");
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(target.size()));
    for (std::size_t i = 0; i < s.basis.size(); ++i) {
        const Complex a = s.amplitudes[static_cast<Eigen::Index>(i)];
        auto idx = target.index_of(s.basis[i]);
        if (!idx) {
            if (a != Complex{}) throw CutoffOverflow("state does not fit the target basis");
            continue;
        }
        v[static_cast<Eigen::Index>(*idx)] = a;
    }
    return PureState(target, std::move(v));
}

// ---------------------------------------------------------------------------
// Ladder operators

enum class LadderKind { Create, Annihilate, Number };

/// Standard ladder action with sqrt(n) factors. Creating a photon beyond the
/// per-mode cutoff throws CutoffOverflow. On a fixed-total basis the
/// create/annihilate result lives on the neighbouring photon-number sector.
inline PureState apply_ladder(LadderKind kind, int mode, const PureState& state) {
    const FockBasis& basis = state.basis;
    if (mode < 0 || mode >= basis.mode_count()) throw std::out_of_range("mode index out of range");

    FockBasis target = basis;
    if (basis.policy() == CutoffPolicy::FixedTotal && kind != LadderKind::Number) {
        const int total = basis.cutoff() + (kind == LadderKind::Create ? 1 : -1);
        if (total < 0) return PureState(basis, ComplexVector::Zero(static_cast<Eigen::Index>(basis.size())));
        target = FockBasis::fixed_total(basis.mode_count(), total);
    }

    ComplexVector out = ComplexVector::Zero(static_cast<Eigen::Index>(target.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const Complex a = state.amplitudes[static_cast<Eigen::Index>(i)];
        const OccupationVector& occ = basis[i];
        const int n = occ[static_cast<std::size_t>(mode)];
        switch (kind) {
            case LadderKind::Number:
                out[static_cast<Eigen::Index>(i)] = a * static_cast<double>(n);
                break;
            case LadderKind::Annihilate: {
                if (n == 0) break;
                auto counts = occ.counts();
                counts[static_cast<std::size_t>(mode)] -= 1;
                auto idx = target.index_of(OccupationVector(std::move(counts)));
                out[static_cast<Eigen::Index>(*idx)] += a * std::sqrt(static_cast<double>(n));
                break;
            }
            case LadderKind::Create: {
                auto counts = occ.counts();
                counts[static_cast<std::size_t>(mode)] += 1;
                auto idx = target.index_of(OccupationVector(std::move(counts)));
                if (!idx) {
                    if (a != Complex{}) {
                        throw CutoffOverflow("creation on mode " + std::to_string(mode) +
                                             " leaves the truncated basis");
                    }
                    break;
                }
                out[static_cast<Eigen::Index>(*idx)] += a * std::sqrt(static_cast<double>(n + 1));
                break;
            }
        }
    }
    return PureState(target, std::move(out));
}

/// Diagonal operator sum_k coeffs[k] n^k on one mode, identity elsewhere.
inline FockOperator number_polynomial(std::span<const Complex> coeffs, int mode, const FockBasis& basis) {
    if (coeffs.empty()) throw std::invalid_argument("polynomial needs at least one coefficient");
    if (mode < 0 || mode >= basis.mode_count()) throw std::out_of_range("mode index out of range");
    const auto dim = static_cast<Eigen::Index>(basis.size());
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double n = basis[i][static_cast<std::size_t>(mode)];
        Complex value{};
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) value = value * n + *it;  // Horner
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = value;
    }
    return FockOperator(basis, std::move(m));
}

inline FockOperator number_polynomial(std::initializer_list<Complex> coeffs, int mode, const FockBasis& basis) {
    return number_polynomial(std::span<const Complex>(coeffs.begin(), coeffs.size()), mode, basis);
}

namespace detail {

// <m| exp(alpha a^dag) exp(-conj(alpha) a) |n> exp(-|alpha|^2/2): the
// normal-ordered form is a finite sum, so each entry is exact.
inline Complex displacement_element(Complex alpha, int m, int n) {
    const double r2 = std::norm(alpha);
    Complex sum{};
    for (int k = 0; k <= std::min(m, n); ++k) {
        const double log_mag = 0.5 * (std::lgamma(m + 1.0) + std::lgamma(n + 1.0)) - std::lgamma(m - k + 1.0) -
                               std::lgamma(n - k + 1.0) - std::lgamma(k + 1.0);
        sum += std::exp(log_mag) * std::pow(alpha, m - k) * std::pow(-std::conj(alpha), n - k);
    }
    return sum * std::exp(-0.5 * r2);
}

}  // namespace detail

namespace detail {

// Norm of the part of D(alpha)|n> that lies above the cutoff.
inline double displacement_tail(Complex alpha, int cutoff, int n) {
    double tail = 0.0;
    for (int r = cutoff + 1; r <= cutoff + 400; ++r) {
        const double t = std::norm(displacement_element(alpha, r, n));
        tail += t;
        if (r > cutoff + 10 && t < 1e-40 * std::max(tail, 1e-300)) break;
    }
    return std::sqrt(tail);
}

}  // namespace detail

inline constexpr double kDisplacementTolerance = 1e-10;

/// Guard band actually in effect: the number of top levels whose columns leak
/// more than 1e-10 out of the truncation, never less than `min_guard_band`.
/// Columns below cutoff - guard are complete to 1e-10. Returns cutoff + 1 if
/// even the vacuum column leaks.
inline int displacement_guard_band(Complex alpha, int cutoff, int min_guard_band = 4) {
    if (alpha == Complex{}) return std::min(min_guard_band, cutoff);
    int complete = -1;
    while (complete < cutoff && detail::displacement_tail(alpha, cutoff, complete + 1) <= kDisplacementTolerance) {
        ++complete;
    }
    return std::max(min_guard_band, cutoff - complete);
}

/// exp(alpha a^dag - conj(alpha) a) on the single-mode space {0..cutoff}.
/// Entries are exact (finite normal-ordered sum). The guard band is
/// min_guard_band levels or more, enough that the columns below it lose at most
/// 1e-10 amplitude to truncation; a cutoff where even the vacuum column leaks
/// is rejected.
inline FockOperator displacement_operator(Complex alpha, int cutoff, int min_guard_band = 4) {
    if (cutoff < 1) throw std::invalid_argument("displacement needs cutoff >= 1");
    if (min_guard_band < 0) throw std::invalid_argument("guard band must be non-negative");
    if (detail::displacement_tail(alpha, cutoff, 0) > kDisplacementTolerance) {
        throw std::invalid_argument("cutoff " + std::to_string(cutoff) + " is too small for displacement amplitude " +
                                    std::to_string(std::abs(alpha)));
    }
    const FockBasis basis = FockBasis::per_mode_max(1, cutoff);
    const Eigen::Index dim = cutoff + 1;
    ComplexMatrix m(dim, dim);
    for (int r = 0; r <= cutoff; ++r) {
        for (int c = 0; c <= cutoff; ++c) m(r, c) = detail::displacement_element(alpha, r, c);
    }
    return FockOperator(basis, std::move(m));
}

// ---------------------------------------------------------------------------
// Tensor products and partial trace

namespace detail {

inline FockBasis product_basis(const FockBasis& a, const FockBasis& b) {
    if (a.policy() != CutoffPolicy::PerModeMax || b.policy() != CutoffPolicy::PerModeMax ||
        a.cutoff() != b.cutoff()) {
        throw std::invalid_argument("tensor product needs per-mode bases with equal cutoffs");
    }
    return FockBasis::per_mode_max(a.mode_count() + b.mode_count(), a.cutoff());
}

inline OccupationVector concat(const OccupationVector& a, const OccupationVector& b) {
    std::vector<int> c = a.counts();
    c.insert(c.end(), b.counts().begin(), b.counts().end());
    return OccupationVector(std::move(c));
}

}  // namespace detail

/// Kronecker composition, re-indexed into the combined basis ordering.
inline PureState tensor_product(const PureState& a, const PureState& b) {
    const FockBasis basis = detail::product_basis(a.basis, b.basis);
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < a.basis.size(); ++i) {
        for (std::size_t j = 0; j < b.basis.size(); ++j) {
            auto idx = basis.index_of(detail::concat(a.basis[i], b.basis[j]));
            v[static_cast<Eigen::Index>(*idx)] =
                a.amplitudes[static_cast<Eigen::Index>(i)] * b.amplitudes[static_cast<Eigen::Index>(j)];
        }
    }
    return PureState(basis, std::move(v));
}

inline FockOperator tensor_product(const FockOperator& a, const FockOperator& b) {
    const FockBasis basis = detail::product_basis(a.basis, b.basis);
    const auto dim = static_cast<Eigen::Index>(basis.size());
    std::vector<Eigen::Index> map(a.basis.size() * b.basis.size());
    for (std::size_t i = 0; i < a.basis.size(); ++i) {
        for (std::size_t j = 0; j < b.basis.size(); ++j) {
            map[i * b.basis.size() + j] =
                static_cast<Eigen::Index>(*basis.index_of(detail::concat(a.basis[i], b.basis[j])));
        }
    }
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    const auto nb = b.basis.size();
    for (std::size_t r1 = 0; r1 < a.basis.size(); ++r1) {
        for (std::size_t c1 = 0; c1 < a.basis.size(); ++c1) {
            const Complex x = a.matrix(static_cast<Eigen::Index>(r1), static_cast<Eigen::Index>(c1));
            if (x == Complex{}) continue;
            for (std::size_t r2 = 0; r2 < nb; ++r2) {
                for (std::size_t c2 = 0; c2 < nb; ++c2) {
                    m(map[r1 * nb + r2], map[c1 * nb + c2]) =
                        x * b.matrix(static_cast<Eigen::Index>(r2), static_cast<Eigen::Index>(c2));
                }
            }
        }
    }
    return FockOperator(basis, std::move(m));
}

inline MixedState tensor_product(const MixedState& a, const MixedState& b) {
    FockOperator t = tensor_product(FockOperator(a.basis, a.matrix), FockOperator(b.basis, b.matrix));
    return MixedState(t.basis, std::move(t.matrix));
}

/// Reduced density matrix on the kept modes (in ascending mode order). The
/// result uses a per-mode basis whose cutoff is the input's largest
/// single-mode occupation.
inline MixedState partial_trace(const MixedState& state, std::vector<int> keep) {
    const int modes = state.basis.mode_count();
    if (keep.empty()) throw std::invalid_argument("partial trace needs a non-empty keep set");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (int k : keep) {
        if (k < 0 || k >= modes) throw std::out_of_range("kept mode out of range");
    }
    std::vector<bool> kept(static_cast<std::size_t>(modes), false);
    for (int k : keep) kept[static_cast<std::size_t>(k)] = true;

    const FockBasis reduced = FockBasis::per_mode_max(static_cast<int>(keep.size()), state.basis.max_occupation());
    // Group input states by the occupation of the traced-out modes.
    std::map<std::vector<int>, std::vector<std::pair<Eigen::Index, Eigen::Index>>> groups;
    for (std::size_t i = 0; i < state.basis.size(); ++i) {
        std::vector<int> kept_counts, traced;
        for (int m = 0; m < modes; ++m) {
            (kept[static_cast<std::size_t>(m)] ? kept_counts : traced).push_back(state.basis[i][static_cast<std::size_t>(m)]);
        }
        auto r = reduced.index_of(OccupationVector(std::move(kept_counts)));
        groups[traced].emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*r));
    }
    const auto dim = static_cast<Eigen::Index>(reduced.size());
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    for (const auto& [traced, members] : groups) {
        for (const auto& [i, ri] : members) {
            for (const auto& [j, rj] : members) out(ri, rj) += state.matrix(i, j);
        }
    }
    return MixedState(reduced, std::move(out));
}

}  // namespace fockforge
