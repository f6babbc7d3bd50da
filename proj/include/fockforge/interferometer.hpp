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

// Mode-level unitaries.
//
// Convention: a mode unitary L acts on the column of annihilation operators,
// b = L a. Creation operators therefore map as a_j^dag -> sum_l L(l, j) a_l^dag
// when propagating states. Network elements apply in list order, so the
// composed matrix is E_last * ... * E_first.

#pragma once

#include "fockforge/common.hpp"

#include <cmath>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace fockforge {

struct BeamSplitterParams {
    int mode_a = 0;
    int mode_b = 1;
    double theta = 0.0;
    double phase_t = 0.0;
    double phase_r = 0.0;

    Complex transmission() const { return std::polar(std::cos(theta), phase_t); }
    Complex reflection() const { return std::polar(std::sin(theta), phase_r); }

    /// Element whose matrix is the inverse (adjoint) of this one.
    BeamSplitterParams inverse() const { return {mode_a, mode_b, theta, -phase_t, phase_r + kPi}; }
};

struct PhaseShifterParams {
    int mode = 0;
    double angle = 0.0;
};

using NetworkElement = std::variant<BeamSplitterParams, PhaseShifterParams>;

struct NetworkDescription {
    int mode_count = 0;
    std::vector<NetworkElement> elements;

    std::size_t beam_splitter_count() const {
        std::size_t n = 0;
        for (const auto& e : elements) n += std::holds_alternative<BeamSplitterParams>(e) ? 1 : 0;
        return n;
    }
};

/// Square unitary matrix on modes.
class ModeUnitary {
  public:
    static constexpr double kDefaultTolerance = 1e-10;

    explicit ModeUnitary(ComplexMatrix m, double tolerance = kDefaultTolerance) : matrix_(std::move(m)) {
        if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
            throw std::invalid_argument("mode unitary must be square and non-empty");
        }
        if (!matrix_.allFinite()) throw std::invalid_argument("mode unitary has non-finite entries");
        if (unitarity_error() > tolerance) {
            throw std::invalid_argument("matrix is not unitary (error " + std::to_string(unitarity_error()) + ")");
        }
    }

    static ModeUnitary identity(int n) { return ModeUnitary(ComplexMatrix::Identity(n, n)); }

    int dimension() const { return static_cast<int>(matrix_.rows()); }
    const ComplexMatrix& matrix() const { return matrix_; }
    Complex operator()(int r, int c) const { return matrix_(r, c); }

    double unitarity_error() const {
        const auto n = matrix_.rows();
        return max_abs(matrix_ * matrix_.adjoint() - ComplexMatrix::Identity(n, n));
    }

  private:
    ComplexMatrix matrix_;
};

namespace detail {

inline void check_mode(int mode, int total) {
    if (mode < 0 || mode >= total) {
        throw std::out_of_range("mode " + std::to_string(mode) + " out of range for " + std::to_string(total) +
                                " modes");
    }
}

inline void check_beam_splitter(const BeamSplitterParams& p, int total) {
    check_mode(p.mode_a, total);
    check_mode(p.mode_b, total);
    if (p.mode_a == p.mode_b) throw std::invalid_argument("beam splitter needs two distinct modes");
}

}  // namespace detail

/// Identity except the block [[T, R], [-conj(R), conj(T)]] on (mode_a, mode_b).
/// Any real theta is accepted; the canonical range [0, pi/2] is what the
/// decomposition produces.
inline ModeUnitary bs_matrix(const BeamSplitterParams& p, int total_modes) {
    detail::check_beam_splitter(p, total_modes);
    ComplexMatrix m = ComplexMatrix::Identity(total_modes, total_modes);
    const Complex t = p.transmission(), r = p.reflection();
    m(p.mode_a, p.mode_a) = t;
    m(p.mode_a, p.mode_b) = r;
    m(p.mode_b, p.mode_a) = -std::conj(r);
    m(p.mode_b, p.mode_b) = std::conj(t);
    return ModeUnitary(std::move(m));
}

inline ModeUnitary phase_matrix(const PhaseShifterParams& p, int total_modes) {
    detail::check_mode(p.mode, total_modes);
    ComplexMatrix m = ComplexMatrix::Identity(total_modes, total_modes);
    m(p.mode, p.mode) = std::polar(1.0, p.angle);
    return ModeUnitary(std::move(m));
}

namespace detail {

// Left-multiplies m by the element, touching only the affected rows.
inline void apply_element(ComplexMatrix& m, const NetworkElement& e) {
    if (const auto* bs = std::get_if<BeamSplitterParams>(&e)) {
        const Complex t = bs->transmission(), r = bs->reflection();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const Complex x = m(bs->mode_a, c), y = m(bs->mode_b, c);
            m(bs->mode_a, c) = t * x + r * y;
            m(bs->mode_b, c) = -std::conj(r) * x + std::conj(t) * y;
        }
    } else {
        const auto& ps = std::get<PhaseShifterParams>(e);
        m.row(ps.mode) *= std::polar(1.0, ps.angle);
    }
}

}  // namespace detail

inline ModeUnitary compose(const NetworkDescription& network) {
    if (network.mode_count < 1) throw std::invalid_argument("network needs at least one mode");
    ComplexMatrix m = ComplexMatrix::Identity(network.mode_count, network.mode_count);
    for (const auto& e : network.elements) {
        if (const auto* bs = std::get_if<BeamSplitterParams>(&e)) {
            detail::check_beam_splitter(*bs, network.mode_count);
        } else {
            detail::check_mode(std::get<PhaseShifterParams>(e).mode, network.mode_count);
        }
        detail::apply_element(m, e);
    }
    return ModeUnitary(std::move(m));
}

/// Factorizes u into N phase shifters followed by at most N(N-1)/2 beam
/// splitters. Sub-diagonal entries are eliminated column by column, left to
/// right; pivots below 1e-14 give a zero-angle element.
inline NetworkDescription reck_decompose(const ModeUnitary& u) {
    const int n = u.dimension();
    ComplexMatrix w = u.matrix();
    std::vector<BeamSplitterParams> eliminators;
    for (int c = 0; c < n - 1; ++c) {
        for (int j = c + 1; j < n; ++j) {
            const Complex a = w(c, c), b = w(j, c);
            BeamSplitterParams p{c, j, 0.0, 0.0, 0.0};
            if (std::abs(b) >= 1e-14) {
                p.theta = std::atan2(std::abs(b), std::abs(a));
                p.phase_t = std::abs(a) > 0.0 ? -std::arg(a) : 0.0;
                p.phase_r = -std::arg(b);
            }
            detail::apply_element(w, p);
            eliminators.push_back(p);
        }
    }
    NetworkDescription net{n, {}};
    for (int k = 0; k < n; ++k) net.elements.emplace_back(PhaseShifterParams{k, std::arg(w(k, k))});
    for (auto it = eliminators.rbegin(); it != eliminators.rend(); ++it) net.elements.emplace_back(it->inverse());
    return net;
}

/// Haar-random unitary: QR of a seeded complex Gaussian matrix with the
/// phases of R's diagonal moved into Q.
inline ModeUnitary random_unitary(int dimension, std::uint64_t seed) {
    if (dimension < 1) throw std::invalid_argument("dimension must be at least 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix z(dimension, dimension);
    for (int c = 0; c < dimension; ++c) {
        for (int r = 0; r < dimension; ++r) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            z(r, c) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix& r = qr.matrixQR();
    for (int k = 0; k < dimension; ++k) {
        const Complex d = r(k, k);
        q.col(k) *= std::abs(d) > 0.0 ? d / std::abs(d) : Complex(1.0);
    }
    return ModeUnitary(std::move(q));
}

}  // namespace fockforge
