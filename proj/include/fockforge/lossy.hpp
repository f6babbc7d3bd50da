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

// Absorbing beam splitters as channels, inefficient detectors as POVMs, and
// the single-splitter sigma_z experiment under both imperfections.

#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fockforge/common.hpp"
#include "fockforge/conditioning.hpp"
#include "fockforge/fock.hpp"
#include "fockforge/interferometer.hpp"

namespace fockforge {

inline constexpr double kClosureTolerance = 1e-12;

/// Field transmission T and field-device coupling A of an absorbing
/// two-mode splitter, with b = T a + A g for field (a) and device (g) inputs.
struct LossyBSParams {
    ComplexMatrix t_matrix;
    ComplexMatrix a_matrix;

    LossyBSParams(ComplexMatrix t, ComplexMatrix a) : t_matrix(std::move(t)), a_matrix(std::move(a)) {
        if (t_matrix.rows() != 2 || t_matrix.cols() != 2 || a_matrix.rows() != 2 || a_matrix.cols() != 2) {
            throw std::invalid_argument("lossy splitter matrices must be 2x2");
        }
        if (!t_matrix.allFinite() || !a_matrix.allFinite()) throw std::invalid_argument("non-finite splitter entry");
        if (closure_error() > kClosureTolerance) {
            throw std::invalid_argument("T T^dagger + A A^dagger != I (error " + std::to_string(closure_error()) + ")");
        }
    }

    static LossyBSParams lossless(const ModeUnitary& t) {
        if (t.dimension() != 2) throw std::invalid_argument("lossless splitter needs a 2x2 unitary");
        return {t.matrix(), ComplexMatrix::Zero(2, 2)};
    }

    double closure_error() const {
        return max_abs(t_matrix * t_matrix.adjoint() + a_matrix * a_matrix.adjoint() - ComplexMatrix::Identity(2, 2));
    }
};

/// Valid parameters from the first two rows of a seeded Haar unitary on
/// two field and two device modes.
inline LossyBSParams random_lossy_bs(std::uint64_t seed) {
    const ModeUnitary u = random_unitary(4, seed);
    return {u.matrix().block(0, 0, 2, 2), u.matrix().block(0, 2, 2, 2)};
}

/// Symmetric slab: T = [[t, iR], [iR, t]] with t real, arg R = pi/2 and
/// A = |A| I, so |t|^2 + |R|^2 + |A|^2 = 1.
inline LossyBSParams symmetric_slab(double t, double abs_a) {
    if (!(abs_a >= 0.0 && abs_a <= 1.0)) throw std::invalid_argument("absorption must lie in [0, 1]");
    const double r2 = 1.0 - abs_a * abs_a - t * t;
    if (r2 < -1e-15) throw std::invalid_argument("transmission too large for the given absorption");
    const Complex r(0.0, std::sqrt(std::max(0.0, r2)));
    ComplexMatrix tm(2, 2);
    tm << t, r, r, t;
    return {tm, abs_a * ComplexMatrix::Identity(2, 2)};
}

namespace detail {

inline ComplexMatrix hermitian_sqrt(const ComplexMatrix& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// M = S C^-1 T with C = sqrt(T T^dagger), S = sqrt(A A^dagger): the
/// field-to-device block of the dilation, up to a device-side unitary.
inline ComplexMatrix kraus_m_matrix(const LossyBSParams& p) {
    const ComplexMatrix tt = p.t_matrix * p.t_matrix.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (tt + tt.adjoint()));
    if (!(es.eigenvalues().minCoeff() > 1e-24)) {
        throw NumericError("C = sqrt(T T^dagger) is singular; absorption norm is close to one");
    }
    const Eigen::VectorXd inv = es.eigenvalues().cwiseSqrt().cwiseInverse();
    const ComplexMatrix c_inv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
    const ComplexMatrix s = detail::hermitian_sqrt(p.a_matrix * p.a_matrix.adjoint());
    return s * c_inv * p.t_matrix;
}

/// Unitary on (field 0, field 1, device 0, device 1) whose first two rows are
/// [T A]; the device rows are a QR completion. Any completion gives the same
/// channel because the device modes are traced out.
inline ModeUnitary extended_unitary(const LossyBSParams& p) {
    ComplexMatrix k(2, 4);
    k << p.t_matrix, p.a_matrix;
    const Eigen::HouseholderQR<ComplexMatrix> qr(k.adjoint());
    const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(4, 4);
    ComplexMatrix full(4, 4);
    full << k, q.rightCols(2).adjoint();
    return ModeUnitary(full, 1e-10);
}

/// Stinespring channel on two field modes: device modes start in vacuum and
/// are traced out. Kraus operators are indexed by the photons left in the
/// device.
struct ChannelOperator {
    FockBasis basis;  // per-mode, exact for inputs with total photons <= cutoff
    ModeUnitary extended;
    std::vector<OccupationVector> device_outcomes;
    std::vector<FockOperator> kraus;

    int cutoff() const { return basis.max_occupation(); }

    MixedState apply(const MixedState& rho) const { return apply_subset(rho, [](const OccupationVector&) { return true; }); }

    /// Sum over the Kraus operators whose device outcome passes `keep`.
    MixedState apply_subset(const MixedState& rho, const std::function<bool(const OccupationVector&)>& keep) const {
        const ComplexMatrix in = embedded(rho);
        const auto n = static_cast<Eigen::Index>(basis.size());
        ComplexMatrix out = ComplexMatrix::Zero(n, n);
        for (std::size_t i = 0; i < kraus.size(); ++i) {
            if (keep(device_outcomes[i])) out.noalias() += kraus[i].matrix * in * kraus[i].matrix.adjoint();
        }
        return MixedState(basis, 0.5 * (out + out.adjoint()));
    }

  private:
    ComplexMatrix embedded(const MixedState& rho) const {
        if (rho.basis.mode_count() != 2) throw std::invalid_argument("channel acts on two field modes");
        const auto n = static_cast<Eigen::Index>(basis.size());
        ComplexMatrix m = ComplexMatrix::Zero(n, n);
        const double scale = std::max(1e-300, max_abs(rho.matrix));
        std::vector<Eigen::Index> map(rho.basis.size(), -1);
        for (std::size_t i = 0; i < rho.basis.size(); ++i) {
            if (rho.basis[i].total() <= cutoff()) map[i] = static_cast<Eigen::Index>(*basis.index_of(rho.basis[i]));
        }
        for (std::size_t i = 0; i < rho.basis.size(); ++i) {
            for (std::size_t j = 0; j < rho.basis.size(); ++j) {
                const Complex v = rho.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (map[i] < 0 || map[j] < 0) {
                    if (std::abs(v) > 1e-14 * scale) {
                        throw std::invalid_argument("input carries more photons than the channel cutoff " +
                                                    std::to_string(cutoff()));
                    }
                    continue;
                }
                m(map[i], map[j]) = v;
            }
        }
        return m;
    }
};

inline ChannelOperator lossy_bs_channel(const LossyBSParams& params, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("cutoff must be non-negative");
    ChannelOperator ch{FockBasis::per_mode_max(2, cutoff), extended_unitary(params), {}, {}};
    for (int total = 0; total <= cutoff; ++total) {
        for (int d0 = total; d0 >= 0; --d0) {
            const OccupationVector det{d0, total - d0};
            ch.device_outcomes.push_back(det);
            ch.kraus.push_back(extract_conditional_operator(ch.extended, {0, 1}, {0, 0}, det, cutoff).op);
        }
    }
    return ch;
}

// ---------------------------------------------------------------------------
// Detectors

struct DetectorModel {
    double eta = 1.0;
    int cutoff = 0;
};

namespace detail {

inline void check_detector(const DetectorModel& d) {
    if (!(d.eta >= 0.0 && d.eta <= 1.0)) throw std::invalid_argument("detector efficiency must lie in [0, 1]");
    if (d.cutoff < 0) throw std::invalid_argument("detector cutoff must be non-negative");
}

/// Probability that a detector of efficiency eta reports n given k photons.
inline double povm_weight(int n, int k, double eta) {
    if (n > k) return 0.0;
    return binomial(k, n) * std::pow(eta, n) * std::pow(1.0 - eta, k - n);
}

/// sum_k w[k] <k|_mode rho |k>_mode over the remaining modes.
inline MixedState weighted_mode_trace(const MixedState& rho, int mode, const std::vector<double>& w) {
    const int modes = rho.basis.mode_count();
    if (modes < 2) throw std::invalid_argument("conditioning needs at least two modes");
    if (mode < 0 || mode >= modes) throw std::out_of_range("detected mode out of range");
    const FockBasis reduced = FockBasis::per_mode_max(modes - 1, rho.basis.max_occupation());
    std::map<int, std::vector<std::pair<Eigen::Index, Eigen::Index>>> groups;
    for (std::size_t i = 0; i < rho.basis.size(); ++i) {
        std::vector<int> rest;
        for (int m = 0; m < modes; ++m) {
            if (m != mode) rest.push_back(rho.basis[i][static_cast<std::size_t>(m)]);
        }
        const auto r = reduced.index_of(OccupationVector(std::move(rest)));
        groups[rho.basis[i][static_cast<std::size_t>(mode)]].emplace_back(static_cast<Eigen::Index>(i),
                                                                           static_cast<Eigen::Index>(*r));
    }
    const auto dim = static_cast<Eigen::Index>(reduced.size());
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    for (const auto& [k, members] : groups) {
        const double weight = static_cast<std::size_t>(k) < w.size() ? w[static_cast<std::size_t>(k)] : 0.0;
        if (weight == 0.0) continue;
        for (const auto& [i, ri] : members) {
            for (const auto& [j, rj] : members) out(ri, rj) += weight * rho.matrix(i, j);
        }
    }
    return MixedState(reduced, 0.5 * (out + out.adjoint()));
}

}  // namespace detail

/// Pi(n) = sum_k C(k, n) eta^n (1 - eta)^(k - n) |k><k| on levels 0..cutoff.
inline FockOperator povm_element(int n, const DetectorModel& detector) {
    detail::check_detector(detector);
    if (n < 0 || n > detector.cutoff) throw std::out_of_range("count outside the detector cutoff");
    const FockBasis basis = FockBasis::per_mode_max(1, detector.cutoff);
    ComplexMatrix m = ComplexMatrix::Zero(detector.cutoff + 1, detector.cutoff + 1);
    for (int k = n; k <= detector.cutoff; ++k) m(k, k) = detail::povm_weight(n, k, detector.eta);
    return FockOperator(basis, std::move(m));
}

/// Unnormalized state of the other modes after `detector` on `mode` reports
/// n photons: Tr_mode[Pi(n) rho].
inline MixedState condition_on_povm(const MixedState& rho, int mode, int n, const DetectorModel& detector) {
    detail::check_detector(detector);
    if (detector.cutoff < rho.basis.max_occupation()) {
        throw std::invalid_argument("detector cutoff is below the state's largest occupation");
    }
    if (n < 0) throw std::out_of_range("negative photon count");
    std::vector<double> w(static_cast<std::size_t>(rho.basis.max_occupation()) + 1, 0.0);
    for (int k = 0; k < static_cast<int>(w.size()); ++k) w[static_cast<std::size_t>(k)] = detail::povm_weight(n, k, detector.eta);
    return detail::weighted_mode_trace(rho, mode, w);
}

// ---------------------------------------------------------------------------
// Single-splitter sigma_z under absorption and detector inefficiency

/// Closed form (sqrt(3 - 2|A|^2) - 1) / 2 for the symmetric slab with T real
/// and arg R = pi/2. See sigma_z_transmission_exact for the root of the
/// sigma_z condition itself.
inline double choose_T_for_sigma_z(double abs_a) {
    if (!(abs_a >= 0.0 && abs_a <= 1.0)) throw std::invalid_argument("absorption must lie in [0, 1]");
    return (std::sqrt(3.0 - 2.0 * abs_a * abs_a) - 1.0) / 2.0;
}

/// T with T^2 + R^2 = -T and T^2 + |R|^2 + |A|^2 = 1, R imaginary:
/// 2T^2 + T - (1 - |A|^2) = 0.
inline double sigma_z_transmission_exact(double abs_a) {
    if (!(abs_a >= 0.0 && abs_a <= 1.0)) throw std::invalid_argument("absorption must lie in [0, 1]");
    return (std::sqrt(9.0 - 8.0 * abs_a * abs_a) - 1.0) / 4.0;
}

enum class SigmaZTransmission { ClosedForm, Exact };

struct NoisySigmaZReport {
    double abs_a;
    double eta;
    Complex c0, c1;
    double transmission;  // T11 = T22
    LossyBSParams params;
    MixedState conditioned;  // signal mode, unnormalized, cutoff 2
    MixedState wanted;       // no absorption, detector saw the one photon present
    MixedState detector;     // no absorption, two photons reached the detector
    MixedState absorption;   // one photon absorbed
    PureState wanted_state;  // c0 T22 |0> + c1 (T11 T22 + T12 T21) |1>
    // Per unit eta (1 - eta) |c1|^2 and eta |c1|^2 respectively, from the
    // simulated channel.
    double detector_coefficient;
    double absorption_coefficient;
    // Closed forms in |A| and eta for the slab with the closed-form T.
    double closed_form_wanted;      // eta (2 - |A|^2 - sqrt(3 - 2|A|^2))
    double closed_form_detector;    // |A|^4 - 3 + 2 sqrt(3 - 2|A|^2)
    double closed_form_absorption;  // |A|^2 (1 - |A|^2)
    double sigma_z_condition_residual;  // |T11 T22 + T12 T21 + T22|
    double sigma_z_fidelity;            // wanted_state vs sigma_z input
    double success_probability;         // trace of conditioned
    double decomposition_error;         // max |conditioned - sum of parts|
    double channel_trace_error;         // |tr(channel(rho)) - 1| for the two-mode input
};

inline NoisySigmaZReport noisy_sigma_z_experiment(double abs_a, double eta, Complex c0, Complex c1,
                                                  SigmaZTransmission choice = SigmaZTransmission::ClosedForm) {
    if (!(abs_a >= 0.0 && abs_a < 1.0)) throw std::invalid_argument("absorption must lie in [0, 1)");
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("detector efficiency must lie in (0, 1]");
    if (std::abs(std::norm(c0) + std::norm(c1) - 1.0) > 1e-12) throw std::invalid_argument("|c0|^2 + |c1|^2 must be 1");
    const double t = choice == SigmaZTransmission::ClosedForm ? choose_T_for_sigma_z(abs_a) : sigma_z_transmission_exact(abs_a);
    const LossyBSParams params = symmetric_slab(t, abs_a);
    const ChannelOperator ch = lossy_bs_channel(params, 2);

    // Signal on mode 0, single-photon ancilla on mode 1, detector on mode 1.
    auto input_for = [&](Complex a0, Complex a1) {
        ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(ch.basis.size()));
        v[static_cast<Eigen::Index>(*ch.basis.index_of({0, 1}))] = a0;
        v[static_cast<Eigen::Index>(*ch.basis.index_of({1, 1}))] = a1;
        return MixedState(ch.basis, v * v.adjoint());
    };
    const MixedState rho = input_for(c0, c1);
    const auto lossless = [](const OccupationVector& d) { return d.total() == 0; };
    const auto one_absorbed = [](const OccupationVector& d) { return d.total() == 1; };
    const MixedState out = ch.apply(rho);
    const DetectorModel det{eta, 2};
    const MixedState conditioned = condition_on_povm(out, 1, 1, det);
    const MixedState clean = ch.apply_subset(rho, lossless);
    const MixedState lossy = ch.apply_subset(rho, one_absorbed);
    const double w1 = detail::povm_weight(1, 1, eta), w2 = detail::povm_weight(1, 2, eta);
    MixedState wanted = detail::weighted_mode_trace(clean, 1, {0.0, w1, 0.0});
    MixedState detector = detail::weighted_mode_trace(clean, 1, {0.0, 0.0, w2});
    MixedState absorption = detail::weighted_mode_trace(lossy, 1, {0.0, w1, w2});

    // Coefficients from the |1>-signal run with the eta factors stripped.
    const MixedState ref = input_for(0.0, 1.0);
    const double det_coeff = detail::weighted_mode_trace(ch.apply_subset(ref, lossless), 1, {0.0, 0.0, 2.0}).trace();
    const double abs_coeff = detail::weighted_mode_trace(ch.apply_subset(ref, one_absorbed), 1, {0.0, 1.0, 0.0}).trace();

    const ComplexMatrix& tm = params.t_matrix;
    const Complex per = tm(0, 0) * tm(1, 1) + tm(0, 1) * tm(1, 0);
    const FockBasis signal = FockBasis::per_mode_max(1, 2);
    ComplexVector psi = ComplexVector::Zero(3);
    psi << c0 * tm(1, 1), c1 * per, 0.0;
    ComplexVector flipped = ComplexVector::Zero(3);
    flipped << c0, -c1, 0.0;
    const PureState wanted_state(signal, psi);
    const double sz_fid = psi.norm() > 0 ? fidelity(normalized(wanted_state), PureState(signal, flipped)) : 0.0;

    const double a2 = abs_a * abs_a, u = std::sqrt(3.0 - 2.0 * a2);
    const double decomposition_error = max_abs(conditioned.matrix - wanted.matrix - detector.matrix - absorption.matrix);
    const double channel_trace_error = std::abs(out.trace() - rho.trace());
    const double p = conditioned.trace();
    return NoisySigmaZReport{abs_a,
                             eta,
                             c0,
                             c1,
                             t,
                             params,
                             conditioned,
                             std::move(wanted),
                             std::move(detector),
                             std::move(absorption),
                             wanted_state,
                             det_coeff,
                             abs_coeff,
                             eta * (2.0 - a2 - u),
                             a2 * a2 - 3.0 + 2.0 * u,
                             a2 * (1.0 - a2),
                             std::abs(per + tm(1, 1)),
                             sz_fid,
                             p,
                             decomposition_error,
                             channel_trace_error};
}

}  // namespace fockforge
