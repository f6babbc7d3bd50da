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

// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and budgets
// are pinned here and nowhere else. Exit status is the number of failures.

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fockforge/cli.hpp"

namespace {

using namespace fockforge;

// Pinned tolerances and budgets.
constexpr double kCatalysisTol = 1e-10;
constexpr int kCatalysisSplitters = 50;
constexpr double kPropositionTol = 1e-9;
constexpr int kPropositionSeeds = 20;
constexpr double kOracleTol = 1e-10;
constexpr double kRyserTol = 1e-10;
constexpr int kAppendixSamples = 5000;
constexpr double kUnitDiskSlack = 1e-12;
constexpr double kNssMapTol = 1e-6;
constexpr double kQuarterTol = 1e-3;
constexpr double kRalphAnalyticTol = 1e-9;
constexpr double kRalphOptimizedTol = 1e-6;
constexpr int kFourPhotonRestarts = 500;
constexpr double kFourPhotonFloor = 0.235;
constexpr double kVacuumArm = 0.23, kVacuumArmTol = 0.01;
constexpr double kVacuumTotal = 0.053, kVacuumTotalTol = 0.005;
constexpr double kSwapTol = 1e-12;
constexpr double kCnotControlTol = 1e-8;
constexpr double kCnotFloor = 0.01;
constexpr int kCnotRestarts = 200;
constexpr int kCnotGrid = 8;
constexpr double kHadamardTol = 1e-6;
constexpr double kPauliQ = 0.01;
constexpr double kPauliTol = 1e-4;
constexpr double kLossCoefficientTol = 1e-9;
constexpr double kChannelTraceTol = 1e-10;
constexpr double kIdealLimitTol = 1e-10;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::vector<OccupationVector> occupations_up_to(int modes, int max_total) {
    std::vector<OccupationVector> out;
    for (int n = 0; n <= max_total; ++n) {
        const FockBasis b = FockBasis::fixed_total(modes, n);
        for (std::size_t i = 0; i < b.size(); ++i) out.push_back(b[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------

Outcome catalysis() {
    double worst = 0.0, off = 0.0;
    for (int s = 0; s < kCatalysisSplitters; ++s) {
        std::mt19937_64 rng(derive_seed(0xca7a, static_cast<std::uint64_t>(s)));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const BeamSplitterParams p{0, 1, u(rng) * kPi / 2, u(rng) * 2 * kPi, u(rng) * 2 * kPi};
        const int cutoff = 8;
        const auto y = extract_conditional_operator(bs_matrix(p, 2), {0}, {1}, {1}, cutoff);
        const Complex t = p.transmission();
        const double r2 = std::norm(p.reflection());
        std::vector<Complex> expect;
        double scale = 0.0;
        for (int n = 0; n <= cutoff; ++n) {
            expect.push_back(std::pow(t, n - 1) * (std::norm(t) - n * r2));
            scale = std::max(scale, std::abs(expect.back()));
        }
        for (int n = 0; n <= cutoff; ++n) {
            worst = std::max(worst, std::abs(y.diagonal(n) - expect[static_cast<std::size_t>(n)]) / scale);
            for (int m = 0; m <= cutoff; ++m) {
                if (m != n) off = std::max(off, std::abs(y.matrix()(m, n)) / scale);
            }
        }
    }
    return {worst < kCatalysisTol && off < kCatalysisTol,
            std::to_string(kCatalysisSplitters) + " splitters, max rel dev " + sci(std::max(worst, off)) + " < " +
                sci(kCatalysisTol)};
}

Outcome propositions() {
    double worst = 0.0;
    for (int which = 1; which <= 3; ++which) {
        for (int n = 1; n <= 3; ++n) {
            for (int s = 0; s < kPropositionSeeds; ++s) {
                const auto r = verify_proposition(which, n, static_cast<std::uint64_t>(1000 * which + 10 * n + s), n + 4);
                worst = std::max(worst, r.max_deviation);
            }
        }
    }
    return {worst < kPropositionTol, "3 propositions x N in {1,2,3} x " + std::to_string(kPropositionSeeds) +
                                         " seeds, max dev " + sci(worst) + " < " + sci(kPropositionTol)};
}

Outcome oracle_equivalence() {
    double worst = 0.0;
    long cases = 0;
    for (int modes = 1; modes <= 4; ++modes) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto u = random_unitary(modes, derive_seed(0x0c1e, 10 * static_cast<std::uint64_t>(modes) + seed));
            for (const auto& in : occupations_up_to(modes, 4)) {
                const auto oracle = fock_lift_oracle(u, in);
                for (std::size_t i = 0; i < oracle.basis.size(); ++i) {
                    const Complex a = fock_lift_amplitude(u, in, oracle.basis[i]);
                    worst = std::max(worst, std::abs(a - oracle.amplitudes[static_cast<Eigen::Index>(i)]));
                    ++cases;
                }
            }
        }
    }
    return {worst < kOracleTol, std::to_string(cases) + " amplitudes, max dev " + sci(worst) + " < " + sci(kOracleTol)};
}

Outcome permanents() {
    double ryser = 0.0;
    std::mt19937_64 rng(0x9e4);
    std::normal_distribution<double> g;
    for (int n = 1; n <= 7; ++n) {
        for (int k = 0; k < 20; ++k) {
            ComplexMatrix m(n, n);
            for (Eigen::Index i = 0; i < m.size(); ++i) {
                const double re = g(rng), im = g(rng);
                m(i) = Complex(re, im) / std::sqrt(2.0 * n);
            }
            ryser = std::max(ryser, std::abs(permanent_ryser(m) - permanent_naive(m)));
        }
    }
    const AppendixReport r = check_appendix_bounds(3, kAppendixSamples, 17);
    const bool ok = ryser < kRyserTol && r.max_permanent <= 1.0 + kUnitDiskSlack &&
                    r.max_principal_subpermanent <= 1.0 + kUnitDiskSlack && r.marcus_newman_violations == 0 &&
                    r.product_bound_violations == 0;
    return {ok, "ryser-naive " + sci(ryser) + ", max|per U| " + sci(r.max_permanent) + ", max|sub-per| " +
                    sci(r.max_principal_subpermanent) + " over " + std::to_string(r.samples) +
                    " unitaries, marcus-newman violations " + std::to_string(r.marcus_newman_violations) +
                    ", 8/27 bound violations " + std::to_string(r.product_bound_violations)};
}

Outcome nss() {
    const Gate g = nss_gate_klm();
    const double map = g.report.metric("map_residual");
    const double p = g.report.success_probability;
    return {map < kNssMapTol && std::abs(p - 0.25) <= kQuarterTol,
            "map residual " + sci(map) + ", success " + sci(p)};
}

Outcome ralph() {
    const RalphReport r = ralph_cz_check();
    const double want = 1.0 - std::sqrt(2.0);
    const double da = std::abs(r.lambda11_analytic - want);
    const double dopt = std::abs(r.lambda11_optimized - want);
    return {da < kRalphAnalyticTol && dopt < kRalphOptimizedTol && std::abs(r.max_lambda22_squared - 0.25) <= kQuarterTol,
            "analytic dev " + sci(da) + ", optimized dev " + sci(dopt) + ", max |L22|^2 " + sci(r.max_lambda22_squared)};
}

Outcome four_photon() {
    const Gate g = cphase_gate(kPi, CPhaseVariant::FourPhoton, 1, kFourPhotonRestarts);
    const double arm = g.report.metric("arm_probability");
    return {arm >= kFourPhotonFloor, "per-arm success " + sci(arm) + " >= " + sci(kFourPhotonFloor) + " at " +
                                         std::to_string(kFourPhotonRestarts) + " restarts, residual " +
                                         sci(g.report.residual)};
}

Outcome vacuum_detector() {
    const Gate g = cphase_vacuum_detector(0.476, 0.87);
    const double arm = g.report.metric("arm_probability");
    const double total = g.report.success_probability;
    return {std::abs(arm - kVacuumArm) <= kVacuumArmTol && std::abs(total - kVacuumTotal) <= kVacuumTotalTol,
            "per-arm " + sci(arm) + ", total " + sci(total)};
}

Outcome swap() {
    const Gate g = swap_gate();
    const double bs = g.report.metric("beam_splitters"), plates = g.report.metric("phase_plates");
    const bool ok = g.report.residual < kSwapTol && std::abs(g.report.success_probability - 1.0) < kSwapTol &&
                    bs == 2 && plates == 1;
    return {ok, "residual " + sci(g.report.residual) + ", success " + sci(g.report.success_probability) + ", " +
                    sci(bs) + " splitters, " + sci(plates) + " plate"};
}

Outcome cnot() {
    const CnotSearchReport r = cnot_obstruction_search(kCnotGrid, kCnotRestarts, 1);
    return {r.control_residual < kCnotControlTol && r.min_residual > kCnotFloor,
            "control residual " + sci(r.control_residual) + ", CNOT floor " + sci(r.min_residual) + " over " +
                std::to_string(r.restarts) + " restarts (bounded search, not a proof)"};
}

Outcome hadamard() {
    const Gate g = hadamard_gate();
    return {g.report.residual < kHadamardTol, "residual " + sci(g.report.residual)};
}

Outcome pauli() {
    const Gate x = pauli_xy_gate(PauliKind::X, kPauliQ);
    const Gate y = pauli_xy_gate(PauliKind::Y, kPauliQ);
    const double coarse = pauli_xy_gate(PauliKind::X, 0.05).report.metric("filter_distance");
    const double fine = pauli_xy_gate(PauliKind::X, 0.005).report.metric("filter_distance");
    return {x.report.residual < kPauliTol && y.report.residual < kPauliTol && fine < coarse,
            "X " + sci(x.report.residual) + ", Y " + sci(y.report.residual) + ", filter distance " + sci(coarse) +
                " at q=0.05 -> " + sci(fine) + " at q=0.005"};
}

Outcome lossy_sigma_z() {
    const Complex c0(0.6), c1(0.0, 0.8);
    const double det = noisy_sigma_z_experiment(0.0, 0.7, c0, c1).detector_coefficient;
    const double det_dev = std::abs(det - (2 * std::sqrt(3.0) - 3));
    double abs_dev = 0.0, trace_dev = 0.0;
    for (double a : {0.05, 0.2, 0.45, 0.7, 0.95}) {
        const auto r = noisy_sigma_z_experiment(a, 1.0, c0, c1);
        abs_dev = std::max(abs_dev, std::abs(r.absorption_coefficient - a * a * (1 - a * a)));
        trace_dev = std::max(trace_dev, r.channel_trace_error);
    }
    // Trace preservation on random splitters and random states up to three photons.
    std::mt19937_64 rng(0x7ace);
    std::normal_distribution<double> g;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const ChannelOperator ch = lossy_bs_channel(random_lossy_bs(derive_seed(0x1055, s)), 3);
        ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(ch.basis.size()));
        for (std::size_t i = 0; i < ch.basis.size(); ++i) {
            const double re = g(rng), im = g(rng);
            if (ch.basis[i].total() <= 3) v[static_cast<Eigen::Index>(i)] = {re, im};
        }
        v.normalize();
        trace_dev = std::max(trace_dev, std::abs(ch.apply(MixedState(ch.basis, v * v.adjoint())).trace() - 1.0));
    }
    // No absorption and a perfect detector: the ideal conditioning pipeline.
    const auto r = noisy_sigma_z_experiment(0.0, 1.0, c0, c1);
    const auto y = extract_conditional_operator(ModeUnitary(r.params.t_matrix), {0}, {1}, {1}, 2);
    ComplexVector psi(3);
    psi << c0, c1, 0.0;
    const ComplexVector out = y.matrix() * psi;
    const double ideal_dev = max_abs(r.conditioned.matrix - out * out.adjoint());
    return {det_dev < kLossCoefficientTol && abs_dev < kLossCoefficientTol && trace_dev < kChannelTraceTol &&
                ideal_dev < kIdealLimitTol,
            "detector coeff dev " + sci(det_dev) + ", absorption coeff dev " + sci(abs_dev) + ", trace dev " +
                sci(trace_dev) + ", ideal-limit dev " + sci(ideal_dev)};
}

// The TSV suite: a fixed list of command lines through the CLI front end.
std::string tsv_suite() {
    const std::string fixture = std::string(FOCKFORGE_SOURCE_DIR) + "/circuits/nss_klm.circuit";
    const std::vector<std::vector<std::string>> commands{
        {"verify", "--prop", "1", "--aux", "2", "--seed", "7"},
        {"verify", "--prop", "3", "--aux", "3", "--seed", "11"},
        {"verify", "--appendix", "--dim", "4", "--samples", "300", "--seed", "3"},
        {"gate", "--name", "nss", "--seed", "2"},
        {"gate", "--name", "su3", "--phi", "1.0", "--phi2", "2.0", "--restarts", "24"},
        {"gate", "--name", "cphase", "--variant", "vacuum"},
        {"gate", "--name", "pauli-y", "--seed", "4"},
        {"gate", "--name", "swap"},
        {"optimize", "--target", "nss", "--restarts", "16", "--seed", "9"},
        {"loss", "--absorption", "0.3", "--eta", "0.8", "--c0", "0.6", "--c1", "0,0.8"},
        {"condition", fixture},
        {"simulate", "--cutoff", "3", fixture},
    };
    std::ostringstream all;
    for (const auto& args : commands) {
        std::istringstream in;
        std::ostringstream out, err;
        const int code = run_cli(args, in, out, err);
        all << "## exit " << code << '\n' << out.str();
    }
    std::istringstream matrix("0.5 0.1,0.2 -1\n0,1 2 0.25\n1 1 1\n");
    std::ostringstream out, err;
    all << "## exit " << run_cli({"perm"}, matrix, out, err) << '\n' << out.str();
    return all.str();
}

Outcome determinism() {
    setenv("FOCKFORGE_THREADS", "1", 1);
    const std::string a = tsv_suite();
    setenv("FOCKFORGE_THREADS", "3", 1);
    const std::string b = tsv_suite();
    unsetenv("FOCKFORGE_THREADS");
    const bool clean = a.find("## exit 0") != std::string::npos && a.find("## exit 2") == std::string::npos &&
                       a.find("## exit 3") == std::string::npos && a.find("## exit 4") == std::string::npos;
    return {a == b && clean, std::to_string(a.size()) + " bytes, runs " + (a == b ? "identical" : "differ") +
                                 (clean ? "" : ", a command failed")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"catalysis closed form", catalysis},
        {"propositions 1-3", propositions},
        {"oracle equivalence", oracle_equivalence},
        {"permanent suite", permanents},
        {"nonlinear sign shift", nss},
        {"ralph controlled-z", ralph},
        {"four-photon controlled phase", four_photon},
        {"vacuum-detector controlled phase", vacuum_detector},
        {"dual-rail swap", swap},
        {"cnot no-go search", cnot},
        {"hadamard recipe", hadamard},
        {"pauli x/y via tmsv", pauli},
        {"lossy sigma_z", lossy_sigma_z},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failures;
}
