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

// Circuit files: a line-oriented description of inputs, optical elements and
// detectors, plus a simulator that runs them in the Fock basis.
//
//   modes N
//   input fock M K | input coherent M RE IM | input tmsv M1 M2 Q
//   bs I J THETA PHASE_T PHASE_R
//   phase I ANGLE
//   lossybs I J THETA PHASE_T PHASE_R ABS
//   detect fock M K [ETA] | detect vacuum M [ETA]
//
// One directive per line, `#` starts a comment, numbers in plain decimal.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fockforge/common.hpp"
#include "fockforge/conditioning.hpp"
#include "fockforge/fock.hpp"
#include "fockforge/interferometer.hpp"
#include "fockforge/lossy.hpp"

namespace fockforge {

/// Splitter with absorption |A|: T = sqrt(1 - |A|^2) B for the lossless
/// block B, and A = |A| I.
struct LossyBeamSplitter {
    BeamSplitterParams bs;
    double absorption = 0.0;

    LossyBSParams params() const {
        const ComplexMatrix b = bs_matrix({0, 1, bs.theta, bs.phase_t, bs.phase_r}, 2).matrix();
        return {std::sqrt(1.0 - absorption * absorption) * b, absorption * ComplexMatrix::Identity(2, 2)};
    }
};

using CircuitElement = std::variant<BeamSplitterParams, PhaseShifterParams, LossyBeamSplitter>;

struct InputSpec {
    enum class Kind { Fock, Coherent, Tmsv };
    Kind kind = Kind::Fock;
    int mode = 0;
    int mode2 = -1;  // tmsv partner
    int photons = 0;
    Complex alpha{};
    double q = 0.0;
};

struct DetectSpec {
    int mode = 0;
    int photons = 0;
    double eta = 1.0;
    bool written_as_vacuum = false;
};

struct CircuitFile {
    int modes = 0;
    std::vector<InputSpec> inputs;
    std::vector<CircuitElement> elements;
    std::vector<DetectSpec> detections;

    bool lossy() const {
        return std::any_of(elements.begin(), elements.end(),
                           [](const CircuitElement& e) { return std::holds_alternative<LossyBeamSplitter>(e); });
    }
    bool ideal_detection() const {
        return std::all_of(detections.begin(), detections.end(), [](const DetectSpec& d) { return d.eta == 1.0; });
    }
    /// Photons declared by Fock inputs.
    int declared_photons() const {
        int n = 0;
        for (const auto& in : inputs) n += in.kind == InputSpec::Kind::Fock ? in.photons : 0;
        return n;
    }
    NetworkDescription network() const {
        NetworkDescription net{modes, {}};
        for (const auto& e : elements) {
            if (const auto* b = std::get_if<BeamSplitterParams>(&e)) net.elements.emplace_back(*b);
            else if (const auto* p = std::get_if<PhaseShifterParams>(&e)) net.elements.emplace_back(*p);
            else throw std::invalid_argument("circuit contains absorbing elements; no unitary network");
        }
        return net;
    }
};

namespace detail {

struct Token {
    std::string_view text;
    int column;  // 1-based
};

inline std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') break;
        if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#') ++i;
        out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

inline int parse_int(const Token& t, int line) {
    int v = 0;
    const auto* end = t.text.data() + t.text.size();
    const auto [p, ec] = std::from_chars(t.text.data(), end, v);
    if (ec != std::errc() || p != end) throw ParseError(line, t.column, "expected an integer, got '" + std::string(t.text) + "'");
    return v;
}

inline double parse_real(const Token& t, int line) {
    // Plain decimal only: sign, digits, optional point.
    bool digit = false;
    for (std::size_t i = 0; i < t.text.size(); ++i) {
        const char c = t.text[i];
        if (c >= '0' && c <= '9') digit = true;
        else if (!((c == '-' || c == '+') && i == 0) && c != '.') digit = false, i = t.text.size();
    }
    double v = 0.0;
    std::string_view s = t.text;
    if (!s.empty() && s[0] == '+') s.remove_prefix(1);
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v, std::chars_format::fixed);
    if (!digit || ec != std::errc() || p != end || !std::isfinite(v)) {
        throw ParseError(line, t.column, "expected a decimal number, got '" + std::string(t.text) + "'");
    }
    return v;
}

/// Shortest decimal that parses back to the same double.
inline std::string decimal(double x) {
    char buf[512];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    std::string s(buf, p);
    return s == "-0" ? "0" : s;
}

}  // namespace detail

inline CircuitFile parse_circuit(std::string_view text) {
    CircuitFile c;
    std::set<int> input_modes, detect_modes;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto tok = detail::tokenize(line);
        if (tok.empty()) continue;
        const std::string_view head = tok[0].text;
        auto arity = [&](std::size_t lo, std::size_t hi) {
            if (tok.size() < lo + 1) {
                const int col = tok.back().column + static_cast<int>(tok.back().text.size());
                throw ParseError(line_no, col, "'" + std::string(head) + "' expects " + std::to_string(lo) + " arguments");
            }
            if (tok.size() > hi + 1) throw ParseError(line_no, tok[hi + 1].column, "unexpected extra argument");
        };
        auto mode_at = [&](std::size_t i) {
            const int m = detail::parse_int(tok[i], line_no);
            if (m < 0 || m >= c.modes) {
                throw ParseError(line_no, tok[i].column,
                                 "mode " + std::to_string(m) + " undeclared (modes " + std::to_string(c.modes) + ")");
            }
            return m;
        };
        auto real_at = [&](std::size_t i) { return detail::parse_real(tok[i], line_no); };
        auto claim_input = [&](int m, std::size_t i) {
            if (!input_modes.insert(m).second) {
                throw ParseError(line_no, tok[i].column, "mode " + std::to_string(m) + " already has an input");
            }
        };

        if (head == "modes") {
            arity(1, 1);
            if (c.modes != 0) throw ParseError(line_no, tok[0].column, "modes declared twice");
            const int n = detail::parse_int(tok[1], line_no);
            if (n < 1) throw ParseError(line_no, tok[1].column, "mode count must be positive");
            c.modes = n;
            continue;
        }
        if (c.modes == 0) throw ParseError(line_no, tok[0].column, "'modes N' must come first");

        if (head == "input") {
            if (tok.size() < 2) throw ParseError(line_no, tok[0].column, "input needs a kind");
            const std::string_view kind = tok[1].text;
            InputSpec in;
            if (kind == "fock") {
                arity(3, 3);
                in.kind = InputSpec::Kind::Fock;
                in.mode = mode_at(2);
                in.photons = detail::parse_int(tok[3], line_no);
                if (in.photons < 0) throw ParseError(line_no, tok[3].column, "photon count must be non-negative");
                claim_input(in.mode, 2);
            } else if (kind == "coherent") {
                arity(4, 4);
                in.kind = InputSpec::Kind::Coherent;
                in.mode = mode_at(2);
                in.alpha = {real_at(3), real_at(4)};
                claim_input(in.mode, 2);
            } else if (kind == "tmsv") {
                arity(4, 4);
                in.kind = InputSpec::Kind::Tmsv;
                in.mode = mode_at(2);
                in.mode2 = mode_at(3);
                if (in.mode == in.mode2) throw ParseError(line_no, tok[3].column, "tmsv needs two distinct modes");
                in.q = real_at(4);
                if (!(in.q >= 0.0 && in.q < 1.0)) throw ParseError(line_no, tok[4].column, "tmsv q must lie in [0, 1)");
                claim_input(in.mode, 2);
                claim_input(in.mode2, 3);
            } else {
                throw ParseError(line_no, tok[1].column, "unknown input kind '" + std::string(kind) + "'");
            }
            c.inputs.push_back(in);
        } else if (head == "bs" || head == "lossybs") {
            const bool lossy = head == "lossybs";
            arity(lossy ? 6 : 5, lossy ? 6 : 5);
            BeamSplitterParams b{mode_at(1), mode_at(2), real_at(3), real_at(4), real_at(5)};
            if (b.mode_a == b.mode_b) throw ParseError(line_no, tok[2].column, "splitter needs two distinct modes");
            if (lossy) {
                const double a = real_at(6);
                if (!(a >= 0.0 && a < 1.0)) throw ParseError(line_no, tok[6].column, "absorption must lie in [0, 1)");
                c.elements.emplace_back(LossyBeamSplitter{b, a});
            } else {
                c.elements.emplace_back(b);
            }
        } else if (head == "phase") {
            arity(2, 2);
            c.elements.emplace_back(PhaseShifterParams{mode_at(1), real_at(2)});
        } else if (head == "detect") {
            if (tok.size() < 2) throw ParseError(line_no, tok[0].column, "detect needs a kind");
            const std::string_view kind = tok[1].text;
            DetectSpec d;
            std::size_t eta_at = 0;
            if (kind == "fock") {
                arity(3, 4);
                d.mode = mode_at(2);
                d.photons = detail::parse_int(tok[3], line_no);
                if (d.photons < 0) throw ParseError(line_no, tok[3].column, "photon count must be non-negative");
                eta_at = 4;
            } else if (kind == "vacuum") {
                arity(2, 3);
                d.mode = mode_at(2);
                d.written_as_vacuum = true;
                eta_at = 3;
            } else {
                throw ParseError(line_no, tok[1].column, "unknown detector kind '" + std::string(kind) + "'");
            }
            if (tok.size() > eta_at) {
                d.eta = real_at(eta_at);
                if (!(d.eta > 0.0 && d.eta <= 1.0)) throw ParseError(line_no, tok[eta_at].column, "efficiency must lie in (0, 1]");
            }
            if (!detect_modes.insert(d.mode).second) {
                throw ParseError(line_no, tok[2].column, "mode " + std::to_string(d.mode) + " already has a detector");
            }
            c.detections.push_back(d);
        } else {
            throw ParseError(line_no, tok[0].column, "unknown directive '" + std::string(head) + "'");
        }
    }
    if (c.modes == 0) throw ParseError(line_no, 1, "missing 'modes N'");
    return c;
}

/// Canonical text: modes, inputs, elements, detectors; comments dropped.
inline std::string serialize_circuit(const CircuitFile& c) {
    using detail::decimal;
    std::ostringstream o;
    o << "modes " << c.modes << '\n';
    for (const auto& in : c.inputs) {
        switch (in.kind) {
            case InputSpec::Kind::Fock: o << "input fock " << in.mode << ' ' << in.photons << '\n'; break;
            case InputSpec::Kind::Coherent:
                o << "input coherent " << in.mode << ' ' << decimal(in.alpha.real()) << ' ' << decimal(in.alpha.imag()) << '\n';
                break;
            case InputSpec::Kind::Tmsv: o << "input tmsv " << in.mode << ' ' << in.mode2 << ' ' << decimal(in.q) << '\n'; break;
        }
    }
    for (const auto& e : c.elements) {
        if (const auto* b = std::get_if<BeamSplitterParams>(&e)) {
            o << "bs " << b->mode_a << ' ' << b->mode_b << ' ' << decimal(b->theta) << ' ' << decimal(b->phase_t) << ' '
              << decimal(b->phase_r) << '\n';
        } else if (const auto* p = std::get_if<PhaseShifterParams>(&e)) {
            o << "phase " << p->mode << ' ' << decimal(p->angle) << '\n';
        } else {
            const auto& l = std::get<LossyBeamSplitter>(e);
            o << "lossybs " << l.bs.mode_a << ' ' << l.bs.mode_b << ' ' << decimal(l.bs.theta) << ' '
              << decimal(l.bs.phase_t) << ' ' << decimal(l.bs.phase_r) << ' ' << decimal(l.absorption) << '\n';
        }
    }
    for (const auto& d : c.detections) {
        if (d.written_as_vacuum && d.photons == 0) o << "detect vacuum " << d.mode;
        else o << "detect fock " << d.mode << ' ' << d.photons;
        if (d.eta != 1.0) o << ' ' << decimal(d.eta);
        o << '\n';
    }
    return o.str();
}

/// Circuit for a heralded recipe: ancilla Fock inputs and detectors on every
/// non-signal mode.
inline CircuitFile circuit_from_recipe(const NetworkDescription& net, const std::vector<int>& signal_modes,
                                       const AncillaSpec& aux, const DetectionSpec& det) {
    CircuitFile c;
    c.modes = net.mode_count;
    std::vector<int> ancillas;
    for (int m = 0; m < net.mode_count; ++m) {
        if (std::find(signal_modes.begin(), signal_modes.end(), m) == signal_modes.end()) ancillas.push_back(m);
    }
    if (ancillas.size() != aux.size() || ancillas.size() != det.size()) {
        throw std::invalid_argument("ancilla pattern does not match the non-signal modes");
    }
    for (std::size_t k = 0; k < ancillas.size(); ++k) {
        if (aux[k] > 0) c.inputs.push_back({InputSpec::Kind::Fock, ancillas[k], -1, aux[k], {}, 0.0});
    }
    for (const auto& e : net.elements) {
        if (const auto* b = std::get_if<BeamSplitterParams>(&e)) c.elements.emplace_back(*b);
        else c.elements.emplace_back(std::get<PhaseShifterParams>(e));
    }
    for (std::size_t k = 0; k < ancillas.size(); ++k) c.detections.push_back({ancillas[k], det[k], 1.0, det[k] == 0});
    return c;
}

// ---------------------------------------------------------------------------
// Simulation

struct SimulationResult {
    int remaining_modes = 0;
    std::vector<OccupationVector> states;  // undetected field modes, basis order
    bool pure = true;
    ComplexVector amplitudes;  // pure runs only, unnormalized after detection
    ComplexMatrix density;     // always filled, unnormalized
    double probability = 0.0;  // trace: heralding probability times input norm
};

namespace detail {

/// Unitary on field modes followed by two device modes per absorbing element.
inline ComplexMatrix circuit_unitary(const CircuitFile& c, int total_modes) {
    ComplexMatrix u = ComplexMatrix::Identity(total_modes, total_modes);
    int device = c.modes;
    for (const auto& e : c.elements) {
        if (const auto* b = std::get_if<BeamSplitterParams>(&e)) {
            u = bs_matrix(*b, total_modes).matrix() * u;
        } else if (const auto* p = std::get_if<PhaseShifterParams>(&e)) {
            u = phase_matrix(*p, total_modes).matrix() * u;
        } else {
            const auto& l = std::get<LossyBeamSplitter>(e);
            const ComplexMatrix x = extended_unitary(l.params()).matrix();
            const int idx[4] = {l.bs.mode_a, l.bs.mode_b, device, device + 1};
            device += 2;
            ComplexMatrix g = ComplexMatrix::Identity(total_modes, total_modes);
            for (int r = 0; r < 4; ++r) {
                for (int k = 0; k < 4; ++k) g(idx[r], idx[k]) = x(r, k);
            }
            u = g * u;
        }
    }
    return u;
}

using SparseState = std::map<OccupationVector, Complex>;

inline SparseState input_state(const CircuitFile& c, int total_modes, int cutoff) {
    // Per-input factors over the modes they occupy.
    SparseState state;
    state.emplace(OccupationVector(std::vector<int>(static_cast<std::size_t>(total_modes), 0)), 1.0);
    for (const auto& in : c.inputs) {
        std::vector<std::pair<std::vector<std::pair<int, int>>, Complex>> factor;
        switch (in.kind) {
            case InputSpec::Kind::Fock: factor.push_back({{{in.mode, in.photons}}, 1.0}); break;
            case InputSpec::Kind::Coherent: {
                const double pre = std::exp(-0.5 * std::norm(in.alpha));
                Complex term = pre;
                for (int n = 0; n <= cutoff; ++n) {
                    factor.push_back({{{in.mode, n}}, term});
                    term *= in.alpha / std::sqrt(n + 1.0);
                }
                break;
            }
            case InputSpec::Kind::Tmsv: {
                const double pre = std::sqrt(1.0 - in.q * in.q);
                for (int n = 0; n <= cutoff; ++n) factor.push_back({{{in.mode, n}, {in.mode2, n}}, pre * std::pow(in.q, n)});
                break;
            }
        }
        SparseState next;
        for (const auto& [occ, amp] : state) {
            for (const auto& [cells, f] : factor) {
                if (f == Complex{}) continue;
                std::vector<int> v = occ.counts();
                for (const auto& [m, n] : cells) v[static_cast<std::size_t>(m)] = n;
                next[OccupationVector(std::move(v))] += amp * f;
            }
        }
        state = std::move(next);
    }
    return state;
}

inline bool basis_less(const OccupationVector& a, const OccupationVector& b) {
    if (a.total() != b.total()) return a.total() < b.total();
    return a < b;
}

}  // namespace detail

/// Runs the circuit: inputs (coherent and tmsv truncated at `cutoff` per
/// mode), elements in order, then every detector. Absorbing elements and
/// inefficient detectors make the result mixed.
inline SimulationResult simulate_circuit(const CircuitFile& c, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("cutoff must be non-negative");
    for (const auto& in : c.inputs) {
        if (in.kind == InputSpec::Kind::Fock && in.photons > cutoff) {
            throw std::invalid_argument("cutoff " + std::to_string(cutoff) + " is below the photons declared on mode " +
                                        std::to_string(in.mode));
        }
    }
    int lossy = 0;
    for (const auto& e : c.elements) lossy += std::holds_alternative<LossyBeamSplitter>(e) ? 1 : 0;
    const int total_modes = c.modes + 2 * lossy;
    const ModeUnitary u(detail::circuit_unitary(c, total_modes));
    const detail::SparseState in = detail::input_state(c, total_modes, cutoff);

    // Evolve sector by sector.
    detail::SparseState out;
    std::map<int, std::vector<std::pair<OccupationVector, Complex>>> sectors;
    for (const auto& [occ, amp] : in) sectors[occ.total()].emplace_back(occ, amp);
    for (const auto& [n, members] : sectors) {
        const FockBasis sector = FockBasis::fixed_total(total_modes, n);
        ComplexVector acc = ComplexVector::Zero(static_cast<Eigen::Index>(sector.size()));
        for (const auto& [occ, amp] : members) {
            for (std::size_t r = 0; r < sector.size(); ++r) {
                acc[static_cast<Eigen::Index>(r)] += amp * fock_lift_amplitude(u, occ, sector[r]);
            }
        }
        // Exact zeros (e.g. untouched modes) would only pad the output basis.
        for (std::size_t r = 0; r < sector.size(); ++r) {
            if (acc[static_cast<Eigen::Index>(r)] != Complex{}) out[sector[r]] += acc[static_cast<Eigen::Index>(r)];
        }
    }

    // Split every output occupation into (kept field modes | detected | device).
    std::vector<int> detected_at(static_cast<std::size_t>(c.modes), -1);
    for (std::size_t k = 0; k < c.detections.size(); ++k) detected_at[static_cast<std::size_t>(c.detections[k].mode)] = static_cast<int>(k);
    SimulationResult res;
    res.remaining_modes = c.modes - static_cast<int>(c.detections.size());
    res.pure = lossy == 0 && c.ideal_detection();
    std::map<std::pair<std::vector<int>, std::vector<int>>, std::map<OccupationVector, Complex>> branches;
    std::set<OccupationVector, decltype(&detail::basis_less)> kept_states(&detail::basis_less);
    for (const auto& [occ, amp] : out) {
        std::vector<int> kept, det, dev;
        for (int m = 0; m < total_modes; ++m) {
            const int n = occ[static_cast<std::size_t>(m)];
            if (m >= c.modes) dev.push_back(n);
            else if (detected_at[static_cast<std::size_t>(m)] >= 0) det.push_back(n);
            else kept.push_back(n);
        }
        // Detector outcomes below the heralded count can never fire.
        bool possible = true;
        std::size_t j = 0;
        for (int m = 0; m < c.modes; ++m) {
            if (detected_at[static_cast<std::size_t>(m)] < 0) continue;
            const auto& d = c.detections[static_cast<std::size_t>(detected_at[static_cast<std::size_t>(m)])];
            if (det[j] < d.photons || (d.eta == 1.0 && det[j] != d.photons)) possible = false;
            ++j;
        }
        if (!possible) continue;
        OccupationVector k(std::move(kept));
        kept_states.insert(k);
        branches[{std::move(det), std::move(dev)}][k] += amp;
    }
    res.states.assign(kept_states.begin(), kept_states.end());
    std::map<OccupationVector, Eigen::Index> index;
    for (std::size_t i = 0; i < res.states.size(); ++i) index[res.states[i]] = static_cast<Eigen::Index>(i);
    const auto dim = static_cast<Eigen::Index>(res.states.size());
    res.density = ComplexMatrix::Zero(dim, dim);
    if (res.pure) res.amplitudes = ComplexVector::Zero(dim);
    for (const auto& [key, vec] : branches) {
        // Detector weights in detection-list order follow the mode order of key.first.
        double w = 1.0;
        std::size_t j = 0;
        for (int m = 0; m < c.modes; ++m) {
            const int k = detected_at[static_cast<std::size_t>(m)];
            if (k < 0) continue;
            const auto& d = c.detections[static_cast<std::size_t>(k)];
            w *= detail::povm_weight(d.photons, key.first[j], d.eta);
            ++j;
        }
        ComplexVector v = ComplexVector::Zero(dim);
        for (const auto& [occ, a] : vec) v[index.at(occ)] = a;
        res.density += w * v * v.adjoint();
        if (res.pure) res.amplitudes += v;
    }
    res.probability = res.density.trace().real();
    return res;
}

}  // namespace fockforge
