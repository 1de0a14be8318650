// Copyright 2026 The qcoin Authors
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


// Concrete strategies: honest parties, the optimal cheaters for both games,
// and smooth charts over adversary classes for numerical search.

#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcoin/protocol.hpp"
#include "qcoin/qmath.hpp"
#include "qcoin/states.hpp"

namespace qcoin {

inline const std::string kAliceAncilla = "A";
inline const std::string kBobAncilla = "B";

namespace detail {

inline ComplexMatrix column(const PureState &s) {
    return ComplexMatrix(s.dim(), 1, std::vector<cplx>(s.amplitudes().begin(), s.amplitudes().end()));
}

inline PureState plus_state() {
    const double r = 1 / std::sqrt(2.0);
    return PureState({r, r});
}

}  // namespace detail

/// Prepares (|0>_A|psi_0> + |1>_A|psi_1>)/sqrt(2) and measures A to fix a.
inline AliceStrategy honest_alice(const ProtocolParams &params) {
    std::vector<cplx> v;
    const double r = 1 / std::sqrt(2.0);
    for (int a = 0; a < 2; ++a) {
        const auto state = psi(a, params);
        for (auto x : state.amplitudes()) {
            v.push_back(r * x);
        }
    }
    const std::size_t rows = v.size();
    AliceStrategy s;
    s.name = "honest";
    s.commit.isometry = Isometry{{},
                                 {{kAliceAncilla, 2}, {kSignRegister, kSignDim}, {kQutritRegister, kQutritDim}},
                                 ComplexMatrix(rows, 1, std::move(v))};
    s.commit.measure = kAliceAncilla;
    s.reveal = [](int committed, int, int) { return committed; };
    return s;
}

/// b is the outcome of measuring a fresh |+> ancilla; the qutrit is untouched.
inline BobStrategy honest_bob(const ProtocolParams &) {
    BobStrategy s;
    s.name = "honest";
    s.reply.isometry = Isometry{{}, {{kBobAncilla, 2}}, detail::column(detail::plus_state())};
    s.reply.measure = kBobAncilla;
    s.choose_b = [](int m) { return m; };
    return s;
}

/// Commits to (|psi_0> + |psi_1>)/sqrt(2 + 2cos^2(alpha/2)) and reveals a = b.
inline AliceStrategy cheating_alice_optimal(const ProtocolParams &params) {
    auto p0 = psi(0, params);
    auto p1 = psi(1, params);
    std::vector<cplx> v(p0.dim());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = p0[i] + p1[i];
    }
    auto state = PureState::normalized(std::move(v));
    AliceStrategy s;
    s.name = "alice-opt";
    s.commit.isometry =
        Isometry{{}, {{kSignRegister, kSignDim}, {kQutritRegister, kQutritDim}}, detail::column(state)};
    s.reveal = [](int, int b, int) { return b; };
    return s;
}

namespace detail {

// |0>|0> -> |0>|+>, |x+1>|0> -> |x+1>|x>; output order (T, B), index 2t + m.
inline ComplexMatrix weak_extraction_map() {
    ComplexMatrix v(kQutritDim * 2, kQutritDim);
    const double r = 1 / std::sqrt(2.0);
    v(0, 0) = r;
    v(1, 0) = r;
    v(2 * 1 + 0, 1) = 1;
    v(2 * 2 + 1, 2) = 1;
    return v;
}

inline BobStrategy weak_extraction_bob(std::string name, bool complement) {
    BobStrategy s;
    s.name = std::move(name);
    s.reply.isometry = Isometry{{kQutritRegister},
                                {{kQutritRegister, kQutritDim}, {kBobAncilla, 2}},
                                weak_extraction_map()};
    s.reply.measure = kBobAncilla;
    if (complement) {
        s.choose_b = [](int m) { return 1 - m; };
    } else {
        s.choose_b = [](int m) { return m; };
    }
    return s;
}

}  // namespace detail

/// Copies which of |1>, |2> the qutrit carries into an ancilla, splits |0>
/// evenly, and sends the complement of the measured ancilla so that
/// b = not a on the informative branch.
inline BobStrategy cheating_bob_weak_optimal(const ProtocolParams &) {
    return detail::weak_extraction_bob("bob-opt-weak", true);
}

/// Same transformation, but sends the measured ancilla bit unchanged.
inline BobStrategy cheating_bob_weak_literal(const ProtocolParams &) {
    return detail::weak_extraction_bob("bob-opt-weak-literal", false);
}

/// Helstrom measurement of the qutrit in the eigenbasis of rho_0 - rho_1.
/// Positive eigenvalue guesses a = 0, negative a = 1, zero eigenspace a = 0;
/// sends b = guess xor target and accepts whatever coin results.
inline BobStrategy cheating_bob_strong_helstrom(const ProtocolParams &params, int target) {
    require_bit(target, "target");
    const ComplexMatrix diff = rho_honest(0, params).matrix() - rho_honest(1, params).matrix();
    Eigensystem es = herm_eig(diff);
    std::vector<int> guess(kQutritDim);
    for (std::size_t k = 0; k < kQutritDim; ++k) {
        guess[k] = es.values[k] < -tol::kPsd ? 1 : 0;
    }
    BobStrategy s;
    s.name = "bob-helstrom-" + std::to_string(target);
    s.reply.isometry = Isometry{{kQutritRegister}, {{kQutritRegister, kQutritDim}}, es.vectors.adjoint()};
    s.reply.measure = kQutritRegister;
    s.choose_b = [guess, target](int k) { return guess[static_cast<std::size_t>(k)] ^ target; };
    s.checks = false;
    return s;
}

class DecodeError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

enum class AdversaryKind {
    /// Cheating Alice: pure state on A (x) S (x) T (A a qubit) plus a unitary
    /// on A (x) S applied when b = 1; always reveals a = b.
    AliceCommit,
    /// Cheating Bob: isometry T -> T (x) R, R the reply qubit; b is the
    /// measured R, and the qutrit is returned unchanged afterwards.
    BobExtract,
    /// BobExtract restricted to ||phi_{0,0}|| = ||phi_{0,1}|| = 1/sqrt(2).
    BobExtractBalanced,
};

inline const char *to_string(AdversaryKind k) {
    switch (k) {
        case AdversaryKind::AliceCommit:
            return "alice-commit";
        case AdversaryKind::BobExtract:
            return "bob-extract";
        case AdversaryKind::BobExtractBalanced:
            return "bob-extract-balanced";
    }
    return "?";
}

inline constexpr std::size_t kAliceCommitStateReals = 2 * 12;
inline constexpr std::size_t kAliceCommitGeneratorReals = 16;
inline constexpr std::size_t kBobExtractReals = 2 * 6 * 3;

inline std::size_t chart_length(AdversaryKind k) {
    return k == AdversaryKind::AliceCommit ? kAliceCommitStateReals + kAliceCommitGeneratorReals
                                           : kBobExtractReals;
}

namespace detail {

inline std::vector<cplx> complex_block(std::span<const double> p, std::size_t count) {
    std::vector<cplx> v(count);
    for (std::size_t i = 0; i < count; ++i) {
        v[i] = cplx(p[2 * i], p[2 * i + 1]);
    }
    return v;
}

// 4x4 Hermitian from 16 reals: diagonal first, then (re, im) of the upper
// triangle in row order.
inline ComplexMatrix hermitian_from(std::span<const double> p) {
    ComplexMatrix h(4, 4);
    std::size_t k = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        h(i, i) = p[k++];
    }
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            h(i, j) = cplx(p[k], p[k + 1]);
            h(j, i) = std::conj(h(i, j));
            k += 2;
        }
    }
    return h;
}

// Modified Gram-Schmidt over the columns of m, starting at column `from`
// (earlier columns are assumed orthonormal already).
inline void orthonormalize_columns(ComplexMatrix &m, std::size_t from) {
    for (std::size_t j = from; j < m.cols(); ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            cplx proj = 0;
            for (std::size_t r = 0; r < m.rows(); ++r) {
                proj += std::conj(m(r, k)) * m(r, j);
            }
            for (std::size_t r = 0; r < m.rows(); ++r) {
                m(r, j) -= proj * m(r, k);
            }
        }
        double n = 0;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            n += std::norm(m(r, j));
        }
        n = std::sqrt(n);
        if (n <= 1e-9) {
            throw DecodeError("degenerate chart point: linearly dependent isometry columns");
        }
        for (std::size_t r = 0; r < m.rows(); ++r) {
            m(r, j) /= n;
        }
    }
}

inline BobStrategy extraction_bob(std::string name, ComplexMatrix map) {
    BobStrategy s;
    s.name = std::move(name);
    s.reply.isometry =
        Isometry{{kQutritRegister}, {{kQutritRegister, kQutritDim}, {kBobAncilla, 2}}, std::move(map)};
    s.reply.measure = kBobAncilla;
    s.choose_b = [](int m) { return m; };
    return s;
}

}  // namespace detail

inline AliceStrategy decode_alice_commit(std::span<const double> p) {
    if (p.size() != chart_length(AdversaryKind::AliceCommit)) {
        throw DecodeError("alice-commit chart expects " + std::to_string(chart_length(AdversaryKind::AliceCommit)) +
                          " parameters");
    }
    auto amps = detail::complex_block(p.first(kAliceCommitStateReals), 12);
    if (norm_squared(amps) <= 1e-18) {
        throw DecodeError("degenerate chart point: zero-norm commitment state");
    }
    auto state = PureState::normalized(std::move(amps));
    const ComplexMatrix u1 = unitary_exp(detail::hermitian_from(p.subspan(kAliceCommitStateReals)));

    AliceStrategy s;
    s.name = "chart:alice-commit";
    s.commit.isometry = Isometry{{},
                                 {{kAliceAncilla, 2}, {kSignRegister, kSignDim}, {kQutritRegister, kQutritDim}},
                                 detail::column(state)};
    s.respond = [u1](int, int b) {
        LocalAction act;
        if (b == 1) {
            act.isometry = Isometry{{kAliceAncilla, kSignRegister}, {{kAliceAncilla, 2}, {kSignRegister, kSignDim}}, u1};
        }
        return act;
    };
    s.reveal = [](int, int b, int) { return b; };
    return s;
}

/// Columns of the 6x3 map are |i> -> sum_r |phi_{i,r}>|r> with output index 2t + r.
inline ComplexMatrix decode_bob_map(std::span<const double> p, bool balanced) {
    if (p.size() != kBobExtractReals) {
        throw DecodeError("bob-extract chart expects " + std::to_string(kBobExtractReals) + " parameters");
    }
    ComplexMatrix m(6, 3, detail::complex_block(p, 18));
    if (balanced) {
        const double r = 1 / std::sqrt(2.0);
        for (std::size_t reply = 0; reply < 2; ++reply) {
            double n = 0;
            for (std::size_t t = 0; t < 3; ++t) {
                n += std::norm(m(2 * t + reply, 0));
            }
            n = std::sqrt(n);
            if (n <= 1e-9) {
                throw DecodeError("degenerate chart point: empty phi_{0," + std::to_string(reply) + "}");
            }
            for (std::size_t t = 0; t < 3; ++t) {
                m(2 * t + reply, 0) *= r / n;
            }
        }
        detail::orthonormalize_columns(m, 1);
    } else {
        detail::orthonormalize_columns(m, 0);
    }
    return m;
}

inline BobStrategy decode_bob_extract(std::span<const double> p, bool balanced = false) {
    return detail::extraction_bob(balanced ? "chart:bob-extract-balanced" : "chart:bob-extract",
                                  decode_bob_map(p, balanced));
}

/// Chart points for known objects (inverse of the decoders on their images).
inline std::vector<double> encode_alice_commit(const PureState &state_on_ast) {
    if (state_on_ast.dim() != 12) {
        throw std::invalid_argument("alice-commit state must live on A (x) S (x) T (dimension 12)");
    }
    std::vector<double> p;
    for (auto x : state_on_ast.amplitudes()) {
        p.push_back(x.real());
        p.push_back(x.imag());
    }
    p.resize(chart_length(AdversaryKind::AliceCommit), 0.0);
    return p;
}

inline std::vector<double> encode_bob_extract(const ComplexMatrix &map) {
    if (map.rows() != 6 || map.cols() != 3) {
        throw std::invalid_argument("bob-extract map must be 6x3");
    }
    std::vector<double> p;
    for (auto x : map.entries()) {
        p.push_back(x.real());
        p.push_back(x.imag());
    }
    return p;
}

/// |0>_A (x) |s> for a state s on S (x) T.
inline PureState embed_in_alice_ancilla(const PureState &st) {
    return tensor(PureState::basis(2, 0), st);
}

}  // namespace qcoin
