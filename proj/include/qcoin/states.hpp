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

// Protocol states over the sign qubit (H_s) and the message qutrit (H_t).
// Composite basis index is 3*s + t.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcoin/qmath.hpp"

namespace qcoin {

inline const std::string kSignRegister = "S";
inline const std::string kQutritRegister = "T";
inline constexpr std::size_t kSignDim = 2;
inline constexpr std::size_t kQutritDim = 3;

struct ProtocolParams {
    double alpha = std::numbers::pi / 2;

    explicit ProtocolParams(double a) : alpha(a) {
        if (!(a >= 0.0 && a <= std::numbers::pi)) {
            throw std::invalid_argument("alpha must lie in [0, pi]");
        }
    }

    double cos_half() const { return std::cos(alpha / 2); }
    double sin_half() const { return std::sin(alpha / 2); }
};

inline void require_bit(int v, const char *what) {
    if (v != 0 && v != 1) {
        throw std::invalid_argument(std::string(what) + " must be 0 or 1");
    }
}

/// Qutrit index carrying the classical bit x.
inline std::size_t qutrit_index(int x) {
    require_bit(x, "x");
    return static_cast<std::size_t>(x) + 1;
}

/// cos(alpha/2)|0> + (-1)^s sin(alpha/2)|x+1>
inline PureState psi_trit(int x, int s, const ProtocolParams &params) {
    require_bit(s, "s");
    std::vector<cplx> v(kQutritDim);
    v[0] = params.cos_half();
    v[qutrit_index(x)] = (s == 0 ? 1.0 : -1.0) * params.sin_half();
    return PureState(std::move(v));
}

/// (|0>|psi_{x,0}> + |1>|psi_{x,1}>) / sqrt(2) on H_s (x) H_t.
inline PureState psi(int x, const ProtocolParams &params) {
    std::vector<cplx> v(kSignDim * kQutritDim);
    const double r = 1 / std::sqrt(2.0);
    for (int s = 0; s < 2; ++s) {
        auto t = psi_trit(x, s, params);
        for (std::size_t k = 0; k < kQutritDim; ++k) {
            v[static_cast<std::size_t>(s) * kQutritDim + k] = r * t[k];
        }
    }
    return PureState(std::move(v));
}

inline RegisterLayout sign_qutrit_layout() {
    return RegisterLayout{{kSignRegister, kSignDim}, {kQutritRegister, kQutritDim}};
}

/// Qutrit state Bob holds after an honest first round:
/// cos^2(alpha/2)|0><0| + sin^2(alpha/2)|a+1><a+1|.
inline DensityMatrix rho_honest(int a, const ProtocolParams &params) {
    ComplexMatrix m(kQutritDim, kQutritDim);
    const double c = params.cos_half();
    const double s = params.sin_half();
    m(0, 0) = c * c;
    const std::size_t k = qutrit_index(a);
    m(k, k) = s * s;
    return DensityMatrix(std::move(m));
}

/// |psi_a><psi_a| on H_s (x) H_t; the winner's check in both games.
inline ComplexMatrix check_projector(int a, const ProtocolParams &params) {
    return psi(a, params).projector();
}

}  // namespace qcoin
