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


// Closed-form cheating bounds, the bias-minimizing choice of alpha, and the
// weak-to-strong composition.

#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "qcoin/qmath.hpp"
#include "qcoin/states.hpp"

namespace qcoin {

namespace detail {
inline double cos2_half(double alpha) {
    ProtocolParams p(alpha);  // range check
    const double c = p.cos_half();
    return c * c;
}
inline double sin2_half(double alpha) {
    ProtocolParams p(alpha);
    const double s = p.sin_half();
    return s * s;
}
}  // namespace detail

/// Cheating Alice, either game: (1 + cos^2(alpha/2)) / 2.
inline double alice_weak_bound(double alpha) { return 0.5 * (1 + detail::cos2_half(alpha)); }

/// Cheating Bob, weak game: (cos^2(alpha/2)/sqrt(2) + sin^2(alpha/2))^2.
inline double bob_weak_bound(double alpha) {
    const double v = detail::cos2_half(alpha) / std::sqrt(2.0) + detail::sin2_half(alpha);
    return v * v;
}

inline double alice_strong_bound(double alpha) { return alice_weak_bound(alpha); }

/// Cheating Bob, strong game: 1/2 + ||rho_0 - rho_1||_tr / 4 = (1 + sin^2(alpha/2)) / 2.
inline double bob_strong_bound(double alpha) { return 0.5 * (1 + detail::sin2_half(alpha)); }

/// Bias of the strong coin obtained by letting the weak game's winner flip it.
inline double weak_to_strong_bias(double p_w, double p_l) {
    if (!(p_w >= 0.5 && p_w <= 1.0) || !(p_l >= 0.0 && p_l <= 1.0)) {
        throw std::invalid_argument("weak_to_strong_bias: need 1/2 <= p_w <= 1 and 0 <= p_l <= 1");
    }
    return p_w + (p_l - 1) / 2;
}

inline double kitaev_product(double alpha) { return alice_strong_bound(alpha) * bob_strong_bound(alpha); }

/// Bisection for a root of a continuous f on [lo, hi] with f(lo), f(hi) of
/// opposite signs. Stops when |f(mid)| <= tolerance or the bracket is
/// exhausted at double precision.
inline double bisect(const std::function<double(double)> &f, double lo, double hi, double tolerance) {
    if (!(tolerance > 0)) {
        throw std::invalid_argument("bisection tolerance must be positive");
    }
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0) {
        return lo;
    }
    if (fhi == 0) {
        return hi;
    }
    if ((flo > 0) == (fhi > 0)) {
        throw std::invalid_argument("bisection interval does not bracket a root");
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 2000; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) <= tolerance || mid <= lo || mid >= hi) {
            break;
        }
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return mid;
}

struct Equalization {
    double alpha_star;
    double p_star;

    double bias() const { return p_star - 0.5; }
};

inline constexpr double kEqualizationTolerance = 1e-12;

/// Weak game: alpha where Alice's and Bob's cheating bounds coincide.
inline Equalization solve_weak_equalization(double tolerance = kEqualizationTolerance) {
    const double a = bisect([](double x) { return alice_weak_bound(x) - bob_weak_bound(x); }, 0.0, std::numbers::pi,
                            tolerance);
    return {a, alice_weak_bound(a)};
}

/// Strong game: lands on pi/2.
inline Equalization solve_strong_equalization(double tolerance = kEqualizationTolerance) {
    const double a = bisect([](double x) { return alice_strong_bound(x) - bob_strong_bound(x); }, 0.0,
                            std::numbers::pi, tolerance);
    return {a, alice_strong_bound(a)};
}

struct BoundReport {
    double alpha;
    double alice_weak;
    double bob_weak;
    double alice_strong;
    double bob_strong;
    double fidelity_rho;
    double trace_dist_rho;  // ||rho_0 - rho_1||_tr
    double weak_bias;
    double strong_bias;
};

inline BoundReport bound_report(double alpha) {
    ProtocolParams params(alpha);
    const auto r0 = rho_honest(0, params);
    const auto r1 = rho_honest(1, params);
    BoundReport r{};
    r.alpha = alpha;
    r.alice_weak = alice_weak_bound(alpha);
    r.bob_weak = bob_weak_bound(alpha);
    r.alice_strong = alice_strong_bound(alpha);
    r.bob_strong = bob_strong_bound(alpha);
    r.fidelity_rho = fidelity(r0, r1);
    r.trace_dist_rho = trace_norm(r0.matrix() - r1.matrix());
    r.weak_bias = std::max(r.alice_weak, r.bob_weak) - 0.5;
    r.strong_bias = std::max(r.alice_strong, r.bob_strong) - 0.5;
    return r;
}

}  // namespace qcoin
