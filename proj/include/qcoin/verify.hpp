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


// Numerical verification: exact win probabilities, derivative-free search
// over adversary charts and over density matrices, and alpha sweeps.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcoin/bounds.hpp"
#include "qcoin/protocol.hpp"
#include "qcoin/qmath.hpp"
#include "qcoin/rng.hpp"
#include "qcoin/states.hpp"
#include "qcoin/strategies.hpp"

namespace qcoin {

struct SearchConfig {
    int restarts = 16;
    int max_iterations = 2000;
    double step_tolerance = 1e-10;
    double objective_tolerance = 1e-13;
    std::uint64_t seed = 1;
    double initial_step = 0.3;

    void validate() const {
        if (restarts < 1 || max_iterations < 1 || !(step_tolerance > 0) || !(objective_tolerance > 0) ||
            !(initial_step > 0)) {
            throw std::invalid_argument("invalid SearchConfig");
        }
    }
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = -std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

/// Nelder-Mead simplex maximization with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
template <typename F>
NelderMeadResult nelder_mead_maximize(F &&f, std::vector<double> x0, double step, int max_iterations,
                                      double step_tolerance, double objective_tolerance) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i + 1][i] += step;
    }
    for (std::size_t i = 0; i <= n; ++i) {
        vals[i] = f(pts[i]);
    }
    std::vector<std::size_t> order(n + 1);
    NelderMeadResult res;
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
        std::vector<std::vector<double>> p2(n + 1);
        std::vector<double> v2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            p2[i] = std::move(pts[order[i]]);
            v2[i] = vals[order[i]];
        }
        pts = std::move(p2);
        vals = std::move(v2);
    };

    int it = 0;
    for (; it < max_iterations; ++it) {
        sort_simplex();
        double spread = 0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                spread = std::max(spread, std::abs(pts[i][k] - pts[0][k]));
            }
        }
        if (vals[0] - vals[n] <= objective_tolerance && spread <= step_tolerance) {
            res.converged = true;
            break;
        }
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                centroid[k] += pts[i][k] / static_cast<double>(n);
            }
        }
        const auto &worst = pts[n];
        for (std::size_t k = 0; k < n; ++k) {
            xr[k] = centroid[k] + (centroid[k] - worst[k]);
        }
        const double fr = f(xr);
        if (fr > vals[0]) {
            for (std::size_t k = 0; k < n; ++k) {
                xe[k] = centroid[k] + 2 * (centroid[k] - worst[k]);
            }
            const double fe = f(xe);
            if (fe > fr) {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if (fr > vals[n - 1]) {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        const bool outside = fr > vals[n];
        for (std::size_t k = 0; k < n; ++k) {
            xc[k] = outside ? centroid[k] + 0.5 * (xr[k] - centroid[k]) : centroid[k] + 0.5 * (worst[k] - centroid[k]);
        }
        const double fc = f(xc);
        if (fc > (outside ? fr : vals[n])) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
            }
            vals[i] = f(pts[i]);
        }
    }
    sort_simplex();
    res.x = pts[0];
    res.value = vals[0];
    res.iterations = it;
    return res;
}

struct SearchResult {
    std::vector<double> params;
    double value = -std::numeric_limits<double>::infinity();
    /// Largest objective value at any evaluated point.
    double max_evaluated = -std::numeric_limits<double>::infinity();
    bool converged = false;
    int best_restart = -1;
    std::uint64_t evaluations = 0;
};

/// Random-restart Nelder-Mead. Restart r starts from a uniform point in
/// [-1, 1]^n drawn from SplitMix64(seed + r * gamma), and within its
/// iteration budget re-seeds the simplex at its best point until that stops
/// improving. Points where the objective throws DecodeError score -inf.
/// Restarts are merged by maximum with the lowest index winning ties.
template <typename Objective>
SearchResult random_restart_search(Objective &&objective, std::size_t dim, const SearchConfig &config) {
    config.validate();
    SearchResult out;
    for (int r = 0; r < config.restarts; ++r) {
        SplitMix64 rng(config.seed + static_cast<std::uint64_t>(r) * SplitMix64::kGamma);
        std::vector<double> x(dim);
        for (auto &v : x) {
            v = rng.uniform(-1.0, 1.0);
        }
        double best_seen = -std::numeric_limits<double>::infinity();
        std::uint64_t evals = 0;
        auto f = [&](const std::vector<double> &p) {
            ++evals;
            double v;
            try {
                v = objective(std::span<const double>(p));
            } catch (const DecodeError &) {
                v = -std::numeric_limits<double>::infinity();
            }
            if (std::isnan(v)) {
                v = -std::numeric_limits<double>::infinity();
            }
            best_seen = std::max(best_seen, v);
            return v;
        };
        int budget = config.max_iterations;
        double step = config.initial_step;
        NelderMeadResult best;
        bool converged = false;
        while (budget > 0) {
            auto nm = nelder_mead_maximize(f, x, step, budget, config.step_tolerance, config.objective_tolerance);
            budget -= std::max(nm.iterations, 1);
            const bool improved = nm.value > best.value + config.objective_tolerance;
            if (nm.value > best.value) {
                best = nm;
            }
            x = best.x;
            if (nm.converged && !improved) {
                converged = true;
                break;
            }
            step = std::max(config.initial_step * 0.1, 1e-3);
        }
        out.evaluations += evals;
        out.max_evaluated = std::max(out.max_evaluated, best_seen);
        out.converged = out.converged || converged;
        if (best.value > out.value) {
            out.value = best.value;
            out.params = best.x;
            out.best_restart = r;
        }
    }
    return out;
}

/// Exact probability that a game ends in an outcome accepted by `event`.
inline double achieved_probability(Game game, const AliceStrategy &alice, const BobStrategy &bob,
                                   const ProtocolParams &params, const std::function<bool(Outcome)> &event) {
    auto result = run_exact(game, alice, bob, params);
    double p = 0;
    for (Outcome o : outcomes_of(game)) {
        if (event(o)) {
            p += result.probability(o);
        }
    }
    return p;
}

inline double achieved_probability(Game game, const AliceStrategy &alice, const BobStrategy &bob,
                                   const ProtocolParams &params, Outcome event) {
    return achieved_probability(game, alice, bob, params, [event](Outcome o) { return o == event; });
}

/// sigma = M M^dagger / Tr(M M^dagger) for M a 3x3 complex matrix given as
/// 18 reals, row-major (re, im) pairs.
inline DensityMatrix density_from_factor(std::span<const double> p) {
    if (p.size() != 18) {
        throw std::invalid_argument("density factor chart expects 18 parameters");
    }
    ComplexMatrix m(3, 3, detail::complex_block(p, 9));
    ComplexMatrix s = m * m.adjoint();
    const double tr = s.trace().real();
    if (tr <= 1e-18) {
        throw DecodeError("degenerate chart point: zero factor matrix");
    }
    s *= 1.0 / tr;
    s = (s + s.adjoint()) * 0.5;
    return DensityMatrix(std::move(s));
}

inline double average_fidelity(const DensityMatrix &sigma, const ProtocolParams &params) {
    return 0.5 * (fidelity(sigma, rho_honest(0, params)) + fidelity(sigma, rho_honest(1, params)));
}

struct FidelitySearch {
    DensityMatrix sigma_star;
    double value;
    double max_evaluated;
    bool converged;
};

/// Maximizes (F(sigma, rho_0) + F(sigma, rho_1)) / 2 over qutrit density matrices.
inline FidelitySearch max_avg_fidelity(const ProtocolParams &params, const SearchConfig &config) {
    auto r = random_restart_search(
        [&](std::span<const double> p) { return average_fidelity(density_from_factor(p), params); }, 18, config);
    return {density_from_factor(r.params), r.value, r.max_evaluated, r.converged};
}

/// Event a cheater targets: Alice wants outcome 0, Bob outcome 1.
inline Outcome cheater_event(Game game, Party cheater) {
    if (game == Game::Weak) {
        return cheater == Party::Alice ? Outcome::AliceWins : Outcome::BobWins;
    }
    return cheater == Party::Alice ? Outcome::CoinZero : Outcome::CoinOne;
}

/// Closed-form cheating bound for the cheater of a chart kind.
inline double cheater_bound(Game game, AdversaryKind kind, double alpha) {
    if (kind == AdversaryKind::AliceCommit) {
        return game == Game::Weak ? alice_weak_bound(alpha) : alice_strong_bound(alpha);
    }
    return game == Game::Weak ? bob_weak_bound(alpha) : bob_strong_bound(alpha);
}

struct BestResponse {
    AdversaryKind kind;
    SearchResult search;
    double bound;
};

inline BobStrategy decode_bob_for(Game game, AdversaryKind kind, std::span<const double> p) {
    auto bob = decode_bob_extract(p, kind == AdversaryKind::BobExtractBalanced);
    // In the strong game a cheating Bob accepts whatever coin results.
    bob.checks = game == Game::Weak;
    return bob;
}

/// Best response of a chart adversary against a fixed (honest) Bob.
inline BestResponse best_response_search(Game game, const BobStrategy &fixed_bob, const ProtocolParams &params,
                                         const SearchConfig &config) {
    const Outcome event = cheater_event(game, Party::Alice);
    auto r = random_restart_search(
        [&](std::span<const double> p) {
            return achieved_probability(game, decode_alice_commit(p), fixed_bob, params, event);
        },
        chart_length(AdversaryKind::AliceCommit), config);
    return {AdversaryKind::AliceCommit, std::move(r), cheater_bound(game, AdversaryKind::AliceCommit, params.alpha)};
}

/// Best response of a Bob chart adversary against a fixed (honest) Alice.
inline BestResponse best_response_search(Game game, const AliceStrategy &fixed_alice, AdversaryKind kind,
                                         const ProtocolParams &params, const SearchConfig &config) {
    if (kind == AdversaryKind::AliceCommit) {
        throw std::invalid_argument("a fixed Alice needs a Bob adversary chart");
    }
    const Outcome event = cheater_event(game, Party::Bob);
    auto r = random_restart_search(
        [&](std::span<const double> p) {
            return achieved_probability(game, fixed_alice, decode_bob_for(game, kind, p), params, event);
        },
        chart_length(kind), config);
    return {kind, std::move(r), cheater_bound(game, kind, params.alpha)};
}

/// Best response against the honest opponent.
inline BestResponse best_response_search(Game game, AdversaryKind kind, const ProtocolParams &params,
                                         const SearchConfig &config) {
    if (kind == AdversaryKind::AliceCommit) {
        return best_response_search(game, honest_bob(params), params, config);
    }
    return best_response_search(game, honest_alice(params), kind, params, config);
}

struct SweepEntry {
    std::string name;
    Game game;
    Outcome event;
    std::function<AliceStrategy(const ProtocolParams &)> alice;
    std::function<BobStrategy(const ProtocolParams &)> bob;
    std::function<double(double)> bound;
};

struct AchievedValue {
    std::string name;
    double bound;
    double value;
    double gap;  // bound - value
};

struct SweepRow {
    double alpha;
    double alice_weak_bound;
    double bob_weak_bound;
    double alice_strong_bound;
    double bob_strong_bound;
    double fidelity;
    double trace_distance;  // ||rho_0 - rho_1||_tr
    std::vector<AchievedValue> achieved;

    const AchievedValue &entry(const std::string &name) const {
        for (const auto &a : achieved) {
            if (a.name == name) {
                return a;
            }
        }
        throw std::out_of_range("no sweep entry named '" + name + "'");
    }
};

/// The four optimal cheats, each against the honest opponent.
inline std::vector<SweepEntry> default_sweep_entries() {
    return {
        {"alice-opt/weak", Game::Weak, Outcome::AliceWins, cheating_alice_optimal, honest_bob, alice_weak_bound},
        {"bob-opt-weak/weak", Game::Weak, Outcome::BobWins, honest_alice, cheating_bob_weak_optimal, bob_weak_bound},
        {"alice-opt/strong", Game::Strong, Outcome::CoinZero, cheating_alice_optimal, honest_bob, alice_strong_bound},
        {"bob-helstrom-1/strong", Game::Strong, Outcome::CoinOne, honest_alice,
         [](const ProtocolParams &p) { return cheating_bob_strong_helstrom(p, 1); }, bob_strong_bound},
    };
}

inline SweepRow sweep_row(double alpha, std::span<const SweepEntry> entries) {
    const auto report = bound_report(alpha);
    SweepRow row{alpha,
                 report.alice_weak,
                 report.bob_weak,
                 report.alice_strong,
                 report.bob_strong,
                 report.fidelity_rho,
                 report.trace_dist_rho,
                 {}};
    ProtocolParams params(alpha);
    for (const auto &e : entries) {
        const double v = achieved_probability(e.game, e.alice(params), e.bob(params), params, e.event);
        const double b = e.bound(alpha);
        row.achieved.push_back({e.name, b, v, b - v});
    }
    return row;
}

inline std::vector<SweepRow> sweep(std::span<const double> alpha_grid, std::span<const SweepEntry> entries) {
    std::vector<SweepRow> rows;
    rows.reserve(alpha_grid.size());
    for (double a : alpha_grid) {
        rows.push_back(sweep_row(a, entries));
    }
    return rows;
}

inline std::vector<SweepRow> sweep(std::span<const double> alpha_grid) {
    auto entries = default_sweep_entries();
    return sweep(alpha_grid, entries);
}

/// n evenly spaced points from start to stop inclusive.
inline std::vector<double> linspace(double start, double stop, std::size_t n) {
    if (n < 2) {
        throw std::invalid_argument("a grid needs at least two points");
    }
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = i + 1 == n ? stop : start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return g;
}

}  // namespace qcoin
