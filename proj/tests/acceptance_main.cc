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

// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qcoin/bounds.hpp"
#include "qcoin/cli.hpp"
#include "qcoin/protocol.hpp"
#include "qcoin/strategies.hpp"
#include "qcoin/verify.hpp"

using namespace qcoin;

namespace {

constexpr double kPi = std::numbers::pi;

double c2(double a) { return std::pow(std::cos(a / 2), 2); }
double s2(double a) { return std::pow(std::sin(a / 2), 2); }

std::vector<double> grid(std::size_t n) { return linspace(0, kPi, n); }

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

Verdict strong_headline() {
    Verdict v;
    const double a = kPi / 2;
    ProtocolParams p(a);
    v.require(std::abs(alice_strong_bound(a) - 0.75) <= 1e-12, "alice_strong_bound " + num(alice_strong_bound(a)));
    v.require(std::abs(bob_strong_bound(a) - 0.75) <= 1e-12, "bob_strong_bound " + num(bob_strong_bound(a)));
    const double alice = run_strong_exact(cheating_alice_optimal(p), honest_bob(p), p).probability(Outcome::CoinZero);
    const double bob =
        run_strong_exact(honest_alice(p), cheating_bob_strong_helstrom(p, 1), p, 1).probability(Outcome::CoinOne);
    v.require(std::abs(alice - 0.75) <= 1e-9, "alice-opt achieved " + num(alice));
    v.require(std::abs(bob - 0.75) <= 1e-9, "bob-helstrom-1 achieved " + num(bob));
    v.detail = v.pass ? "alice 0.75, bob 0.75" : v.detail;
    return v;
}

Verdict weak_headline() {
    Verdict v;
    const auto eq = solve_weak_equalization();
    // 1/2 (1 + t) = (1 - k t)^2 with k = 1 - 1/sqrt(2)
    const double k = 1 - 1 / std::sqrt(2.0);
    const double qa = k * k;
    const double qb = -(2 * k + 0.5);
    const double qc = 0.5;
    const double t = (-qb - std::sqrt(qb * qb - 4 * qa * qc)) / (2 * qa);
    const double closed = 0.5 * (1 + t);
    v.require(std::abs(eq.p_star - 0.739) <= 5e-4, "p* " + num(eq.p_star));
    v.require(std::abs(eq.bias() - 0.239) <= 5e-4, "bias " + num(eq.bias()));
    v.require(std::abs(eq.p_star - closed) <= 1e-9, "closed form gap " + num(eq.p_star - closed));
    char buf[128];
    std::snprintf(buf, sizeof buf, "alpha* %.10f, p* %.10f, bias %.10f", eq.alpha_star, eq.p_star, eq.bias());
    if (v.pass) {
        v.detail = buf;
    }
    return v;
}

Verdict alice_tightness() {
    Verdict v;
    double worst = 0;
    for (double a : grid(21)) {
        ProtocolParams p(a);
        const double got =
            run_weak_exact(cheating_alice_optimal(p), honest_bob(p), p).probability(Outcome::AliceWins);
        worst = std::max(worst, std::abs(got - 0.5 * (1 + c2(a))));
    }
    v.require(worst <= 1e-9, "max gap " + num(worst));
    v.detail = v.pass ? "max gap " + num(worst) : v.detail;
    return v;
}

Verdict bob_tightness() {
    Verdict v;
    double worst = 0;
    double margin = 1;
    for (double a : grid(21)) {
        ProtocolParams p(a);
        const double opt =
            run_weak_exact(honest_alice(p), cheating_bob_weak_optimal(p), p).probability(Outcome::BobWins);
        const double lit =
            run_weak_exact(honest_alice(p), cheating_bob_weak_literal(p), p).probability(Outcome::BobWins);
        const double bound = std::pow(c2(a) / std::sqrt(2.0) + s2(a), 2);
        worst = std::max(worst, std::abs(opt - bound));
        if (a > 0 && a < kPi) {
            margin = std::min(margin, opt - lit);
        }
    }
    v.require(worst <= 1e-9, "max gap " + num(worst));
    v.require(margin > 0, "literal not strictly lower, margin " + num(margin));
    v.detail = v.pass ? "max gap " + num(worst) + ", literal margin " + num(margin) : v.detail;
    return v;
}

Verdict fidelity_chain() {
    Verdict v;
    double worst_gap = 0;
    double worst_excess = -1;
    for (double a : {kPi / 6, kPi / 3, kPi / 2, 2 * kPi / 3, 5 * kPi / 6}) {
        const auto r = max_avg_fidelity(ProtocolParams(a), SearchConfig{});
        const double target = 0.5 * (1 + std::sqrt(std::pow(c2(a), 2)));
        worst_gap = std::max(worst_gap, std::abs(r.value - target));
        worst_excess = std::max(worst_excess, r.max_evaluated - target);
    }
    v.require(worst_gap <= 1e-4, "max |value - target| " + num(worst_gap));
    v.require(worst_excess <= 1e-6, "search exceeded target by " + num(worst_excess));
    v.detail = v.pass ? "max gap " + num(worst_gap) + ", max excess " + num(worst_excess) : v.detail;
    return v;
}

Verdict search_soundness() {
    Verdict v;
    double worst_low = 0;
    double worst_high = -1;
    for (double a : {kPi / 4, kPi / 2, 3 * kPi / 4}) {
        ProtocolParams p(a);
        for (Game g : {Game::Weak, Game::Strong}) {
            for (AdversaryKind k : {AdversaryKind::AliceCommit, AdversaryKind::BobExtract}) {
                const auto r = best_response_search(g, k, p, SearchConfig{});
                const std::string tag =
                    std::string(to_string(g)) + "/" + to_string(k) + " alpha=" + num(a) + " got " + num(r.search.value);
                v.require(r.search.value >= r.bound - 1e-3, tag + " below band");
                v.require(r.search.value <= r.bound + 1e-6, tag + " above band");
                v.require(r.search.max_evaluated <= r.bound + 1e-6, tag + " evaluated above bound");
                worst_low = std::max(worst_low, r.bound - r.search.value);
                worst_high = std::max(worst_high, r.search.max_evaluated - r.bound);
            }
        }
    }
    v.detail = v.pass ? "12 searches, max shortfall " + num(worst_low) + ", max excess " + num(worst_high) : v.detail;
    return v;
}

Verdict honest_fairness() {
    Verdict v;
    double worst = 0;
    for (double a : grid(21)) {
        ProtocolParams p(a);
        auto r = run_weak_exact(honest_alice(p), honest_bob(p), p);
        worst = std::max({worst, std::abs(r.probability(Outcome::AliceWins) - 0.5),
                          std::abs(r.probability(Outcome::BobWins) - 0.5), r.probability(Outcome::AbortByAlice),
                          r.probability(Outcome::AbortByBob)});
    }
    v.require(worst <= 1e-12, "exact deviation " + num(worst));
    ProtocolParams p(kPi / 2);
    auto s = run_sampled(Game::Weak, honest_alice(p), honest_bob(p), p, 100000, 20261017);
    const double fa = s.frequency(Outcome::AliceWins);
    const double fb = s.frequency(Outcome::BobWins);
    v.require(std::abs(fa - 0.5) <= 0.01 && std::abs(fb - 0.5) <= 0.01,
              "sampled frequencies " + num(fa) + ", " + num(fb));
    v.require(s.count(Outcome::AbortByAlice) + s.count(Outcome::AbortByBob) == 0, "sampled aborts");
    v.detail = v.pass ? "exact deviation " + num(worst) + ", sampled " + num(fa) + "/" + num(fb) : v.detail;
    return v;
}

Verdict measure_identities() {
    Verdict v;
    double fid = 0;
    double tr = 0;
    double helstrom = 0;
    for (double a : grid(21)) {
        ProtocolParams p(a);
        const auto r0 = rho_honest(0, p);
        const auto r1 = rho_honest(1, p);
        const double tn = trace_norm(r0.matrix() - r1.matrix());
        fid = std::max(fid, std::abs(fidelity(r0, r1) - std::pow(c2(a), 2)));
        tr = std::max(tr, std::abs(tn - 2 * s2(a)));
        helstrom = std::max(helstrom, std::abs(bob_strong_bound(a) - (0.5 + tn / 4)));
    }
    v.require(fid <= 1e-9, "fidelity error " + num(fid));
    v.require(tr <= 1e-9, "trace norm error " + num(tr));
    v.require(helstrom <= 1e-12, "bob_strong_bound error " + num(helstrom));
    v.detail = v.pass ? "errors " + num(fid) + ", " + num(tr) + ", " + num(helstrom) : v.detail;
    return v;
}

Verdict kitaev() {
    Verdict v;
    double lowest = 1;
    for (double a : grid(1001)) {
        lowest = std::min(lowest, alice_strong_bound(a) * bob_strong_bound(a));
    }
    v.require(lowest >= 0.5 - 1e-12, "min product " + num(lowest));
    char buf[64];
    std::snprintf(buf, sizeof buf, "min product %.15f", lowest);
    v.detail = v.pass ? buf : v.detail;
    return v;
}

Verdict reproducibility() {
    Verdict v;
    const std::vector<std::vector<std::string>> invocations = {
        {"simulate", "weak", "honest", "honest", "--mode", "sampled", "--trials", "20000", "--seed", "7"},
        {"simulate", "strong", "honest", "bob-helstrom-1", "--mode", "sampled", "--trials", "20000", "--seed", "99"},
        {"simulate", "weak", "alice-opt", "honest", "--alpha", "optimal", "--format", "text"},
        {"bounds", "--game", "weak", "--alpha", "optimal"},
        {"sweep", "--grid", "0:pi:11"},
        {"optimize", "--format", "csv"},
        {"verify", "--suite", "fidelity", "--seed", "5"},
    };
    for (const auto &args : invocations) {
        std::string outputs[2];
        int codes[2];
        for (int i = 0; i < 2; ++i) {
            std::ostringstream out;
            std::ostringstream err;
            codes[i] = cli::run_cli(args, out, err);
            outputs[i] = out.str() + "\x1f" + err.str();
        }
        v.require(outputs[0] == outputs[1] && codes[0] == codes[1], "output differs for '" + args[0] + "'");
        v.require(codes[0] == 0, "'" + args[0] + "' exited " + std::to_string(codes[0]));
    }
    v.detail = v.pass ? std::to_string(invocations.size()) + " invocations byte-identical" : v.detail;
    return v;
}

struct Criterion {
    int id;
    const char *name;
    double limit_seconds;  // <= 0: no limit
    std::function<Verdict()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "strong protocol headline", 1, strong_headline},
        {2, "weak protocol headline", 1, weak_headline},
        {3, "optimal Alice tightness", 5, alice_tightness},
        {4, "optimal Bob tightness", 5, bob_tightness},
        {5, "fidelity inequality chain", 30, fidelity_chain},
        {6, "best-response search soundness", 120, search_soundness},
        {7, "honest fairness and zero abort", 10, honest_fairness},
        {8, "measure identities", 1, measure_identities},
        {9, "Kitaev product", 1, kitaev},
        {10, "reproducibility", 0, reproducibility},
    };
    int failed = 0;
    for (const auto &c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception &e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0 && secs > c.limit_seconds) {
            v.pass = false;
            v.detail += " (over the " + num(c.limit_seconds) + " s budget)";
        }
        failed += v.pass ? 0 : 1;
        std::printf("%s criterion %2d  %-32s %8.3f s  %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
