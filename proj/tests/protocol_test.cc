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

#include "qcoin/protocol.hpp"

#include <random>
#include <variant>

#include "gtest/gtest.h"
#include "qcoin/strategies.hpp"
#include "test_util.h"

using namespace qcoin;
using namespace qcoin::testing;

namespace {

double sum_of(const ExactResult &r) {
    double s = 0;
    for (const auto &o : r.outcomes) {
        s += o.probability;
    }
    return s;
}

// Honest Alice that also entangles a private qubit X with her commitment
// register and then scrambles it before revealing.
AliceStrategy honest_alice_with_scratch(const ProtocolParams &params, const ComplexMatrix &scramble) {
    auto base = honest_alice(params);
    const auto &col = base.commit.isometry->map;
    std::vector<cplx> v(col.rows() * 2);
    for (std::size_t i = 0; i < col.rows(); ++i) {
        const std::size_t a = i / 6;  // A is the leading register
        v[2 * i + a] = col(i, 0);
    }
    AliceStrategy s = base;
    s.commit.isometry->outputs.push_back({"X", 2});
    const std::size_t rows = v.size();
    s.commit.isometry->map = ComplexMatrix(rows, 1, std::move(v));
    s.respond = [scramble](int, int) {
        LocalAction act;
        act.isometry = Isometry{{"X"}, {{"X", 2}}, scramble};
        return act;
    };
    return s;
}

}  // namespace

TEST(protocol, honest_weak_is_fair_and_never_aborts) {
    for (double a : alpha_grid(21)) {
        ProtocolParams p(a);
        auto r = run_weak_exact(honest_alice(p), honest_bob(p), p);
        EXPECT_NEAR(r.probability(Outcome::AliceWins), 0.5, 1e-12) << a;
        EXPECT_NEAR(r.probability(Outcome::BobWins), 0.5, 1e-12) << a;
        EXPECT_NEAR(r.probability(Outcome::AbortByAlice), 0.0, 1e-12) << a;
        EXPECT_NEAR(r.probability(Outcome::AbortByBob), 0.0, 1e-12) << a;
        EXPECT_NEAR(sum_of(r), 1.0, 1e-12);
    }
}

TEST(protocol, honest_strong_is_fair_and_never_aborts) {
    for (double a : alpha_grid(21)) {
        ProtocolParams p(a);
        auto r = run_strong_exact(honest_alice(p), honest_bob(p), p);
        EXPECT_NEAR(r.probability(Outcome::CoinZero), 0.5, 1e-12) << a;
        EXPECT_NEAR(r.probability(Outcome::CoinOne), 0.5, 1e-12) << a;
        EXPECT_NEAR(r.probability(Outcome::AbortByBob), 0.0, 1e-12) << a;
        ASSERT_EQ(r.outcomes.size(), 3u);
    }
}

TEST(protocol, outcome_lists_and_coin_values) {
    ProtocolParams p(1.0);
    auto weak = run_weak_exact(honest_alice(p), honest_bob(p), p);
    ASSERT_EQ(weak.outcomes.size(), 4u);
    EXPECT_EQ(weak.outcomes[0].kind, Outcome::AliceWins);
    EXPECT_EQ(weak.outcomes[0].c_a, 0);
    EXPECT_EQ(weak.outcomes[1].kind, Outcome::BobWins);
    EXPECT_EQ(weak.outcomes[1].c_b, 1);
    for (const auto &o : weak.outcomes) {
        if (o.kind == Outcome::AbortByBob) {
            EXPECT_EQ(o.c_a, 0);
            EXPECT_FALSE(o.c_b.has_value());
        }
        if (o.kind == Outcome::AbortByAlice) {
            EXPECT_EQ(o.c_b, 1);
            EXPECT_FALSE(o.c_a.has_value());
        }
    }
}

TEST(protocol, sum_to_one_for_every_strategy_pair) {
    for (double a : alpha_grid(11)) {
        ProtocolParams p(a);
        std::vector<AliceStrategy> alices = {honest_alice(p), cheating_alice_optimal(p)};
        std::vector<BobStrategy> bobs = {honest_bob(p), cheating_bob_weak_optimal(p), cheating_bob_weak_literal(p),
                                         cheating_bob_strong_helstrom(p, 0), cheating_bob_strong_helstrom(p, 1)};
        for (const auto &al : alices) {
            for (const auto &bo : bobs) {
                for (Game g : {Game::Weak, Game::Strong}) {
                    auto r = run_exact(g, al, bo, p);
                    EXPECT_NEAR(sum_of(r), 1.0, 1e-12) << al.name << " vs " << bo.name << " " << to_string(g);
                    double branches = 0;
                    for (const auto &b : r.branches) {
                        branches += b.probability;
                    }
                    EXPECT_NEAR(branches, 1.0, 1e-12);
                }
            }
        }
    }
}

TEST(protocol, weak_transcripts_follow_the_winner_checks_rule) {
    ProtocolParams p(kPi / 3);
    auto r = run_weak_exact(honest_alice(p), honest_bob(p), p);
    ASSERT_FALSE(r.branches.empty());
    for (const auto &br : r.branches) {
        const auto &e = br.transcript.entries;
        ASSERT_GE(e.size(), 4u);
        EXPECT_TRUE(std::holds_alternative<msg::QutritRegister>(e[0].message));
        EXPECT_EQ(e[0].sender, Party::Alice);
        EXPECT_TRUE(std::holds_alternative<msg::ClassicalBit>(e[1].message));
        EXPECT_EQ(e[1].sender, Party::Bob);
        EXPECT_TRUE(std::holds_alternative<msg::RevealBit>(e[2].message));
        ASSERT_EQ(br.transcript.checks.size(), 1u);
        const auto &check = br.transcript.checks[0];
        EXPECT_EQ(check.expected_bit, br.a);
        EXPECT_NEAR(check.pass_probability, 1.0, 1e-12);
        if ((br.a ^ br.b) == 0) {
            EXPECT_EQ(br.outcome, Outcome::AliceWins);
            EXPECT_EQ(check.checker, Party::Bob);
            EXPECT_TRUE(std::holds_alternative<msg::SignQubitRegister>(e[3].message));
            EXPECT_EQ(e.size(), 4u);
        } else {
            EXPECT_EQ(br.outcome, Outcome::BobWins);
            EXPECT_EQ(check.checker, Party::Alice);
            EXPECT_TRUE(std::holds_alternative<msg::QutritReturn>(e[3].message));
            EXPECT_EQ(e[3].round, 4);
            EXPECT_EQ(e.size(), 4u);
        }
    }
}

TEST(protocol, strong_transcripts_always_send_sign_qubit_to_bob) {
    ProtocolParams p(kPi / 2);
    auto r = run_strong_exact(honest_alice(p), honest_bob(p), p);
    for (const auto &br : r.branches) {
        ASSERT_EQ(br.transcript.entries.size(), 4u);
        EXPECT_STREQ(message_kind(br.transcript.entries[3].message), "SignQubitRegister");
        ASSERT_EQ(br.transcript.checks.size(), 1u);
        EXPECT_EQ(br.transcript.checks[0].checker, Party::Bob);
    }
}

TEST(protocol, private_ancilla_operations_do_not_change_the_distribution) {
    std::mt19937_64 rng(41);
    for (double a : {0.3, kPi / 2, 2.5}) {
        ProtocolParams p(a);
        auto reference = run_weak_exact(honest_alice(p), honest_bob(p), p);
        for (int trial = 0; trial < 3; ++trial) {
            auto u = unitary_exp(random_hermitian(2, rng));
            auto alice = honest_alice_with_scratch(p, u);
            auto r = run_weak_exact(alice, honest_bob(p), p);
            for (Outcome o : outcomes_of(Game::Weak)) {
                EXPECT_NEAR(r.probability(o), reference.probability(o), 1e-12);
            }
            auto cheat = run_weak_exact(alice, cheating_bob_weak_optimal(p), p);
            auto cheat_ref = run_weak_exact(honest_alice(p), cheating_bob_weak_optimal(p), p);
            for (Outcome o : outcomes_of(Game::Weak)) {
                EXPECT_NEAR(cheat.probability(o), cheat_ref.probability(o), 1e-12);
            }
        }
    }
}

TEST(protocol, sampled_mode_is_deterministic_per_seed) {
    ProtocolParams p(kPi / 2);
    auto a = run_sampled(Game::Weak, honest_alice(p), honest_bob(p), p, 2000, 7);
    auto b = run_sampled(Game::Weak, honest_alice(p), honest_bob(p), p, 2000, 7);
    auto c = run_sampled(Game::Weak, honest_alice(p), honest_bob(p), p, 2000, 8);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_NE(a.counts, c.counts);
    EXPECT_EQ(a.count(Outcome::AliceWins) + a.count(Outcome::BobWins), 2000u);
}

TEST(protocol, sampled_frequencies_converge_to_exact) {
    ProtocolParams p(kPi / 2);
    const std::uint64_t n = 20000;
    struct Pair {
        Game game;
        AliceStrategy alice;
        BobStrategy bob;
    };
    std::vector<Pair> pairs = {
        {Game::Weak, cheating_alice_optimal(p), honest_bob(p)},
        {Game::Weak, honest_alice(p), cheating_bob_weak_optimal(p)},
        {Game::Strong, honest_alice(p), cheating_bob_strong_helstrom(p, 1)},
    };
    std::uint64_t seed = 100;
    for (const auto &pr : pairs) {
        auto exact = run_exact(pr.game, pr.alice, pr.bob, p);
        auto sampled = run_sampled(pr.game, pr.alice, pr.bob, p, n, seed++);
        for (Outcome o : outcomes_of(pr.game)) {
            const double q = exact.probability(o);
            const double sigma = std::sqrt(q * (1 - q) / static_cast<double>(n));
            EXPECT_LE(std::abs(sampled.frequency(o) - q), 4 * sigma + 1e-12)
                << pr.alice.name << " vs " << pr.bob.name << " " << to_string(o);
        }
    }
}

TEST(protocol, rejects_zero_trials) {
    ProtocolParams p(1.0);
    EXPECT_THROW(run_sampled(Game::Weak, honest_alice(p), honest_bob(p), p, 0, 1), std::invalid_argument);
}

TEST(protocol, structural_violations_are_reported) {
    ProtocolParams p(1.0);
    auto bob = honest_bob(p);

    auto no_qutrit = honest_alice(p);
    no_qutrit.commit.isometry->outputs = {{kAliceAncilla, 2}, {kSignRegister, 2}, {"Q", 3}};
    EXPECT_THROW(run_weak_exact(no_qutrit, bob, p), ProtocolError);

    auto wrong_dim = honest_alice(p);
    wrong_dim.commit.isometry->outputs = {{kAliceAncilla, 2}, {kSignRegister, 3}, {kQutritRegister, 2}};
    EXPECT_THROW(run_weak_exact(wrong_dim, bob, p), ProtocolError);

    auto not_normalized = honest_alice(p);
    not_normalized.commit.isometry->map *= 2.0;
    EXPECT_THROW(run_weak_exact(not_normalized, bob, p), ProtocolError);

    auto bad_reveal = honest_alice(p);
    bad_reveal.reveal = [](int, int, int) { return 2; };
    EXPECT_THROW(run_weak_exact(bad_reveal, bob, p), ProtocolError);

    auto touches_sign = honest_bob(p);
    touches_sign.reply.isometry = Isometry{{kSignRegister}, {{kSignRegister, 2}}, ComplexMatrix::identity(2)};
    touches_sign.reply.measure.reset();
    EXPECT_THROW(run_weak_exact(honest_alice(p), touches_sign, p), ProtocolError);

    auto steals_ancilla = honest_bob(p);
    steals_ancilla.reply.isometry = Isometry{{kAliceAncilla}, {{kAliceAncilla, 2}}, ComplexMatrix::identity(2)};
    steals_ancilla.reply.measure.reset();
    EXPECT_THROW(run_weak_exact(honest_alice(p), steals_ancilla, p), ProtocolError);

    auto no_rule = honest_bob(p);
    no_rule.choose_b = nullptr;
    EXPECT_THROW(run_weak_exact(honest_alice(p), no_rule, p), ProtocolError);
}

TEST(protocol, joint_state_bookkeeping) {
    const auto state = psi(0, ProtocolParams(1.0));
    std::vector<cplx> v(state.amplitudes().begin(), state.amplitudes().end());
    JointState s;
    s.apply(Isometry{{}, {{"S", 2}, {"T", 3}}, ComplexMatrix(6, 1, v)}, Party::Alice);
    EXPECT_EQ(s.owner("T"), Party::Alice);
    s.transfer("T", 3, Party::Bob);
    EXPECT_EQ(s.owner("T"), Party::Bob);
    EXPECT_THROW(s.owner("Z"), ProtocolError);
    EXPECT_THROW(s.transfer("T", 2, Party::Alice), ProtocolError);
    auto branches = s.measure("T", Party::Bob);
    ASSERT_EQ(branches.size(), 3u);
    EXPECT_NEAR(branches[0].probability, cos2h(1.0), 1e-15);
    EXPECT_NEAR(branches[1].probability, sin2h(1.0), 1e-15);
    EXPECT_EQ(branches[2].probability, 0.0);
    EXPECT_THROW(s.measure("S", Party::Bob), ProtocolError);
}
