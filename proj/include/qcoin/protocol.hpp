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


// Message-driven execution of the weak (4-round) and strong (3-round)
// coin-flipping games between an Alice strategy and a Bob strategy.
//
// The joint state of every register in play is a single pure vector. A
// strategy acts only through isometries on registers it currently holds and
// computational-basis measurements of one of its registers. Exact mode
// enumerates every measurement outcome and check result as weighted
// branches; sampled mode draws one branch per trial from a seeded generator.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qcoin/qmath.hpp"
#include "qcoin/rng.hpp"
#include "qcoin/states.hpp"

namespace qcoin {

enum class Party { Alice, Bob };
enum class Game { Weak, Strong };

/// Weak games end in the first four kinds, strong games in CoinZero,
/// CoinOne or AbortByBob.
enum class Outcome { AliceWins, BobWins, AbortByAlice, AbortByBob, CoinZero, CoinOne };
inline constexpr std::size_t kOutcomeCount = 6;

inline const char *to_string(Party p) { return p == Party::Alice ? "alice" : "bob"; }
inline const char *to_string(Game g) { return g == Game::Weak ? "weak" : "strong"; }
inline const char *to_string(Outcome o) {
    switch (o) {
        case Outcome::AliceWins:
            return "AliceWins";
        case Outcome::BobWins:
            return "BobWins";
        case Outcome::AbortByAlice:
            return "AbortByAlice";
        case Outcome::AbortByBob:
            return "AbortByBob";
        case Outcome::CoinZero:
            return "coin=0";
        case Outcome::CoinOne:
            return "coin=1";
    }
    return "?";
}

inline std::vector<Outcome> outcomes_of(Game g) {
    if (g == Game::Weak) {
        return {Outcome::AliceWins, Outcome::BobWins, Outcome::AbortByAlice, Outcome::AbortByBob};
    }
    return {Outcome::CoinZero, Outcome::CoinOne, Outcome::AbortByBob};
}

class ProtocolError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A local operation: maps the held registers `inputs` to freshly labelled
/// `outputs`. With no inputs the map is a state preparation (one column).
struct Isometry {
    std::vector<std::string> inputs;
    std::vector<Register> outputs;
    ComplexMatrix map;
};

struct LocalAction {
    std::optional<Isometry> isometry;
    /// Register measured in the computational basis after the isometry.
    std::optional<std::string> measure;
};

struct AliceStrategy {
    std::string name;
    /// Round 1. Must create the sign qubit "S" and qutrit "T"; the qutrit is sent.
    LocalAction commit;
    /// Round 3, before revealing. Arguments: commit outcome, received b.
    std::function<LocalAction(int, int)> respond;
    /// The revealed bit a. Arguments: commit outcome, b, respond outcome.
    std::function<int(int, int, int)> reveal;
    /// Whether Alice runs her check when the qutrit comes back (weak game, c = 1).
    bool checks = true;

    static constexpr Party party() { return Party::Alice; }
};

struct BobStrategy {
    std::string name;
    /// Round 2, acting on the received qutrit and any ancillas it creates.
    LocalAction reply;
    /// The sent bit b as a function of the reply outcome.
    std::function<int(int)> choose_b;
    /// Weak game round 4, before the qutrit is returned. Arguments: reply
    /// outcome, b, revealed a. May be empty.
    std::function<LocalAction(int, int, int)> before_return;
    /// Whether Bob runs his check when he receives the sign qubit.
    bool checks = true;

    static constexpr Party party() { return Party::Bob; }
};

/// Private register dimensions (everything but S and T) created by a
/// strategy's declared actions.
inline std::vector<std::size_t> ancilla_dims(const LocalAction &act) {
    std::vector<std::size_t> dims;
    if (act.isometry) {
        for (const auto &r : act.isometry->outputs) {
            if (r.label != kSignRegister && r.label != kQutritRegister) {
                dims.push_back(r.dim);
            }
        }
    }
    return dims;
}

namespace msg {
struct QutritRegister {
    std::string handle;
};
struct ClassicalBit {
    int value;
};
struct SignQubitRegister {
    std::string handle;
};
struct RevealBit {
    int value;
};
struct QutritReturn {
    std::string handle;
};
}  // namespace msg

using Message = std::variant<msg::QutritRegister, msg::ClassicalBit, msg::SignQubitRegister, msg::RevealBit,
                             msg::QutritReturn>;

inline const char *message_kind(const Message &m) {
    static constexpr std::array<const char *, 5> kNames = {"QutritRegister", "ClassicalBit", "SignQubitRegister",
                                                           "RevealBit", "QutritReturn"};
    return kNames[m.index()];
}

struct TranscriptEntry {
    int round;
    Party sender;
    Message message;
};

struct CheckRecord {
    Party checker;
    int expected_bit;
    double pass_probability;
};

struct Transcript {
    std::vector<TranscriptEntry> entries;
    std::vector<CheckRecord> checks;
};

/// Joint pure state of all registers, with ownership tracking.
class JointState {
   public:
    JointState() : amps_{cplx(1.0)} {}

    const RegisterLayout &layout() const { return layout_; }
    std::span<const cplx> amplitudes() const { return amps_; }

    Party owner(const std::string &label) const {
        auto it = owner_.find(label);
        if (it == owner_.end()) {
            throw ProtocolError("register '" + label + "' does not exist");
        }
        return it->second;
    }

    void transfer(const std::string &label, std::size_t expected_dim, Party to) {
        if (!layout_.contains(label) || layout_.at(label).dim != expected_dim) {
            throw ProtocolError("message register '" + label + "' is missing or has the wrong dimension");
        }
        owner_[label] = to;
    }

    void apply(const Isometry &iso, Party actor) {
        std::size_t din = 1;
        std::vector<std::size_t> in_pos;
        for (const auto &label : iso.inputs) {
            auto p = layout_.position(label);
            if (!p) {
                throw ProtocolError("isometry input '" + label + "' does not exist");
            }
            if (owner_.at(label) != actor) {
                throw ProtocolError(std::string(to_string(actor)) + " acted on register '" + label +
                                    "' held by the other party");
            }
            for (auto q : in_pos) {
                if (q == *p) {
                    throw ProtocolError("isometry input '" + label + "' listed twice");
                }
            }
            in_pos.push_back(*p);
            din *= layout_.registers()[*p].dim;
        }
        std::size_t dout = 1;
        for (const auto &r : iso.outputs) {
            dout *= r.dim;
        }
        if (iso.map.rows() != dout || iso.map.cols() != din) {
            throw ProtocolError("isometry dimension mismatch");
        }
        if (isometry_defect(iso.map) > tol::kIsometry) {
            throw ProtocolError("local operation is not an isometry");
        }

        std::vector<Register> rest;
        std::vector<bool> consumed(layout_.size(), false);
        for (auto p : in_pos) {
            consumed[p] = true;
        }
        for (std::size_t i = 0; i < layout_.size(); ++i) {
            if (!consumed[i]) {
                rest.push_back(layout_.registers()[i]);
            }
        }
        for (const auto &r : iso.outputs) {
            for (const auto &q : rest) {
                if (q.label == r.label) {
                    throw ProtocolError("isometry output '" + r.label + "' collides with an existing register");
                }
            }
        }
        std::vector<Register> next_regs = rest;
        next_regs.insert(next_regs.end(), iso.outputs.begin(), iso.outputs.end());
        RegisterLayout next(std::move(next_regs));

        std::vector<cplx> out(next.total_dim());
        for (std::size_t idx = 0; idx < amps_.size(); ++idx) {
            const cplx amp = amps_[idx];
            if (amp == cplx{}) {
                continue;
            }
            auto d = layout_.digits(idx);
            std::size_t rest_idx = 0;
            for (std::size_t i = 0; i < layout_.size(); ++i) {
                if (!consumed[i]) {
                    rest_idx = rest_idx * layout_.registers()[i].dim + d[i];
                }
            }
            std::size_t in_idx = 0;
            for (auto p : in_pos) {
                in_idx = in_idx * layout_.registers()[p].dim + d[p];
            }
            for (std::size_t o = 0; o < dout; ++o) {
                out[rest_idx * dout + o] += iso.map(o, in_idx) * amp;
            }
        }
        for (const auto &label : iso.inputs) {
            owner_.erase(label);
        }
        for (const auto &r : iso.outputs) {
            owner_[r.label] = actor;
        }
        layout_ = std::move(next);
        amps_ = std::move(out);
    }

    struct Branch {
        double probability;
        std::vector<cplx> amplitudes;  // renormalized, or zero when probability is 0
    };

    /// The same registers and owners with different amplitudes.
    JointState with_amplitudes(std::vector<cplx> amplitudes) const {
        JointState s = *this;
        s.amps_ = std::move(amplitudes);
        return s;
    }

    /// Computational-basis measurement; one branch per outcome.
    std::vector<Branch> measure(const std::string &label, Party actor) const {
        auto p = layout_.position(label);
        if (!p) {
            throw ProtocolError("measured register '" + label + "' does not exist");
        }
        if (owner_.at(label) != actor) {
            throw ProtocolError(std::string(to_string(actor)) + " measured register '" + label +
                                "' held by the other party");
        }
        const std::size_t dim = layout_.registers()[*p].dim;
        std::vector<Branch> out(dim, Branch{0.0, std::vector<cplx>(amps_.size())});
        for (std::size_t idx = 0; idx < amps_.size(); ++idx) {
            const std::size_t k = layout_.digits(idx)[*p];
            out[k].amplitudes[idx] = amps_[idx];
            out[k].probability += std::norm(amps_[idx]);
        }
        for (auto &b : out) {
            renormalize(b.amplitudes, b.probability);
        }
        return out;
    }

    /// Two-outcome projective check {P, I - P} on `labels` (in that order).
    std::array<Branch, 2> project(const std::vector<std::string> &labels, const ComplexMatrix &projector) const {
        std::array<Branch, 2> out{Branch{0.0, apply_local(labels, projector)},
                                  Branch{0.0, apply_local(labels, ComplexMatrix::identity(projector.rows()) - projector)}};
        for (auto &b : out) {
            b.probability = norm_squared(b.amplitudes);
            renormalize(b.amplitudes, b.probability);
        }
        return out;
    }

    DensityMatrix reduced(std::span<const std::string> keep) const {
        auto rho = ComplexMatrix::outer(amps_, amps_);
        return partial_trace(DensityMatrix(std::move(rho)), layout_, keep);
    }

   private:
    static void renormalize(std::vector<cplx> &v, double probability) {
        if (probability > 0) {
            const double n = std::sqrt(probability);
            for (auto &x : v) {
                x /= n;
            }
        }
    }

    // Square operator on the registers `labels`, ignoring ownership; the
    // layout is unchanged.
    std::vector<cplx> apply_local(const std::vector<std::string> &labels, const ComplexMatrix &op) const {
        std::vector<std::size_t> pos;
        std::size_t d = 1;
        for (const auto &l : labels) {
            auto p = layout_.position(l);
            if (!p) {
                throw ProtocolError("checked register '" + l + "' does not exist");
            }
            pos.push_back(*p);
            d *= layout_.registers()[*p].dim;
        }
        if (op.rows() != d || op.cols() != d) {
            throw ProtocolError("check operator dimension mismatch");
        }
        // stride of each checked register in the composite index
        std::vector<std::size_t> stride(layout_.size(), 1);
        for (std::size_t i = layout_.size(); i-- > 1;) {
            stride[i - 1] = stride[i] * layout_.registers()[i].dim;
        }
        std::vector<cplx> out(amps_.size());
        for (std::size_t idx = 0; idx < amps_.size(); ++idx) {
            const cplx amp = amps_[idx];
            if (amp == cplx{}) {
                continue;
            }
            auto dg = layout_.digits(idx);
            std::size_t local = 0;
            std::size_t base = idx;
            for (auto p : pos) {
                local = local * layout_.registers()[p].dim + dg[p];
                base -= dg[p] * stride[p];
            }
            for (std::size_t o = 0; o < d; ++o) {
                const cplx m = op(o, local);
                if (m == cplx{}) {
                    continue;
                }
                std::size_t target = base;
                std::size_t rem = o;
                for (std::size_t j = pos.size(); j-- > 0;) {
                    const std::size_t dim = layout_.registers()[pos[j]].dim;
                    target += (rem % dim) * stride[pos[j]];
                    rem /= dim;
                }
                out[target] += m * amp;
            }
        }
        return out;
    }

    RegisterLayout layout_;
    std::vector<cplx> amps_;
    std::map<std::string, Party> owner_;
};

struct ProtocolOutcome {
    Outcome kind;
    std::optional<int> c_a;
    std::optional<int> c_b;
    double probability;
};

struct BranchRecord {
    double probability;
    Outcome outcome;
    int a;
    int b;
    Transcript transcript;
};

class Distribution {
   public:
    double operator[](Outcome o) const { return p_[static_cast<std::size_t>(o)]; }
    double &operator[](Outcome o) { return p_[static_cast<std::size_t>(o)]; }
    double total() const {
        double s = 0;
        for (double x : p_) {
            s += x;
        }
        return s;
    }

   private:
    std::array<double, kOutcomeCount> p_{};
};

struct ExactResult {
    Game game;
    Distribution distribution;
    std::vector<ProtocolOutcome> outcomes;
    std::vector<BranchRecord> branches;

    double probability(Outcome o) const { return distribution[o]; }
};

struct SampledResult {
    Game game;
    std::uint64_t trials = 0;
    std::array<std::uint64_t, kOutcomeCount> counts{};

    std::uint64_t count(Outcome o) const { return counts[static_cast<std::size_t>(o)]; }
    double frequency(Outcome o) const { return static_cast<double>(count(o)) / static_cast<double>(trials); }
};

namespace detail {

struct ExactExplorer {
    template <typename F>
    void split(const std::vector<double> &probs, F &&f) {
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] > tol::kNullProbability) {
                f(static_cast<int>(i), probs[i]);
            }
        }
    }
};

struct SampledExplorer {
    SplitMix64 *rng;

    template <typename F>
    void split(const std::vector<double> &probs, F &&f) {
        const double u = rng->uniform();
        double acc = 0;
        std::size_t last = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] <= 0) {
                continue;
            }
            last = i;
            acc += probs[i];
            if (u < acc) {
                f(static_cast<int>(i), 1.0);
                return;
            }
        }
        f(static_cast<int>(last), 1.0);  // roundoff in the cumulative sum
    }
};

struct Context {
    JointState state;
    double weight = 1.0;
    Transcript transcript;
    int commit_outcome = 0;
    int reply_outcome = 0;
    int b = 0;
    int respond_outcome = 0;
    int a = 0;
};

template <typename Explorer, typename Sink>
class Engine {
   public:
    Engine(Game game, const AliceStrategy &alice, const BobStrategy &bob, const ProtocolParams &params,
           Explorer explorer, Sink sink)
        : game_(game), alice_(alice), bob_(bob), params_(params), explorer_(explorer), sink_(std::move(sink)) {}

    void run() {
        Context ctx;
        const auto &commit = alice_.commit;
        if (!commit.isometry || !commit.isometry->inputs.empty()) {
            throw ProtocolError("round 1: Alice must prepare her registers from scratch");
        }
        ctx.state.apply(*commit.isometry, Party::Alice);
        ctx.state.transfer(kSignRegister, kSignDim, Party::Alice);
        ctx.state.transfer(kQutritRegister, kQutritDim, Party::Bob);
        ctx.transcript.entries.push_back({1, Party::Alice, msg::QutritRegister{kQutritRegister}});
        measure(std::move(ctx), commit.measure, Party::Alice, [this](Context c, int o) {
            c.commit_outcome = o;
            round2(std::move(c));
        });
    }

   private:
    template <typename Next>
    void measure(Context ctx, const std::optional<std::string> &label, Party actor, Next next) {
        if (!label) {
            next(std::move(ctx), 0);
            return;
        }
        auto branches = ctx.state.measure(*label, actor);
        std::vector<double> probs;
        for (const auto &b : branches) {
            probs.push_back(b.probability);
        }
        explorer_.split(probs, [&](int k, double factor) {
            Context c = ctx;
            c.state = ctx.state.with_amplitudes(std::move(branches[static_cast<std::size_t>(k)].amplitudes));
            c.weight *= factor;
            next(std::move(c), k);
        });
    }

    void act(Context &ctx, const LocalAction &action, Party actor) {
        if (action.isometry) {
            ctx.state.apply(*action.isometry, actor);
        }
    }

    static int checked_bit(int v, const char *what) {
        if (v != 0 && v != 1) {
            throw ProtocolError(std::string(what) + " must be a single bit");
        }
        return v;
    }

    void round2(Context ctx) {
        act(ctx, bob_.reply, Party::Bob);
        measure(std::move(ctx), bob_.reply.measure, Party::Bob, [this](Context c, int o) {
            c.reply_outcome = o;
            if (!bob_.choose_b) {
                throw ProtocolError("round 2: Bob has no rule for the bit b");
            }
            c.b = checked_bit(bob_.choose_b(o), "round 2 message b");
            c.transcript.entries.push_back({2, Party::Bob, msg::ClassicalBit{c.b}});
            round3(std::move(c));
        });
    }

    void round3(Context ctx) {
        LocalAction action;
        if (alice_.respond) {
            action = alice_.respond(ctx.commit_outcome, ctx.b);
        }
        act(ctx, action, Party::Alice);
        measure(std::move(ctx), action.measure, Party::Alice, [this](Context c, int o) {
            c.respond_outcome = o;
            if (!alice_.reveal) {
                throw ProtocolError("round 3: Alice has no rule for the revealed bit");
            }
            c.a = checked_bit(alice_.reveal(c.commit_outcome, c.b, o), "round 3 reveal");
            c.transcript.entries.push_back({3, Party::Alice, msg::RevealBit{c.a}});
            if (game_ == Game::Strong) {
                finish_strong(std::move(c));
            } else if ((c.a ^ c.b) == 0) {
                finish_weak_alice_won(std::move(c));
            } else {
                finish_weak_bob_won(std::move(c));
            }
        });
    }

    // The sign qubit goes to Bob, who checks the (S, T) pair against |psi_a>.
    template <typename OnPass, typename OnFail>
    void bob_check(Context ctx, OnPass on_pass, OnFail on_fail) {
        ctx.state.transfer(kSignRegister, kSignDim, Party::Bob);
        ctx.transcript.entries.push_back({3, Party::Alice, msg::SignQubitRegister{kSignRegister}});
        if (!bob_.checks) {
            on_pass(std::move(ctx));
            return;
        }
        run_check(std::move(ctx), Party::Bob, on_pass, on_fail);
    }

    template <typename OnPass, typename OnFail>
    void run_check(Context ctx, Party checker, OnPass &on_pass, OnFail &on_fail) {
        auto branches = ctx.state.project({kSignRegister, kQutritRegister}, check_projector(ctx.a, params_));
        ctx.transcript.checks.push_back({checker, ctx.a, branches[0].probability});
        explorer_.split({branches[0].probability, branches[1].probability}, [&](int k, double factor) {
            Context c = ctx;
            c.state = ctx.state.with_amplitudes(std::move(branches[static_cast<std::size_t>(k)].amplitudes));
            c.weight *= factor;
            if (k == 0) {
                on_pass(std::move(c));
            } else {
                on_fail(std::move(c));
            }
        });
    }

    void finish_weak_alice_won(Context ctx) {
        bob_check(
            std::move(ctx), [this](Context c) { emit(c, Outcome::AliceWins); },
            [this](Context c) { emit(c, Outcome::AbortByBob); });
    }

    void finish_weak_bob_won(Context ctx) {
        if (bob_.before_return) {
            act(ctx, bob_.before_return(ctx.reply_outcome, ctx.b, ctx.a), Party::Bob);
        }
        ctx.state.transfer(kQutritRegister, kQutritDim, Party::Alice);
        ctx.transcript.entries.push_back({4, Party::Bob, msg::QutritReturn{kQutritRegister}});
        auto pass = [this](Context c) { emit(c, Outcome::BobWins); };
        auto fail = [this](Context c) { emit(c, Outcome::AbortByAlice); };
        if (!alice_.checks) {
            pass(std::move(ctx));
            return;
        }
        run_check(std::move(ctx), Party::Alice, pass, fail);
    }

    void finish_strong(Context ctx) {
        bob_check(
            std::move(ctx),
            [this](Context c) { emit(c, (c.a ^ c.b) == 0 ? Outcome::CoinZero : Outcome::CoinOne); },
            [this](Context c) { emit(c, Outcome::AbortByBob); });
    }

    void emit(const Context &c, Outcome o) { sink_(c, o); }

    Game game_;
    const AliceStrategy &alice_;
    const BobStrategy &bob_;
    ProtocolParams params_;
    Explorer explorer_;
    Sink sink_;
};

inline ProtocolOutcome describe(Outcome o, double p) {
    switch (o) {
        case Outcome::AliceWins:
            return {o, 0, 0, p};
        case Outcome::BobWins:
            return {o, 1, 1, p};
        case Outcome::AbortByBob:
            // Weak game: c = 0, so Alice holds c_A = 0. Strong game: Alice's
            // coin differs across merged branches.
            return {o, std::nullopt, std::nullopt, p};
        case Outcome::AbortByAlice:
            return {o, std::nullopt, 1, p};
        case Outcome::CoinZero:
            return {o, 0, 0, p};
        case Outcome::CoinOne:
            return {o, 1, 1, p};
    }
    return {o, std::nullopt, std::nullopt, p};
}

inline ExactResult run_exact(Game game, const AliceStrategy &alice, const BobStrategy &bob,
                             const ProtocolParams &params) {
    ExactResult result{game, {}, {}, {}};
    auto sink = [&result](const Context &c, Outcome o) {
        result.distribution[o] += c.weight;
        result.branches.push_back({c.weight, o, c.a, c.b, c.transcript});
    };
    Engine<ExactExplorer, decltype(sink)> engine(game, alice, bob, params, ExactExplorer{}, sink);
    engine.run();
    for (Outcome o : outcomes_of(game)) {
        auto d = describe(o, result.distribution[o]);
        if (game == Game::Weak && o == Outcome::AbortByBob) {
            d.c_a = 0;
        }
        result.outcomes.push_back(d);
    }
    return result;
}

}  // namespace detail

inline ExactResult run_weak_exact(const AliceStrategy &alice, const BobStrategy &bob, const ProtocolParams &params) {
    return detail::run_exact(Game::Weak, alice, bob, params);
}

/// `target` only matters for adversary construction; it is accepted here so
/// call sites can record it, and is otherwise unused.
inline ExactResult run_strong_exact(const AliceStrategy &alice, const BobStrategy &bob, const ProtocolParams &params,
                                    std::optional<int> target = std::nullopt) {
    (void)target;
    return detail::run_exact(Game::Strong, alice, bob, params);
}

inline ExactResult run_exact(Game game, const AliceStrategy &alice, const BobStrategy &bob,
                             const ProtocolParams &params) {
    return detail::run_exact(game, alice, bob, params);
}

inline SampledResult run_sampled(Game game, const AliceStrategy &alice, const BobStrategy &bob,
                                 const ProtocolParams &params, std::uint64_t n_trials, std::uint64_t seed) {
    if (n_trials < 1) {
        throw std::invalid_argument("n_trials must be at least 1");
    }
    SampledResult result{game, n_trials, {}};
    SplitMix64 rng(seed);
    auto sink = [&result](const detail::Context &, Outcome o) { ++result.counts[static_cast<std::size_t>(o)]; };
    for (std::uint64_t t = 0; t < n_trials; ++t) {
        detail::Engine<detail::SampledExplorer, decltype(sink)> engine(game, alice, bob, params,
                                                                       detail::SampledExplorer{&rng}, sink);
        engine.run();
    }
    return result;
}

}  // namespace qcoin
