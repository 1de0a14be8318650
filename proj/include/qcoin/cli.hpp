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


// Command-line front end. `run_cli` takes argv-style arguments and writes the
// report to `out` (or to --out), diagnostics to `err`, and returns the exit
// code: 0 success / all checks pass, 1 verification failure, 2 usage error.

#pragma once

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcoin/bounds.hpp"
#include "qcoin/protocol.hpp"
#include "qcoin/states.hpp"
#include "qcoin/strategies.hpp"
#include "qcoin/verify.hpp"

namespace qcoin::cli {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Rounds to 12 significant digits, the precision of every report.
inline double round12(double v) {
    if (!std::isfinite(v)) {
        return v;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// --- chart strategy strings: base64 of little-endian IEEE-754 doubles ---

inline constexpr char kBase64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(const std::vector<std::uint8_t> &bytes) {
    std::string out;
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kBase64Alphabet[(n >> 18) & 63];
        out += kBase64Alphabet[(n >> 12) & 63];
        out += kBase64Alphabet[(n >> 6) & 63];
        out += kBase64Alphabet[n & 63];
    }
    const std::size_t rest = bytes.size() - i;
    if (rest > 0) {
        std::uint32_t n = bytes[i] << 16;
        if (rest == 2) {
            n |= bytes[i + 1] << 8;
        }
        out += kBase64Alphabet[(n >> 18) & 63];
        out += kBase64Alphabet[(n >> 12) & 63];
        out += rest == 2 ? kBase64Alphabet[(n >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

inline std::vector<std::uint8_t> base64_decode(const std::string &text) {
    if (text.size() % 4 != 0) {
        throw UsageError("chart parameters: base64 length must be a multiple of 4");
    }
    auto value = [](char c) -> int {
        const char *p = std::strchr(kBase64Alphabet, c);
        return (c != '\0' && p) ? static_cast<int>(p - kBase64Alphabet) : -1;
    };
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int v[4];
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = text[i + static_cast<std::size_t>(k)];
            if (c == '=' && i + 4 == text.size() && k >= 2) {
                v[k] = 0;
                ++pad;
                continue;
            }
            if (pad > 0 || (v[k] = value(c)) < 0) {
                throw UsageError("chart parameters: invalid base64");
            }
        }
        const std::uint32_t n = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
        out.push_back(static_cast<std::uint8_t>(n >> 16));
        if (pad < 2) {
            out.push_back(static_cast<std::uint8_t>(n >> 8));
        }
        if (pad < 1) {
            out.push_back(static_cast<std::uint8_t>(n));
        }
    }
    return out;
}

inline std::string encode_chart(const std::vector<double> &params) {
    std::vector<std::uint8_t> bytes;
    for (double d : params) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, sizeof bits);
        for (int k = 0; k < 8; ++k) {
            bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
        }
    }
    return "chart:" + base64_encode(bytes);
}

inline std::vector<double> decode_chart(const std::string &payload) {
    auto bytes = base64_decode(payload);
    if (bytes.size() % 8 != 0) {
        throw UsageError("chart parameters: byte count is not a multiple of 8");
    }
    std::vector<double> params;
    for (std::size_t i = 0; i < bytes.size(); i += 8) {
        std::uint64_t bits = 0;
        for (int k = 0; k < 8; ++k) {
            bits |= static_cast<std::uint64_t>(bytes[i + static_cast<std::size_t>(k)]) << (8 * k);
        }
        double d;
        std::memcpy(&d, &bits, sizeof d);
        params.push_back(d);
    }
    return params;
}

// --- argument parsing helpers ---

inline Game parse_game(const std::string &s) {
    if (s == "weak") {
        return Game::Weak;
    }
    if (s == "strong") {
        return Game::Strong;
    }
    throw UsageError("unknown game '" + s + "' (expected weak or strong)");
}

inline double parse_radians(const std::string &s) {
    char *end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno != 0 || !std::isfinite(v)) {
        throw UsageError("malformed angle '" + s + "' (radians, or 'optimal')");
    }
    return v;
}

/// Decimal radians, or "optimal" for the game's equalizing alpha.
inline double resolve_alpha(const std::string &s, Game game) {
    double v;
    if (s == "optimal") {
        v = game == Game::Weak ? solve_weak_equalization().alpha_star : solve_strong_equalization().alpha_star;
    } else {
        v = parse_radians(s);
    }
    if (!(v >= 0 && v <= std::numbers::pi)) {
        throw UsageError("alpha must lie in [0, pi]");
    }
    return v;
}

inline std::vector<double> parse_grid(const std::string &spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        parts.push_back(item);
    }
    if (parts.size() != 3) {
        throw UsageError("grid must be start:stop:points");
    }
    auto endpoint = [](const std::string &s) { return s == "pi" ? std::numbers::pi : parse_radians(s); };
    const double start = endpoint(parts[0]);
    const double stop = endpoint(parts[1]);
    char *end = nullptr;
    const long n = std::strtol(parts[2].c_str(), &end, 10);
    if (parts[2].empty() || end != parts[2].c_str() + parts[2].size() || n < 2) {
        throw UsageError("grid needs an integer point count of at least 2");
    }
    for (double x : {start, stop}) {
        if (!(x >= 0 && x <= std::numbers::pi)) {
            throw UsageError("grid endpoints must lie in [0, pi]");
        }
    }
    return linspace(start, stop, static_cast<std::size_t>(n));
}

inline AliceStrategy alice_by_name(const std::string &name, const ProtocolParams &params) {
    if (name == "honest") {
        return honest_alice(params);
    }
    if (name == "alice-opt") {
        return cheating_alice_optimal(params);
    }
    if (name.rfind("chart:", 0) == 0) {
        try {
            return decode_alice_commit(decode_chart(name.substr(6)));
        } catch (const DecodeError &e) {
            throw UsageError(e.what());
        }
    }
    throw UsageError("unknown Alice strategy '" + name + "'");
}

inline BobStrategy bob_by_name(const std::string &name, Game game, const ProtocolParams &params) {
    if (name == "honest") {
        return honest_bob(params);
    }
    if (name == "bob-opt-weak") {
        return cheating_bob_weak_optimal(params);
    }
    if (name == "bob-opt-weak-literal") {
        return cheating_bob_weak_literal(params);
    }
    if (name == "bob-helstrom-0" || name == "bob-helstrom-1") {
        return cheating_bob_strong_helstrom(params, name.back() - '0');
    }
    if (name.rfind("chart:", 0) == 0) {
        try {
            return decode_bob_for(game, AdversaryKind::BobExtract, decode_chart(name.substr(6)));
        } catch (const DecodeError &e) {
            throw UsageError(e.what());
        }
    }
    throw UsageError("unknown Bob strategy '" + name + "'");
}

enum class Format { Json, Csv, Text };

inline Format parse_format(const std::string &s) {
    if (s == "json") {
        return Format::Json;
    }
    if (s == "csv") {
        return Format::Csv;
    }
    if (s == "text") {
        return Format::Text;
    }
    throw UsageError("unknown format '" + s + "'");
}

inline std::string dump(const Json &j) { return j.dump(2) + "\n"; }

// --- commands ---

struct RunSpec {
    std::string game = "weak";
    std::string alpha = "optimal";
    std::string alice = "honest";
    std::string bob = "honest";
    std::string mode = "exact";
    std::int64_t trials = 100000;
    std::uint64_t seed = 1;
    std::string format = "json";
};

inline Json optional_bit(const std::optional<int> &v) { return v ? Json(*v) : Json(nullptr); }

inline std::string cmd_simulate(const RunSpec &spec) {
    const Game game = parse_game(spec.game);
    const double alpha = resolve_alpha(spec.alpha, game);
    const ProtocolParams params(alpha);
    const Format format = parse_format(spec.format);
    const auto alice = alice_by_name(spec.alice, params);
    const auto bob = bob_by_name(spec.bob, game, params);

    Json j;
    j["command"] = "simulate";
    j["game"] = to_string(game);
    j["alpha"] = round12(alpha);
    j["alice"] = spec.alice;
    j["bob"] = spec.bob;
    j["mode"] = spec.mode;
    Json rows = Json::array();
    if (spec.mode == "exact") {
        auto r = run_exact(game, alice, bob, params);
        for (const auto &o : r.outcomes) {
            Json row;
            row["kind"] = to_string(o.kind);
            row["c_A"] = optional_bit(o.c_a);
            row["c_B"] = optional_bit(o.c_b);
            row["probability"] = round12(o.probability);
            rows.push_back(row);
        }
    } else if (spec.mode == "sampled") {
        if (spec.trials < 1) {
            throw UsageError("--trials must be at least 1 in sampled mode");
        }
        auto r = run_sampled(game, alice, bob, params, static_cast<std::uint64_t>(spec.trials), spec.seed);
        j["trials"] = spec.trials;
        j["seed"] = spec.seed;
        for (Outcome o : outcomes_of(game)) {
            Json row;
            row["kind"] = to_string(o);
            row["count"] = r.count(o);
            row["frequency"] = round12(r.frequency(o));
            rows.push_back(row);
        }
    } else {
        throw UsageError("unknown mode '" + spec.mode + "' (expected exact or sampled)");
    }
    j["outcomes"] = rows;

    if (format == Format::Json) {
        return dump(j);
    }
    std::ostringstream os;
    const bool exact = spec.mode == "exact";
    if (format == Format::Csv) {
        os << (exact ? "outcome,probability\n" : "outcome,count,frequency\n");
        for (const auto &row : rows) {
            os << row["kind"].get<std::string>() << ',';
            if (exact) {
                os << fmt12(row["probability"].get<double>()) << '\n';
            } else {
                os << row["count"].get<std::uint64_t>() << ',' << fmt12(row["frequency"].get<double>()) << '\n';
            }
        }
    } else {
        os << to_string(game) << " game, alpha = " << fmt12(alpha) << ", alice = " << spec.alice
           << ", bob = " << spec.bob << ", " << spec.mode << '\n';
        for (const auto &row : rows) {
            os << "  " << row["kind"].get<std::string>() << ' ';
            if (exact) {
                os << fmt12(row["probability"].get<double>()) << '\n';
            } else {
                os << row["count"].get<std::uint64_t>() << " (" << fmt12(row["frequency"].get<double>()) << ")\n";
            }
        }
    }
    return os.str();
}

inline Json bound_report_json(const BoundReport &r) {
    Json j;
    j["alpha"] = round12(r.alpha);
    j["alice_weak"] = round12(r.alice_weak);
    j["bob_weak"] = round12(r.bob_weak);
    j["alice_strong"] = round12(r.alice_strong);
    j["bob_strong"] = round12(r.bob_strong);
    j["fidelity_rho"] = round12(r.fidelity_rho);
    j["trace_dist_rho"] = round12(r.trace_dist_rho);
    j["weak_bias"] = round12(r.weak_bias);
    j["strong_bias"] = round12(r.strong_bias);
    return j;
}

inline std::string cmd_bounds(const std::string &alpha_spec, const std::string &game_name, const std::string &fmt) {
    const Game game = parse_game(game_name);
    const double alpha = resolve_alpha(alpha_spec, game);
    const Format format = parse_format(fmt);
    Json body = bound_report_json(bound_report(alpha));
    if (format == Format::Json) {
        Json j;
        j["command"] = "bounds";
        j["game"] = to_string(game);
        for (auto &[k, v] : body.items()) {
            j[k] = v;
        }
        return dump(j);
    }
    std::ostringstream os;
    if (format == Format::Csv) {
        bool first = true;
        for (auto &[k, v] : body.items()) {
            os << (first ? "" : ",") << k;
            first = false;
        }
        os << '\n';
        first = true;
        for (auto &[k, v] : body.items()) {
            os << (first ? "" : ",") << fmt12(v.get<double>());
            first = false;
        }
        os << '\n';
    } else {
        for (auto &[k, v] : body.items()) {
            os << k << ' ' << fmt12(v.get<double>()) << '\n';
        }
    }
    return os.str();
}

inline const std::vector<std::string> &sweep_columns() {
    static const std::vector<std::string> cols = {"alpha",
                                                  "alice_weak_bound",
                                                  "bob_weak_bound",
                                                  "alice_weak_achieved",
                                                  "bob_weak_achieved",
                                                  "alice_strong_bound",
                                                  "bob_strong_bound",
                                                  "fidelity",
                                                  "trace_distance"};
    return cols;
}

inline std::vector<double> sweep_values(const SweepRow &r) {
    return {r.alpha,
            r.alice_weak_bound,
            r.bob_weak_bound,
            r.entry("alice-opt/weak").value,
            r.entry("bob-opt-weak/weak").value,
            r.alice_strong_bound,
            r.bob_strong_bound,
            r.fidelity,
            r.trace_distance};
}

inline std::string cmd_sweep(const std::string &grid, const std::string &fmt) {
    const auto alphas = parse_grid(grid);
    const Format format = parse_format(fmt);
    const auto entries = default_sweep_entries();
    std::vector<SweepEntry> weak(entries.begin(), entries.begin() + 2);
    const auto rows = sweep(alphas, weak);
    const auto &cols = sweep_columns();
    std::ostringstream os;
    if (format == Format::Json) {
        Json arr = Json::array();
        for (const auto &r : rows) {
            Json row;
            auto vals = sweep_values(r);
            for (std::size_t i = 0; i < cols.size(); ++i) {
                row[cols[i]] = round12(vals[i]);
            }
            arr.push_back(row);
        }
        Json j;
        j["command"] = "sweep";
        j["rows"] = arr;
        return dump(j);
    }
    const char *sep = format == Format::Csv ? "," : " ";
    for (std::size_t i = 0; i < cols.size(); ++i) {
        os << (i ? sep : "") << cols[i];
    }
    os << '\n';
    for (const auto &r : rows) {
        auto vals = sweep_values(r);
        for (std::size_t i = 0; i < vals.size(); ++i) {
            os << (i ? sep : "") << fmt12(vals[i]);
        }
        os << '\n';
    }
    return os.str();
}

/// Positive root in [0, 1] of (1 - (1 - 1/sqrt2) t)^2 = (1 + t)/2, t = cos^2(alpha/2).
inline double weak_equalization_closed_form_t() {
    const double k = 1 - 1 / std::sqrt(2.0);
    const double b = 2 * k + 0.5;
    return (b - std::sqrt(b * b - 2 * k * k)) / (2 * k * k);
}

inline std::string cmd_optimize(const std::string &fmt) {
    const Format format = parse_format(fmt);
    const auto weak = solve_weak_equalization();
    const auto strong = solve_strong_equalization();
    Json j;
    j["command"] = "optimize";
    Json w;
    w["alpha_star"] = round12(weak.alpha_star);
    w["p_star"] = round12(weak.p_star);
    w["bias"] = round12(weak.bias());
    w["cos2_half_alpha_star"] = round12(std::pow(std::cos(weak.alpha_star / 2), 2));
    Json s;
    s["alpha_star"] = round12(strong.alpha_star);
    s["p_star"] = round12(strong.p_star);
    s["bias"] = round12(strong.bias());
    j["weak"] = w;
    j["strong"] = s;
    if (format == Format::Json) {
        return dump(j);
    }
    std::ostringstream os;
    if (format == Format::Csv) {
        os << "game,alpha_star,p_star,bias\n";
        os << "weak," << fmt12(weak.alpha_star) << ',' << fmt12(weak.p_star) << ',' << fmt12(weak.bias()) << '\n';
        os << "strong," << fmt12(strong.alpha_star) << ',' << fmt12(strong.p_star) << ',' << fmt12(strong.bias())
           << '\n';
    } else {
        os << "weak:   alpha* = " << fmt12(weak.alpha_star) << "  p* = " << fmt12(weak.p_star)
           << "  bias = " << fmt12(weak.bias()) << '\n';
        os << "strong: alpha* = " << fmt12(strong.alpha_star) << "  p* = " << fmt12(strong.p_star)
           << "  bias = " << fmt12(strong.bias()) << '\n';
    }
    return os.str();
}

// --- verification suites ---

enum class Relation { Equal, AtLeast, AtMost, Above };

struct Check {
    std::string name;
    double expected;
    double got;
    double tolerance;
    Relation relation = Relation::Equal;

    bool pass() const {
        switch (relation) {
            case Relation::Equal:
                return std::abs(got - expected) <= tolerance;
            case Relation::AtLeast:
                return got >= expected - tolerance;
            case Relation::AtMost:
                return got <= expected + tolerance;
            case Relation::Above:
                return got > expected;
        }
        return false;
    }
};

inline const char *to_string(Relation r) {
    switch (r) {
        case Relation::Equal:
            return "eq";
        case Relation::AtLeast:
            return "ge";
        case Relation::AtMost:
            return "le";
        case Relation::Above:
            return "gt";
    }
    return "?";
}

inline std::vector<Check> suite_bounds() {
    std::vector<Check> out;
    const auto grid = linspace(0, std::numbers::pi, 1001);
    double kit_min = 1;
    double fid_err = 0;
    double tr_err = 0;
    double mono_alice = 0;  // largest increase of an Alice bound between grid points
    double mono_bob = 0;    // largest decrease of a Bob bound
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = grid[i];
        kit_min = std::min(kit_min, kitaev_product(a));
        const auto r = bound_report(a);
        fid_err = std::max(fid_err, std::abs(r.alice_weak - 0.5 * (1 + std::sqrt(r.fidelity_rho))));
        tr_err = std::max(tr_err, std::abs(r.bob_strong - (0.5 + r.trace_dist_rho / 4)));
        if (i > 0) {
            const double p = grid[i - 1];
            mono_alice = std::max({mono_alice, alice_weak_bound(a) - alice_weak_bound(p),
                                   alice_strong_bound(a) - alice_strong_bound(p)});
            mono_bob = std::max({mono_bob, bob_weak_bound(p) - bob_weak_bound(a),
                                 bob_strong_bound(p) - bob_strong_bound(a)});
        }
    }
    out.push_back({"kitaev_product_min_over_grid", 0.5, kit_min, 1e-12, Relation::AtLeast});
    out.push_back({"alice_bound_equals_half_one_plus_sqrt_fidelity", 0, fid_err, 1e-12, Relation::AtMost});
    out.push_back({"bob_strong_bound_equals_half_plus_trace_norm_over_4", 0, tr_err, 1e-12, Relation::AtMost});
    out.push_back({"alice_bounds_non_increasing", 0, mono_alice, 0, Relation::AtMost});
    out.push_back({"bob_bounds_non_decreasing", 0, mono_bob, 0, Relation::AtMost});
    const auto weak = solve_weak_equalization();
    out.push_back({"weak_equalization_p_star", 0.739, weak.p_star, 5e-4});
    out.push_back({"weak_equalization_bias", 0.239, weak.bias(), 5e-4});
    out.push_back({"weak_equalization_matches_closed_form", 0.5 * (1 + weak_equalization_closed_form_t()), weak.p_star,
                   1e-9});
    const auto strong = solve_strong_equalization();
    out.push_back({"strong_equalization_alpha", std::numbers::pi / 2, strong.alpha_star, 1e-9});
    out.push_back({"strong_bias", 0.25, strong.bias(), 1e-9});
    return out;
}

inline std::vector<Check> suite_tightness() {
    std::vector<Check> out;
    const auto grid = linspace(0, std::numbers::pi, 21);
    const auto rows = sweep(grid);
    for (const auto &name : {"alice-opt/weak", "bob-opt-weak/weak", "alice-opt/strong", "bob-helstrom-1/strong"}) {
        double worst = 0;
        for (const auto &r : rows) {
            worst = std::max(worst, std::abs(r.entry(name).gap));
        }
        out.push_back({std::string("max_abs_gap ") + name, 0, worst, 1e-9, Relation::AtMost});
    }
    double literal_margin = 1;  // smallest bound - literal over interior grid points
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        ProtocolParams p(grid[i]);
        const double v = achieved_probability(Game::Weak, honest_alice(p), cheating_bob_weak_literal(p), p,
                                              Outcome::BobWins);
        literal_margin = std::min(literal_margin, bob_weak_bound(grid[i]) - v);
    }
    out.push_back({"literal_bob_strictly_below_bound_margin", 0, literal_margin, 0, Relation::Above});
    return out;
}

inline std::vector<Check> suite_fidelity(std::uint64_t seed) {
    std::vector<Check> out;
    SearchConfig config;
    config.seed = seed;
    const double pi = std::numbers::pi;
    for (double a : {pi / 6, pi / 3, pi / 2, 2 * pi / 3, 5 * pi / 6}) {
        ProtocolParams p(a);
        const auto r = max_avg_fidelity(p, config);
        const double target = 0.5 * (1 + std::sqrt(fidelity(rho_honest(0, p), rho_honest(1, p))));
        out.push_back({"max_avg_fidelity alpha=" + fmt12(a), target, r.value, 1e-4});
        out.push_back({"max_avg_fidelity_never_exceeds alpha=" + fmt12(a), target, r.max_evaluated, 1e-6,
                       Relation::AtMost});
    }
    return out;
}

inline Json checks_json(const std::vector<Check> &checks) {
    Json arr = Json::array();
    for (const auto &c : checks) {
        Json j;
        j["name"] = c.name;
        j["relation"] = to_string(c.relation);
        j["expected"] = round12(c.expected);
        j["got"] = round12(c.got);
        j["tolerance"] = c.tolerance;
        j["pass"] = c.pass();
        arr.push_back(j);
    }
    return arr;
}

inline std::string cmd_verify(const std::string &suite, std::uint64_t seed, const std::string &fmt, bool &all_pass) {
    const Format format = parse_format(fmt);
    std::vector<Check> checks;
    auto add = [&](std::vector<Check> more) { checks.insert(checks.end(), more.begin(), more.end()); };
    if (suite == "bounds" || suite == "all") {
        add(suite_bounds());
    }
    if (suite == "tightness" || suite == "all") {
        add(suite_tightness());
    }
    if (suite == "fidelity" || suite == "all") {
        add(suite_fidelity(seed));
    }
    if (checks.empty()) {
        throw UsageError("unknown suite '" + suite + "' (expected bounds, tightness, fidelity or all)");
    }
    all_pass = true;
    for (const auto &c : checks) {
        all_pass = all_pass && c.pass();
    }
    if (format == Format::Json) {
        Json j;
        j["command"] = "verify";
        j["suite"] = suite;
        j["seed"] = seed;
        j["checks"] = checks_json(checks);
        j["all_pass"] = all_pass;
        return dump(j);
    }
    std::ostringstream os;
    if (format == Format::Csv) {
        os << "name,relation,expected,got,tolerance,pass\n";
        for (const auto &c : checks) {
            os << c.name << ',' << to_string(c.relation) << ',' << fmt12(c.expected) << ',' << fmt12(c.got) << ','
               << fmt12(c.tolerance) << ',' << (c.pass() ? "true" : "false") << '\n';
        }
    } else {
        for (const auto &c : checks) {
            os << (c.pass() ? "PASS " : "FAIL ") << c.name << "  got " << fmt12(c.got) << ' ' << to_string(c.relation)
               << ' ' << fmt12(c.expected) << " (tol " << fmt12(c.tolerance) << ")\n";
        }
        os << (all_pass ? "all checks passed\n" : "verification FAILED\n");
    }
    return os.str();
}

// --- dispatch ---

inline int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Quantum coin-flipping simulator and verification toolkit", "qcoin"};
    app.require_subcommand(1);

    RunSpec spec;
    std::string game_flag;
    std::string alice_flag;
    std::string bob_flag;
    std::vector<std::string> positional;
    std::string out_path;
    std::string grid = "0:pi:11";
    std::string suite = "all";
    std::string alpha_bounds = "optimal";
    std::string game_bounds = "weak";
    std::string format;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--format", format, "json, csv or text");
        sub->add_option("--out", out_path, "write the report to this file");
    };

    auto *sim = app.add_subcommand("simulate", "run a game between two strategies");
    sim->add_option("positional", positional, "game alice bob")->expected(0, 3);
    sim->add_option("--game", game_flag, "weak or strong");
    sim->add_option("--alice", alice_flag, "Alice's strategy");
    sim->add_option("--bob", bob_flag, "Bob's strategy");
    sim->add_option("--alpha", spec.alpha, "radians or 'optimal'");
    sim->add_option("--mode", spec.mode, "exact or sampled");
    sim->add_option("--trials", spec.trials, "sampled-mode trials");
    sim->add_option("--seed", spec.seed, "sampled-mode seed");
    add_common(sim);

    auto *bnd = app.add_subcommand("bounds", "closed-form bounds at one alpha");
    bnd->add_option("--alpha", alpha_bounds, "radians or 'optimal'");
    bnd->add_option("--game", game_bounds, "game used to resolve 'optimal'");
    add_common(bnd);

    auto *swp = app.add_subcommand("sweep", "bounds and achieved values over an alpha grid");
    swp->add_option("--grid", grid, "start:stop:points (endpoints may be 'pi')");
    add_common(swp);

    auto *opt = app.add_subcommand("optimize", "bias-minimizing alpha for both games");
    add_common(opt);

    auto *ver = app.add_subcommand("verify", "run verification suites");
    ver->add_option("--suite", suite, "bounds, tightness, fidelity or all");
    ver->add_option("--seed", spec.seed, "search seed");
    add_common(ver);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        std::ostringstream o;
        std::ostringstream e2;
        const int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? 0 : 2;
    }

    int code = 0;
    std::string report;
    try {
        if (*sim) {
            if (positional.size() >= 1) {
                spec.game = positional[0];
            }
            if (positional.size() >= 2) {
                spec.alice = positional[1];
            }
            if (positional.size() >= 3) {
                spec.bob = positional[2];
            }
            if (!game_flag.empty()) {
                spec.game = game_flag;
            }
            if (!alice_flag.empty()) {
                spec.alice = alice_flag;
            }
            if (!bob_flag.empty()) {
                spec.bob = bob_flag;
            }
            spec.format = format.empty() ? "json" : format;
            report = cmd_simulate(spec);
        } else if (*bnd) {
            report = cmd_bounds(alpha_bounds, game_bounds, format.empty() ? "json" : format);
        } else if (*swp) {
            report = cmd_sweep(grid, format.empty() ? "csv" : format);
        } else if (*opt) {
            report = cmd_optimize(format.empty() ? "json" : format);
        } else if (*ver) {
            bool all_pass = false;
            report = cmd_verify(suite, spec.seed, format.empty() ? "json" : format, all_pass);
            code = all_pass ? 0 : 1;
        }
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            err << "error: cannot write " << out_path << '\n';
            return 2;
        }
        f << report;
    } else {
        out << report;
    }
    return code;
}

}  // namespace qcoin::cli
