#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "qamem/retrieval.hpp"
#include "reference.hpp"

using namespace qamem;

namespace {

/// Uniform state over all 2^n register values with flag 1 exactly on `ones`.
PureState flags_state(int n, const std::set<Index>& ones) {
    std::vector<std::pair<Index, int>> sup;
    for (Index y = 0; y < pow2(n); ++y) sup.emplace_back(y, ones.count(y) ? 1 : 0);
    return from_support(n, sup);
}

std::set<Index> range_set(Index lo, Index hi) {
    std::set<Index> s;
    for (Index y = lo; y <= hi; ++y) s.insert(y);
    return s;
}

/// Transcript entries are rendered from the state; rebuilding the same text
/// from an expected state compares supports and flags exactly.
void expect_stage(const RetrievalOutcome& o, std::size_t idx, const std::string& label, const PureState& expected) {
    ASSERT_LT(idx, o.transcript.size());
    EXPECT_EQ(o.transcript[idx].label, label);
    EXPECT_EQ(o.transcript[idx].support, format_support(expected));
}

/// Replays the sweeps on the library state and checks amplitudes against the
/// expected flag tables within 1e-12, global phase ignored.
void expect_replay(const RetrievalConfig& cfg, const std::vector<int>& schedule,
                   const std::vector<std::set<Index>>& expected_ones) {
    const KnownQubits known(cfg.n, cfg.known_qubits);
    PureState s = known.t() ? restricted_oracle_apply(uniform_state(cfg.n), cfg.marked, known)
                            : oracle_apply(uniform_state(cfg.n), cfg.marked);
    ASSERT_LT(distance_up_to_phase(s, flags_state(cfg.n, expected_ones[0])), 1e-12);
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        s = nle_step_casewise(s, schedule[i]);
        EXPECT_LT(distance_up_to_phase(s, flags_state(cfg.n, expected_ones[i + 1])), 1e-12) << "after sweep " << i + 1;
    }
}

}  // namespace

TEST(ComplexityParams, WorkedExampleTriples) {
    const auto a = complexity_params(4, 16, 0, 1);
    EXPECT_EQ(a.c, 4);
    EXPECT_EQ(a.r, 0);
    EXPECT_EQ(a.sweeps, 4);
    EXPECT_EQ(a.start_qubit, 1);
    EXPECT_EQ(a.b, 4);
    const auto b = complexity_params(4, 16, 0, 7);
    EXPECT_EQ(b.c, 4);
    EXPECT_EQ(b.r, 2);
    EXPECT_EQ(b.sweeps, 2);
    EXPECT_EQ(b.start_qubit, 3);
    const auto c = complexity_params(4, 16, 1, 1, 8);
    EXPECT_EQ(c.q, 8u);
    EXPECT_EQ(c.c, 3);
    EXPECT_EQ(c.sweeps, 3);
    EXPECT_EQ(complexity_params(4, 16, 1, 1), c);
}

TEST(ComplexityParams, Definitions) {
    for (Index p = 1; p <= 64; ++p) {
        for (Index m = 0; m <= p; ++m) {
            const auto cp = complexity_params(6, p, 0, m);
            EXPECT_EQ(pow2(cp.c) >= p && (cp.c == 0 || pow2(cp.c - 1) < p), true);
            if (m > 1) EXPECT_TRUE(pow2(cp.r) <= m && m < pow2(cp.r + 1));
            else EXPECT_EQ(cp.r, 0);
            EXPECT_EQ(cp.sweeps, cp.c - cp.r);
            EXPECT_GE(cp.sweeps, 0);
            EXPECT_LE(cp.start_qubit + cp.sweeps - 1, 6);
        }
    }
    EXPECT_EQ(complexity_params(5, 20, 2, 3).q, 8u);
    EXPECT_EQ(complexity_params(5, 6, 2, 3).q, 6u);
}

TEST(ComplexityParams, Errors) {
    EXPECT_THROW(complexity_params(4, 0, 0, 0), ValidationError);
    EXPECT_THROW(complexity_params(4, 17, 0, 1), ValidationError);
    EXPECT_THROW(complexity_params(4, 8, 0, 9), ValidationError);
    EXPECT_THROW(complexity_params(4, 16, 5, 1), ValidationError);
    EXPECT_THROW(complexity_params(4, 16, 1, 1, 17), ValidationError);
    EXPECT_THROW(complexity_params(4, 16, 2, 5), ValidationError);
}

TEST(ResidueCoverage, Examples) {
    EXPECT_TRUE(residue_coverage(MarkedSet(4, {2, 5, 8, 10, 11, 13, 15}), 2));
    EXPECT_FALSE(residue_coverage(MarkedSet(4, {0, 4}), 1));
    EXPECT_TRUE(residue_coverage(MarkedSet(4, {}), 0));
    EXPECT_TRUE(residue_coverage(MarkedSet(4, {7}), 0));
    EXPECT_FALSE(residue_coverage(MarkedSet(4, {0, 1, 2}), 2));
}

TEST(ResidueCoverage, MatchesBruteForce) {
    for (Index mask = 0; mask < 256; ++mask) {
        std::vector<Index> vals;
        for (Index y = 0; y < 8; ++y) {
            if ((mask >> y) & 1U) vals.push_back(y);
        }
        for (int r = 0; r <= 3; ++r) {
            bool all = true;  // mod 1 imposes nothing, even on an empty set
            for (Index res = 0; res < pow2(r); ++res) {
                bool hit = false;
                for (Index v : vals) hit = hit || v % pow2(r) == res;
                if (r == 0) hit = true;
                all = all && hit;
            }
            EXPECT_EQ(residue_coverage(vals, r), all);
        }
    }
}

TEST(Example1, TranscriptMatchesDisplays) {
    const auto cfg = example_config(1);
    const auto o = run_retrieval(cfg);
    const std::vector<std::set<Index>> ones = {{2}, {2, 3}, range_set(0, 3), range_set(0, 7), range_set(0, 15)};
    expect_stage(o, 0, "storage", uniform_state(4));
    expect_stage(o, 1, "oracle", flags_state(4, ones[0]));
    for (int i = 1; i <= 4; ++i) {
        expect_stage(o, static_cast<std::size_t>(i + 1), "sweep " + std::to_string(i) + " (qubit " + std::to_string(i) + ")",
                     flags_state(4, ones[static_cast<std::size_t>(i)]));
    }
    expect_replay(cfg, {1, 2, 3, 4}, ones);
    EXPECT_EQ(o.flag_bit, 1);
    EXPECT_TRUE(o.flag_exact);
    EXPECT_EQ(o.sweep_count_used, 4);
    EXPECT_EQ(o.disentangled_after, 4);
    ASSERT_TRUE(o.register_value);
    EXPECT_EQ(*o.register_value, 2u);
    EXPECT_NEAR(o.register_probability, 1.0, 1e-12);
}

TEST(Example2, KnownQubitThreeSweeps) {
    const auto cfg = example_config(2);
    const auto o = run_retrieval(cfg);
    EXPECT_EQ(o.params.t, 1);
    EXPECT_EQ(o.params.q, 8u);
    EXPECT_EQ(o.params.c, 3);
    EXPECT_EQ(o.sweep_count_used, 3);
    EXPECT_EQ(o.schedule, (std::vector<int>{1, 2, 3}));
    const std::vector<std::set<Index>> ones = {
        {2, 10}, {2, 3, 10, 11}, {0, 1, 2, 3, 8, 9, 10, 11}, range_set(0, 15)};
    expect_replay(cfg, {1, 2, 3}, ones);
    EXPECT_EQ(o.flag_bit, 1);
    EXPECT_EQ(o.disentangled_after, 3);
    // Post-CS register: (|0010> + |1010>)/sqrt2 on the flag-1 branch.
    ASSERT_TRUE(o.final_state);
    const auto x = TargetState::uniform_over(4, {2, 10});
    EXPECT_LT(distance_up_to_phase(o.final_state->flag_branch(1), x.amplitudes()), 1e-12);
    ASSERT_TRUE(o.register_value);
    EXPECT_TRUE(*o.register_value == 2 || *o.register_value == 10);
}

TEST(Example3, TwoSweepsFromThirdQubit) {
    const auto cfg = example_config(3);
    const auto o = run_retrieval(cfg);
    EXPECT_EQ(o.params.r, 2);
    EXPECT_EQ(o.schedule, (std::vector<int>{3, 4}));
    EXPECT_EQ(o.sweep_count_used, 2);
    EXPECT_EQ(o.disentangled_after, 2);
    EXPECT_FALSE(o.fell_back);
    const std::set<Index> marked{2, 5, 8, 10, 11, 13, 15};
    const std::vector<std::set<Index>> ones = {marked, {1, 2, 5, 6, 8, 9, 10, 11, 12, 13, 14, 15}, range_set(0, 15)};
    expect_replay(cfg, {3, 4}, ones);
    expect_stage(o, 2, "sweep 1 (qubit 3)", flags_state(4, ones[1]));
    expect_stage(o, 3, "sweep 2 (qubit 4)", flags_state(4, ones[2]));
    EXPECT_EQ(o.flag_bit, 1);
    ASSERT_TRUE(o.register_value);
    EXPECT_TRUE(marked.count(*o.register_value));
}

TEST(Retrieval, EmptyMarkedSetConcludes) {
    RetrievalConfig cfg;
    cfg.n = 3;
    cfg.marked = MarkedSet(3, {});
    const auto o = run_retrieval(cfg);
    EXPECT_EQ(o.flag_bit, 0);
    EXPECT_FALSE(o.register_value);
    EXPECT_FALSE(o.final_state);
    for (const auto& t : o.transcript) EXPECT_NE(t.label, "CS");
}

TEST(Retrieval, ZInsideSoughtSetIsRejected) {
    auto cfg = example_config(1);
    cfg.z = 2;
    EXPECT_THROW(run_retrieval(cfg), ValidationError);
}

TEST(Retrieval, WidthMismatch) {
    RetrievalConfig cfg;
    cfg.n = 4;
    cfg.marked = MarkedSet(3, {1});
    EXPECT_THROW(run_retrieval(cfg), ValidationError);
}

TEST(Retrieval, ResidueGapFallsBackToFullSchedule) {
    RetrievalConfig cfg;
    cfg.n = 4;
    cfg.z = 1;
    cfg.marked = MarkedSet(4, {0, 4});  // m = 2, r = 1, both even
    const auto o = run_retrieval(cfg);
    EXPECT_FALSE(o.residue_covered);
    EXPECT_TRUE(o.fell_back);
    EXPECT_EQ(o.schedule, (std::vector<int>{1, 2, 3, 4}));
    EXPECT_EQ(o.flag_bit, 1);
    ASSERT_FALSE(o.notes.empty());
    ASSERT_TRUE(o.register_value);
    EXPECT_TRUE(*o.register_value == 0 || *o.register_value == 4);
}

TEST(Retrieval, MarkedOutsidePatternsWarns) {
    RetrievalConfig cfg;
    cfg.n = 3;
    cfg.patterns = {1, 2, 3, 5};
    cfg.marked = MarkedSet(3, {2, 6});
    const auto o = run_retrieval(cfg);
    EXPECT_EQ(o.sought, (std::vector<Index>{2}));
    EXPECT_EQ(o.params.m, 1u);
    bool warned = false;
    for (const auto& n : o.notes) warned = warned || n.find("not stored") != std::string::npos;
    EXPECT_TRUE(warned);
}

TEST(Retrieval, SparsePatternsRetrieveSoughtState) {
    std::mt19937_64 rng(41);
    int disentangled = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 4);
        std::vector<Index> pats;
        for (Index y = 0; y < pow2(n); ++y) {
            if (rng() % 3 == 0) pats.push_back(y);
        }
        if (pats.size() < 2) continue;
        std::vector<Index> marked;
        for (Index y : pats) {
            if (rng() % 3 == 0) marked.push_back(y);
        }
        if (marked.empty() || marked.size() == pats.size()) continue;
        RetrievalConfig cfg;
        cfg.n = n;
        cfg.patterns = pats;
        cfg.marked = MarkedSet(n, marked);
        cfg.z = *std::find_if(pats.begin(), pats.end(), [&](Index y) { return !cfg.marked.contains(y); });
        cfg.mode = NleMode::Both;
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto o = run_retrieval(cfg);
        if (!o.flag_exact) continue;
        ++disentangled;
        ASSERT_EQ(o.flag_bit, 1);
        const auto x = TargetState::uniform_over(n, marked);
        EXPECT_LT(max_abs_diff(o.final_state->flag_branch(1), x.amplitudes()), 1e-9);
        EXPECT_TRUE(cfg.marked.contains(*o.register_value));
    }
    EXPECT_GT(disentangled, 20);
}

TEST(Retrieval, SameSeedSameOutcome) {
    auto cfg = example_config(3);
    cfg.seed = 77;
    const auto a = run_retrieval(cfg);
    const auto b = run_retrieval(cfg);
    EXPECT_EQ(a.register_value, b.register_value);
    std::set<Index> seen;
    for (std::uint64_t s = 0; s < 64; ++s) {
        cfg.seed = s;
        seen.insert(*run_retrieval(cfg).register_value);
    }
    EXPECT_EQ(seen.size(), 7u);
}

TEST(Retrieval, ModesAgree) {
    for (int e = 1; e <= 3; ++e) {
        auto cfg = example_config(e);
        cfg.mode = NleMode::Or;
        const auto a = run_retrieval(cfg);
        cfg.mode = NleMode::Casewise;
        const auto b = run_retrieval(cfg);
        cfg.mode = NleMode::Both;
        const auto c = run_retrieval(cfg);
        EXPECT_LT(max_abs_diff(a.final_state->amplitudes(), b.final_state->amplitudes()), 1e-12);
        EXPECT_LT(max_abs_diff(a.final_state->amplitudes(), c.final_state->amplitudes()), 1e-12);
    }
}

// Residue-covered instances over full pattern sets: the flag factors out
// after exactly `sweeps` steps, and this is the minimal count a classical
// OR-spreading replay along the same schedule needs.
TEST(Retrieval, SweepCountIsMinimalOnCoveredInstances) {
    std::mt19937_64 rng(42);
    for (int n = 1; n <= 6; ++n) {
        const Index dim = pow2(n);
        for (Index m = 1; m <= dim; ++m) {
            for (int trial = 0; trial < 3; ++trial) {
                std::vector<Index> all(dim);
                std::iota(all.begin(), all.end(), Index{0});
                std::shuffle(all.begin(), all.end(), rng);
                std::vector<Index> marked(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m));
                const int r = floor_log2(m);
                if (!residue_coverage(marked, r)) continue;
                if (m == dim) continue;  // no z outside the sought set
                RetrievalConfig cfg;
                cfg.n = n;
                cfg.marked = MarkedSet(n, marked);
                cfg.z = all.back();
                cfg.record_transcript = false;
                const auto o = run_retrieval(cfg);
                ASSERT_FALSE(o.fell_back);
                EXPECT_EQ(o.sweep_count_used, n - r);
                EXPECT_EQ(o.disentangled_after, n - r);

                std::vector<int> flags(dim, 0);
                for (Index v : marked) flags[v] = 1;
                int needed = 0;
                auto all_one = [&] { return std::all_of(flags.begin(), flags.end(), [](int f) { return f == 1; }); };
                for (int j = r + 1; j <= n && !all_one(); ++j) {
                    flags = ref::or_spread(flags, j);
                    ++needed;
                }
                EXPECT_TRUE(all_one());
                EXPECT_EQ(needed, o.params.sweeps);
            }
        }
    }
}

TEST(Retrieval, KnownQubitInTheMiddle) {
    RetrievalConfig cfg;
    cfg.n = 5;
    cfg.known_qubits = {3};
    cfg.marked = MarkedSet(4, {0b0110});
    cfg.z = 0;
    const auto o = run_retrieval(cfg);
    EXPECT_EQ(o.schedule, (std::vector<int>{1, 2, 4, 5}));
    EXPECT_EQ(o.flag_bit, 1);
    // Active bits 0110 over qubits (1,2,4,5): qubit2=1, qubit4=1 -> 01010 with qubit 3 free.
    const auto x = TargetState::uniform_over(5, {0b01010, 0b01110});
    EXPECT_LT(max_abs_diff(o.final_state->flag_branch(1), x.amplitudes()), 1e-12);
}
