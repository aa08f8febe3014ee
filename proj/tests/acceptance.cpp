// Acceptance gate: one line per criterion, exit code = number of failures.

#include <cstdlib>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "sandpile/dynamics.hpp"
#include "sandpile/graph.hpp"
#include "sandpile/snf.hpp"
#include "sandpile/theorems.hpp"

using namespace sandpile;

namespace {

const std::vector<std::pair<int, int>> kGrid = {{3, 1}, {3, 2}, {3, 3}, {3, 4}, {3, 5},
                                                {4, 1}, {4, 2}, {4, 3}, {5, 1}, {5, 2}};

int failures = 0;

void report(int criterion, const std::string& label, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << ": " << label;
    if (!ok && !detail.empty()) std::cout << " [" << detail << "]";
    std::cout << std::endl;
    if (!ok) ++failures;
}

GroupInvariants invariants_of(int d, int h) {
    return group_invariants(reduced_laplacian(build_tree(d, h).graph));
}

bool criterion_1() {
    for (auto [d, h] : kGrid) {
        GroupInvariants inv = invariants_of(d, h);
        if (inv.rank != predicted_rank(d, h)) return false;
        if (inv.order != predicted_order(d, h)) return false;
        if (inv.exponent != predicted_exponent(d, h)) return false;
        if (!hall_subgroup_check(d, h, inv)) return false;
    }
    return true;
}

bool criterion_2() {
    return invariants_of(3, 1).invariant_factors == std::vector<mpz_class>{3, 18} &&
           invariants_of(3, 2).invariant_factors == std::vector<mpz_class>{3, 3, 21, 84} &&
           invariants_of(4, 1).invariant_factors == std::vector<mpz_class>{4, 4, 48};
}

bool criterion_3() {
    for (auto [d, h] : kGrid)
        if (!verify_element_orders(d, h)) return false;
    return true;
}

bool criterion_4() {
    // exact vector identity on the named trees; membership holds as part of
    // the same check across the whole grid
    for (auto [d, h] : kGrid)
        if (!check_identity_21(d, h)) return false;
    return true;
}

bool criterion_5() {
    for (auto [d, h] : {std::pair{3, 1}, {3, 2}, {4, 2}}) {
        QuotientLadder ladder = quotient_ladder(d, h);
        if (!ladder.matches_closed_forms || !ladder.telescopes || !ladder.depth_orders_ok)
            return false;
    }
    return true;
}

bool criterion_6() {
    Tree t = build_tree(3, 1);
    auto stables = enumerate_stable(t.graph);
    if (stables.size() != 81) return false;
    auto recurrents = enumerate_recurrent(t.graph);
    if (recurrents.size() != 54) return false;

    // burning test vs literal cycle-iteration recurrence
    std::set<Configuration> recurrent_set(recurrents.begin(), recurrents.end());
    for (const Configuration& c : stables) {
        bool definitional = true;
        for (int i = 0; i < t.coords.vertex_count() && definitional; ++i) {
            Configuration w = c;
            std::set<Configuration> seen;
            bool returned = false;
            while (seen.insert(w).second) {
                w = apply_operator(t.graph, i, w);
                if (w == c) {
                    returned = true;
                    break;
                }
            }
            definitional = returned;
        }
        if (definitional != (recurrent_set.count(c) > 0)) return false;
    }

    // group structure
    Configuration e = recurrent_identity(t.graph);
    long long exponent = 1;
    for (const Configuration& a : recurrents) {
        if (recurrent_add(t.graph, e, a) != a) return false;
        Configuration b = a;
        long long ord = 1;
        while (b != e) {
            b = recurrent_add(t.graph, b, a);
            ++ord;
        }
        exponent = std::lcm(exponent, ord);
    }
    if (exponent != 18) return false;

    for (int i = 0; i < t.coords.vertex_count(); ++i)
        if (!operator_relation_check(t.graph, i, recurrents)) return false;
    return true;
}

bool criterion_7() {
    std::mt19937_64 rng(20260823);
    for (auto [d, h] : {std::pair{3, 2}, {4, 2}}) {
        Tree t = build_tree(d, h);
        const int n = t.coords.vertex_count();
        IntegerMatrix lap = reduced_laplacian(t.graph);
        std::uniform_int_distribution<long long> grains(0, 15);
        for (int trial = 0; trial < 100; ++trial) {
            Configuration c(n);
            for (auto& x : c) x = grains(rng);
            StabilizationResult a = stabilize_random(t.graph, c, 2 * trial);
            StabilizationResult b = stabilize_random(t.graph, c, 2 * trial + 1);
            if (a.stable != b.stable || a.odometer != b.odometer) return false;

            long long in = 0, out = a.grains_to_sink;
            for (long long x : c) in += x;
            for (long long x : a.stable) out += x;
            if (in != out) return false;
            for (int j = 0; j < n; ++j) {
                mpz_class expected = static_cast<long>(c[j]);
                for (int i = 0; i < n; ++i)
                    expected -= lap(i, j) * static_cast<long>(a.odometer[i]);
                if (expected != static_cast<long>(a.stable[j])) return false;
            }
        }
    }
    return true;
}

bool criterion_8() {
    for (auto [d, h] : kGrid) {
        ZdEmbedding emb = zd_embedding(d, h);
        if (!emb.congruences_ok || !emb.omega_surjective) return false;
    }
    for (auto [d, h, expect] : {std::tuple{4, 1, 3}, {4, 2, 9}}) {
        int count = 0;
        for (const mpz_class& f : invariants_of(d, h).invariant_factors)
            if (mpz_divisible_ui_p(f.get_mpz_t(), 2)) ++count;
        if (count != expect || mpz_class(expect) != predicted_rank(d, h)) return false;
    }
    return true;
}

bool criterion_9() {
    bool ok = true;
    for (long long p : {5LL, 7LL})
        for (int h = 1; h <= 5; ++h) {
            SylowRankPrediction pr = conjectured_sylow_rank(3, h, p);
            std::cout << "  conjecture d=3 p=" << p << " h=" << h << ": predicted "
                      << pr.predicted_rank.get_str() << ", computed " << pr.computed_rank << " ("
                      << (pr.match ? "match" : "MISMATCH") << ")\n";
            // pinned cases; elsewhere a mismatch is reported, not asserted
            if (p == 7 && h == 2) ok = ok && pr.match && pr.predicted_rank == 2;
            if (p == 7 && h == 3) ok = ok && pr.match;
            if (p == 5 && h == 3) ok = ok && pr.match;
        }
    return ok;
}

bool criterion_10() {
    bool ok = true;
    for (int d : {3, 4}) {
        AsymptoticReport rep = asymptotic_report(d, 5, 30);
        for (const AsymptoticRow& row : rep.rows)
            if (!row.sandwich_ok) {
                std::cout << "  sandwich failed at d=" << d << " h=" << row.h << "\n";
                ok = false;
            }
        double tail = std::strtod(rep.tail_bound.c_str(), nullptr);
        std::cout << "  d=" << d << " tail bound at 30 terms: " << rep.tail_bound << "\n";
        if (!(tail < 1e-10)) {
            std::cout << "  tail bound not below 1e-10 for d=" << d << "\n";
            ok = false;
        }
        if (d == 3 && !rep.trend_monotone) {
            std::cout << "  log-ratio trend not monotone for d=3\n";
            ok = false;
        }
    }
    return ok;
}

}  // namespace

int main() {
    report(1, "theorem grid (rank/order/exponent/Hall) exact on 10 trees", criterion_1());
    report(2, "pinned invariant factors for G(3,1), G(3,2), G(4,1)", criterion_2());
    report(3, "element orders (root, sphere sums, sibling diffs, leaf)", criterion_3());
    report(4, "lattice identity and membership on the grid", criterion_4());
    report(5, "quotient ladder closed forms, telescoping, depth orders", criterion_5());
    report(6, "exhaustive dynamics on the depth-1 ternary tree", criterion_6());
    report(7, "abelianness, conservation, odometer identity (200 runs)", criterion_7());
    report(8, "rank subgroup embedding and p-rank counts for p | d", criterion_8());
    report(9, "Sylow rank conjecture sweep with pinned cases", criterion_9());
    report(10, "asymptotic sandwich, trend, and tail bound", criterion_10());
    std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : std::to_string(failures) + " CRITERIA FAILED")
              << std::endl;
    return failures;
}
