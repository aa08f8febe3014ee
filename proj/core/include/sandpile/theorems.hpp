#pragma once

#include <map>
#include <string>
#include <vector>

#include "sandpile/graph.hpp"
#include "sandpile/snf.hpp"

namespace sandpile {

// theta(d,n) = ((d-1)^n - 1)/(d-2); theta(d,0) = 0, theta(d,1) = 1.
mpz_class theta(int d, int n);

// Memoized theta values for a fixed d.
class ThetaTable {
public:
    explicit ThetaTable(int d) : d_(d) {}
    int d() const { return d_; }
    const mpz_class& operator()(int n) const;

private:
    int d_;
    mutable std::map<int, mpz_class> values_;
};

// eta(r,s) = lcm{r^n - 1 : n = 1..s}
mpz_class eta(int r, int s);

mpz_class predicted_rank(int d, int h);      // (d-1)^h
mpz_class predicted_exponent(int d, int h);  // (d-1)^h lcm{d theta(d,h+1), theta(d,h), ..., theta(d,2)}
mpz_class predicted_order(int d, int h);

struct ElementOrderPredictions {
    mpz_class root_order;                       // d(d-1)^h
    std::vector<mpz_class> sibling_diff_orders; // depth n = 1..h: theta(d, h+2-n)
    std::vector<mpz_class> sphere_sum_orders;   // depth n = 1..h: (d-1)^{h+1-n}
    mpz_class leaf_order;                       // equals the exponent
};

ElementOrderPredictions predicted_element_orders(int d, int h);

// Checks the predictions above against exact element orders in Z^N/Lambda.
bool verify_element_orders(int d, int h);

// Verifies, coefficient by coefficient in Z^N, that for every non-root j
// at depth n:
//   sum_{q=n}^{h} theta(d,h+1-q) sum_{k in V_j^q} delta_k
//     = theta(d,h+2-n) x_j - theta(d,h+1-n) x_{p(j)},
// and that the right side lies in Lambda.
bool check_identity_21(int d, int h);

struct QuotientLadder {
    std::vector<mpz_class> ratios;  // |G_{n+1}/G_n| for n = 0..h-1
    mpz_class g0_order;             // |G_0| = ord(x_0)
    bool matches_closed_forms = false;
    bool telescopes = false;        // g0 * prod(ratios) == |G|
    bool depth_orders_ok = false;   // ord of x_j in G/G_{n-1} is theta(d,h+2-n)
};

QuotientLadder quotient_ladder(int d, int h);

// True iff exactly the largest invariant factor carries the full (d-1)-part,
// and that part is (d-1)^h (the Hall (d-1)-subgroup is cyclic of that order).
bool hall_subgroup_check(int d, int h, const GroupInvariants& invariants);

// True iff Lambda + <x_i : i in F(d,h)> = Z^N.
bool f_generates_check(int d, int h);

struct ZdEmbedding {
    int d = 0;
    int h = 0;
    std::vector<int> f_members;
    // one row per F member k: a vector v_k over Z_d with v_{k,k} = 1,
    // v_{k,i} = 0 for the other i in F, and delta_i . v_k = 0 (mod d) for all i
    IntegerMatrix vectors;
    bool congruences_ok = false;
    bool omega_surjective = false;
};

ZdEmbedding zd_embedding(int d, int h);

// Least n >= 1 with p | theta(d,n); rejects p | d-1.
int t_p(int d, long long p);

struct SylowRankPrediction {
    int d = 0, h = 0;
    long long p = 0;
    int t_p = 0;
    int regime_index = 0;  // r
    int regime_branch = 0; // 0: rt <= h <= (r+1)t-2, 1: h = (r+1)t-1
    mpz_class predicted_rank;
    int computed_rank = 0;
    bool match = false;
};

// Evaluates the conjectured Sylow p-rank formula and compares it with the
// count of invariant factors divisible by p. Rejects p | d(d-1).
SylowRankPrediction conjectured_sylow_rank(int d, int h, long long p);

struct AsymptoticRow {
    int h = 0;
    bool sandwich_ok = false;          // eta(d-1,h+1) <= exp(d,h) <= d(d-1)^h eta(d-1,h+1)
    std::string log_order_ratio;       // log_{d-1} g(d,h) / (d-1)^h
    std::string exponent_ratio;        // log_{d-1} exp(d,h) / (3h^2/pi^2), reported only
};

struct AsymptoticReport {
    int d = 0;
    int terms = 0;
    std::string c_d_partial;   // first `terms` series terms
    std::string tail_bound;    // rigorous geometric majorant of the dropped tail
    std::vector<AsymptoticRow> rows;  // h = 1..h_max
    bool trend_monotone = false;      // |log ratio - c_d partial| decreasing for h >= 2
};

// High-precision (50+ digit) evaluation; only trend claims are exact-free.
AsymptoticReport asymptotic_report(int d, int h_max, int terms);

struct TheoremReport {
    int d = 0, h = 0;
    int num_vertices = 0;
    GroupInvariants computed;
    mpz_class predicted_rank_value;
    mpz_class predicted_exponent_value;
    mpz_class predicted_order_value;
    // each flag is an exact integer comparison; -1 = not selected
    int rank_ok = -1, order_ok = -1, exponent_ok = -1, hall_ok = -1;
    int element_orders_ok = -1, identity_21_ok = -1, ladder_ok = -1;
    int f_set_ok = -1, zd_ok = -1;

    bool all_selected_pass() const;
};

struct VerifySelection {
    bool rank = true, order = true, exponent = true, hall = true;
    bool element_orders = true, identity_21 = true, ladder = true;
    bool f_set = true, zd = true;
};

TheoremReport verify_tree(int d, int h, const VerifySelection& sel = {});

}  // namespace sandpile
