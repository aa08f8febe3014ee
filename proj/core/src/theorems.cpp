#include "sandpile/theorems.hpp"

#include <algorithm>
#include <stdexcept>

namespace sandpile {

namespace {

mpz_class pow_mpz(long long base, int exp) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(exp));
    return r;
}

void require_params(int d, int h) {
    if (d < 3) throw std::invalid_argument("d must be >= 3");
    if (h < 1) throw std::invalid_argument("h must be >= 1");
}

LatticeVector unit_vector(int n, int i) {
    LatticeVector v(n);
    v[i] = 1;
    return v;
}

LatticeVector laplacian_row(const IntegerMatrix& lap, int i) {
    LatticeVector v(lap.cols());
    for (int j = 0; j < lap.cols(); ++j) v[j] = lap(i, j);
    return v;
}

bool is_prime_trial(long long p) {
    if (p < 2) return false;
    for (long long q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

}  // namespace

mpz_class theta(int d, int n) {
    if (d < 3) throw std::invalid_argument("theta: d must be >= 3");
    if (n < 0) throw std::invalid_argument("theta: n must be >= 0");
    mpz_class num = pow_mpz(d - 1, n) - 1;
    return num / (d - 2);
}

const mpz_class& ThetaTable::operator()(int n) const {
    auto it = values_.find(n);
    if (it == values_.end()) it = values_.emplace(n, theta(d_, n)).first;
    return it->second;
}

mpz_class eta(int r, int s) {
    if (r < 2) throw std::invalid_argument("eta: r must be >= 2");
    if (s < 1) throw std::invalid_argument("eta: s must be >= 1");
    mpz_class result = 1;
    for (int n = 1; n <= s; ++n) {
        mpz_class term = pow_mpz(r, n) - 1;
        if (term != 0) mpz_lcm(result.get_mpz_t(), result.get_mpz_t(), term.get_mpz_t());
    }
    return result;
}

mpz_class predicted_rank(int d, int h) {
    require_params(d, h);
    return pow_mpz(d - 1, h);
}

mpz_class predicted_exponent(int d, int h) {
    require_params(d, h);
    mpz_class l = d * theta(d, h + 1);
    // descending list theta(d,h), ..., theta(d,2); empty when h = 1
    for (int n = h; n >= 2; --n) {
        mpz_class t = theta(d, n);
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.get_mpz_t());
    }
    return pow_mpz(d - 1, h) * l;
}

mpz_class predicted_order(int d, int h) {
    require_params(d, h);
    mpz_class result = d * pow_mpz(d - 1, h);
    mpz_class th = theta(d, h + 1);
    mpz_class thp;
    mpz_pow_ui(thp.get_mpz_t(), th.get_mpz_t(), static_cast<unsigned long>(d - 1));
    result *= thp;
    for (int n = 1; n <= h - 1; ++n) {
        mpz_class base = theta(d, h + 1 - n);
        mpz_class e = mpz_class(d - 2) * d * pow_mpz(d - 1, n - 1);
        mpz_class p;
        mpz_pow_ui(p.get_mpz_t(), base.get_mpz_t(), e.get_ui());
        result *= p;
    }
    return result;
}

ElementOrderPredictions predicted_element_orders(int d, int h) {
    require_params(d, h);
    ElementOrderPredictions pred;
    pred.root_order = d * pow_mpz(d - 1, h);
    for (int n = 1; n <= h; ++n) {
        pred.sibling_diff_orders.push_back(theta(d, h + 2 - n));
        pred.sphere_sum_orders.push_back(pow_mpz(d - 1, h + 1 - n));
    }
    pred.leaf_order = predicted_exponent(d, h);
    return pred;
}

bool verify_element_orders(int d, int h) {
    Tree tree = build_tree(d, h);
    const int n = tree.coords.vertex_count();
    LatticeContext ctx(reduced_laplacian(tree.graph));
    ElementOrderPredictions pred = predicted_element_orders(d, h);

    if (ctx.order_of(unit_vector(n, 0)) != pred.root_order) return false;
    if (ctx.order_of(LatticeVector(n)) != 1) return false;  // identity element

    for (int dep = 1; dep <= h; ++dep) {
        // a sibling pair: first two children of the first vertex at depth dep-1
        int parent = tree.coords.sphere(dep - 1).front();
        const auto& ch = tree.coords.children[parent];
        LatticeVector diff(n);
        diff[ch[0]] = 1;
        diff[ch[1]] = -1;
        if (ctx.order_of(diff) != pred.sibling_diff_orders[dep - 1]) return false;

        LatticeVector sphere_sum(n);
        for (int v : tree.coords.sphere(dep)) sphere_sum[v] = 1;
        if (ctx.order_of(sphere_sum) != pred.sphere_sum_orders[dep - 1]) return false;
    }

    int leaf = tree.coords.sphere(h).front();
    return ctx.order_of(unit_vector(n, leaf)) == pred.leaf_order;
}

bool check_identity_21(int d, int h) {
    Tree tree = build_tree(d, h);
    const int n = tree.coords.vertex_count();
    IntegerMatrix lap = reduced_laplacian(tree.graph);
    LatticeContext ctx(lap);
    ThetaTable th(d);

    for (int j = 1; j < n; ++j) {
        const int dep = tree.coords.depth[j];
        LatticeVector lhs(n);
        for (int q = dep; q <= h; ++q) {
            const mpz_class& coeff = th(h + 1 - q);
            for (int k : tree.coords.descendants_at_depth(j, q))
                for (int col = 0; col < n; ++col) lhs[col] += coeff * lap(k, col);
        }
        LatticeVector rhs(n);
        rhs[j] = th(h + 2 - dep);
        rhs[tree.coords.parent[j]] -= th(h + 1 - dep);
        if (lhs != rhs) return false;
        if (!ctx.contains(rhs)) return false;  // Lemma 7.1 membership
    }
    return true;
}

QuotientLadder quotient_ladder(int d, int h) {
    Tree tree = build_tree(d, h);
    const int n = tree.coords.vertex_count();
    IntegerMatrix lap = reduced_laplacian(tree.graph);
    ThetaTable th(d);

    mpz_class total = group_invariants(lap).order;

    // |G/G_n| = |Z^N / (Lambda + <x_i : i in B_n>)| for n = 0..h
    std::vector<mpz_class> quotient_orders(h + 1);
    for (int bn = 0; bn <= h; ++bn) {
        std::vector<LatticeVector> extra;
        for (int v : tree.coords.ball(bn)) extra.push_back(unit_vector(n, v));
        quotient_orders[bn] = quotient_with_extra_generators(lap, extra).order;
    }

    QuotientLadder ladder;
    ladder.g0_order = total / quotient_orders[0];
    bool ok = quotient_orders[h] == 1;
    for (int bn = 0; bn < h; ++bn) {
        if (!mpz_divisible_p(quotient_orders[bn].get_mpz_t(), quotient_orders[bn + 1].get_mpz_t())) {
            ok = false;
            ladder.ratios.push_back(0);
            continue;
        }
        ladder.ratios.push_back(quotient_orders[bn] / quotient_orders[bn + 1]);
    }

    // Lemma 8.17 closed forms, plus |G_0| = ord(x_0) = d(d-1)^h
    bool closed = ok && ladder.g0_order == d * predicted_rank(d, h);
    for (int bn = 0; bn < h && closed; ++bn) {
        mpz_class expected;
        if (bn == 0) {
            mpz_pow_ui(expected.get_mpz_t(), th(h + 1).get_mpz_t(), static_cast<unsigned long>(d - 1));
        } else {
            mpz_class e = mpz_class(d - 2) * d * predicted_rank(d, bn);
            e /= (d - 1);  // (d-2) d (d-1)^{bn-1}
            mpz_pow_ui(expected.get_mpz_t(), th(h + 1 - bn).get_mpz_t(), e.get_ui());
        }
        closed = ladder.ratios[bn] == expected;
    }
    ladder.matches_closed_forms = closed;

    mpz_class telescoped = ladder.g0_order;
    for (const mpz_class& r : ladder.ratios) telescoped *= r;
    ladder.telescopes = telescoped == total;

    // Prop 8.10: order of x_j in G/G_{n-1} is theta(d, h+2-n) for j in S_n
    bool depth_ok = true;
    for (int dep = 1; dep <= h && depth_ok; ++dep) {
        IntegerMatrix stacked(n + static_cast<int>(tree.coords.ball(dep - 1).size()), n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) stacked(i, j) = lap(i, j);
        int row = n;
        for (int v : tree.coords.ball(dep - 1)) stacked(row++, v) = 1;
        LatticeContext ctx(stacked);
        for (int j : tree.coords.sphere(dep))
            if (ctx.order_of(unit_vector(n, j)) != th(h + 2 - dep)) {
                depth_ok = false;
                break;
            }
    }
    ladder.depth_orders_ok = depth_ok;
    return ladder;
}

bool hall_subgroup_check(int d, int h, const GroupInvariants& invariants) {
    require_params(d, h);
    // (d-1)-part of x: the largest divisor of x all of whose primes divide d-1
    auto part = [&](const mpz_class& x) {
        mpz_class m = x, result = 1, dm1 = d - 1;
        for (;;) {
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), dm1.get_mpz_t());
            if (g == 1) break;
            result *= g;
            m /= g;
        }
        return result;
    };
    int carriers = 0;
    mpz_class carried;
    for (const mpz_class& f : invariants.invariant_factors) {
        mpz_class p = part(f);
        if (p > 1) {
            ++carriers;
            carried = p;
        }
    }
    return carriers == 1 && carried == predicted_rank(d, h);
}

bool f_generates_check(int d, int h) {
    Tree tree = build_tree(d, h);
    const int n = tree.coords.vertex_count();
    std::vector<LatticeVector> extra;
    for (int v : f_set(tree.coords).members) extra.push_back(unit_vector(n, v));
    return quotient_with_extra_generators(reduced_laplacian(tree.graph), extra).trivial();
}

namespace {

// Solves the mod-d system delta_i . v = 0 with v fixed to the prescribed
// residues on F(d,H), by the depth-(H-2) -> depth-H extension. `residues`
// maps F-member index to its value mod d.
std::vector<long long> solve_mod_d(int d, int H, const std::map<int, long long>& residues) {
    auto md = [&](long long x) { return ((x % d) + d) % d; };
    if (H == 0) {
        auto it = residues.find(0);
        return {md(it == residues.end() ? 0 : it->second)};
    }
    if (H == 1) {
        std::vector<long long> s(1 + d, 0);
        long long sum = 0;
        for (int i = 2; i <= d; ++i) {  // J_0 = children of the root minus child 1
            auto it = residues.find(i);
            long long r = it == residues.end() ? 0 : it->second;
            s[i] = md(r);
            sum += r;
        }
        s[1] = md(-sum);  // m_0
        return s;
    }

    const int sub_n = static_cast<int>(mpz_class(1 + d * theta(d, H - 2)).get_si());
    std::map<int, long long> sub_residues;
    for (auto [i, r] : residues)
        if (i < sub_n) sub_residues.emplace(i, r);
    std::vector<long long> inner = solve_mod_d(d, H - 2, sub_residues);

    Tree full = build_tree(d, H);
    std::vector<long long> s(full.coords.vertex_count(), 0);
    std::copy(inner.begin(), inner.end(), s.begin());
    for (int i : full.coords.sphere(H - 1)) {
        s[i] = 0;
        const auto& ch = full.coords.children[i];
        long long sum = 0;
        for (std::size_t k = 1; k < ch.size(); ++k) {  // J_i
            auto it = residues.find(ch[k]);
            long long r = it == residues.end() ? 0 : it->second;
            s[ch[k]] = md(r);
            sum += r;
        }
        s[ch[0]] = md(-sum - inner[full.coords.parent[i]]);  // m_i
    }
    return s;
}

}  // namespace

ZdEmbedding zd_embedding(int d, int h) {
    Tree tree = build_tree(d, h);
    const int n = tree.coords.vertex_count();
    IntegerMatrix lap = reduced_laplacian(tree.graph);
    FSet f = f_set(tree.coords);
    const int fsize = static_cast<int>(f.members.size());

    ZdEmbedding emb;
    emb.d = d;
    emb.h = h;
    emb.f_members = f.members;
    emb.vectors = IntegerMatrix(fsize, n);
    emb.congruences_ok = true;

    for (int kidx = 0; kidx < fsize; ++kidx) {
        std::map<int, long long> residues{{f.members[kidx], 1}};
        std::vector<long long> v = solve_mod_d(d, h, residues);
        for (int j = 0; j < n; ++j) emb.vectors(kidx, j) = static_cast<long>(v[j]);
        // delta_i . v_k = 0 (mod d) for every i, i.e. Delta v_k = 0 (mod d)
        for (int i = 0; i < n && emb.congruences_ok; ++i) {
            mpz_class dot = 0;
            for (int j = 0; j < n; ++j) dot += lap(i, j) * static_cast<long>(v[j]);
            if (dot % d != 0) emb.congruences_ok = false;
        }
    }

    // omega maps x_k to the k-th standard basis vector of Z_d^F exactly when
    // the F-restriction of the solutions is the identity matrix mod d
    emb.omega_surjective = true;
    for (int a = 0; a < fsize && emb.omega_surjective; ++a)
        for (int b = 0; b < fsize; ++b) {
            long expect = a == b ? 1 : 0;
            if (emb.vectors(a, f.members[b]) != expect) {
                emb.omega_surjective = false;
                break;
            }
        }
    return emb;
}

int t_p(int d, long long p) {
    if (d < 3) throw std::invalid_argument("t_p: d must be >= 3");
    if (!is_prime_trial(p)) throw std::invalid_argument("t_p: p must be prime");
    if ((d - 1) % p == 0)
        throw std::invalid_argument("t_p: undefined for p | d-1 (theta(d,n) = 1 mod d-1)");
    mpz_class pz = static_cast<long>(p);
    for (int n = 1; n <= p + 1; ++n)
        if (mpz_divisible_p(theta(d, n).get_mpz_t(), pz.get_mpz_t())) return n;
    throw std::logic_error("t_p: no n <= p+1 found");  // impossible for valid input
}

SylowRankPrediction conjectured_sylow_rank(int d, int h, long long p) {
    require_params(d, h);
    if (!is_prime_trial(p)) throw std::invalid_argument("conjectured_sylow_rank: p must be prime");
    if (d % p == 0 || (d - 1) % p == 0)
        throw std::invalid_argument("conjectured_sylow_rank: p | d(d-1) is out of the conjecture's range");

    SylowRankPrediction pr;
    pr.d = d;
    pr.h = h;
    pr.p = p;
    pr.t_p = t_p(d, p);
    const int t = pr.t_p;
    if ((h + 1) % t == 0) {
        pr.regime_branch = 1;
        pr.regime_index = (h + 1) / t - 1;
    } else {
        pr.regime_branch = 0;
        pr.regime_index = h / t;
    }
    const int r = pr.regime_index;

    mpz_class geom = 0;  // sum_{q=0}^{r-1} (d-1)^{q t}
    for (int q = 0; q < r; ++q) geom += pow_mpz(d - 1, q * t);
    if (pr.regime_branch == 0)
        pr.predicted_rank = d * pow_mpz(d - 1, h - r * t) * geom;
    else
        pr.predicted_rank = d * pow_mpz(d - 1, t - 1) * geom + (d - 1);

    GroupInvariants inv = group_invariants(reduced_laplacian(build_tree(d, h).graph));
    mpz_class pz = static_cast<long>(p);
    for (const mpz_class& f : inv.invariant_factors)
        if (mpz_divisible_p(f.get_mpz_t(), pz.get_mpz_t())) ++pr.computed_rank;
    pr.match = pr.predicted_rank == pr.computed_rank;
    return pr;
}

bool TheoremReport::all_selected_pass() const {
    for (int flag : {rank_ok, order_ok, exponent_ok, hall_ok, element_orders_ok, identity_21_ok,
                     ladder_ok, f_set_ok, zd_ok})
        if (flag == 0) return false;
    return true;
}

TheoremReport verify_tree(int d, int h, const VerifySelection& sel) {
    require_params(d, h);
    Tree tree = build_tree(d, h);

    TheoremReport report;
    report.d = d;
    report.h = h;
    report.num_vertices = tree.coords.vertex_count();
    report.computed = group_invariants(reduced_laplacian(tree.graph));
    report.predicted_rank_value = predicted_rank(d, h);
    report.predicted_exponent_value = predicted_exponent(d, h);
    report.predicted_order_value = predicted_order(d, h);

    if (sel.rank) report.rank_ok = report.computed.rank == report.predicted_rank_value;
    if (sel.order) report.order_ok = report.computed.order == report.predicted_order_value;
    if (sel.exponent)
        report.exponent_ok = report.computed.exponent == report.predicted_exponent_value;
    if (sel.hall) report.hall_ok = hall_subgroup_check(d, h, report.computed);
    if (sel.element_orders) report.element_orders_ok = verify_element_orders(d, h);
    if (sel.identity_21) report.identity_21_ok = check_identity_21(d, h);
    if (sel.ladder) {
        QuotientLadder ladder = quotient_ladder(d, h);
        report.ladder_ok = ladder.matches_closed_forms && ladder.telescopes && ladder.depth_orders_ok;
    }
    if (sel.f_set) report.f_set_ok = f_generates_check(d, h);
    if (sel.zd) {
        ZdEmbedding emb = zd_embedding(d, h);
        report.zd_ok = emb.congruences_ok && emb.omega_surjective;
    }
    return report;
}

}  // namespace sandpile
