#include "sandpile/snf.hpp"

#include <algorithm>
#include <cstdlib>

namespace sandpile {

namespace {

// Locates a nonzero entry of least absolute value in the submatrix
// A[t.., t..]. Returns false if the submatrix is zero.
bool locate_pivot(const IntegerMatrix& a, int t, int& pi, int& pj) {
    bool found = false;
    mpz_class best;
    for (int i = t; i < a.rows(); ++i)
        for (int j = t; j < a.cols(); ++j) {
            const mpz_class& e = a(i, j);
            if (e == 0) continue;
            mpz_class ab = abs(e);
            if (!found || ab < best) {
                found = true;
                best = ab;
                pi = i;
                pj = j;
            }
        }
    return found;
}

}  // namespace

SnfResult smith_normal_form(const IntegerMatrix& m) {
    const int rows = m.rows();
    const int cols = m.cols();
    const int mn = std::min(rows, cols);
    IntegerMatrix a = m;
    IntegerMatrix u = IntegerMatrix::identity(rows);
    IntegerMatrix v = IntegerMatrix::identity(cols);

    // Replaces rows (or columns) s, i by a unimodular 2x2 combination that
    // puts gcd(a(s,t), a(i,t)) at the pivot. Plain subtraction is used when
    // the pivot already divides the entry, which keeps growth down.
    auto gcd_rows = [&](int t, int i) {
        const mpz_class& p = a(t, t);
        const mpz_class& q = a(i, t);
        if (mpz_divisible_p(q.get_mpz_t(), p.get_mpz_t())) {
            mpz_class f = -mpz_class(q / p);
            a.add_row_multiple(i, t, f);
            u.add_row_multiple(i, t, f);
            return;
        }
        mpz_class g, x, y;
        mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
        mpz_class pg = p / g, qg = q / g;
        for (int j = 0; j < cols; ++j) {
            mpz_class at = x * a(t, j) + y * a(i, j);
            mpz_class ai = pg * a(i, j) - qg * a(t, j);
            a(t, j) = at;
            a(i, j) = ai;
        }
        for (int j = 0; j < rows; ++j) {
            mpz_class ut = x * u(t, j) + y * u(i, j);
            mpz_class ui = pg * u(i, j) - qg * u(t, j);
            u(t, j) = ut;
            u(i, j) = ui;
        }
    };
    auto gcd_cols = [&](int t, int j) {
        const mpz_class& p = a(t, t);
        const mpz_class& q = a(t, j);
        if (mpz_divisible_p(q.get_mpz_t(), p.get_mpz_t())) {
            mpz_class f = -mpz_class(q / p);
            a.add_col_multiple(j, t, f);
            v.add_col_multiple(j, t, f);
            return;
        }
        mpz_class g, x, y;
        mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
        mpz_class pg = p / g, qg = q / g;
        for (int i = 0; i < rows; ++i) {
            mpz_class at = x * a(i, t) + y * a(i, j);
            mpz_class aj = pg * a(i, j) - qg * a(i, t);
            a(i, t) = at;
            a(i, j) = aj;
        }
        for (int i = 0; i < cols; ++i) {
            mpz_class vt = x * v(i, t) + y * v(i, j);
            mpz_class vj = pg * v(i, j) - qg * v(i, t);
            v(i, t) = vt;
            v(i, j) = vj;
        }
    };

    for (int t = 0; t < mn; ++t) {
        int pi, pj;
        if (!locate_pivot(a, t, pi, pj)) break;  // remaining submatrix is zero
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        // Clear row t and column t outside the pivot. Column transforms can
        // re-dirty the column, but each full pass either leaves the pivot
        // fixed (then the cross is clear) or replaces it by a proper divisor,
        // so the loop ends after at most log|pivot| passes.
        auto clear_cross = [&] {
            for (;;) {
                for (int i = t + 1; i < rows; ++i)
                    if (a(i, t) != 0) gcd_rows(t, i);
                for (int j = t + 1; j < cols; ++j)
                    if (a(t, j) != 0) gcd_cols(t, j);
                bool clean = true;
                for (int i = t + 1; i < rows && clean; ++i) clean = a(i, t) == 0;
                for (int j = t + 1; j < cols && clean; ++j) clean = a(t, j) == 0;
                if (clean) break;
            }
        };

        // Force the pivot to divide every entry of the trailing submatrix;
        // this is what yields the divisibility chain d_1 | d_2 | ...
        for (;;) {
            clear_cross();
            int vi = -1, vj = -1;
            for (int i = t + 1; i < rows && vi < 0; ++i)
                for (int j = t + 1; j < cols; ++j) {
                    mpz_class r;
                    mpz_fdiv_r(r.get_mpz_t(), a(i, j).get_mpz_t(), a(t, t).get_mpz_t());
                    if (r != 0) {
                        vi = i;
                        vj = j;
                        break;
                    }
                }
            if (vi < 0) break;
            mpz_class one = 1;
            a.add_row_multiple(t, vi, one);
            u.add_row_multiple(t, vi, one);
        }

        if (a(t, t) < 0) {
            a.negate_row(t);
            u.negate_row(t);
        }
    }

    SnfResult res;
    res.diagonal.resize(mn);
    for (int i = 0; i < mn; ++i) res.diagonal[i] = a(i, i);
    res.left = std::move(u);
    res.right = std::move(v);
    return res;
}

LatticeContext::LatticeContext(const IntegerMatrix& basis) : dim_(basis.cols()) {
    if (basis.rows() < dim_)
        throw DegenerateLatticeError("lattice basis has fewer generators than the ambient dimension");
    SnfResult snf = smith_normal_form(basis);
    diagonal_.assign(snf.diagonal.begin(), snf.diagonal.begin() + dim_);
    for (const mpz_class& d : diagonal_)
        if (d == 0) throw DegenerateLatticeError("lattice basis is rank-deficient");
    right_ = std::move(snf.right);
}

LatticeVector LatticeContext::snf_coordinates(const LatticeVector& v) const {
    if (static_cast<int>(v.size()) != dim_)
        throw std::invalid_argument("vector dimension does not match the lattice");
    LatticeVector c(dim_);
    for (int i = 0; i < dim_; ++i) {
        if (v[i] == 0) continue;
        for (int j = 0; j < dim_; ++j) c[j] += v[i] * right_(i, j);
    }
    return c;
}

mpz_class LatticeContext::order_of(const LatticeVector& v) const {
    // With U M V = diag(d_i), r*v lies in the row lattice of M iff
    // d_i | r*(vV)_i for every i, so the order is lcm_i d_i / gcd(d_i, c_i).
    LatticeVector c = snf_coordinates(v);
    mpz_class order = 1;
    for (int i = 0; i < dim_; ++i) {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), diagonal_[i].get_mpz_t(), c[i].get_mpz_t());
        mpz_class part = diagonal_[i] / g;
        mpz_lcm(order.get_mpz_t(), order.get_mpz_t(), part.get_mpz_t());
    }
    return order;
}

bool LatticeContext::contains(const LatticeVector& v) const {
    LatticeVector c = snf_coordinates(v);
    for (int i = 0; i < dim_; ++i)
        if (!mpz_divisible_p(c[i].get_mpz_t(), diagonal_[i].get_mpz_t())) return false;
    return true;
}

namespace {

GroupInvariants invariants_from_diagonal(const std::vector<mpz_class>& diag, int dim) {
    GroupInvariants inv;
    for (int i = 0; i < dim; ++i) {
        const mpz_class& d = diag[i];
        if (d == 0) throw DegenerateLatticeError("quotient lattice is rank-deficient");
        inv.order *= d;
        if (d > 1) inv.invariant_factors.push_back(d);
    }
    if (!inv.invariant_factors.empty()) inv.exponent = inv.invariant_factors.back();
    inv.rank = static_cast<int>(inv.invariant_factors.size());
    return inv;
}

}  // namespace

GroupInvariants group_invariants(const IntegerMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("group_invariants: matrix not square");
    SnfResult snf = smith_normal_form(m);
    return invariants_from_diagonal(snf.diagonal, m.cols());
}

GroupInvariants quotient_with_extra_generators(const IntegerMatrix& basis,
                                               const std::vector<LatticeVector>& extra) {
    const int n = basis.cols();
    IntegerMatrix stacked(basis.rows() + static_cast<int>(extra.size()), n);
    for (int i = 0; i < basis.rows(); ++i)
        for (int j = 0; j < n; ++j) stacked(i, j) = basis(i, j);
    for (std::size_t k = 0; k < extra.size(); ++k) {
        if (static_cast<int>(extra[k].size()) != n)
            throw std::invalid_argument("extra generator dimension mismatch");
        for (int j = 0; j < n; ++j) stacked(basis.rows() + static_cast<int>(k), j) = extra[k][j];
    }
    SnfResult snf = smith_normal_form(stacked);
    return invariants_from_diagonal(snf.diagonal, n);
}

mpz_class element_order(const LatticeVector& v, const IntegerMatrix& basis) {
    return LatticeContext(basis).order_of(v);
}

bool lattice_contains(const LatticeVector& v, const IntegerMatrix& basis) {
    return LatticeContext(basis).contains(v);
}

}  // namespace sandpile
