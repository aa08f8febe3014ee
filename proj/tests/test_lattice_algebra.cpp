#include <doctest.h>

#include <random>

#include "sandpile/graph.hpp"
#include "sandpile/matrix.hpp"
#include "sandpile/snf.hpp"

using namespace sandpile;

namespace {

IntegerMatrix from_rows(const std::vector<std::vector<long>>& rows) {
    IntegerMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

IntegerMatrix diag_from_snf(const SnfResult& snf, int rows, int cols) {
    IntegerMatrix d(rows, cols);
    for (std::size_t i = 0; i < snf.diagonal.size(); ++i)
        d(static_cast<int>(i), static_cast<int>(i)) = snf.diagonal[i];
    return d;
}

void check_snf_contract(const IntegerMatrix& m) {
    SnfResult snf = smith_normal_form(m);
    CHECK(snf.left * m * snf.right == diag_from_snf(snf, m.rows(), m.cols()));
    CHECK(abs(determinant(snf.left)) == 1);
    CHECK(abs(determinant(snf.right)) == 1);
    bool zero_seen = false;
    for (std::size_t i = 0; i < snf.diagonal.size(); ++i) {
        CHECK(snf.diagonal[i] >= 0);
        if (snf.diagonal[i] == 0) zero_seen = true;
        if (zero_seen) CHECK(snf.diagonal[i] == 0);
        if (i > 0 && snf.diagonal[i] != 0)
            CHECK(mpz_divisible_p(snf.diagonal[i].get_mpz_t(), snf.diagonal[i - 1].get_mpz_t()));
    }
}

IntegerMatrix tree_laplacian(int d, int h) { return reduced_laplacian(build_tree(d, h).graph); }

std::vector<long> prime_factors(mpz_class n) {
    std::vector<long> out;
    for (long p = 2; mpz_class(p) * p <= n; ++p)
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            out.push_back(p);
            while (mpz_divisible_ui_p(n.get_mpz_t(), p)) n /= p;
        }
    if (n > 1) out.push_back(n.get_si());
    return out;
}

}  // namespace

TEST_CASE("smith normal form of simple matrices") {
    SnfResult id = smith_normal_form(IntegerMatrix::identity(4));
    for (const auto& d : id.diagonal) CHECK(d == 1);

    SnfResult d23 = smith_normal_form(from_rows({{2, 0}, {0, 3}}));
    CHECK(d23.diagonal == std::vector<mpz_class>{1, 6});

    SnfResult t31_like = smith_normal_form(from_rows({{3, -1}, {-1, 3}}));
    CHECK(t31_like.diagonal == std::vector<mpz_class>{1, 8});
}

TEST_CASE("snf transform contract on random matrices") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> entry(-9, 9);
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<int> dim(1, 6);
        IntegerMatrix m(dim(rng), dim(rng));
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) m(i, j) = entry(rng);
        check_snf_contract(m);
    }
    check_snf_contract(tree_laplacian(3, 2));
    check_snf_contract(tree_laplacian(4, 2));
}

TEST_CASE("snf diagonal product equals |det| for full-rank square matrices") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> entry(-6, 6);
    int done = 0;
    while (done < 15) {
        IntegerMatrix m(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m(i, j) = entry(rng);
        mpz_class det = determinant(m);
        if (det == 0) continue;
        ++done;
        SnfResult snf = smith_normal_form(m);
        mpz_class prod = 1;
        for (const auto& d : snf.diagonal) prod *= d;
        CHECK(prod == abs(det));
    }
}

TEST_CASE("group invariants of tree Laplacians") {
    GroupInvariants g31 = group_invariants(tree_laplacian(3, 1));
    CHECK(g31.invariant_factors == std::vector<mpz_class>{3, 18});
    CHECK(g31.order == 54);
    CHECK(g31.exponent == 18);
    CHECK(g31.rank == 2);

    GroupInvariants g32 = group_invariants(tree_laplacian(3, 2));
    CHECK(g32.invariant_factors == std::vector<mpz_class>{3, 3, 21, 84});
    CHECK(g32.order == 15876);

    GroupInvariants g41 = group_invariants(tree_laplacian(4, 1));
    CHECK(g41.invariant_factors == std::vector<mpz_class>{4, 4, 48});
}

TEST_CASE("one-by-one lattice and degenerate input") {
    GroupInvariants zd = group_invariants(from_rows({{5}}));
    CHECK(zd.invariant_factors == std::vector<mpz_class>{5});

    CHECK_THROWS_AS(group_invariants(from_rows({{1, 2}, {2, 4}})), DegenerateLatticeError);
    CHECK_THROWS_AS(element_order({mpz_class(1), mpz_class(0)}, from_rows({{1, 2}, {2, 4}})),
                    DegenerateLatticeError);
}

TEST_CASE("element orders in tree sandpile groups") {
    IntegerMatrix lap31 = tree_laplacian(3, 1);
    LatticeVector x0(4);
    x0[0] = 1;
    CHECK(element_order(x0, lap31) == 6);  // d(d-1)^h = 3*2

    CHECK(element_order(LatticeVector(4), lap31) == 1);

    // sibling depth-1 vertices of T(3,2) are 1 and 2
    IntegerMatrix lap32 = tree_laplacian(3, 2);
    LatticeVector diff(10);
    diff[1] = 1;
    diff[2] = -1;
    CHECK(element_order(diff, lap32) == 7);  // theta(3,3)
}

TEST_CASE("element order minimality against prime factors") {
    IntegerMatrix lap = tree_laplacian(3, 2);
    LatticeContext ctx(lap);
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<long> entry(-4, 4);
    for (int trial = 0; trial < 20; ++trial) {
        LatticeVector v(10);
        for (auto& e : v) e = entry(rng);
        mpz_class r = ctx.order_of(v);
        LatticeVector rv(10);
        for (int i = 0; i < 10; ++i) rv[i] = r * v[i];
        CHECK(ctx.contains(rv));
        for (long p : prime_factors(r)) {
            LatticeVector sv(10);
            for (int i = 0; i < 10; ++i) sv[i] = (r / p) * v[i];
            CHECK(!ctx.contains(sv));
        }
    }
}

TEST_CASE("invariants stable under permutations and unimodular row operations") {
    IntegerMatrix base = tree_laplacian(3, 2);
    GroupInvariants expect = group_invariants(base);
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> idx(0, base.rows() - 1);
    std::uniform_int_distribution<long> coeff(-3, 3);
    for (int trial = 0; trial < 10; ++trial) {
        IntegerMatrix m = base;
        for (int step = 0; step < 12; ++step) {
            int a = idx(rng), b = idx(rng);
            switch (step % 3) {
                case 0:
                    m.swap_rows(a, b);
                    break;
                case 1:
                    m.swap_cols(a, b);
                    break;
                default:
                    if (a != b) m.add_row_multiple(a, b, mpz_class(coeff(rng)));
            }
        }
        GroupInvariants got = group_invariants(m);
        CHECK(got.invariant_factors == expect.invariant_factors);
        CHECK(got.order == expect.order);
    }
}

TEST_CASE("quotient by extra generators") {
    IntegerMatrix lap = tree_laplacian(3, 2);
    const int n = 10;

    std::vector<LatticeVector> everything;
    for (int i = 0; i < n; ++i) {
        LatticeVector e(n);
        e[i] = 1;
        everything.push_back(e);
    }
    CHECK(quotient_with_extra_generators(lap, everything).trivial());

    LatticeVector x0(n);
    x0[0] = 1;
    CHECK(quotient_with_extra_generators(lap, {x0}).order == 1323);  // 15876 / 12 = 49*27

    std::vector<LatticeVector> b1;
    for (int i = 0; i < 4; ++i) {  // B_1 of T(3,2) = {0,1,2,3}
        LatticeVector e(n);
        e[i] = 1;
        b1.push_back(e);
    }
    CHECK(quotient_with_extra_generators(lap, b1).order == 27);

    GroupInvariants empty_extra = quotient_with_extra_generators(lap, {});
    GroupInvariants direct = group_invariants(lap);
    CHECK(empty_extra.invariant_factors == direct.invariant_factors);
    CHECK(empty_extra.order == direct.order);
}

TEST_CASE("determinant of tree Laplacians") {
    CHECK(determinant(tree_laplacian(3, 1)) == 54);
    CHECK(determinant(IntegerMatrix::identity(5)) == 1);
    CHECK(determinant(tree_laplacian(3, 2)) == 15876);
}
