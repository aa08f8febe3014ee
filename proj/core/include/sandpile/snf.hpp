#pragma once

#include <stdexcept>
#include <vector>

#include "sandpile/matrix.hpp"

namespace sandpile {

// Raised when a lattice presentation is rank-deficient (det = 0). Every
// sinked-graph Laplacian in scope is nonsingular, so this signals caller error.
class DegenerateLatticeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// U * M * V = diag(diagonal), with U, V unimodular and d_1 | d_2 | ...
// (zeros, if any, at the end; all d_i >= 0).
struct SnfResult {
    std::vector<mpz_class> diagonal;
    IntegerMatrix left;   // U, rows x rows
    IntegerMatrix right;  // V, cols x cols
};

SnfResult smith_normal_form(const IntegerMatrix& m);

// Invariants of a finite abelian group Z^N / Lambda in divisibility order.
struct GroupInvariants {
    std::vector<mpz_class> invariant_factors;  // the d_i > 1
    mpz_class order = 1;
    mpz_class exponent = 1;
    int rank = 0;

    bool trivial() const { return invariant_factors.empty(); }
};

// Caches the SNF of a basis whose rows span a full-rank lattice in Z^N,
// so that many membership / element-order queries stay cheap.
// The basis may have more rows than columns (stacked generators).
class LatticeContext {
public:
    explicit LatticeContext(const IntegerMatrix& basis);

    int dimension() const { return dim_; }

    // Least r > 0 with r*v in the lattice.
    mpz_class order_of(const LatticeVector& v) const;
    bool contains(const LatticeVector& v) const;

private:
    int dim_;
    std::vector<mpz_class> diagonal_;  // N nonzero entries
    IntegerMatrix right_;              // V of the SNF

    // coordinates of v in the SNF basis: c = v * V
    LatticeVector snf_coordinates(const LatticeVector& v) const;
};

// Invariants of Z^N / (row lattice of m); m square, det != 0.
GroupInvariants group_invariants(const IntegerMatrix& m);

// Invariants of Z^N / (row lattice of basis + span of the extra vectors).
GroupInvariants quotient_with_extra_generators(const IntegerMatrix& basis,
                                               const std::vector<LatticeVector>& extra);

mpz_class element_order(const LatticeVector& v, const IntegerMatrix& basis);
bool lattice_contains(const LatticeVector& v, const IntegerMatrix& basis);

}  // namespace sandpile
