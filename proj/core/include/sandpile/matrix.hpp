#pragma once

#include <gmpxx.h>

#include <cassert>
#include <string>
#include <vector>

namespace sandpile {

// Dense matrix of arbitrary-precision integers. All linear algebra in this
// project is exact; no floating point enters any group computation.
class IntegerMatrix {
public:
    IntegerMatrix() = default;
    IntegerMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {
        assert(rows >= 0 && cols >= 0);
    }

    static IntegerMatrix identity(int n) {
        IntegerMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    mpz_class& operator()(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    const mpz_class& operator()(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    void swap_rows(int a, int b);
    void swap_cols(int a, int b);
    // row[a] += c * row[b]
    void add_row_multiple(int a, int b, const mpz_class& c);
    // col[a] += c * col[b]
    void add_col_multiple(int a, int b, const mpz_class& c);
    void negate_row(int a);

    bool operator==(const IntegerMatrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

    std::string to_string() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<mpz_class> data_;
};

using LatticeVector = std::vector<mpz_class>;

IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b);

// Exact determinant via Bareiss fraction-free elimination.
mpz_class determinant(const IntegerMatrix& m);

}  // namespace sandpile
