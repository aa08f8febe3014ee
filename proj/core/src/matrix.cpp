#include "sandpile/matrix.hpp"

#include <sstream>
#include <stdexcept>

namespace sandpile {

void IntegerMatrix::swap_rows(int a, int b) {
    if (a == b) return;
    for (int j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntegerMatrix::swap_cols(int a, int b) {
    if (a == b) return;
    for (int i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntegerMatrix::add_row_multiple(int a, int b, const mpz_class& c) {
    for (int j = 0; j < cols_; ++j) (*this)(a, j) += c * (*this)(b, j);
}

void IntegerMatrix::add_col_multiple(int a, int b, const mpz_class& c) {
    for (int i = 0; i < rows_; ++i) (*this)(i, a) += c * (*this)(i, b);
}

void IntegerMatrix::negate_row(int a) {
    for (int j = 0; j < cols_; ++j) (*this)(a, j) = -(*this)(a, j);
}

std::string IntegerMatrix::to_string() const {
    std::ostringstream os;
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) {
            if (j) os << ' ';
            os << (*this)(i, j).get_str();
        }
        os << '\n';
    }
    return os.str();
}

IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: dimension mismatch");
    IntegerMatrix r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const mpz_class& aik = a(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

mpz_class determinant(const IntegerMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant: matrix not square");
    const int n = m.rows();
    if (n == 0) return 1;
    IntegerMatrix a = m;
    int sign = 1;
    mpz_class prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a(k, k) == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; ++i)
                if (a(i, k) != 0) { piv = i; break; }
            if (piv < 0) return 0;
            a.swap_rows(k, piv);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                mpz_class t = a(i, j) * a(k, k) - a(i, k) * a(k, j);
                // Bareiss: division is exact
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                a(i, j) = t;
            }
            a(i, k) = 0;
        }
        prev = a(k, k);
    }
    return sign > 0 ? a(n - 1, n - 1) : mpz_class(-a(n - 1, n - 1));
}

}  // namespace sandpile
