#include <mpfr.h>

#include <stdexcept>
#include <string>

#include "sandpile/theorems.hpp"

namespace sandpile {

namespace {

// ~77 significant digits; the spec-level claims only need trends, but the
// partial sums are compared against exact-integer logarithms, so keep slack.
constexpr mpfr_prec_t kPrecision = 256;

class Real {
public:
    Real() { mpfr_init2(x_, kPrecision); mpfr_set_zero(x_, 1); }
    explicit Real(long v) : Real() { mpfr_set_si(x_, v, MPFR_RNDN); }
    explicit Real(const mpz_class& v) : Real() { mpfr_set_z(x_, v.get_mpz_t(), MPFR_RNDN); }
    Real(const Real& o) : Real() { mpfr_set(x_, o.x_, MPFR_RNDN); }
    Real& operator=(const Real& o) {
        mpfr_set(x_, o.x_, MPFR_RNDN);
        return *this;
    }
    ~Real() { mpfr_clear(x_); }

    mpfr_ptr raw() { return x_; }
    mpfr_srcptr raw() const { return x_; }

    Real log() const {
        Real r;
        mpfr_log(r.x_, x_, MPFR_RNDN);
        return r;
    }
    Real abs() const {
        Real r;
        mpfr_abs(r.x_, x_, MPFR_RNDN);
        return r;
    }

    friend Real operator+(const Real& a, const Real& b) {
        Real r;
        mpfr_add(r.x_, a.x_, b.x_, MPFR_RNDN);
        return r;
    }
    friend Real operator-(const Real& a, const Real& b) {
        Real r;
        mpfr_sub(r.x_, a.x_, b.x_, MPFR_RNDN);
        return r;
    }
    friend Real operator*(const Real& a, const Real& b) {
        Real r;
        mpfr_mul(r.x_, a.x_, b.x_, MPFR_RNDN);
        return r;
    }
    friend Real operator/(const Real& a, const Real& b) {
        Real r;
        mpfr_div(r.x_, a.x_, b.x_, MPFR_RNDN);
        return r;
    }
    friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.x_, b.x_) < 0; }

    std::string str() const {
        char buf[128];
        mpfr_snprintf(buf, sizeof buf, "%.30Rg", x_);
        return buf;
    }

private:
    mpfr_t x_;
};

Real log_base(const mpz_class& value, int base) {
    return Real(value).log() / Real(long(base)).log();
}

}  // namespace

AsymptoticReport asymptotic_report(int d, int h_max, int terms) {
    if (d < 3) throw std::invalid_argument("asymptotic_report: d must be >= 3");
    if (h_max < 2) throw std::invalid_argument("asymptotic_report: h_max must be >= 2");
    if (terms < 1) throw std::invalid_argument("asymptotic_report: terms must be >= 1");

    AsymptoticReport report;
    report.d = d;
    report.terms = terms;

    // c_d = d(d-2) sum_{n>=0} (d-1)^{-2-n} log_{d-1}[((d-1)^{n+2}-1)/(d-2)]
    Real partial;
    for (int n = 0; n < terms; ++n) {
        mpz_class numerator = theta(d, n + 2);  // exactly ((d-1)^{n+2}-1)/(d-2)
        mpz_class weight_den;
        mpz_ui_pow_ui(weight_den.get_mpz_t(), static_cast<unsigned long>(d - 1),
                      static_cast<unsigned long>(n + 2));
        partial = partial + log_base(numerator, d - 1) / Real(weight_den);
    }
    partial = partial * Real(long(d) * (d - 2));
    report.c_d_partial = partial.str();

    // Each dropped term is at most d(d-2)(n+2)(d-1)^{-(n+2)}, and
    // sum_{m>=M} m x^m = x^M (M - (M-1)x)/(1-x)^2 with x = 1/(d-1).
    {
        const long M = terms + 2;
        Real x = Real(1L) / Real(long(d - 1));
        Real xM(1L);
        for (long k = 0; k < M; ++k) xM = xM * x;
        Real one(1L);
        Real geom = xM * (Real(M) - Real(M - 1) * x) / ((one - x) * (one - x));
        Real tail = Real(long(d) * (d - 2)) * geom;
        report.tail_bound = tail.str();

        std::vector<Real> diffs;  // |log ratio - partial| for the trend check
        Real pi;
        mpfr_const_pi(pi.raw(), MPFR_RNDN);
        for (int h = 1; h <= h_max; ++h) {
            AsymptoticRow row;
            row.h = h;

            mpz_class exp_value = predicted_exponent(d, h);
            mpz_class order_value = predicted_order(d, h);
            mpz_class eta_value = eta(d - 1, h + 1);
            mpz_class dm1h;
            mpz_ui_pow_ui(dm1h.get_mpz_t(), static_cast<unsigned long>(d - 1),
                          static_cast<unsigned long>(h));
            row.sandwich_ok = eta_value <= exp_value && exp_value <= d * dm1h * eta_value;

            Real ratio = log_base(order_value, d - 1) / Real(dm1h);
            row.log_order_ratio = ratio.str();
            if (h >= 2) diffs.push_back((ratio - partial).abs());

            Real target = Real(3L * h * h) / (pi * pi);
            row.exponent_ratio = (log_base(exp_value, d - 1) / target).str();
            report.rows.push_back(row);
        }

        report.trend_monotone = true;
        for (std::size_t i = 1; i < diffs.size(); ++i)
            if (!(diffs[i] < diffs[i - 1])) report.trend_monotone = false;
    }
    return report;
}

}  // namespace sandpile
