#pragma once
// Coefficient domains for truncated series: exact rationals (GMP) and
// fixed-precision big floats (MPFR), both via Boost.Multiprecision.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace subcrit {

using rat = boost::multiprecision::mpq_rational;
using bigint = boost::multiprecision::mpz_int;

// et_off: plain value semantics, no expression templates. Every temporary is a
// real number whose precision is the thread default at the time it is created.
using bigfloat = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                               boost::multiprecision::et_off>;

enum class domain_kind { exact_rational, big_float };

inline unsigned digits10_for_bits(unsigned bits) {
    // ceil(bits * log10(2)) + 1 guard digit
    return static_cast<unsigned>(bits * 0.30102999566398120) + 1;
}

struct coeff_domain {
    domain_kind kind = domain_kind::exact_rational;
    unsigned precision_bits = 0; // big_float only

    static coeff_domain exact() { return {domain_kind::exact_rational, 0}; }
    static coeff_domain floating(unsigned bits) {
        if (bits < 64 || bits > 4096)
            throw std::invalid_argument("precision_bits must lie in [64, 4096]");
        return {domain_kind::big_float, bits};
    }
    bool is_exact() const { return kind == domain_kind::exact_rational; }
    bool operator==(const coeff_domain&) const = default;
};

// Scope guard fixing the default precision used for every big-float temporary.
// All numeric work on a domain runs inside one of these.
class precision_guard {
  public:
    explicit precision_guard(unsigned bits)
        : saved_(bigfloat::default_precision()) {
        bigfloat::default_precision(digits10_for_bits(bits));
    }
    explicit precision_guard(const coeff_domain& dom)
        : precision_guard(dom.is_exact() ? 64u : dom.precision_bits) {}
    ~precision_guard() { bigfloat::default_precision(saved_); }
    precision_guard(const precision_guard&) = delete;
    precision_guard& operator=(const precision_guard&) = delete;

  private:
    unsigned saved_;
};

// Coefficient-type <-> domain-kind mapping, so series<C> can verify its domain.
template <class C> struct domain_traits;
template <> struct domain_traits<rat> {
    static constexpr domain_kind kind = domain_kind::exact_rational;
    static rat from_rat(const rat& q, const coeff_domain&) { return q; }
};
template <> struct domain_traits<bigfloat> {
    static constexpr domain_kind kind = domain_kind::big_float;
    static bigfloat from_rat(const rat& q, const coeff_domain& dom) {
        precision_guard guard(dom.precision_bits);
        bigfloat num(boost::multiprecision::numerator(q));
        bigfloat den(boost::multiprecision::denominator(q));
        return num / den;
    }
};

// Force a stored value to the domain's precision (no-op when already there).
inline void normalize_precision(rat&, const coeff_domain&) {}
inline void normalize_precision(bigfloat& x, const coeff_domain& dom) {
    const unsigned d10 = digits10_for_bits(dom.precision_bits);
    if (x.precision() != d10) x.precision(d10);
}

inline bigfloat to_bigfloat(const rat& q, unsigned bits) {
    return domain_traits<bigfloat>::from_rat(q, coeff_domain::floating(bits));
}

// Fixed-digit decimal rendering; the digit count derives from the nominal
// precision so that identical configurations print identical strings.
inline std::string render_decimal(const bigfloat& x, unsigned precision_bits) {
    const unsigned digits = static_cast<unsigned>(precision_bits / 3.3);
    return x.str(digits, std::ios_base::scientific);
}

inline bigint factorial(unsigned n) {
    bigint f = 1;
    for (unsigned i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace subcrit
