#include "ffec/formula.hpp"

#include <sstream>

namespace ffec {

namespace {
BigInt qpow(const Field& f, unsigned e) { return big_pow(BigInt(f.q()), e); }
}  // namespace

FormulaValue closed_form(const Field& f, int n) {
    if (n < 0) throw std::invalid_argument("closed_form requires n >= 0");
    BigInt q(f.q());
    // fractional powers of B = q^{12n} are exact integer powers of q
    BigInt B56 = qpow(f, unsigned(10 * n));
    BigInt B12 = qpow(f, unsigned(6 * n));
    BigInt B13 = qpow(f, unsigned(4 * n));
    BigInt B16 = qpow(f, unsigned(2 * n));
    int d6 = delta(6, f), d4 = delta(4, f);

    FormulaValue v;
    v.q_label = f.label();
    v.n = n;
    v.height_bound = qpow(f, unsigned(12 * n));
    v.main_56 = BigRat(2 * (qpow(f, 9) - 1), qpow(f, 8) - qpow(f, 7)) * BigRat(B56);
    v.sub_16 = BigRat(-2 * B16);
    v.term_12 = d6 ? BigRat(4 * (qpow(f, 5) - 1), qpow(f, 5) - qpow(f, 4)) * BigRat(B12)
                   : BigRat(0);
    v.term_13 = d4 ? BigRat(2 * (qpow(f, 3) - 1), qpow(f, 3) - qpow(f, 2)) * BigRat(B13)
                   : BigRat(0);
    v.const_6 = BigRat(4 * d6);
    v.const_4 = BigRat(2 * d4);
    v.total = v.main_56 + v.sub_16 + v.term_12 + v.term_13 + v.const_6 + v.const_4;
    v.is_integer = denominator(v.total) == 1;
    return v;
}

BigInt conjecture_main_term(const Field& f, int n) {
    if (n < 1) throw std::invalid_argument("conjecture_main_term requires n >= 1");
    BigRat m = BigRat(qpow(f, 9) - 1, qpow(f, 8) - qpow(f, 7)) *
               BigRat(qpow(f, unsigned(10 * n)));
    if (denominator(m) != 1)
        throw std::logic_error("main term failed to clear its denominator");
    return numerator(m);
}

ResidualsReport residuals(const ObservedCounts& obs, const Field& f, int n) {
    ResidualsReport rep;
    rep.q_label = f.label();
    rep.n = n;
    rep.main_term = conjecture_main_term(f, n);
    BigInt q6n = qpow(f, unsigned(6 * n));
    BigInt q4n = qpow(f, unsigned(4 * n));
    BigInt q2n = qpow(f, unsigned(2 * n));
    BigInt q10n = qpow(f, unsigned(10 * n));
    auto rank_line = [&](const char* name, const BigInt& observed) {
        ResidualLine l;
        l.klass = name;
        l.observed = observed;
        l.residual = observed - rep.main_term;
        l.over_q6n = BigRat(l.residual, q6n);
        l.over_q4n = BigRat(l.residual, q4n);
        l.over_q2n = BigRat(l.residual, q2n);
        rep.lines.push_back(std::move(l));
    };
    auto little_o_line = [&](const char* name, const BigInt& observed) {
        ResidualLine l;
        l.klass = name;
        l.observed = observed;
        l.little_o_class = true;
        l.over_q10n = BigRat(observed, q10n);
        rep.lines.push_back(std::move(l));
    };
    rank_line("r=0,T=0", obs.r0_t0);
    rank_line("r=1,T=0", obs.r1_t0);
    little_o_line("r>=2", obs.r2plus);
    little_o_line("T!=0", obs.t_nonzero);
    return rep;
}

std::string rat_to_string(const BigRat& r) {
    std::ostringstream os;
    if (denominator(r) == 1) {
        os << numerator(r);
    } else {
        os << numerator(r) << '/' << denominator(r);
    }
    return os.str();
}

}  // namespace ffec
