#pragma once

// Exact evaluation of the closed-form minimal-model count at height
// B = q^{12n}, the conjectural main term, and residual decompositions.
// All arithmetic is exact rational; no floating point.

#include <map>
#include <string>

#include "ffec/bigint.hpp"
#include "ffec/gf.hpp"

namespace ffec {

struct FormulaValue {
    std::string q_label;
    int n = 0;
    BigInt height_bound;  // B = q^{12n}
    BigRat main_56;       // 2 (q^9-1)/(q^8-q^7) B^{5/6}
    BigRat sub_16;        // -2 B^{1/6}
    BigRat term_12;       // delta(6) 4 (q^5-1)/(q^5-q^4) B^{1/2}
    BigRat term_13;       // delta(4) 2 (q^3-1)/(q^3-q^2) B^{1/3}
    BigRat const_6;       // delta(6) 4
    BigRat const_4;       // delta(4) 2
    BigRat total;
    bool is_integer = false;
};

FormulaValue closed_form(const Field& f, int n);

// (q^9-1)/(q^8-q^7) B^{5/6} = main_56 / 2; an exact integer for n >= 1.
BigInt conjecture_main_term(const Field& f, int n);

// Observed class counts fed back from a survey.
struct ObservedCounts {
    BigInt r0_t0;
    BigInt r1_t0;
    BigInt r2plus;
    BigInt t_nonzero;
};

struct ResidualLine {
    std::string klass;
    BigInt observed;
    BigInt residual;       // observed - main term (rank-0/1 classes only)
    BigRat over_q6n;       // residual / q^{6n}
    BigRat over_q4n;       // residual / q^{4n}
    BigRat over_q2n;       // residual / q^{2n}
    BigRat over_q10n;      // observed / q^{10n} (little-o classes)
    bool little_o_class = false;
};

struct ResidualsReport {
    std::string q_label;
    int n = 0;
    BigInt main_term;
    std::vector<ResidualLine> lines;
};

ResidualsReport residuals(const ObservedCounts& obs, const Field& f, int n);

std::string rat_to_string(const BigRat& r);

}  // namespace ffec
