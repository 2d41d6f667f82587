#pragma once

// Per-curve local data (reduction types, conductor), the L-polynomial with
// functional-equation completion and exact analytic rank, and torsion bounds.

#include <complex>

#include "ffec/model.hpp"

namespace ffec {

enum class CurveErrorCode {
    ConstantCurve,      // invariants of a constant curve were requested
    SignUndetermined,   // the sign fallback chain hit the work cap
    WorkBudget,         // a required Euler-product extension exceeds the cap
    InternalCheck,      // a mathematical consistency check failed (a bug)
};

struct CurveError : std::runtime_error {
    CurveError(CurveErrorCode c, const std::string& msg)
        : std::runtime_error(msg), code(c) {}
    CurveErrorCode code;
};

struct Place {
    bool at_infinity = false;
    Poly pi;  // monic irreducible; unused for the infinite place
    int degree = 1;

    static Place infinity() { return Place{true, {}, 1}; }
    static Place finite(Poly pi_) {
        int d = pi_.degree();
        return Place{false, std::move(pi_), d};
    }
    std::string to_string() const;
};

enum class Reduction { Good, MultSplit, MultNonsplit, Additive };
const char* to_string(Reduction r);

struct LocalData {
    Place place;
    Reduction reduction = Reduction::Good;
    int conductor_exponent = 0;  // 0 good, 1 multiplicative, 2 additive (tame)
    int64_t a_v = 0;             // Good: Hasse-bounded; split +1; nonsplit -1; additive 0
};

struct LPolynomial {
    std::vector<BigInt> c;  // c_0 .. c_N, c_0 = 1, c_N = eps q^N
    int N = 0;
    int epsilon = +1;
    int analytic_rank = 0;
    // (modulus of an inverse root, multiplicity); every modulus ~ sqrt(q)
    std::vector<std::pair<double, int>> inverse_root_moduli;
};

struct TorsionReport {
    int64_t upper_bound = 0;  // gcd of sampled good-reduction group orders
    int found_order = 1;      // subgroup generated by explicit 2-/3-torsion
    std::string found_structure;  // "trivial", "Z/2", "Z/6 x Z/2", ...
    int two_rank = 0;             // 0, 1, 2
    int three_rank = 0;           // 0, 1, 2
    bool certified_trivial = false;
};

struct LOptions {
    // An Euler-product extension to degree j is admitted while q^{2j} stays
    // within this unit count (the trace-table fill cost driver).
    BigInt euler_work_budget = BigInt("50000000000");
};

// Local reduction data at one place (finite or infinite).
LocalData reduction_at(const WeierstrassModel& m, const Place& v);

// All places of bad reduction, infinity included, ordered by (degree, lex)
// with the infinite place first.
std::vector<LocalData> bad_places(const WeierstrassModel& m);

// Sum of conductor exponents times place degrees.  Errors on constant curves.
int conductor_degree(const WeierstrassModel& m);

// Frobenius trace at a good place via the quadratic-character sum.
int64_t fiber_trace(const WeierstrassModel& m, const Place& v);

// Dirichlet coefficients c_0..c_max_deg of the L-series, straight from the
// truncated Euler product (no functional equation involved).
std::vector<BigInt> dirichlet_coefficients(const WeierstrassModel& m, int max_deg,
                                           const LOptions& opts = {});

LPolynomial l_polynomial(const WeierstrassModel& m, const LOptions& opts = {});

// Torsion bound from the first `budget_places` good places (by degree, lex,
// infinity first) plus the explicit 2-/3-torsion search.
TorsionReport torsion_bound(const WeierstrassModel& m, int budget_places = 16);

// Exact multiplicity of the factor (1 - qT); exposed for direct checks.
int analytic_rank_of(const std::vector<BigInt>& coeffs, uint64_t q);

}  // namespace ffec
