#pragma once

// Arithmetic, factorization, and valuation in F_q[t].

#include <limits>
#include <optional>
#include <utility>

#include "ffec/gf.hpp"

namespace ffec {

struct PolyError : std::runtime_error {
    explicit PolyError(const std::string& msg) : std::runtime_error(msg) {}
};

class Poly {
  public:
    // deg(0) sentinel; kept far from -1 so degree arithmetic on the zero
    // polynomial cannot masquerade as a small degree.
    static constexpr int kNegInfDeg = std::numeric_limits<int>::min() / 2;
    static constexpr int kValInf = std::numeric_limits<int>::max() / 2;

    Poly() = default;
    // Ascending coefficient indices; trailing zeros are stripped.
    Poly(Field f, std::vector<uint64_t> coeffs);

    static Poly zero(const Field& f) { return Poly(f, {}); }
    static Poly one(const Field& f) { return Poly(f, {1}); }
    static Poly t(const Field& f) { return Poly(f, {0, 1}); }
    static Poly constant(const FieldElement& c) {
        return Poly(c.field(), {c.index()});
    }
    // Integer coefficients reduced into the prime subfield.
    static Poly from_ints(const Field& f, const std::vector<int64_t>& cs);

    const Field& field() const { return field_; }
    const std::vector<uint64_t>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return c_.empty() ? kNegInfDeg : int(c_.size()) - 1; }
    uint64_t coeff(size_t i) const { return i < c_.size() ? c_[i] : 0; }
    FieldElement leading() const;
    bool is_monic() const { return !c_.empty() && c_.back() == 1; }

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator-() const;
    Poly scaled(uint64_t c) const;  // c * this
    bool operator==(const Poly& o) const;
    bool operator!=(const Poly& o) const { return !(*this == o); }

    // Quotient and remainder; f = s*g + r with deg r < deg g.  g != 0.
    std::pair<Poly, Poly> divrem(const Poly& g) const;
    Poly monic() const;  // zero stays zero
    Poly derivative() const;

    // Horner evaluation; x may live in this field or in an extension built
    // from it (coefficients are embedded first).
    FieldElement evaluate(const FieldElement& x) const;

    // Ascending-coefficient lex order (c0 first), the project-wide order on
    // polynomials of equal degree; shorter (lower-degree) polynomials first.
    static bool lex_less(const Poly& a, const Poly& b);

    std::string to_string() const;  // "[4,0,1]"
    static Poly parse(const Field& f, const std::string& text);

  private:
    Field field_;
    std::vector<uint64_t> c_;
};

// Monic gcd; gcd(0, 0) = 0.
Poly gcd(const Poly& f, const Poly& g);

// Monic irreducible factors with multiplicities, sorted by (degree, lex);
// the product times the leading coefficient of f reproduces f.  f != 0.
std::vector<std::pair<Poly, int>> factor(const Poly& f);

// Largest k with pi^k | f; kValInf for f = 0.  pi must be monic irreducible.
int valuation(const Poly& f, const Poly& pi);

bool is_irreducible(const Poly& f);

// Stateless-resumable stream of all monic irreducibles of degree <= max_deg,
// ordered by (degree, lex).
class IrreducibleStream {
  public:
    IrreducibleStream(Field f, int max_deg);
    std::optional<Poly> next();

  private:
    Field field_;
    int max_deg_;
    int deg_ = 1;
    uint64_t idx_ = 0;
};

std::vector<Poly> irreducibles_up_to(const Field& f, int max_deg);

// Big-endian index packing: ascending coefficients (c_0 .. c_{slots-1}) map
// to sum c_i q^{slots-1-i}, so ascending index order is ascending lex order
// on the coefficient tuple.
uint64_t poly_index(const Poly& f, int slots);
Poly poly_from_index(const Field& f, uint64_t idx, int slots);

}  // namespace ffec
