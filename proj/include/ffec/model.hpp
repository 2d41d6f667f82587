#pragma once

// Weierstrass models (n, A, B) over P^1: discriminant, j-invariant, height,
// minimality, the F_q^* twist action, and isotriviality classification.

#include "ffec/bigint.hpp"
#include "ffec/poly.hpp"

namespace ffec {

struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class FamilyClass {
    Nonisotrivial,
    IsotrivialJ0,     // A = 0
    IsotrivialJ1728,  // B = 0
    IsotrivialOther,  // A, B != 0, j constant
};

const char* to_string(FamilyClass f);
FamilyClass family_from_string(const std::string&);

struct JInvariant {
    Poly num;  // 6912 A^3 over the monic-normalized denominator
    Poly den;  // 4 A^3 + 27 B^2, in lowest terms, monic
    bool constant;
};

class WeierstrassModel {
  public:
    // Validates deg A <= 4n, deg B <= 6n, Delta != 0.
    static WeierstrassModel make(Field f, int n, Poly A, Poly B);
    // "q=5;n=1;A=[1];B=[0,1]"
    static WeierstrassModel parse(const std::string& encoding);

    const Field& field() const { return field_; }
    int n() const { return n_; }
    const Poly& A() const { return a_; }
    const Poly& B() const { return b_; }

    // -16 (4A^3 + 27B^2); nonzero, deg <= 12n.
    const Poly& discriminant() const { return disc_; }
    JInvariant j_invariant() const;
    BigInt height() const;  // q^{12n}
    bool is_minimal() const;
    WeierstrassModel twist(const FieldElement& lambda) const;  // lambda != 0
    uint64_t stabilizer_order() const;
    WeierstrassModel canonical_rep() const;
    bool is_canonical() const;
    FamilyClass family() const;
    // A (resp. B) constant-or-zero, i.e. the model descends to F_q.
    bool is_constant_curve() const { return a_.degree() <= 0 && b_.degree() <= 0; }

    std::string encode() const;
    // Pair indices in the big-endian coefficient packing (4n+1 / 6n+1 slots).
    uint64_t a_index() const { return poly_index(a_, 4 * n_ + 1); }
    uint64_t b_index() const { return poly_index(b_, 6 * n_ + 1); }

    bool operator==(const WeierstrassModel& o) const {
        return n_ == o.n_ && a_ == o.a_ && b_ == o.b_;
    }

  private:
    WeierstrassModel(Field f, int n, Poly A, Poly B, Poly disc)
        : field_(std::move(f)), n_(n), a_(std::move(A)), b_(std::move(B)),
          disc_(std::move(disc)) {}
    Field field_;
    int n_ = 0;
    Poly a_, b_;
    Poly disc_;
};

// Raw discriminant of a coefficient pair (no model validation).
Poly discriminant_of(const Poly& A, const Poly& B);

// The coefficients of the flipped model at infinity: A*(s) = s^{4n} A(1/s),
// B*(s) = s^{6n} B(1/s).
Poly flip_at_infinity(const Poly& f, int slots_deg);

// Minimality of a raw pair at level n (shared by model and census).
bool pair_is_minimal(const Poly& A, const Poly& B, int n);

}  // namespace ffec
