#pragma once

// Arithmetic in F_q, q = p^e with p prime > 3, and in extensions F_{q^k}.
//
// Elements are handled through their canonical index i(x) in [0, q): the
// base-p evaluation of the coefficient vector of x over Z/p.  Fields up to
// q <= 2^21 carry discrete log/exp tables (multiplication and character are
// O(1)); larger fields, up to the supported bound q <= 2^40, fall back to
// digit-vector arithmetic.

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ffec {

struct FieldError : std::runtime_error {
    explicit FieldError(const std::string& msg) : std::runtime_error(msg) {}
};

class FieldElement;

class Field {
  public:
    // Largest representable field size q^k.
    static constexpr uint64_t kMaxQ = uint64_t(1) << 40;
    // Fields up to this size get log/exp tables.
    static constexpr uint64_t kTableLimit = uint64_t(1) << 21;

    Field() = default;

    // Builds F_{p^e} with the canonical modulus: the lexicographically
    // smallest monic irreducible of degree e over F_p (coefficients compared
    // low-to-high as integers).  Rejects p <= 3, p composite, e < 1.
    static Field make(uint64_t p, unsigned e);

    // Parses "p" or "p^e".
    static Field parse(const std::string& label);

    bool valid() const { return impl_ != nullptr; }
    uint64_t p() const;
    unsigned e() const;
    uint64_t q() const;
    // Ascending coefficients of the modulus, length e+1, monic.  For e = 1
    // this is the unused convention polynomial t.
    const std::vector<uint64_t>& modulus() const;
    std::string label() const;  // "5", "5^2", ...

    // Structural equality: same (p, e, modulus).
    bool operator==(const Field& o) const;
    bool operator!=(const Field& o) const { return !(*this == o); }

    FieldElement element(uint64_t idx) const;
    FieldElement zero() const;
    FieldElement one() const;
    // Reduction of an integer into the prime subfield.
    FieldElement from_int(int64_t v) const;

    // Index-level arithmetic.
    uint64_t add(uint64_t a, uint64_t b) const;
    uint64_t sub(uint64_t a, uint64_t b) const;
    uint64_t neg(uint64_t a) const;
    uint64_t mul(uint64_t a, uint64_t b) const;
    uint64_t inv(uint64_t a) const;  // throws on 0
    uint64_t pow(uint64_t a, uint64_t exp) const;
    // 0 for 0, +1 for nonzero squares, -1 otherwise.
    int quadratic_character(uint64_t a) const;

    // Smallest-index primitive element.
    uint64_t generator() const;
    bool has_log_tables() const;
    // log_table()[x] = discrete log of x base generator(), defined for x >= 1;
    // exp_table()[k] = index of generator^k, k in [0, q-1).
    std::span<const uint32_t> log_table() const;
    std::span<const uint32_t> exp_table() const;

    // F_{q^k} together with the canonical embedding (the base modulus root of
    // smallest index).  k = 1 returns *this.  Throws when q^k > kMaxQ.
    Field extend(unsigned k) const;
    // Fields produced by extend() remember their base.
    bool has_base() const;
    Field base() const;
    uint64_t embed_from_base(uint64_t base_idx) const;

    std::vector<uint64_t> digits(uint64_t idx) const;      // length e over Z/p
    uint64_t from_digits(std::span<const uint64_t>) const;

    size_t hash() const;

    struct Impl;  // defined in gf.cpp

  private:
    explicit Field(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
    friend class FieldElement;
};

class FieldElement {
  public:
    FieldElement() = default;
    FieldElement(Field f, uint64_t idx) : field_(std::move(f)), idx_(idx) {}

    const Field& field() const { return field_; }
    uint64_t index() const { return idx_; }
    bool is_zero() const { return idx_ == 0; }
    std::vector<uint64_t> digits() const { return field_.digits(idx_); }

    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement operator-() const;
    FieldElement inverse() const;
    FieldElement pow(uint64_t e) const;
    bool operator==(const FieldElement& o) const;
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

  private:
    Field field_;
    uint64_t idx_ = 0;
};

// The paper's delta function: 1 iff x divides q - 1.  Rejects x = 0.
int delta(uint64_t x, const Field& f);

// Quadratic character of an element.
int quadratic_character(const FieldElement& a);

// Embeds an element of ext.base() into ext.
FieldElement embed(const FieldElement& x, const Field& ext);

}  // namespace ffec
