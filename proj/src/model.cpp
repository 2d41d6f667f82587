#include "ffec/model.hpp"

#include <sstream>

namespace ffec {

const char* to_string(FamilyClass f) {
    switch (f) {
        case FamilyClass::Nonisotrivial: return "NONISOTRIVIAL";
        case FamilyClass::IsotrivialJ0: return "ISOTRIVIAL_J0";
        case FamilyClass::IsotrivialJ1728: return "ISOTRIVIAL_J1728";
        case FamilyClass::IsotrivialOther: return "ISOTRIVIAL_OTHER";
    }
    return "?";
}

FamilyClass family_from_string(const std::string& s) {
    if (s == "NONISOTRIVIAL") return FamilyClass::Nonisotrivial;
    if (s == "ISOTRIVIAL_J0") return FamilyClass::IsotrivialJ0;
    if (s == "ISOTRIVIAL_J1728") return FamilyClass::IsotrivialJ1728;
    if (s == "ISOTRIVIAL_OTHER") return FamilyClass::IsotrivialOther;
    throw ModelError("unknown family class: " + s);
}

Poly discriminant_of(const Poly& A, const Poly& B) {
    const Field& F = A.field();
    Poly a3 = A * A * A;
    Poly b2 = B * B;
    Poly inner = a3.scaled(F.from_int(4).index()) + b2.scaled(F.from_int(27).index());
    return inner.scaled(F.from_int(-16).index());
}

Poly flip_at_infinity(const Poly& f, int slots_deg) {
    const Field& F = f.field();
    if (f.degree() > slots_deg) throw ModelError("degree exceeds the section bound");
    std::vector<uint64_t> out(size_t(slots_deg) + 1, 0);
    for (int i = 0; i <= slots_deg; ++i) out[size_t(slots_deg - i)] = f.coeff(size_t(i));
    return Poly(F, std::move(out));
}

WeierstrassModel WeierstrassModel::make(Field f, int n, Poly A, Poly B) {
    if (n < 0) throw ModelError("twist level n must be >= 0");
    if (A.field() != f || B.field() != f)
        throw ModelError("coefficients belong to a different field");
    if (A.degree() > 4 * n) throw ModelError("deg A exceeds 4n");
    if (B.degree() > 6 * n) throw ModelError("deg B exceeds 6n");
    Poly disc = discriminant_of(A, B);
    if (disc.is_zero())
        throw ModelError("singular model: discriminant vanishes identically");
    return WeierstrassModel(std::move(f), n, std::move(A), std::move(B),
                            std::move(disc));
}

JInvariant WeierstrassModel::j_invariant() const {
    Poly a3 = a_ * a_ * a_;
    Poly num = a3.scaled(field_.from_int(6912).index());
    Poly den = disc_.scaled(field_.inv(field_.from_int(-16).index()));
    Poly g = gcd(num, den);
    if (!g.is_zero() && g.degree() > 0) {
        num = num.divrem(g).first;
        den = den.divrem(g).first;
    }
    // normalize the denominator monic
    uint64_t lcinv = field_.inv(den.leading().index());
    num = num.scaled(lcinv);
    den = den.scaled(lcinv);
    bool constant = num.degree() <= 0 && den.degree() <= 0;
    return JInvariant{std::move(num), std::move(den), constant};
}

BigInt WeierstrassModel::height() const {
    return big_pow(BigInt(field_.q()), unsigned(12 * n_));
}

bool pair_is_minimal(const Poly& A, const Poly& B, int n) {
    // infinity clause: deficits 4n - deg A, 6n - deg B, with v(0) = INF
    bool defA = A.is_zero() || 4 * n - A.degree() >= 4;
    bool defB = B.is_zero() || 6 * n - B.degree() >= 6;
    if (defA && defB) return false;
    // finite clause: some monic irreducible pi with v_pi(A) >= 4, v_pi(B) >= 6
    if (A.is_zero()) {
        for (const auto& [pi, m] : factor(B))   // B != 0 since Delta != 0
            if (m >= 6) return false;
        return true;
    }
    if (B.is_zero()) {
        for (const auto& [pi, m] : factor(A))
            if (m >= 4) return false;
        return true;
    }
    Poly g = gcd(A, B);
    if (g.degree() <= 0) return true;
    for (const auto& [pi, m] : factor(g)) {
        (void)m;
        int va = 0, vb = 0;
        Poly cur = A;
        while (true) {
            auto [q, r] = cur.divrem(pi);
            if (!r.is_zero()) break;
            cur = q;
            if (++va >= 4) break;
        }
        if (va < 4) continue;
        cur = B;
        while (true) {
            auto [q, r] = cur.divrem(pi);
            if (!r.is_zero()) break;
            cur = q;
            if (++vb >= 6) break;
        }
        if (vb >= 6) return false;
    }
    return true;
}

bool WeierstrassModel::is_minimal() const { return pair_is_minimal(a_, b_, n_); }

WeierstrassModel WeierstrassModel::twist(const FieldElement& lambda) const {
    if (lambda.field() != field_) throw ModelError("twist scalar from another field");
    if (lambda.is_zero()) throw ModelError("twist scalar must be nonzero");
    uint64_t l4 = field_.pow(lambda.index(), 4);
    uint64_t l6 = field_.pow(lambda.index(), 6);
    return make(field_, n_, a_.scaled(l4), b_.scaled(l6));
}

uint64_t WeierstrassModel::stabilizer_order() const {
    uint64_t m = field_.q() - 1;
    // #{lambda : lambda^4 A = A and lambda^6 B = B}; lambda^k = 1 has
    // gcd(k, q-1) solutions.
    auto gcd_u = [](uint64_t a, uint64_t b) {
        while (b) { a %= b; std::swap(a, b); }
        return a;
    };
    if (a_.is_zero() && b_.is_zero()) return m;  // unreachable: Delta != 0
    if (a_.is_zero()) return gcd_u(6, m);
    if (b_.is_zero()) return gcd_u(4, m);
    return gcd_u(2, m);
}

WeierstrassModel WeierstrassModel::canonical_rep() const {
    uint64_t best_ia = a_index(), best_ib = b_index();
    uint64_t best_l = 1;
    for (uint64_t l = 2; l < field_.q(); ++l) {
        uint64_t l4 = field_.pow(l, 4), l6 = field_.pow(l, 6);
        uint64_t ia = poly_index(a_.scaled(l4), 4 * n_ + 1);
        uint64_t ib = poly_index(b_.scaled(l6), 6 * n_ + 1);
        if (ia < best_ia || (ia == best_ia && ib < best_ib)) {
            best_ia = ia;
            best_ib = ib;
            best_l = l;
        }
    }
    if (best_l == 1) return *this;
    return twist(field_.element(best_l));
}

bool WeierstrassModel::is_canonical() const {
    uint64_t ia0 = a_index(), ib0 = b_index();
    for (uint64_t l = 2; l < field_.q(); ++l) {
        uint64_t l4 = field_.pow(l, 4), l6 = field_.pow(l, 6);
        uint64_t ia = poly_index(a_.scaled(l4), 4 * n_ + 1);
        uint64_t ib = poly_index(b_.scaled(l6), 6 * n_ + 1);
        if (ia < ia0 || (ia == ia0 && ib < ib0)) return false;
    }
    return true;
}

FamilyClass WeierstrassModel::family() const {
    if (a_.is_zero()) return FamilyClass::IsotrivialJ0;
    if (b_.is_zero()) return FamilyClass::IsotrivialJ1728;
    // j constant iff B^2 = c A^3: equal degrees and cross-scaled equality
    Poly a3 = a_ * a_ * a_;
    Poly b2 = b_ * b_;
    if (a3.degree() == b2.degree() &&
        a3.scaled(b2.leading().index()) == b2.scaled(a3.leading().index()))
        return FamilyClass::IsotrivialOther;
    return FamilyClass::Nonisotrivial;
}

std::string WeierstrassModel::encode() const {
    std::ostringstream os;
    os << "q=" << field_.label() << ";n=" << n_ << ";A=" << a_.to_string()
       << ";B=" << b_.to_string();
    return os.str();
}

WeierstrassModel WeierstrassModel::parse(const std::string& enc) {
    std::string q_part, n_part, a_part, b_part;
    std::istringstream is(enc);
    std::string tok;
    while (std::getline(is, tok, ';')) {
        size_t eq = tok.find('=');
        if (eq == std::string::npos) throw ModelError("malformed curve encoding");
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "q") q_part = val;
        else if (key == "n") n_part = val;
        else if (key == "A") a_part = val;
        else if (key == "B") b_part = val;
        else throw ModelError("unknown key '" + key + "' in curve encoding");
    }
    if (q_part.empty() || n_part.empty() || a_part.empty() || b_part.empty())
        throw ModelError("curve encoding must carry q, n, A, B");
    Field f = Field::parse(q_part);
    int n = std::stoi(n_part);
    return make(f, n, Poly::parse(f, a_part), Poly::parse(f, b_part));
}

}  // namespace ffec
