#include "ffec/poly.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "ffec/bigint.hpp"

namespace ffec {

namespace {
// Fixed seed for the equal-degree splitting element sequence; a fresh
// generator per factor() call keeps factorizations bit-reproducible.
constexpr uint64_t kFactorSeed = 0xec5eed02;

void check_same(const Field& a, const Field& b) {
    if (a != b) throw PolyError("polynomials belong to different fields");
}
}  // namespace

Poly::Poly(Field f, std::vector<uint64_t> coeffs)
    : field_(std::move(f)), c_(std::move(coeffs)) {
    for (uint64_t c : c_)
        if (c >= field_.q()) throw PolyError("coefficient index out of range");
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Poly Poly::from_ints(const Field& f, const std::vector<int64_t>& cs) {
    std::vector<uint64_t> idx(cs.size());
    for (size_t i = 0; i < cs.size(); ++i) idx[i] = f.from_int(cs[i]).index();
    return Poly(f, std::move(idx));
}

FieldElement Poly::leading() const {
    if (c_.empty()) return field_.zero();
    return field_.element(c_.back());
}

Poly Poly::operator+(const Poly& o) const {
    check_same(field_, o.field_);
    std::vector<uint64_t> out(std::max(c_.size(), o.c_.size()), 0);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = field_.add(coeff(i), o.coeff(i));
    return Poly(field_, std::move(out));
}

Poly Poly::operator-(const Poly& o) const {
    check_same(field_, o.field_);
    std::vector<uint64_t> out(std::max(c_.size(), o.c_.size()), 0);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = field_.sub(coeff(i), o.coeff(i));
    return Poly(field_, std::move(out));
}

Poly Poly::operator*(const Poly& o) const {
    check_same(field_, o.field_);
    if (c_.empty() || o.c_.empty()) return zero(field_);
    std::vector<uint64_t> out(c_.size() + o.c_.size() - 1, 0);
    for (size_t i = 0; i < c_.size(); ++i) {
        if (!c_[i]) continue;
        for (size_t j = 0; j < o.c_.size(); ++j)
            if (o.c_[j])
                out[i + j] = field_.add(out[i + j], field_.mul(c_[i], o.c_[j]));
    }
    return Poly(field_, std::move(out));
}

Poly Poly::operator-() const {
    std::vector<uint64_t> out(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) out[i] = field_.neg(c_[i]);
    return Poly(field_, std::move(out));
}

Poly Poly::scaled(uint64_t c) const {
    std::vector<uint64_t> out(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) out[i] = field_.mul(c_[i], c);
    return Poly(field_, std::move(out));
}

bool Poly::operator==(const Poly& o) const {
    check_same(field_, o.field_);
    return c_ == o.c_;
}

std::pair<Poly, Poly> Poly::divrem(const Poly& g) const {
    check_same(field_, g.field_);
    if (g.is_zero()) throw PolyError("division by the zero polynomial");
    if (degree() < g.degree()) return {zero(field_), *this};
    std::vector<uint64_t> rem = c_;
    size_t gs = g.c_.size();
    std::vector<uint64_t> quot(c_.size() - gs + 1, 0);
    uint64_t lcinv = field_.inv(g.c_.back());
    for (size_t d = rem.size(); d-- >= gs;) {
        uint64_t c = field_.mul(rem[d], lcinv);
        if (c) {
            size_t off = d + 1 - gs;
            quot[off] = c;
            for (size_t j = 0; j < gs; ++j)
                rem[off + j] = field_.sub(rem[off + j], field_.mul(g.c_[j], c));
        }
        if (d + 1 == gs) break;
    }
    return {Poly(field_, std::move(quot)), Poly(field_, std::move(rem))};
}

Poly Poly::monic() const {
    if (is_zero() || c_.back() == 1) return *this;
    return scaled(field_.inv(c_.back()));
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return zero(field_);
    std::vector<uint64_t> out(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) {
        FieldElement n = field_.from_int(int64_t(i));
        out[i - 1] = field_.mul(c_[i], n.index());
    }
    return Poly(field_, std::move(out));
}

FieldElement Poly::evaluate(const FieldElement& x) const {
    const Field& xf = x.field();
    if (xf == field_) {
        uint64_t acc = 0;
        for (size_t i = c_.size(); i-- > 0;)
            acc = field_.add(field_.mul(acc, x.index()), c_[i]);
        return FieldElement(field_, acc);
    }
    if (xf.has_base() && xf.base() == field_) {
        uint64_t acc = 0;
        for (size_t i = c_.size(); i-- > 0;)
            acc = xf.add(xf.mul(acc, x.index()), xf.embed_from_base(c_[i]));
        return FieldElement(xf, acc);
    }
    throw PolyError("evaluation point lives in an incompatible field");
}

bool Poly::lex_less(const Poly& a, const Poly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    for (size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i] != b.c_[i]) return a.c_[i] < b.c_[i];
    }
    return false;
}

std::string Poly::to_string() const {
    std::ostringstream os;
    os << '[';
    for (size_t i = 0; i < c_.size(); ++i) {
        if (i) os << ',';
        os << c_[i];
    }
    os << ']';
    return os.str();
}

Poly Poly::parse(const Field& f, const std::string& text) {
    size_t l = text.find('['), r = text.rfind(']');
    if (l == std::string::npos || r == std::string::npos || r < l)
        throw PolyError("malformed polynomial literal: " + text);
    std::vector<uint64_t> cs;
    std::string body = text.substr(l + 1, r - l - 1);
    std::istringstream is(body);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (tok.find_first_not_of(" \t") == std::string::npos) continue;
        long long v = std::stoll(tok);
        if (v < 0)
            cs.push_back(f.from_int(v).index());
        else if (uint64_t(v) < f.q())
            cs.push_back(uint64_t(v));
        else
            throw PolyError("coefficient out of range in " + text);
    }
    return Poly(f, std::move(cs));
}

Poly gcd(const Poly& f, const Poly& g) {
    Poly a = f, b = g;
    while (!b.is_zero()) {
        Poly r = a.divrem(b).second;
        a = b;
        b = r;
    }
    return a.monic();
}

int valuation(const Poly& f, const Poly& pi) {
    if (!pi.is_monic() || !is_irreducible(pi))
        throw PolyError("valuation requires a monic irreducible");
    if (f.is_zero()) return Poly::kValInf;
    int v = 0;
    Poly cur = f;
    while (true) {
        auto [q, r] = cur.divrem(pi);
        if (!r.is_zero()) return v;
        cur = q;
        ++v;
    }
}

namespace {

Poly powmod(Poly base, const BigInt& exp, const Poly& mod) {
    Poly r = Poly::one(base.field());
    BigInt e = exp;
    base = base.divrem(mod).second;
    while (e > 0) {
        if ((e & 1) != 0) r = (r * base).divrem(mod).second;
        base = (base * base).divrem(mod).second;
        e >>= 1;
    }
    return r;
}

// f = g(t^p) -> g, taking p-th roots of coefficients (x -> x^{q/p}).
Poly pth_root(const Poly& f) {
    const Field& F = f.field();
    uint64_t p = F.p();
    uint64_t root_exp = 1;
    for (unsigned i = 0; i + 1 < F.e(); ++i) root_exp *= p;  // p^{e-1}
    std::vector<uint64_t> out((f.coeffs().size() + p - 1) / p, 0);
    for (size_t i = 0; i < f.coeffs().size(); ++i) {
        if (f.coeffs()[i] == 0) continue;
        if (i % p != 0) throw PolyError("pth_root applied to a non-p-power");
        out[i / p] = F.pow(f.coeffs()[i], root_exp);
    }
    return Poly(F, std::move(out));
}

// Square-free decomposition of a monic f: list of (monic square-free g, m)
// with f = prod g^m.
void squarefree_decompose(const Poly& f, int outer_mult,
                          std::map<int, Poly>* out) {
    const Field& F = f.field();
    if (f.degree() <= 0) return;
    Poly fp = f.derivative();
    if (fp.is_zero()) {
        squarefree_decompose(pth_root(f), outer_mult * int(F.p()), out);
        return;
    }
    Poly g = gcd(f, fp);
    Poly w = f.divrem(g).first;
    int i = 1;
    while (w.degree() > 0) {
        Poly y = gcd(w, g);
        Poly z = w.divrem(y).first;
        if (z.degree() > 0) {
            auto it = out->find(i * outer_mult);
            if (it == out->end())
                out->emplace(i * outer_mult, z);
            else
                it->second = it->second * z;
        }
        w = y;
        g = g.divrem(y).first;
        ++i;
    }
    if (g.degree() > 0) squarefree_decompose(g, outer_mult, out);
}

// Distinct-degree split of a monic square-free f: (product, degree) pairs.
std::vector<std::pair<Poly, int>> distinct_degree(const Poly& f) {
    const Field& F = f.field();
    std::vector<std::pair<Poly, int>> out;
    Poly rest = f;
    Poly x = Poly::t(F);
    Poly h = x;
    int d = 0;
    while (rest.degree() > 0) {
        ++d;
        if (2 * d > rest.degree()) {
            out.emplace_back(rest, rest.degree());
            break;
        }
        h = powmod(h, BigInt(F.q()), rest);
        Poly g = gcd(h - x, rest);
        if (g.degree() > 0) {
            out.emplace_back(g, d);
            rest = rest.divrem(g).first;
            h = h.divrem(rest).second;
        }
    }
    return out;
}

// Cantor-Zassenhaus equal-degree splitting (q odd); g is a monic product of
// irreducibles all of degree d.
void equal_degree(const Poly& g, int d, std::mt19937_64& rng,
                  std::vector<Poly>* out) {
    const Field& F = g.field();
    if (g.degree() == d) {
        out->push_back(g);
        return;
    }
    BigInt exp = (big_pow(BigInt(F.q()), unsigned(d)) - 1) / 2;
    while (true) {
        std::vector<uint64_t> cs(size_t(g.degree()), 0);
        for (auto& c : cs) c = rng() % F.q();
        Poly u(F, std::move(cs));
        if (u.is_zero()) continue;
        Poly h = powmod(u, exp, g) - Poly::one(F);
        Poly w = gcd(h, g);
        if (w.degree() > 0 && w.degree() < g.degree()) {
            equal_degree(w, d, rng, out);
            equal_degree(g.divrem(w).first, d, rng, out);
            return;
        }
    }
}

}  // namespace

std::vector<std::pair<Poly, int>> factor(const Poly& f) {
    if (f.is_zero()) throw PolyError("cannot factor the zero polynomial");
    std::vector<std::pair<Poly, int>> result;
    if (f.degree() <= 0) return result;
    std::mt19937_64 rng(kFactorSeed);
    std::map<int, Poly> sqf;
    squarefree_decompose(f.monic(), 1, &sqf);
    for (auto& [mult, part] : sqf) {
        for (auto& [prod, d] : distinct_degree(part)) {
            std::vector<Poly> irreds;
            equal_degree(prod, d, rng, &irreds);
            for (Poly& pi : irreds) result.emplace_back(std::move(pi), mult);
        }
    }
    std::sort(result.begin(), result.end(), [](const auto& a, const auto& b) {
        return Poly::lex_less(a.first, b.first);
    });
    return result;
}

bool is_irreducible(const Poly& f) {
    const Field& F = f.field();
    int m = f.degree();
    if (m <= 0) return false;
    if (m == 1) return true;
    Poly fm = f.monic();
    Poly x = Poly::t(F);
    BigInt q(F.q());
    // Rabin: x^{q^m} = x mod f, and gcd(x^{q^{m/r}} - x, f) = 1 for primes r|m.
    std::vector<int> subs;
    int mm = m;
    for (int r = 2; r * r <= mm; ++r)
        if (mm % r == 0) {
            subs.push_back(m / r);
            while (mm % r == 0) mm /= r;
        }
    if (mm > 1) subs.push_back(m / mm);
    std::sort(subs.begin(), subs.end());
    subs.erase(std::unique(subs.begin(), subs.end()), subs.end());
    Poly h = x;
    size_t next = 0;
    for (int i = 1; i <= m; ++i) {
        h = powmod(h, q, fm);  // h = x^{q^i} mod fm
        while (next < subs.size() && subs[next] == i) {
            if (gcd(h - x, fm).degree() != 0) return false;
            ++next;
        }
    }
    return (h - x).is_zero();
}

IrreducibleStream::IrreducibleStream(Field f, int max_deg)
    : field_(std::move(f)), max_deg_(max_deg) {
    if (max_deg < 1) throw PolyError("irreducible stream needs degree >= 1");
}

std::optional<Poly> IrreducibleStream::next() {
    while (deg_ <= max_deg_) {
        uint64_t total = 1;
        for (int i = 0; i < deg_; ++i) total *= field_.q();
        while (idx_ < total) {
            Poly cand = poly_from_index(field_, idx_, deg_);
            ++idx_;
            std::vector<uint64_t> cs = cand.coeffs();
            cs.resize(size_t(deg_) + 1, 0);
            cs[size_t(deg_)] = 1;
            Poly monic_cand(field_, std::move(cs));
            if (deg_ == 1 || is_irreducible(monic_cand)) return monic_cand;
        }
        ++deg_;
        idx_ = 0;
    }
    return std::nullopt;
}

std::vector<Poly> irreducibles_up_to(const Field& f, int max_deg) {
    IrreducibleStream s(f, max_deg);
    std::vector<Poly> out;
    while (auto p = s.next()) out.push_back(std::move(*p));
    return out;
}

uint64_t poly_index(const Poly& f, int slots) {
    if (f.degree() >= slots)
        throw PolyError("polynomial does not fit the requested slot count");
    uint64_t q = f.field().q();
    uint64_t idx = 0;
    for (int i = 0; i < slots; ++i) idx = idx * q + f.coeff(size_t(i));
    return idx;
}

Poly poly_from_index(const Field& f, uint64_t idx, int slots) {
    uint64_t q = f.q();
    std::vector<uint64_t> cs(size_t(slots), 0);
    for (int i = slots - 1; i >= 0; --i) {
        cs[size_t(i)] = idx % q;  // lowest digit carries c_{slots-1}
        idx /= q;
    }
    return Poly(f, std::move(cs));
}

}  // namespace ffec
