#include "ffec/gf.hpp"

#include <algorithm>
#include <random>

namespace ffec {

namespace {

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d : {2ull, 3ull, 5ull, 7ull}) {
        if (n % d == 0) return n == d;
    }
    for (uint64_t d = 11; d * d <= n; d += 2) {
        if (n % d == 0) return false;
    }
    return true;
}

std::vector<uint64_t> prime_factors(uint64_t n) {
    std::vector<uint64_t> out;
    for (uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

// ---- dense polynomials over Z/p (ascending coefficients, used only for
// ---- modulus construction; p < 2^20 whenever e >= 2, so products fit).

using ZpPoly = std::vector<uint64_t>;

void zp_trim(ZpPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

ZpPoly zp_mulmod(const ZpPoly& a, const ZpPoly& b, const ZpPoly& mod, uint64_t p) {
    if (a.empty() || b.empty()) return {};
    ZpPoly prod(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j)
            prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
    }
    // reduce by the monic modulus
    size_t m = mod.size() - 1;
    for (size_t d = prod.size(); d-- > m;) {
        uint64_t c = prod[d];
        if (!c) continue;
        prod[d] = 0;
        for (size_t j = 0; j < m; ++j)
            prod[d - m + j] = (prod[d - m + j] + (p - mod[j] % p) * c) % p;
    }
    prod.resize(m);
    zp_trim(prod);
    return prod;
}

ZpPoly zp_powmod(ZpPoly base, uint64_t exp, const ZpPoly& mod, uint64_t p) {
    ZpPoly r{1};
    while (exp) {
        if (exp & 1) r = zp_mulmod(r, base, mod, p);
        base = zp_mulmod(base, base, mod, p);
        exp >>= 1;
    }
    return r;
}

ZpPoly zp_sub(ZpPoly a, const ZpPoly& b, uint64_t p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
    zp_trim(a);
    return a;
}

ZpPoly zp_gcd(ZpPoly a, ZpPoly b, uint64_t p) {
    auto inv_mod_p = [p](uint64_t x) {
        // extended euclid
        int64_t t0 = 0, t1 = 1, r0 = int64_t(p), r1 = int64_t(x);
        while (r1) {
            int64_t qq = r0 / r1;
            r0 -= qq * r1;
            std::swap(r0, r1);
            t0 -= qq * t1;
            std::swap(t0, t1);
        }
        return uint64_t((t0 % int64_t(p) + int64_t(p)) % int64_t(p));
    };
    while (!b.empty()) {
        // a mod b
        uint64_t lcinv = inv_mod_p(b.back());
        while (a.size() >= b.size()) {
            uint64_t c = (a.back() * lcinv) % p;
            if (c) {
                size_t off = a.size() - b.size();
                for (size_t j = 0; j < b.size(); ++j)
                    a[off + j] = (a[off + j] + (p - (b[j] * c) % p)) % p;
            }
            a.pop_back();
            zp_trim(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
    }
    return a;
}

// x^{p^k} mod f by iterated Frobenius powering.
ZpPoly zp_frob_power(unsigned k, const ZpPoly& f, uint64_t p) {
    ZpPoly x{0, 1};
    ZpPoly h = x;
    for (unsigned i = 0; i < k; ++i) h = zp_powmod(h, p, f, p);
    return h;
}

// Rabin irreducibility test for monic f over Z/p.
bool zp_irreducible(const ZpPoly& f, uint64_t p) {
    unsigned m = unsigned(f.size() - 1);
    if (m == 0) return false;
    ZpPoly x{0, 1};
    ZpPoly xqm = zp_frob_power(m, f, p);
    if (!zp_sub(xqm, x, p).empty()) return false;
    for (uint64_t r : prime_factors(m)) {
        ZpPoly h = zp_frob_power(unsigned(m / r), f, p);
        ZpPoly g = zp_gcd(zp_sub(h, x, p), f, p);
        if (g.size() != 1) return false;
    }
    return true;
}

}  // namespace

struct Field::Impl {
    uint64_t p = 0;
    unsigned e = 1;
    uint64_t q = 0;
    std::vector<uint64_t> modulus;  // ascending, size e+1, monic
    uint64_t gen = 0;
    std::vector<uint32_t> exp_tab;  // size q-1 when tables built
    std::vector<uint32_t> log_tab;  // size q
    std::shared_ptr<const Impl> base;  // set for fields built by extend()
    std::vector<uint64_t> embed_tab;   // base idx -> idx, when base->q small
    uint64_t base_root = 0;            // image of the base modulus root
    size_t hash = 0;

    std::vector<uint64_t> digits(uint64_t idx) const {
        std::vector<uint64_t> d(e);
        for (unsigned i = 0; i < e; ++i) {
            d[i] = idx % p;
            idx /= p;
        }
        return d;
    }
    uint64_t from_digits(std::span<const uint64_t> d) const {
        uint64_t idx = 0;
        for (size_t i = d.size(); i-- > 0;) idx = idx * p + d[i] % p;
        return idx;
    }

    uint64_t add(uint64_t a, uint64_t b) const {
        if (e == 1) {
            uint64_t s = a + b;
            return s >= p ? s - p : s;
        }
        uint64_t out = 0, mult = 1;
        for (unsigned i = 0; i < e; ++i) {
            uint64_t s = a % p + b % p;
            if (s >= p) s -= p;
            out += s * mult;
            mult *= p;
            a /= p;
            b /= p;
        }
        return out;
    }
    uint64_t neg(uint64_t a) const {
        if (e == 1) return a ? p - a : 0;
        uint64_t out = 0, mult = 1;
        for (unsigned i = 0; i < e; ++i) {
            uint64_t d = a % p;
            out += (d ? p - d : 0) * mult;
            mult *= p;
            a /= p;
        }
        return out;
    }
    uint64_t sub(uint64_t a, uint64_t b) const { return add(a, neg(b)); }

    uint64_t mul_digits(uint64_t a, uint64_t b) const {
        // coefficient-vector product reduced by the monic modulus
        std::vector<uint64_t> da = digits(a), db = digits(b);
        std::vector<uint64_t> prod(2 * e - 1, 0);
        for (unsigned i = 0; i < e; ++i) {
            if (!da[i]) continue;
            for (unsigned j = 0; j < e; ++j)
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
        for (size_t d = prod.size(); d-- > e;) {
            uint64_t c = prod[d];
            if (!c) continue;
            prod[d] = 0;
            for (unsigned j = 0; j < e; ++j)
                prod[d - e + j] = (prod[d - e + j] + (p - modulus[j]) * c) % p;
        }
        prod.resize(e);
        return from_digits(prod);
    }

    uint64_t mul(uint64_t a, uint64_t b) const {
        if (a == 0 || b == 0) return 0;
        if (e == 1) {
            if (p < (uint64_t(1) << 32)) return (a * b) % p;
            return uint64_t((unsigned __int128)a * b % p);
        }
        if (!exp_tab.empty()) {
            uint64_t k = uint64_t(log_tab[a]) + log_tab[b];
            uint64_t M = q - 1;
            if (k >= M) k -= M;
            return exp_tab[k];
        }
        return mul_digits(a, b);
    }

    uint64_t pow(uint64_t a, uint64_t exp) const {
        if (!exp_tab.empty() && a != 0) {
            uint64_t M = q - 1;
            uint64_t k = (unsigned __int128)(log_tab[a]) * (exp % M) % M;
            return exp_tab[k];
        }
        uint64_t r = 1;
        while (exp) {
            if (exp & 1) r = mul(r, a);
            a = mul(a, a);
            exp >>= 1;
        }
        return r;
    }

    uint64_t inv(uint64_t a) const {
        if (a == 0) throw FieldError("inversion of zero");
        if (!exp_tab.empty()) {
            uint64_t l = log_tab[a];
            return l == 0 ? a : exp_tab[q - 1 - l];
        }
        return pow(a, q - 2);
    }
};

namespace {

uint64_t find_generator(const Field::Impl& f) {
    std::vector<uint64_t> fac = prime_factors(f.q - 1);
    for (uint64_t cand = 1; cand < f.q; ++cand) {
        bool primitive = true;
        for (uint64_t r : fac) {
            if (f.pow(cand, (f.q - 1) / r) == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) return cand;
    }
    throw FieldError("no generator found");
}

void build_tables(Field::Impl& f) {
    if (f.q > Field::kTableLimit) return;
    f.gen = find_generator(f);
    f.exp_tab.resize(f.q - 1);
    f.log_tab.assign(f.q, 0);
    uint64_t cur = 1;
    for (uint64_t k = 0; k < f.q - 1; ++k) {
        f.exp_tab[k] = uint32_t(cur);
        f.log_tab[cur] = uint32_t(k);
        cur = f.e == 1 ? (cur * f.gen) % f.p : f.mul_digits(cur, f.gen);
    }
}

size_t hash_field(const Field::Impl& f) {
    size_t h = std::hash<uint64_t>()(f.p) * 1000003u + f.e;
    for (uint64_t c : f.modulus) h = h * 1000003u + std::hash<uint64_t>()(c);
    return h;
}

std::shared_ptr<Field::Impl> make_impl(uint64_t p, unsigned e) {
    if (p <= 3) throw FieldError("characteristic must exceed 3");
    if (!is_prime_u64(p)) throw FieldError("p must be prime");
    if (e < 1) throw FieldError("extension degree must be >= 1");
    // overflow-checked q = p^e
    unsigned __int128 q = 1;
    for (unsigned i = 0; i < e; ++i) {
        q *= p;
        if (q > Field::kMaxQ)
            throw FieldError("field size exceeds the supported bound 2^40");
    }
    auto impl = std::make_shared<Field::Impl>();
    impl->p = p;
    impl->e = e;
    impl->q = uint64_t(q);
    if (e == 1) {
        impl->modulus = {0, 1};  // convention polynomial t, unused
    } else {
        // lexicographically smallest monic irreducible of degree e
        ZpPoly cand(e + 1, 0);
        cand[e] = 1;
        bool found = false;
        // low-to-high coefficient comparison: c_0 is the most significant
        // digit of the scan index; c_0 = 0 means t | f, so start past that block
        uint64_t start = 1;
        for (unsigned i = 0; i + 1 < e; ++i) start *= p;
        for (uint64_t idx = start; idx < uint64_t(q) && !found; ++idx) {
            uint64_t v = idx;
            for (unsigned i = e; i-- > 0;) {
                cand[i] = v % p;
                v /= p;
            }
            if (zp_irreducible(cand, p)) {
                impl->modulus = cand;
                found = true;
            }
        }
        if (!found) throw FieldError("no irreducible modulus found");
    }
    build_tables(*impl);
    impl->hash = hash_field(*impl);
    return impl;
}

}  // namespace

Field Field::make(uint64_t p, unsigned e) { return Field(make_impl(p, e)); }

Field Field::parse(const std::string& label) {
    size_t caret = label.find('^');
    try {
        if (caret == std::string::npos)
            return make(std::stoull(label), 1);
        return make(std::stoull(label.substr(0, caret)),
                    unsigned(std::stoul(label.substr(caret + 1))));
    } catch (const std::invalid_argument&) {
        throw FieldError("cannot parse field label '" + label + "'");
    } catch (const std::out_of_range&) {
        throw FieldError("cannot parse field label '" + label + "'");
    }
}

uint64_t Field::p() const { return impl_->p; }
unsigned Field::e() const { return impl_->e; }
uint64_t Field::q() const { return impl_->q; }
const std::vector<uint64_t>& Field::modulus() const { return impl_->modulus; }

std::string Field::label() const {
    if (impl_->e == 1) return std::to_string(impl_->p);
    return std::to_string(impl_->p) + "^" + std::to_string(impl_->e);
}

bool Field::operator==(const Field& o) const {
    if (impl_ == o.impl_) return true;
    if (!impl_ || !o.impl_) return false;
    return impl_->hash == o.impl_->hash && impl_->p == o.impl_->p &&
           impl_->e == o.impl_->e && impl_->modulus == o.impl_->modulus;
}

FieldElement Field::element(uint64_t idx) const {
    if (idx >= impl_->q) throw FieldError("element index out of range");
    return FieldElement(*this, idx);
}
FieldElement Field::zero() const { return FieldElement(*this, 0); }
FieldElement Field::one() const { return FieldElement(*this, 1); }

FieldElement Field::from_int(int64_t v) const {
    int64_t m = int64_t(impl_->p);
    int64_t r = v % m;
    if (r < 0) r += m;
    return FieldElement(*this, uint64_t(r));
}

uint64_t Field::add(uint64_t a, uint64_t b) const { return impl_->add(a, b); }
uint64_t Field::sub(uint64_t a, uint64_t b) const { return impl_->sub(a, b); }
uint64_t Field::neg(uint64_t a) const { return impl_->neg(a); }
uint64_t Field::mul(uint64_t a, uint64_t b) const { return impl_->mul(a, b); }
uint64_t Field::inv(uint64_t a) const { return impl_->inv(a); }
uint64_t Field::pow(uint64_t a, uint64_t exp) const { return impl_->pow(a, exp); }

int Field::quadratic_character(uint64_t a) const {
    if (a == 0) return 0;
    if (!impl_->exp_tab.empty()) return (impl_->log_tab[a] & 1) ? -1 : +1;
    return impl_->pow(a, (impl_->q - 1) / 2) == 1 ? +1 : -1;
}

uint64_t Field::generator() const {
    if (impl_->gen == 0 && impl_->exp_tab.empty())
        return find_generator(*impl_);
    return impl_->gen;
}

bool Field::has_log_tables() const { return !impl_->exp_tab.empty(); }
std::span<const uint32_t> Field::log_table() const { return impl_->log_tab; }
std::span<const uint32_t> Field::exp_table() const { return impl_->exp_tab; }

std::vector<uint64_t> Field::digits(uint64_t idx) const { return impl_->digits(idx); }
uint64_t Field::from_digits(std::span<const uint64_t> d) const {
    return impl_->from_digits(d);
}

size_t Field::hash() const { return impl_->hash; }

bool Field::has_base() const { return impl_->base != nullptr; }
Field Field::base() const {
    if (!impl_->base) throw FieldError("field has no recorded base");
    return Field(impl_->base);
}

uint64_t Field::embed_from_base(uint64_t base_idx) const {
    const Impl& f = *impl_;
    if (!f.base) throw FieldError("field has no recorded base");
    if (!f.embed_tab.empty()) return f.embed_tab[base_idx];
    // Horner over the base digits at the embedded modulus root
    std::vector<uint64_t> d = f.base->digits(base_idx);
    uint64_t acc = 0;
    for (size_t i = d.size(); i-- > 0;) acc = f.add(f.mul(acc, f.base_root), d[i]);
    return acc;
}

namespace {

// Finds the smallest-index root in `big` of the base modulus (a monic
// irreducible over F_p that splits completely in `big`).  Cantor-Zassenhaus
// degree-one splitting with a fixed seed; the result is canonical regardless
// of the random choices because all roots are collected.
uint64_t canonical_modulus_root(const Field& big, const std::vector<uint64_t>& mod_fp,
                                uint64_t p, unsigned deg) {
    using EPoly = std::vector<uint64_t>;  // ascending element indices over big
    auto trim = [](EPoly& f) { while (!f.empty() && f.back() == 0) f.pop_back(); };
    auto mulmod = [&](const EPoly& a, const EPoly& b, const EPoly& m) {
        EPoly prod(a.size() + b.size() - 1, 0);
        for (size_t i = 0; i < a.size(); ++i) {
            if (!a[i]) continue;
            for (size_t j = 0; j < b.size(); ++j)
                if (b[j]) prod[i + j] = big.add(prod[i + j], big.mul(a[i], b[j]));
        }
        size_t md = m.size() - 1;
        for (size_t d = prod.size(); d-- > md;) {
            uint64_t c = prod[d];
            if (!c) continue;
            prod[d] = 0;
            for (size_t j = 0; j < md; ++j)
                prod[d - md + j] = big.add(prod[d - md + j], big.mul(big.neg(m[j]), c));
        }
        prod.resize(md);
        trim(prod);
        return prod;
    };
    auto powmod = [&](EPoly base, uint64_t exp, const EPoly& m) {
        EPoly r{1};
        while (exp) {
            if (exp & 1) r = mulmod(r, base, m);
            base = mulmod(base, base, m);
            exp >>= 1;
        }
        return r;
    };
    auto gcd = [&](EPoly a, EPoly b) {
        while (!b.empty()) {
            uint64_t lcinv = big.inv(b.back());
            while (a.size() >= b.size()) {
                uint64_t c = big.mul(a.back(), lcinv);
                if (c) {
                    size_t off = a.size() - b.size();
                    for (size_t j = 0; j < b.size(); ++j)
                        a[off + j] = big.sub(a[off + j], big.mul(b[j], c));
                }
                a.pop_back();
                trim(a);
                if (a.empty()) break;
            }
            std::swap(a, b);
        }
        if (!a.empty() && a.back() != 1) {
            uint64_t lcinv = big.inv(a.back());
            for (auto& c : a) c = big.mul(c, lcinv);
        }
        return a;
    };

    EPoly f(mod_fp.begin(), mod_fp.end());  // F_p coefficients are indices
    std::mt19937_64 rng(0xffec0011u);
    std::vector<EPoly> stack{f}, linear;
    while (!stack.empty()) {
        EPoly g = stack.back();
        stack.pop_back();
        if (g.size() == 2) {
            linear.push_back(g);
            continue;
        }
        // random split
        EPoly u(g.size() - 1, 0);
        for (auto& c : u) c = rng() % big.q();
        trim(u);
        if (u.empty()) {
            stack.push_back(g);
            continue;
        }
        EPoly h = powmod(u, (big.q() - 1) / 2, g);
        if (!h.empty()) h[0] = big.sub(h[0], 1);
        trim(h);
        EPoly w = gcd(h, g);
        if (w.empty() || w.size() == 1 || w.size() == g.size()) {
            stack.push_back(g);
            continue;
        }
        // g / w
        EPoly rem = g, quot(g.size() - w.size() + 1, 0);
        while (rem.size() >= w.size()) {
            uint64_t c = big.mul(rem.back(), big.inv(w.back()));
            quot[rem.size() - w.size()] = c;
            size_t off = rem.size() - w.size();
            for (size_t j = 0; j < w.size(); ++j)
                rem[off + j] = big.sub(rem[off + j], big.mul(w[j], c));
            rem.pop_back();
            trim(rem);
            if (rem.empty()) break;
        }
        trim(quot);
        stack.push_back(w);
        stack.push_back(quot);
    }
    if (linear.size() != deg) throw FieldError("modulus root extraction failed");
    uint64_t best = UINT64_MAX;
    for (const EPoly& l : linear) {
        // root of c0 + x is -c0 (monic linear after gcd normalization)
        uint64_t root = big.neg(l[0]);
        best = std::min(best, root);
    }
    return best;
}

}  // namespace

Field Field::extend(unsigned k) const {
    if (k < 1) throw FieldError("extension degree must be >= 1");
    if (k == 1) return *this;
    const Impl& f = *impl_;
    auto big = make_impl(f.p, f.e * k);  // throws past the size bound
    big->base = impl_;
    if (f.e == 1) {
        big->base_root = 0;  // constants embed as themselves
    } else {
        big->base_root =
            canonical_modulus_root(Field(big), f.modulus, f.p, f.e);
    }
    if (f.q <= kTableLimit) {
        big->embed_tab.resize(f.q);
        for (uint64_t i = 0; i < f.q; ++i) {
            if (f.e == 1) {
                big->embed_tab[i] = i;
            } else {
                std::vector<uint64_t> d = f.digits(i);
                uint64_t acc = 0;
                for (size_t j = d.size(); j-- > 0;)
                    acc = big->add(big->mul(acc, big->base_root), d[j]);
                big->embed_tab[i] = acc;
            }
        }
    }
    return Field(big);
}

// ---- FieldElement

namespace {
void check_same(const Field& a, const Field& b) {
    if (a != b) throw FieldError("operands belong to different fields");
}
}  // namespace

FieldElement FieldElement::operator+(const FieldElement& o) const {
    check_same(field_, o.field());
    return FieldElement(field_, field_.add(idx_, o.index()));
}
FieldElement FieldElement::operator-(const FieldElement& o) const {
    check_same(field_, o.field());
    return FieldElement(field_, field_.sub(idx_, o.index()));
}
FieldElement FieldElement::operator*(const FieldElement& o) const {
    check_same(field_, o.field());
    return FieldElement(field_, field_.mul(idx_, o.index()));
}
FieldElement FieldElement::operator-() const {
    return FieldElement(field_, field_.neg(idx_));
}
FieldElement FieldElement::inverse() const {
    return FieldElement(field_, field_.inv(idx_));
}
FieldElement FieldElement::pow(uint64_t e) const {
    return FieldElement(field_, field_.pow(idx_, e));
}
bool FieldElement::operator==(const FieldElement& o) const {
    check_same(field_, o.field());
    return idx_ == o.index();
}

int delta(uint64_t x, const Field& f) {
    if (x == 0) throw FieldError("delta is undefined at x = 0");
    return (f.q() - 1) % x == 0 ? 1 : 0;
}

int quadratic_character(const FieldElement& a) {
    return a.field().quadratic_character(a.index());
}

FieldElement embed(const FieldElement& x, const Field& ext) {
    if (x.field() == ext) return x;
    if (!ext.has_base() || ext.base() != x.field())
        throw FieldError("no embedding from this field");
    return FieldElement(ext, ext.embed_from_base(x.index()));
}

}  // namespace ffec
