#include "doctest.h"
#include "ffec/poly.hpp"

#include <map>
#include <random>
#include <set>

using namespace ffec;

namespace {
Poly random_poly(const Field& f, int max_deg, std::mt19937_64& rng) {
    int d = int(rng() % uint64_t(max_deg + 1));
    std::vector<uint64_t> c(size_t(d) + 1);
    for (auto& x : c) x = rng() % f.q();
    return Poly(f, std::move(c));
}
}  // namespace

TEST_CASE("basic ring operations") {
    Field f5 = Field::make(5, 1);
    Poly t = Poly::t(f5);

    // gcd(t^2 - 1, t - 1) = t + 4
    Poly f = Poly::from_ints(f5, {-1, 0, 1});
    Poly g = Poly::from_ints(f5, {-1, 1});
    CHECK(gcd(f, g) == Poly::from_ints(f5, {4, 1}));

    // divrem(t^3, t^2) = (t, 0)
    auto [q, r] = (t * t * t).divrem(t * t);
    CHECK(q == t);
    CHECK(r.is_zero());

    // (t+1)(t+4) = t^2 + 4
    CHECK(Poly::from_ints(f5, {1, 1}) * Poly::from_ints(f5, {4, 1}) ==
          Poly::from_ints(f5, {4, 0, 1}));

    CHECK_THROWS_AS(t.divrem(Poly::zero(f5)), PolyError);
    CHECK(gcd(Poly::zero(f5), Poly::zero(f5)).is_zero());
    CHECK(Poly::zero(f5).degree() == Poly::kNegInfDeg);
}

TEST_CASE("factorization examples") {
    Field f5 = Field::make(5, 1);

    auto fac = factor(Poly::from_ints(f5, {4, 0, 1}));  // t^2 + 4
    REQUIRE(fac.size() == 2);
    CHECK(fac[0].first == Poly::from_ints(f5, {1, 1}));
    CHECK(fac[0].second == 1);
    CHECK(fac[1].first == Poly::from_ints(f5, {4, 1}));
    CHECK(fac[1].second == 1);

    auto irr = factor(Poly::from_ints(f5, {3, 0, 1}));  // t^2 + 3 irreducible
    REQUIRE(irr.size() == 1);
    CHECK(irr[0].first == Poly::from_ints(f5, {3, 0, 1}));
    CHECK(irr[0].second == 1);

    Poly lin = Poly::from_ints(f5, {1, 1});
    auto quartic = factor(lin * lin * lin * lin);
    REQUIRE(quartic.size() == 1);
    CHECK(quartic[0].first == lin);
    CHECK(quartic[0].second == 4);

    CHECK_THROWS_AS(factor(Poly::zero(f5)), PolyError);
}

TEST_CASE("factor round-trip on random polynomials") {
    for (auto [p, e] : {std::pair<uint64_t, unsigned>{5, 1}, {7, 1}, {5, 2}}) {
        Field f = Field::make(p, e);
        std::mt19937_64 rng(42 + p + e);
        int trials = (e == 1) ? 4000 : 2000;
        for (int i = 0; i < trials; ++i) {
            Poly g = random_poly(f, 12, rng);
            if (g.is_zero()) continue;
            Poly prod = Poly::constant(g.leading());
            for (const auto& [pi, m] : factor(g)) {
                CHECK(pi.is_monic());
                CHECK(is_irreducible(pi));
                for (int j = 0; j < m; ++j) prod = prod * pi;
            }
            CHECK(prod == g);
        }
    }
}

TEST_CASE("gcd and valuation identities") {
    Field f7 = Field::make(7, 1);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        Poly f = random_poly(f7, 6, rng);
        Poly g = random_poly(f7, 6, rng);
        Poly h = random_poly(f7, 4, rng);
        if (h.is_zero()) continue;
        CHECK(gcd(f * h, g * h) == h.monic() * gcd(f, g));
    }

    Field f5 = Field::make(5, 1);
    Poly t = Poly::t(f5);
    CHECK(valuation(t * t * t + t * t * t * t, t) == 3);
    CHECK(valuation(Poly::from_ints(f5, {4, 0, 1}), Poly::from_ints(f5, {1, 1})) == 1);
    CHECK(valuation(Poly::zero(f5), t) == Poly::kValInf);
    CHECK_THROWS_AS(valuation(t, Poly::from_ints(f5, {4, 0, 1})), PolyError);  // t^2+4 reducible
    CHECK_THROWS_AS(valuation(t, t.scaled(2)), PolyError);                     // not monic

    for (int i = 0; i < 200; ++i) {
        Poly f = random_poly(f5, 8, rng);
        Poly g = random_poly(f5, 8, rng);
        if (f.is_zero() || g.is_zero()) continue;
        Poly pi = Poly::from_ints(f5, {1, 1});
        CHECK(valuation(f * g, pi) == valuation(f, pi) + valuation(g, pi));
    }
}

TEST_CASE("evaluation") {
    Field f5 = Field::make(5, 1);
    Poly f = Poly::from_ints(f5, {1, 0, 1});  // t^2 + 1
    CHECK(f.evaluate(f5.element(2)).is_zero());
    Poly t = Poly::t(f5);
    for (uint64_t x = 0; x < 5; ++x)
        CHECK(t.evaluate(f5.element(x)).index() == x);

    Field f25 = f5.extend(2);
    Poly c = Poly::from_ints(f5, {3});
    for (uint64_t x = 0; x < 25; ++x)
        CHECK(c.evaluate(f25.element(x)).index() == f25.embed_from_base(3));
}

TEST_CASE("irreducible streams match the necklace count") {
    auto necklace = [](uint64_t q, int m) {
        auto mu = [](int n) {
            int result = 1;
            for (int p = 2; p * p <= n; ++p)
                if (n % p == 0) {
                    n /= p;
                    if (n % p == 0) return 0;
                    result = -result;
                }
            if (n > 1) result = -result;
            return result;
        };
        int64_t total = 0;
        for (int c = 1; c <= m; ++c)
            if (m % c == 0) {
                int64_t qq = 1;
                for (int i = 0; i < m / c; ++i) qq *= int64_t(q);
                total += mu(c) * qq;
            }
        return uint64_t(total / m);
    };

    Field f5 = Field::make(5, 1);
    auto deg1 = irreducibles_up_to(f5, 1);
    REQUIRE(deg1.size() == 5);
    for (uint64_t r = 0; r < 5; ++r) CHECK(deg1[r] == Poly(f5, {r, 1}));

    auto upto2 = irreducibles_up_to(f5, 2);
    CHECK(upto2.size() == 15);  // 5 linear + (25-5)/2 = 10 quadratics

    CHECK(irreducibles_up_to(Field::make(7, 1), 1).size() == 7);

    for (uint64_t q : {5, 7}) {
        Field f = Field::make(q, 1);
        auto all = irreducibles_up_to(f, 6);
        std::map<int, uint64_t> by_deg;
        std::set<std::string> distinct;
        for (const auto& pi : all) {
            ++by_deg[pi.degree()];
            distinct.insert(pi.to_string());
            CHECK(pi.is_monic());
        }
        CHECK(distinct.size() == all.size());
        for (int m = 1; m <= 6; ++m) CHECK(by_deg[m] == necklace(q, m));
        // ordering: (degree, lex)
        for (size_t i = 1; i < all.size(); ++i)
            CHECK(Poly::lex_less(all[i - 1], all[i]));
    }
}

TEST_CASE("index packing is the lex order") {
    Field f5 = Field::make(5, 1);
    // ascending index = ascending lex on (c_0, ..., c_{slots-1})
    uint64_t prev_idx = 0;
    Poly prev = poly_from_index(f5, 0, 3);
    for (uint64_t idx = 1; idx < 125; ++idx) {
        Poly cur = poly_from_index(f5, idx, 3);
        CHECK(poly_index(cur, 3) == idx);
        // lex on padded tuples
        std::vector<uint64_t> a = prev.coeffs(), b = cur.coeffs();
        a.resize(3);
        b.resize(3);
        CHECK(std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()));
        prev = cur;
        prev_idx = idx;
    }
    (void)prev_idx;
}

TEST_CASE("polynomial text round trip") {
    Field f5 = Field::make(5, 1);
    Poly f = Poly::from_ints(f5, {4, 0, 1});
    CHECK(f.to_string() == "[4,0,1]");
    CHECK(Poly::parse(f5, "[4,0,1]") == f);
    CHECK(Poly::parse(f5, "[]").is_zero());
    CHECK_THROWS_AS(Poly::parse(f5, "nope"), PolyError);
}
