#include "ffec/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

namespace ffec {

namespace {

uint64_t gcd_u(uint64_t a, uint64_t b) {
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a;
}

uint64_t modinv_u(uint64_t a, uint64_t m) {
    if (m == 1) return 0;
    int64_t t0 = 0, t1 = 1, r0 = int64_t(m), r1 = int64_t(a % m);
    while (r1) {
        int64_t q = r0 / r1;
        r0 -= q * r1;
        std::swap(r0, r1);
        t0 -= q * t1;
        std::swap(t0, t1);
    }
    if (r0 != 1)
        throw CurveError(CurveErrorCode::InternalCheck, "modular inverse of a non-unit");
    return uint64_t((t0 % int64_t(m) + int64_t(m)) % int64_t(m));
}

// valuation without the public irreducibility re-check
int val_raw(const Poly& f, const Poly& pi) {
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

uint64_t necklace_count(uint64_t q, int m) {
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
}

// ---------------- residue-field tables ----------------

struct ResidueLevel {
    int d = 1;
    Field ext;
    uint64_t Q = 0, M = 0;
    std::span<const uint32_t> lg, ex;
    std::vector<uint32_t> zech;   // zech[m] = log(1 + g^m), M when 1 + g^m = 0
    std::vector<uint64_t> embed;  // base index -> ext index
    struct PlaceRec {
        std::vector<uint64_t> pi;  // ascending coefficients over the base, monic
        uint64_t tau;              // smallest root index in the Frobenius orbit
    };
    std::vector<PlaceRec> places;                   // sorted by pi lex
    std::unordered_map<uint64_t, uint32_t> pi_pos;  // low-coefficient key -> slot
    mutable std::unordered_map<uint64_t, int64_t> trace_cache;
    mutable std::shared_mutex cache_mu;
};

uint64_t pi_key(const Field& base, const std::vector<uint64_t>& pi, int d) {
    uint64_t key = 0;
    for (int i = 0; i < d; ++i) key = key * base.q() + pi[size_t(i)];
    return key;
}

class PlaceTables {
  public:
    explicit PlaceTables(Field base) : base_(std::move(base)) {}

    const ResidueLevel& level(int d) {
        if (d < 1) throw std::invalid_argument("place degree must be >= 1");
        std::lock_guard<std::mutex> lock(build_mu_);
        if (size_t(d) > levels_.size()) levels_.resize(size_t(d));
        auto& slot = levels_[size_t(d) - 1];
        if (!slot) slot = build_level(d);
        return *slot;
    }

    // a_v of the good fiber y^2 = x^3 + a x + b over the residue field,
    // cached per orbit of (a, b) under (u^4 a, u^6 b) -- an isomorphism over
    // the residue field itself, so orbit members share the exact trace.
    int64_t trace(const ResidueLevel& L, uint64_t ai, uint64_t bi) const {
        uint64_t key = orbit_key(L, ai, bi);
        {
            std::shared_lock<std::shared_mutex> lock(L.cache_mu);
            auto it = L.trace_cache.find(key);
            if (it != L.trace_cache.end()) return it->second;
        }
        uint64_t mark = L.M + 1;
        uint64_t s1 = key / (L.M + 2), s2 = key % (L.M + 2);
        uint64_t ca = s1 == mark ? 0 : L.ex[s1];
        uint64_t cb = s2 == mark ? 0 : L.ex[s2];
        int64_t val = char_sum_trace(L, ca, cb);
        if (val * val > int64_t(4 * L.Q))
            throw CurveError(CurveErrorCode::InternalCheck,
                             "Hasse bound violated by a character sum");
        std::unique_lock<std::shared_mutex> lock(L.cache_mu);
        L.trace_cache.emplace(key, val);
        return val;
    }

  private:
    std::unique_ptr<ResidueLevel> build_level(int d) const {
        auto L = std::make_unique<ResidueLevel>();
        L->d = d;
        L->ext = d == 1 ? base_ : base_.extend(unsigned(d));
        if (!L->ext.has_log_tables())
            throw CurveError(CurveErrorCode::WorkBudget,
                             "residue field exceeds the log-table limit");
        L->Q = L->ext.q();
        L->M = L->Q - 1;
        L->lg = L->ext.log_table();
        L->ex = L->ext.exp_table();
        L->zech.resize(L->M);
        for (uint64_t m = 0; m < L->M; ++m) {
            uint64_t v = L->ext.add(1, L->ex[m]);
            L->zech[m] = v ? L->lg[v] : uint32_t(L->M);
        }
        L->embed.resize(base_.q());
        for (uint64_t i = 0; i < base_.q(); ++i)
            L->embed[i] = d == 1 ? i : L->ext.embed_from_base(i);
        std::unordered_map<uint64_t, uint64_t> inv_embed;
        inv_embed.reserve(base_.q() * 2);
        for (uint64_t i = 0; i < base_.q(); ++i) inv_embed[L->embed[i]] = i;

        uint64_t qb = base_.q();
        auto frob = [&](uint64_t idx) -> uint64_t {
            return idx ? L->ex[uint64_t(L->lg[idx]) * qb % L->M] : 0;
        };
        for (uint64_t idx = 0; idx < L->Q; ++idx) {
            uint64_t cur = frob(idx);
            int size = 1;
            bool is_min = true;
            while (cur != idx) {
                if (cur < idx) {
                    is_min = false;
                    break;
                }
                ++size;
                cur = frob(cur);
            }
            if (!is_min || size != d) continue;
            // minimal polynomial prod_i (X - tau^{q^i}), computed over ext
            std::vector<uint64_t> mp{1};
            uint64_t tau_i = idx;
            for (int i = 0; i < d; ++i) {
                std::vector<uint64_t> next(mp.size() + 1, 0);
                uint64_t neg_tau = L->ext.neg(tau_i);
                for (size_t j = 0; j < mp.size(); ++j) {
                    next[j + 1] = L->ext.add(next[j + 1], mp[j]);
                    next[j] = L->ext.add(next[j], L->ext.mul(mp[j], neg_tau));
                }
                mp = std::move(next);
                tau_i = frob(tau_i);
            }
            std::vector<uint64_t> pi(mp.size());
            for (size_t j = 0; j < mp.size(); ++j) {
                auto it = inv_embed.find(mp[j]);
                if (it == inv_embed.end())
                    throw CurveError(CurveErrorCode::InternalCheck,
                                     "minimal polynomial left the base field");
                pi[j] = it->second;
            }
            L->places.push_back({std::move(pi), idx});
        }
        if (L->places.size() != necklace_count(qb, d))
            throw CurveError(CurveErrorCode::InternalCheck,
                             "place enumeration disagrees with the necklace count");
        std::sort(L->places.begin(), L->places.end(),
                  [](const ResidueLevel::PlaceRec& a, const ResidueLevel::PlaceRec& b) {
                      return std::lexicographical_compare(a.pi.begin(), a.pi.end(),
                                                          b.pi.begin(), b.pi.end());
                  });
        L->pi_pos.reserve(L->places.size() * 2);
        for (size_t i = 0; i < L->places.size(); ++i)
            L->pi_pos[pi_key(base_, L->places[i].pi, d)] = uint32_t(i);
        return L;
    }

    // canonical key of the (a, b) orbit under (u^4 a, u^6 b)
    static uint64_t orbit_key(const ResidueLevel& L, uint64_t ai, uint64_t bi) {
        uint64_t M = L.M;
        uint64_t mark = M + 1;
        if (ai == 0 && bi == 0)
            throw CurveError(CurveErrorCode::InternalCheck, "singular fiber in trace");
        if (ai == 0) return mark * (M + 2) + L.lg[bi] % gcd_u(6, M);
        if (bi == 0) return (L.lg[ai] % gcd_u(4, M)) * (M + 2) + mark;
        uint64_t la = L.lg[ai], lb = L.lg[bi];
        uint64_t g4 = gcd_u(4, M);
        uint64_t step = M / g4;
        uint64_t la2 = la % g4;
        uint64_t diff = (la2 + M - la % M) % M;  // divisible by g4
        uint64_t m0 = (diff / g4) % step;
        m0 = m0 * modinv_u(4 / g4, step) % step;
        uint64_t lb2 = (lb + 6 * m0) % M;
        uint64_t G = gcd_u(6 * step % M, M);
        return la2 * (M + 2) + lb2 % G;
    }

    static int64_t char_sum_trace(const ResidueLevel& L, uint64_t ai, uint64_t bi) {
        const uint32_t* zech = L.zech.data();
        const uint32_t M = uint32_t(L.M);
        int64_t s = 0;
        if (ai == 0) {
            uint32_t lb = L.lg[bi];
            s += (lb & 1) ? -1 : +1;  // x = 0 term
            for (uint32_t k = 0; k < M; ++k) {
                // w = x^3 + b = b (1 + g^{3k - lb})
                uint32_t dm = uint32_t((3ull * k + M - lb) % M);
                uint32_t z = zech[dm];
                if (z == M) continue;
                uint32_t lw = uint32_t((uint64_t(lb) + z) % M);
                s += (lw & 1) ? -1 : +1;
            }
            return -s;
        }
        uint32_t la = L.lg[ai];
        if (bi == 0) {
            for (uint32_t k = 0; k < M; ++k) {
                // u = x^3 + a x = g^{la+k} (1 + g^{2k - la})
                uint32_t dm = uint32_t((2ull * k + M - la) % M);
                uint32_t z = zech[dm];
                if (z == M) continue;
                uint32_t lu = uint32_t((uint64_t(la) + k + z) % M);
                s += (lu & 1) ? -1 : +1;
            }
            return -s;
        }
        uint32_t lb = L.lg[bi];
        s += (lb & 1) ? -1 : +1;  // x = 0 term
        for (uint32_t k = 0; k < M; ++k) {
            uint32_t dm = uint32_t((2ull * k + M - la) % M);
            uint32_t z = zech[dm];
            uint32_t lw;
            if (z == M) {
                lw = lb;  // x^3 + a x = 0, so w = b
            } else {
                uint32_t lu = uint32_t((uint64_t(la) + k + z) % M);
                uint32_t dm2 = uint32_t((uint64_t(lu) + M - lb) % M);
                uint32_t z2 = zech[dm2];
                if (z2 == M) continue;  // w = 0
                lw = uint32_t((uint64_t(lb) + z2) % M);
            }
            s += (lw & 1) ? -1 : +1;
        }
        return -s;
    }

    Field base_;
    std::mutex build_mu_;
    std::vector<std::unique_ptr<ResidueLevel>> levels_;
};

PlaceTables& tables_for(const Field& f) {
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<PlaceTables>> registry;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = registry[f.label()];
    if (!slot) slot = std::make_unique<PlaceTables>(f);
    return *slot;
}

std::vector<uint64_t> embed_coeffs(const ResidueLevel& L, const Poly& f) {
    std::vector<uint64_t> out(f.coeffs().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = L.embed[f.coeffs()[i]];
    return out;
}

uint64_t eval_emb(const ResidueLevel& L, const std::vector<uint64_t>& emb,
                  uint64_t tau) {
    uint64_t acc = 0;
    for (size_t i = emb.size(); i-- > 0;)
        acc = L.ext.add(L.ext.mul(acc, tau), emb[i]);
    return acc;
}

// ---------------- local analysis ----------------

// Split vs nonsplit at a multiplicative place: the node sits at
// x0 = -3b/(2a) and the fiber is split iff 3 x0 is a square in the residue
// field F_q[t]/(pi).  Everything is polynomial arithmetic mod pi, so this
// works at any place degree.
int64_t mult_trace_finite(const WeierstrassModel& m, const Poly& pi) {
    const Field& F = m.field();
    // inverse of 2A mod pi by the extended euclidean algorithm
    Poly r0 = pi, r1 = m.A().scaled(2).divrem(pi).second;
    Poly t0 = Poly::zero(F), t1 = Poly::one(F);
    while (!r1.is_zero()) {
        auto [q, r] = r0.divrem(r1);
        r0 = r1;
        r1 = r;
        Poly tn = t0 - q * t1;
        t0 = t1;
        t1 = tn;
    }
    if (r0.degree() != 0)
        throw CurveError(CurveErrorCode::InternalCheck,
                         "2A not invertible at a multiplicative place");
    Poly inv2a = t0.scaled(F.inv(r0.leading().index())).divrem(pi).second;
    Poly x0 = ((-m.B().scaled(3)) * inv2a).divrem(pi).second;
    Poly s = x0.scaled(3).divrem(pi).second;
    if (s.is_zero())
        throw CurveError(CurveErrorCode::InternalCheck,
                         "vanishing tangent cone at a multiplicative place");
    // chi(s) = s^{(q^d - 1)/2} mod pi
    BigInt e = (big_pow(BigInt(F.q()), unsigned(pi.degree())) - 1) / 2;
    Poly acc = Poly::one(F);
    Poly base = s;
    while (e > 0) {
        if ((e & 1) != 0) acc = (acc * base).divrem(pi).second;
        base = (base * base).divrem(pi).second;
        e >>= 1;
    }
    if (acc == Poly::one(F)) return +1;
    if (acc == -Poly::one(F)) return -1;
    throw CurveError(CurveErrorCode::InternalCheck,
                     "quadratic character mod pi is not a unit sign");
}

struct Analysis {
    std::vector<LocalData> bad;  // infinity first, then by (degree, lex)
    int conductor_deg = 0;
    bool infinity_bad = false;
    LocalData infinity_data;
    std::map<std::pair<int, uint64_t>, size_t> finite_bad;  // -> index into bad
};

LocalData infinity_local_data(const WeierstrassModel& m) {
    const Field& F = m.field();
    int n = m.n();
    LocalData ld;
    ld.place = Place::infinity();
    int vD = 12 * n - m.discriminant().degree();
    if (vD == 0) {
        ld.reduction = Reduction::Good;
        ld.conductor_exponent = 0;
        return ld;  // a_v filled by callers that need it
    }
    bool vA_pos = m.A().is_zero() || 4 * n - m.A().degree() >= 1;
    bool vB_pos = m.B().is_zero() || 6 * n - m.B().degree() >= 1;
    if (vA_pos && vB_pos) {
        ld.reduction = Reduction::Additive;
        ld.conductor_exponent = 2;
        ld.a_v = 0;
        return ld;
    }
    // multiplicative: reduce the flipped model at s = 0
    uint64_t abar = m.A().coeff(size_t(4 * n));
    uint64_t bbar = m.B().coeff(size_t(6 * n));
    uint64_t x0 = F.mul(F.neg(F.mul(F.from_int(3).index(), bbar)),
                        F.inv(F.mul(F.from_int(2).index(), abar)));
    int chi = F.quadratic_character(F.mul(F.from_int(3).index(), x0));
    ld.reduction = chi == 1 ? Reduction::MultSplit : Reduction::MultNonsplit;
    ld.conductor_exponent = 1;
    ld.a_v = chi;
    return ld;
}

Analysis analyze(const WeierstrassModel& m) {
    Analysis out;
    out.infinity_data = infinity_local_data(m);
    out.infinity_bad = out.infinity_data.reduction != Reduction::Good;
    if (out.infinity_bad) out.bad.push_back(out.infinity_data);

    std::vector<LocalData> finite;
    for (const auto& [pi, mult] : factor(m.discriminant())) {
        (void)mult;
        LocalData ld;
        ld.place = Place::finite(pi);
        int vA = val_raw(m.A(), pi);
        int vB = val_raw(m.B(), pi);
        if (vA >= 1 && vB >= 1) {
            ld.reduction = Reduction::Additive;
            ld.conductor_exponent = 2;
            ld.a_v = 0;
        } else {
            int64_t av = mult_trace_finite(m, pi);
            ld.reduction = av == 1 ? Reduction::MultSplit : Reduction::MultNonsplit;
            ld.conductor_exponent = 1;
            ld.a_v = av;
        }
        finite.push_back(std::move(ld));
    }
    std::sort(finite.begin(), finite.end(),
              [](const LocalData& a, const LocalData& b) {
                  if (a.place.degree != b.place.degree)
                      return a.place.degree < b.place.degree;
                  return Poly::lex_less(a.place.pi, b.place.pi);
              });
    for (auto& ld : finite) out.bad.push_back(std::move(ld));

    for (const auto& ld : out.bad)
        out.conductor_deg += ld.conductor_exponent * ld.place.degree;
    for (size_t i = 0; i < out.bad.size(); ++i) {
        const LocalData& ld = out.bad[i];
        if (!ld.place.at_infinity)
            out.finite_bad[{ld.place.degree,
                            pi_key(m.field(), ld.place.pi.coeffs(),
                                   ld.place.degree)}] = i;
    }
    return out;
}

void require_nonconstant(const WeierstrassModel& m, const char* what) {
    if (m.is_constant_curve())
        throw CurveError(CurveErrorCode::ConstantCurve,
                         std::string(what) + " is undefined for constant curves");
}

// ---------------- Euler product series ----------------

std::vector<BigInt> dirichlet_series(const WeierstrassModel& m, int max_deg,
                                     PlaceTables& tables, const Analysis& an,
                                     const LOptions& opts) {
    const Field& F = m.field();
    std::vector<BigInt> P(size_t(max_deg) + 1);
    P[0] = 1;
    auto apply_factor = [&](int d, int64_t av, bool good) {
        BigInt qd = good ? big_pow(BigInt(F.q()), unsigned(d)) : BigInt(0);
        for (int j = max_deg; j >= 1; --j) {
            BigInt v = P[size_t(j)];
            if (j >= d) v -= BigInt(av) * P[size_t(j - d)];
            if (good && j >= 2 * d) v += qd * P[size_t(j - 2 * d)];
            P[size_t(j)] = v;
        }
    };
    for (int d = 1; d <= max_deg; ++d) {
        if (big_pow(BigInt(F.q()), unsigned(2 * d)) > opts.euler_work_budget) {
            std::ostringstream os;
            os << "Euler product extension to degree " << d
               << " exceeds the work budget (cost ~ q^" << 2 * d << ")";
            throw CurveError(CurveErrorCode::WorkBudget, os.str());
        }
        const ResidueLevel& L = tables.level(d);
        std::vector<uint64_t> embA = embed_coeffs(L, m.A());
        std::vector<uint64_t> embB = embed_coeffs(L, m.B());
        for (const auto& rec : L.places) {
            auto it = an.finite_bad.find({d, pi_key(F, rec.pi, d)});
            if (it != an.finite_bad.end()) {
                const LocalData& ld = an.bad[it->second];
                if (ld.conductor_exponent == 1) apply_factor(d, ld.a_v, false);
                continue;
            }
            uint64_t a = eval_emb(L, embA, rec.tau);
            uint64_t b = eval_emb(L, embB, rec.tau);
            apply_factor(d, tables.trace(L, a, b), true);
        }
    }
    if (max_deg >= 1) {
        if (an.infinity_bad) {
            if (an.infinity_data.conductor_exponent == 1)
                apply_factor(1, an.infinity_data.a_v, false);
        } else {
            const ResidueLevel& L1 = tables.level(1);
            apply_factor(1,
                         tables.trace(L1, m.A().coeff(size_t(4 * m.n())),
                                      m.B().coeff(size_t(6 * m.n()))),
                         true);
        }
    }
    // series inversion: the L-series is 1/P up to T^max_deg
    std::vector<BigInt> c(size_t(max_deg) + 1);
    c[0] = 1;
    for (int k = 1; k <= max_deg; ++k) {
        BigInt acc = 0;
        for (int i = 1; i <= k; ++i) acc += P[size_t(i)] * c[size_t(k - i)];
        c[size_t(k)] = -acc;
    }
    return c;
}

// ---------------- root moduli: Yun split + Durand-Kerner ----------------

using RatPoly = std::vector<BigRat>;  // ascending

void rp_trim(RatPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

RatPoly rp_derivative(const RatPoly& f) {
    RatPoly out;
    for (size_t i = 1; i < f.size(); ++i) out.push_back(f[i] * BigRat(BigInt(i)));
    rp_trim(out);
    return out;
}

RatPoly rp_divexact(const RatPoly& a, const RatPoly& b) {
    if (a.empty()) return {};
    if (b.empty() || a.size() < b.size())
        throw CurveError(CurveErrorCode::InternalCheck, "bad exact division");
    RatPoly rem = a, quot(a.size() - b.size() + 1, BigRat(0));
    while (!rem.empty() && rem.size() >= b.size()) {
        BigRat c = rem.back() / b.back();
        size_t off = rem.size() - b.size();
        quot[off] = c;
        for (size_t j = 0; j < b.size(); ++j) rem[off + j] -= c * b[j];
        rp_trim(rem);
        if (off == 0) break;
    }
    if (!rem.empty())
        throw CurveError(CurveErrorCode::InternalCheck, "inexact Yun division");
    rp_trim(quot);
    return quot;
}

RatPoly rp_gcd(RatPoly a, RatPoly b) {
    rp_trim(a);
    rp_trim(b);
    while (!b.empty()) {
        while (!a.empty() && a.size() >= b.size()) {
            BigRat c = a.back() / b.back();
            size_t off = a.size() - b.size();
            for (size_t j = 0; j < b.size(); ++j) a[off + j] -= c * b[j];
            rp_trim(a);
        }
        std::swap(a, b);
    }
    if (!a.empty()) {
        BigRat lead = a.back();
        for (auto& x : a) x /= lead;
    }
    return a;
}

std::vector<std::pair<RatPoly, int>> yun_squarefree(RatPoly f) {
    rp_trim(f);
    std::vector<std::pair<RatPoly, int>> out;
    if (f.size() <= 1) return out;
    BigRat lead = f.back();
    for (auto& x : f) x /= lead;
    RatPoly fp = rp_derivative(f);
    RatPoly g = rp_gcd(f, fp);
    if (g.size() <= 1) {
        out.emplace_back(f, 1);
        return out;
    }
    RatPoly b = rp_divexact(f, g);
    RatPoly c = rp_divexact(fp, g);
    RatPoly bp = rp_derivative(b);
    RatPoly d(std::max(c.size(), bp.size()), BigRat(0));
    for (size_t i = 0; i < c.size(); ++i) d[i] += c[i];
    for (size_t i = 0; i < bp.size(); ++i) d[i] -= bp[i];
    rp_trim(d);
    int i = 1;
    while (b.size() > 1) {
        RatPoly a = rp_gcd(b, d);
        if (a.empty()) a = RatPoly{BigRat(1)};
        if (a.size() > 1) out.emplace_back(a, i);
        b = rp_divexact(b, a);
        RatPoly cnew = rp_divexact(d, a);
        bp = rp_derivative(b);
        d.assign(std::max(cnew.size(), bp.size()), BigRat(0));
        for (size_t j = 0; j < cnew.size(); ++j) d[j] += cnew[j];
        for (size_t j = 0; j < bp.size(); ++j) d[j] -= bp[j];
        rp_trim(d);
        ++i;
    }
    return out;
}

std::vector<std::complex<double>> durand_kerner(const std::vector<double>& coeffs) {
    size_t n = coeffs.size() - 1;
    std::vector<double> c(coeffs);
    double lead = c.back();
    for (auto& x : c) x /= lead;
    auto eval = [&](std::complex<double> z) {
        std::complex<double> acc(0.0);
        for (size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
        return acc;
    };
    double radius =
        std::pow(std::abs(c[0]) > 1e-300 ? std::abs(c[0]) : 1.0, 1.0 / double(n));
    std::vector<std::complex<double>> z(n);
    for (size_t k = 0; k < n; ++k) {
        double ang = 2.0 * 3.141592653589793 * double(k) / double(n) + 0.41;
        z[k] = radius * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    for (int iter = 0; iter < 800; ++iter) {
        double worst = 0.0;
        for (size_t k = 0; k < n; ++k) {
            std::complex<double> denom(1.0);
            for (size_t j = 0; j < n; ++j)
                if (j != k) denom *= z[k] - z[j];
            std::complex<double> delta = eval(z[k]) / denom;
            z[k] -= delta;
            worst = std::max(worst, std::abs(delta));
        }
        if (worst < 1e-14) break;
    }
    return z;
}

std::vector<std::pair<double, int>> inverse_root_moduli_of(
    const std::vector<BigInt>& coeffs) {
    RatPoly f(coeffs.size());
    for (size_t i = 0; i < coeffs.size(); ++i) f[i] = BigRat(coeffs[i]);
    std::vector<std::pair<double, int>> out;
    for (const auto& [sf, mult] : yun_squarefree(f)) {
        if (sf.size() == 2) {
            double root = (-sf[0] / sf[1]).convert_to<double>();
            out.emplace_back(1.0 / std::abs(root), mult);
            continue;
        }
        std::vector<double> dc(sf.size());
        for (size_t i = 0; i < sf.size(); ++i) dc[i] = sf[i].convert_to<double>();
        for (const auto& z : durand_kerner(dc))
            out.emplace_back(1.0 / std::abs(z), mult);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

// ---------------- public operations ----------------

std::string Place::to_string() const {
    return at_infinity ? "inf" : pi.to_string();
}

const char* to_string(Reduction r) {
    switch (r) {
        case Reduction::Good: return "GOOD";
        case Reduction::MultSplit: return "MULT_SPLIT";
        case Reduction::MultNonsplit: return "MULT_NONSPLIT";
        case Reduction::Additive: return "ADDITIVE";
    }
    return "?";
}

LocalData reduction_at(const WeierstrassModel& m, const Place& v) {
    if (v.at_infinity) {
        LocalData ld = infinity_local_data(m);
        if (ld.reduction == Reduction::Good) ld.a_v = fiber_trace(m, v);
        return ld;
    }
    if (!v.pi.is_monic() || !is_irreducible(v.pi))
        throw std::invalid_argument("place must carry a monic irreducible");
    LocalData ld;
    ld.place = v;
    if (val_raw(m.discriminant(), v.pi) == 0) {
        ld.reduction = Reduction::Good;
        ld.conductor_exponent = 0;
        ld.a_v = fiber_trace(m, v);
        return ld;
    }
    int vA = val_raw(m.A(), v.pi);
    int vB = val_raw(m.B(), v.pi);
    if (vA >= 1 && vB >= 1) {
        ld.reduction = Reduction::Additive;
        ld.conductor_exponent = 2;
        ld.a_v = 0;
    } else {
        int64_t av = mult_trace_finite(m, v.pi);
        ld.reduction = av == 1 ? Reduction::MultSplit : Reduction::MultNonsplit;
        ld.conductor_exponent = 1;
        ld.a_v = av;
    }
    return ld;
}

std::vector<LocalData> bad_places(const WeierstrassModel& m) {
    return analyze(m).bad;
}

int conductor_degree(const WeierstrassModel& m) {
    require_nonconstant(m, "the conductor");
    return analyze(m).conductor_deg;
}

int64_t fiber_trace(const WeierstrassModel& m, const Place& v) {
    const Field& F = m.field();
    PlaceTables& tables = tables_for(F);
    if (v.at_infinity) {
        if (12 * m.n() - m.discriminant().degree() != 0)
            throw std::invalid_argument("fiber_trace requires good reduction");
        const ResidueLevel& L1 = tables.level(1);
        return tables.trace(L1, m.A().coeff(size_t(4 * m.n())),
                            m.B().coeff(size_t(6 * m.n())));
    }
    int d = v.pi.degree();
    if (d < 1) throw std::invalid_argument("malformed place");
    if (val_raw(m.discriminant(), v.pi) != 0)
        throw std::invalid_argument("fiber_trace requires good reduction");
    const ResidueLevel& L = tables.level(d);
    auto it = L.pi_pos.find(pi_key(F, v.pi.coeffs(), d));
    if (it == L.pi_pos.end())
        throw std::invalid_argument("place polynomial is not irreducible");
    uint64_t tau = L.places[it->second].tau;
    uint64_t a = eval_emb(L, embed_coeffs(L, m.A()), tau);
    uint64_t b = eval_emb(L, embed_coeffs(L, m.B()), tau);
    return tables.trace(L, a, b);
}

std::vector<BigInt> dirichlet_coefficients(const WeierstrassModel& m, int max_deg,
                                           const LOptions& opts) {
    require_nonconstant(m, "the L-series");
    if (max_deg < 0) throw std::invalid_argument("max_deg must be >= 0");
    Analysis an = analyze(m);
    return dirichlet_series(m, max_deg, tables_for(m.field()), an, opts);
}

int analytic_rank_of(const std::vector<BigInt>& coeffs, uint64_t q) {
    std::vector<BigInt> L = coeffs;
    int rank = 0;
    while (L.size() > 1) {
        size_t N = L.size() - 1;
        BigInt at_inv_q = 0;  // sum_i c_i q^{N-i}
        for (size_t i = 0; i <= N; ++i) at_inv_q = at_inv_q * BigInt(q) + L[i];
        if (at_inv_q != 0) break;
        std::vector<BigInt> M(N);
        BigInt prev = 0;
        for (size_t i = 0; i < N; ++i) {
            prev = L[i] + BigInt(q) * prev;
            M[i] = prev;
        }
        if (L[N] != -BigInt(q) * M[N - 1])
            throw CurveError(CurveErrorCode::InternalCheck,
                             "synthetic division by (1 - qT) failed");
        L = std::move(M);
        ++rank;
    }
    return rank;
}

LPolynomial l_polynomial(const WeierstrassModel& m, const LOptions& opts) {
    require_nonconstant(m, "the L-polynomial");
    if (!m.is_minimal())
        throw std::invalid_argument("l_polynomial requires a minimal model");
    const Field& F = m.field();
    BigInt q(F.q());
    PlaceTables& tables = tables_for(F);
    Analysis an = analyze(m);
    int N = an.conductor_deg - 4;
    if (N < 0)
        throw CurveError(CurveErrorCode::InternalCheck,
                         "conductor degree below 4 on a non-constant curve");
    LPolynomial out;
    out.N = N;
    if (N == 0) {
        out.c = {BigInt(1)};
        out.epsilon = +1;
        out.analytic_rank = 0;
        return out;
    }
    int h = (N + 1) / 2;
    std::vector<BigInt> c = dirichlet_series(m, h, tables, an, opts);

    int eps = 0;
    int used_deg = h;
    if (N % 2 == 0) {
        // the middle pairing c_{N/2} = eps c_{N/2} forces eps = +1 when nonzero
        if (c[size_t(N / 2)] != 0) eps = +1;
    } else {
        // pairing c_h = eps q c_{h-1}
        const BigInt& lo = c[size_t(h - 1)];
        const BigInt& hi = c[size_t(h)];
        if (lo != 0) {
            if (hi == q * lo) eps = +1;
            else if (hi == -q * lo) eps = -1;
            else
                throw CurveError(CurveErrorCode::InternalCheck,
                                 "functional-equation pairing fails at the center");
        } else if (hi != 0) {
            throw CurveError(CurveErrorCode::InternalCheck,
                             "center coefficients violate the pairing");
        }
    }
    if (eps == 0) {
        // fallback: smallest j > N/2 whose known partner c_{N-j} is nonzero
        for (int j = N / 2 + 1; j <= N && eps == 0; ++j) {
            int i = N - j;
            if (i > h || c[size_t(i)] == 0) continue;
            std::vector<BigInt> cj;
            try {
                cj = dirichlet_series(m, j, tables, an, opts);
            } catch (const CurveError& e) {
                if (e.code == CurveErrorCode::WorkBudget)
                    throw CurveError(
                        CurveErrorCode::SignUndetermined,
                        "sign chain exceeded the work budget at Euler degree " +
                            std::to_string(j));
                throw;
            }
            BigInt denom = big_pow(q, unsigned(2 * j - N)) * c[size_t(i)];
            if (cj[size_t(j)] == denom) eps = +1;
            else if (cj[size_t(j)] == -denom) eps = -1;
            else
                throw CurveError(CurveErrorCode::InternalCheck,
                                 "sign determination produced a non-unit");
            used_deg = j;
        }
    }
    if (eps == 0)
        throw CurveError(CurveErrorCode::SignUndetermined,
                         "no usable pairing coefficient within the work cap");

    // complete via c_{N-i} = eps q^{N-2i} c_i
    std::vector<BigInt> full(size_t(N) + 1);
    for (int i = 0; i <= h && i <= N; ++i) full[size_t(i)] = c[size_t(i)];
    for (int i = 0; 2 * i <= N; ++i) {
        BigInt v = BigInt(eps) * big_pow(q, unsigned(N - 2 * i)) * full[size_t(i)];
        if (N - i <= h && full[size_t(N - i)] != v)
            throw CurveError(CurveErrorCode::InternalCheck,
                             "completion disagrees with a computed coefficient");
        full[size_t(N - i)] = v;
    }

    // validate against one directly computed extra Euler coefficient
    int jv = used_deg + 1;
    std::vector<BigInt> direct;
    try {
        direct = dirichlet_series(m, jv, tables, an, opts);
    } catch (const CurveError& e) {
        if (e.code == CurveErrorCode::WorkBudget)
            throw CurveError(CurveErrorCode::WorkBudget,
                             "validation coefficient at Euler degree " +
                                 std::to_string(jv) + " exceeds the work budget");
        throw;
    }
    for (int i = 0; i <= jv; ++i) {
        BigInt expect = i <= N ? full[size_t(i)] : BigInt(0);
        if (direct[size_t(i)] != expect)
            throw CurveError(CurveErrorCode::InternalCheck,
                             "completed polynomial fails the direct Euler check "
                             "at degree " +
                                 std::to_string(i));
    }

    out.c = std::move(full);
    out.epsilon = eps;
    out.analytic_rank = analytic_rank_of(out.c, F.q());
    if ((out.analytic_rank % 2 == 1) != (eps == -1))
        throw CurveError(CurveErrorCode::InternalCheck,
                         "analytic rank parity disagrees with the sign");
    out.inverse_root_moduli = inverse_root_moduli_of(out.c);
    double rq = std::sqrt(double(F.q()));
    for (const auto& [mod, mult] : out.inverse_root_moduli) {
        (void)mult;
        if (std::abs(mod - rq) > 1e-6 * rq)
            throw CurveError(CurveErrorCode::InternalCheck,
                             "inverse root off the Weil circle");
    }
    return out;
}

TorsionReport torsion_bound(const WeierstrassModel& m, int budget_places) {
    if (budget_places < 2)
        throw std::invalid_argument("torsion bound needs at least 2 places");
    if (!m.is_minimal())
        throw std::invalid_argument("torsion_bound requires a minimal model");
    const Field& F = m.field();
    PlaceTables& tables = tables_for(F);

    TorsionReport rep;
    int used = 0;
    uint64_t g = 0;
    // infinity sorts first among degree-1 places, then finite by (degree, lex)
    if (12 * m.n() - m.discriminant().degree() == 0) {
        const ResidueLevel& L1 = tables.level(1);
        int64_t av = tables.trace(L1, m.A().coeff(size_t(4 * m.n())),
                                  m.B().coeff(size_t(6 * m.n())));
        g = gcd_u(g, uint64_t(int64_t(F.q()) + 1 - av));
        ++used;
    }
    for (int d = 1; d <= 8 && used < budget_places; ++d) {
        const ResidueLevel& L = tables.level(d);
        std::vector<uint64_t> embA = embed_coeffs(L, m.A());
        std::vector<uint64_t> embB = embed_coeffs(L, m.B());
        std::vector<uint64_t> embD = embed_coeffs(L, m.discriminant());
        int64_t qd = int64_t(L.Q);
        for (const auto& rec : L.places) {
            if (used >= budget_places) break;
            if (eval_emb(L, embD, rec.tau) == 0) continue;  // bad reduction
            uint64_t a = eval_emb(L, embA, rec.tau);
            uint64_t b = eval_emb(L, embB, rec.tau);
            g = gcd_u(g, uint64_t(qd + 1 - tables.trace(L, a, b)));
            ++used;
        }
    }
    if (used == 0)
        throw CurveError(CurveErrorCode::InternalCheck,
                         "no good place available for the torsion bound");
    rep.upper_bound = int64_t(g);

    const Poly& A = m.A();
    const Poly& B = m.B();
    int n = m.n();
    BigInt cand_big = big_pow(BigInt(F.q()), unsigned(2 * n + 1));
    if (cand_big > BigInt(10000000))
        throw CurveError(CurveErrorCode::WorkBudget,
                         "torsion x-coordinate search space too large");
    uint64_t candidates = cand_big.convert_to<uint64_t>();

    // 2-torsion: polynomial roots of x^3 + A x + B (deg x <= 2n)
    int roots2 = 0;
    for (uint64_t ix = 0; ix < candidates; ++ix) {
        Poly x = poly_from_index(F, ix, 2 * n + 1);
        if ((x * x * x + A * x + B).is_zero()) ++roots2;
    }
    // 3-torsion: roots of psi_3 = 3x^4 + 6Ax^2 + 12Bx - A^2 whose
    // x^3 + Ax + B is a nonzero square in F_q[t]
    auto is_square_poly = [&](const Poly& hh) {
        if (hh.is_zero() || hh.degree() % 2 != 0) return false;
        if (F.quadratic_character(hh.leading().index()) != 1) return false;
        for (const auto& [pi, mult] : factor(hh)) {
            (void)pi;
            if (mult % 2 != 0) return false;
        }
        return true;
    };
    uint64_t c6 = F.from_int(6).index(), c12 = F.from_int(12).index();
    int valid3 = 0;
    for (uint64_t ix = 0; ix < candidates; ++ix) {
        Poly x = poly_from_index(F, ix, 2 * n + 1);
        Poly x2 = x * x;
        Poly psi = (x2 * x2).scaled(3) + (A * x2).scaled(c6) + (B * x).scaled(c12) -
                   A * A;
        if (!psi.is_zero()) continue;
        if (is_square_poly(x2 * x + A * x + B)) ++valid3;
    }

    rep.two_rank = roots2 == 0 ? 0 : (roots2 == 1 ? 1 : 2);
    rep.three_rank = valid3 == 0 ? 0 : (valid3 == 1 ? 1 : 2);
    int two_part = 1 << rep.two_rank;
    int three_part = rep.three_rank == 0 ? 1 : (rep.three_rank == 1 ? 3 : 9);
    rep.found_order = two_part * three_part;
    if (rep.upper_bound % rep.found_order != 0)
        throw CurveError(CurveErrorCode::InternalCheck,
                         "explicit torsion does not divide the gcd bound");
    rep.certified_trivial = rep.upper_bound == 1;
    int f1 = (rep.two_rank >= 1 ? 2 : 1) * (rep.three_rank >= 1 ? 3 : 1);
    int f2 = (rep.two_rank >= 2 ? 2 : 1) * (rep.three_rank >= 2 ? 3 : 1);
    if (f1 == 1) rep.found_structure = "trivial";
    else if (f2 == 1) rep.found_structure = "Z/" + std::to_string(f1);
    else
        rep.found_structure =
            "Z/" + std::to_string(f1) + " x Z/" + std::to_string(f2);
    return rep;
}

}  // namespace ffec
