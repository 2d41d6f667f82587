#include "ffec/census.hpp"

#include <chrono>
#include <cstring>
#include <sstream>

#include "parallel.hpp"

namespace ffec {

namespace {

using u128 = unsigned __int128;

uint64_t checked_pow(uint64_t q, int e, const char* what) {
    unsigned __int128 r = 1;
    for (int i = 0; i < e; ++i) {
        r *= q;
        if (r > (unsigned __int128)UINT64_MAX)
            throw BudgetError(std::string(what) + " index space overflows 64 bits");
    }
    return uint64_t(r);
}

uint64_t gcd_u(uint64_t a, uint64_t b) {
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a;
}

struct ChunkTally {
    uint64_t pairs = 0;
    uint64_t minimal = 0;
    uint64_t burnside = 0;
    uint64_t fam[4] = {0, 0, 0, 0};  // burnside sums, indexed by FamilyClass
};

size_t fam_slot(FamilyClass f) { return size_t(f); }

// ---------------- n = 1 sweep kernel (q <= 256) ----------------
//
// Coefficient indices fit a byte, so the 13 coefficients of 4A^3 and -27B^2
// pack into one u128 each and Delta = 0 is a single compare.  Minimality at
// n = 1 reduces to flags: a violating place is either infinity (both
// coefficients of degree <= 0) or a linear pi with A = c pi^4 and B = c' pi^6,
// where A = 0 or B = 0 matches every pi (v(0) = INF).

constexpr uint8_t kFlagZero = 1;
constexpr uint8_t kFlagConst = 2;
constexpr uint8_t kPiNone = 0;
constexpr uint8_t kPiAll = 0xFF;

struct KernelContext {
    Field f;
    uint64_t q = 0;
    uint64_t g2 = 0, g4 = 0, g6 = 0;  // stabilizer sizes
    // (t - r)^4 and (t - r)^6 coefficient tables, ascending, per root index r
    std::vector<std::array<uint64_t, 5>> pow4;
    std::vector<std::array<uint64_t, 7>> pow6;
    // B-side tables indexed by b-index
    std::vector<u128> neg27b2;
    std::vector<uint8_t> bflags;
    std::vector<uint8_t> bpi6;
};

u128 pack13(const uint64_t* c) {
    u128 out = 0;
    for (int i = 12; i >= 0; --i) out = (out << 8) | uint8_t(c[i]);
    return out;
}

void decode_index(uint64_t idx, uint64_t q, int slots, uint64_t* out) {
    for (int i = slots - 1; i >= 0; --i) {
        out[i] = idx % q;
        idx /= q;
    }
}

void square_poly(const Field& f, const uint64_t* a, int s, uint64_t* out) {
    std::memset(out, 0, sizeof(uint64_t) * size_t(2 * s + 1));
    for (int i = 0; i <= s; ++i) {
        if (!a[i]) continue;
        for (int j = 0; j <= s; ++j)
            if (a[j]) out[i + j] = f.add(out[i + j], f.mul(a[i], a[j]));
    }
}

void mul_poly(const Field& f, const uint64_t* a, int sa, const uint64_t* b, int sb,
              uint64_t* out) {
    std::memset(out, 0, sizeof(uint64_t) * size_t(sa + sb + 1));
    for (int i = 0; i <= sa; ++i) {
        if (!a[i]) continue;
        for (int j = 0; j <= sb; ++j)
            if (b[j]) out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
    }
}

int raw_degree(const uint64_t* c, int slots) {
    for (int i = slots - 1; i >= 0; --i)
        if (c[i]) return i;
    return -1;  // zero
}

void fill_power_tables(const Field& f, std::vector<std::array<uint64_t, 5>>* pow4,
                       std::vector<std::array<uint64_t, 7>>* pow6) {
    uint64_t q = f.q();
    pow4->resize(q);
    pow6->resize(q);
    for (uint64_t r = 0; r < q; ++r) {
        uint64_t lin[2] = {f.neg(r), 1};
        uint64_t sq[3], q4[5], q6[7];
        square_poly(f, lin, 1, sq);
        square_poly(f, sq, 2, q4);
        mul_poly(f, q4, 4, sq, 2, q6);
        std::copy(q4, q4 + 5, (*pow4)[r].begin());
        std::copy(q6, q6 + 7, (*pow6)[r].begin());
    }
}

// kPiAll for A = 0, r+1 when A = c (t-r)^4, else kPiNone.
uint8_t pi4_of(const KernelContext& k, const uint64_t* a) {
    int d = raw_degree(a, 5);
    if (d < 0) return kPiAll;
    if (d != 4) return kPiNone;
    // c (t-r)^4 has coeff3/coeff4 = -4r
    uint64_t r = k.f.mul(k.f.neg(a[3]),
                         k.f.inv(k.f.mul(k.f.from_int(4).index(), a[4])));
    const auto& p4 = k.pow4[r];
    for (int i = 0; i < 5; ++i)
        if (a[i] != k.f.mul(a[4], p4[size_t(i)])) return kPiNone;
    return uint8_t(r + 1);
}

uint8_t pi6_of(const KernelContext& k, const uint64_t* b) {
    int d = raw_degree(b, 7);
    if (d < 0) return kPiAll;
    if (d != 6) return kPiNone;
    uint64_t r = k.f.mul(k.f.neg(b[5]),
                         k.f.inv(k.f.mul(k.f.from_int(6).index(), b[6])));
    const auto& p6 = k.pow6[r];
    for (int i = 0; i < 7; ++i)
        if (b[i] != k.f.mul(b[6], p6[size_t(i)])) return kPiNone;
    return uint8_t(r + 1);
}

bool finite_violation(uint8_t a4, uint8_t b6) {
    return a4 != kPiNone && b6 != kPiNone &&
           (a4 == kPiAll || b6 == kPiAll || a4 == b6);
}

KernelContext build_kernel_context(const Field& f) {
    KernelContext k;
    k.f = f;
    k.q = f.q();
    uint64_t m = k.q - 1;
    k.g2 = gcd_u(2, m);
    k.g4 = gcd_u(4, m);
    k.g6 = gcd_u(6, m);
    fill_power_tables(f, &k.pow4, &k.pow6);
    uint64_t nb = checked_pow(k.q, 7, "B");
    k.neg27b2.resize(nb);
    k.bflags.resize(nb);
    k.bpi6.resize(nb);
    uint64_t neg27 = f.from_int(-27).index();
    uint64_t b[7], b2[13], scaled[13];
    for (uint64_t ib = 0; ib < nb; ++ib) {
        decode_index(ib, k.q, 7, b);
        square_poly(f, b, 6, b2);
        for (int i = 0; i < 13; ++i) scaled[i] = f.mul(b2[i], neg27);
        k.neg27b2[ib] = pack13(scaled);
        int d = raw_degree(b, 7);
        uint8_t flags = 0;
        if (d < 0) flags |= kFlagZero;
        if (d <= 0) flags |= kFlagConst;
        k.bflags[ib] = flags;
        k.bpi6[ib] = pi6_of(k, b);
    }
    return k;
}

ChunkTally kernel_chunk(const KernelContext& k, const IndexRange& range) {
    const Field& f = k.f;
    ChunkTally tally;
    uint64_t nb = k.neg27b2.size();
    uint64_t a[5], a2[9], a3[13], fourA3[13], tmp[13];
    uint64_t four = f.from_int(4).index();
    std::vector<u128> iso(k.q - 1);
    for (uint64_t ia = range.a_begin; ia < range.a_end; ++ia) {
        decode_index(ia, k.q, 5, a);
        square_poly(f, a, 4, a2);
        mul_poly(f, a2, 8, a, 4, a3);
        for (int i = 0; i < 13; ++i) fourA3[i] = f.mul(a3[i], four);
        u128 packed_a = pack13(fourA3);
        int dega = raw_degree(a, 5);
        bool azero = dega < 0;
        bool aconst = dega <= 0;
        uint8_t a4 = pi4_of(k, a);
        if (!azero) {
            for (uint64_t c = 1; c < k.q; ++c) {
                for (int i = 0; i < 13; ++i) tmp[i] = f.mul(fourA3[i], c);
                iso[c - 1] = pack13(tmp);
            }
        }
        const u128* bb = k.neg27b2.data();
        const uint8_t* bf = k.bflags.data();
        const uint8_t* bp = k.bpi6.data();
        for (uint64_t ib = 0; ib < nb; ++ib) {
            u128 nv = bb[ib];
            if (nv == packed_a) continue;  // Delta = 0
            uint8_t flags = bf[ib];
            if (aconst && (flags & kFlagConst)) continue;  // infinity violation
            if (finite_violation(a4, bp[ib])) continue;
            ++tally.minimal;
            if (azero) {
                tally.burnside += k.g6;
                tally.fam[fam_slot(FamilyClass::IsotrivialJ0)] += k.g6;
            } else if (flags & kFlagZero) {
                tally.burnside += k.g4;
                tally.fam[fam_slot(FamilyClass::IsotrivialJ1728)] += k.g4;
            } else {
                tally.burnside += k.g2;
                bool iso_hit = false;
                for (uint64_t c = 0; c + 1 < k.q; ++c) {
                    if (iso[c] == nv) {
                        iso_hit = true;
                        break;
                    }
                }
                tally.fam[fam_slot(iso_hit ? FamilyClass::IsotrivialOther
                                           : FamilyClass::Nonisotrivial)] += k.g2;
            }
        }
        tally.pairs += nb;
    }
    return tally;
}

// ---------------- reference pair-by-pair path (any n) ----------------

FamilyClass classify_raw(const Poly& A, const Poly& B) {
    if (A.is_zero()) return FamilyClass::IsotrivialJ0;
    if (B.is_zero()) return FamilyClass::IsotrivialJ1728;
    Poly a3 = A * A * A;
    Poly b2 = B * B;
    if (a3.degree() == b2.degree() &&
        a3.scaled(b2.leading().index()) == b2.scaled(a3.leading().index()))
        return FamilyClass::IsotrivialOther;
    return FamilyClass::Nonisotrivial;
}

ChunkTally generic_chunk(const Field& f, int n, const IndexRange& range) {
    ChunkTally tally;
    uint64_t nb = checked_pow(f.q(), 6 * n + 1, "B");
    uint64_t m = f.q() - 1;
    uint64_t g2 = gcd_u(2, m), g4 = gcd_u(4, m), g6 = gcd_u(6, m);
    for (uint64_t ia = range.a_begin; ia < range.a_end; ++ia) {
        Poly A = poly_from_index(f, ia, 4 * n + 1);
        for (uint64_t ib = 0; ib < nb; ++ib) {
            Poly B = poly_from_index(f, ib, 6 * n + 1);
            if (discriminant_of(A, B).is_zero()) continue;
            if (!pair_is_minimal(A, B, n)) continue;
            ++tally.minimal;
            uint64_t stab = B.is_zero() ? g4 : (A.is_zero() ? g6 : g2);
            tally.burnside += stab;
            tally.fam[fam_slot(classify_raw(A, B))] += stab;
        }
        tally.pairs += nb;
    }
    return tally;
}

}  // namespace

namespace census_detail {
bool minimal_n1_fast(const Poly& A, const Poly& B) {
    KernelContext k;
    k.f = A.field();
    k.q = k.f.q();
    fill_power_tables(k.f, &k.pow4, &k.pow6);
    uint64_t a[5] = {0, 0, 0, 0, 0}, b[7] = {0, 0, 0, 0, 0, 0, 0};
    for (size_t i = 0; i < A.coeffs().size(); ++i) a[i] = A.coeffs()[i];
    for (size_t i = 0; i < B.coeffs().size(); ++i) b[i] = B.coeffs()[i];
    bool aconst = raw_degree(a, 5) <= 0;
    bool bconst = raw_degree(b, 7) <= 0;
    if (aconst && bconst) return false;
    return !finite_violation(pi4_of(k, a), pi6_of(k, b));
}
}  // namespace census_detail

uint64_t a_space_size(const Field& f, int n) {
    return checked_pow(f.q(), 4 * n + 1, "A");
}
uint64_t b_space_size(const Field& f, int n) {
    return checked_pow(f.q(), 6 * n + 1, "B");
}

std::vector<IndexRange> partition_space(const Field& f, int n, int chunks,
                                        std::optional<IndexRange> slice) {
    if (chunks < 1) throw std::invalid_argument("chunks must be >= 1");
    uint64_t a0 = 0, a1 = a_space_size(f, n);
    if (slice) {
        a0 = slice->a_begin;
        a1 = std::min(slice->a_end, a1);
        if (a0 > a1) throw std::invalid_argument("malformed A-slice");
    }
    uint64_t total = a1 - a0;
    uint64_t k = std::min<uint64_t>(uint64_t(chunks), std::max<uint64_t>(total, 1));
    std::vector<IndexRange> out;
    out.reserve(size_t(k));
    for (uint64_t i = 0; i < k; ++i) {
        uint64_t lo = a0 + total * i / k;
        uint64_t hi = a0 + total * (i + 1) / k;
        out.push_back({lo, hi});
    }
    return out;
}

CensusResult shell_count(const Field& f, int n, const CensusOptions& opts) {
    if (n < 0) throw std::invalid_argument("shell level must be >= 0");
    auto t0 = std::chrono::steady_clock::now();

    BigInt nb_big = big_pow(BigInt(f.q()), unsigned(6 * n + 1));
    BigInt full_pairs = big_pow(BigInt(f.q()), unsigned(4 * n + 1)) * nb_big;
    BigInt sweep_pairs = full_pairs;
    if (opts.a_slice)
        sweep_pairs = BigInt(opts.a_slice->a_end - opts.a_slice->a_begin) * nb_big;
    if (!opts.budget_override && sweep_pairs > BigInt(opts.budget_pairs)) {
        std::ostringstream os;
        os << "sweep of " << sweep_pairs << " pairs at q=" << f.label() << ", n="
           << n << " exceeds the work budget of " << opts.budget_pairs
           << " pairs; rerun with the budget override to force it";
        throw BudgetError(os.str());
    }

    std::vector<IndexRange> ranges = partition_space(f, n, opts.chunks, opts.a_slice);
    std::vector<ChunkTally> tallies(ranges.size());

    bool use_kernel = n == 1 && f.q() <= 256 && !opts.force_generic;
    if (use_kernel) {
        KernelContext ctx = build_kernel_context(f);
        internal::parallel_indexed(ranges.size(), opts.threads, [&](size_t i) {
            tallies[i] = kernel_chunk(ctx, ranges[i]);
        });
    } else {
        internal::parallel_indexed(ranges.size(), opts.threads, [&](size_t i) {
            tallies[i] = generic_chunk(f, n, ranges[i]);
        });
    }

    CensusResult res;
    res.q_label = f.label();
    res.n = n;
    BigInt sum = 0, minimal = 0, pairs = 0;
    BigInt fam_sums[4] = {0, 0, 0, 0};
    for (size_t i = 0; i < tallies.size(); ++i) {
        sum += tallies[i].burnside;
        minimal += tallies[i].minimal;
        pairs += tallies[i].pairs;
        for (int j = 0; j < 4; ++j) fam_sums[j] += tallies[i].fam[j];
        res.chunk_digests.emplace_back(uint32_t(i), tallies[i].burnside);
    }
    res.burnside_sum = sum;
    res.pairs_scanned = pairs;
    res.minimal_pairs = minimal;
    BigInt m(f.q() - 1);
    res.shell_classes = BigRat(sum, m);
    for (FamilyClass fc :
         {FamilyClass::Nonisotrivial, FamilyClass::IsotrivialJ0,
          FamilyClass::IsotrivialJ1728, FamilyClass::IsotrivialOther})
        res.per_family[fc] = BigRat(fam_sums[fam_slot(fc)], m);
    res.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

BigInt cumulative_count(const Field& f, int n, const CensusOptions& opts) {
    if (opts.a_slice)
        throw std::invalid_argument("cumulative counts run on the full space only");
    BigRat total(0);
    for (int m = 0; m <= n; ++m) total += shell_count(f, m, opts).shell_classes;
    if (denominator(total) != 1)
        throw std::logic_error("cumulative Burnside sum failed to finalize");
    return numerator(total);
}

void for_each_minimal_class(const Field& f, int n,
                            const std::set<FamilyClass>& filter,
                            const CensusOptions& opts,
                            const std::function<void(const WeierstrassModel&)>& fn) {
    if (n < 0) throw std::invalid_argument("shell level must be >= 0");
    BigInt nb_big = big_pow(BigInt(f.q()), unsigned(6 * n + 1));
    uint64_t a0 = 0, a1 = a_space_size(f, n);
    if (opts.a_slice) {
        a0 = opts.a_slice->a_begin;
        a1 = std::min(opts.a_slice->a_end, a1);
    }
    BigInt sweep_pairs = BigInt(a1 - a0) * nb_big;
    if (!opts.budget_override && sweep_pairs > BigInt(opts.budget_pairs)) {
        std::ostringstream os;
        os << "enumeration of " << sweep_pairs << " pairs exceeds the budget of "
           << opts.budget_pairs << " pairs";
        throw BudgetError(os.str());
    }
    uint64_t nb = b_space_size(f, n);
    for (uint64_t ia = a0; ia < a1; ++ia) {
        Poly A = poly_from_index(f, ia, 4 * n + 1);
        for (uint64_t ib = 0; ib < nb; ++ib) {
            Poly B = poly_from_index(f, ib, 6 * n + 1);
            if (discriminant_of(A, B).is_zero()) continue;
            if (!pair_is_minimal(A, B, n)) continue;
            WeierstrassModel m = WeierstrassModel::make(f, n, A, B);
            if (!m.is_canonical()) continue;
            if (!filter.empty() && !filter.count(m.family())) continue;
            fn(m);
        }
    }
}

std::vector<WeierstrassModel> enumerate_minimal(const Field& f, int n,
                                                const std::set<FamilyClass>& filter,
                                                const CensusOptions& opts,
                                                size_t limit) {
    std::vector<WeierstrassModel> out;
    if (limit == 0) return out;
    struct Done {};
    try {
        for_each_minimal_class(f, n, filter, opts, [&](const WeierstrassModel& m) {
            out.push_back(m);
            if (out.size() >= limit) throw Done{};
        });
    } catch (const Done&) {
    }
    return out;
}

}  // namespace ffec
