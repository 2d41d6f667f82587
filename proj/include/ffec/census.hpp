#pragma once

// Exhaustive Burnside-weighted enumeration of minimal models at level n:
// shell and cumulative class counts, canonical-representative streams, and
// the (A, B) index-space partition used for parallel sweeps.

#include <functional>
#include <map>
#include <optional>
#include <set>

#include "ffec/model.hpp"

namespace ffec {

struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IndexRange {
    uint64_t a_begin = 0;
    uint64_t a_end = 0;  // exclusive
};

struct CensusOptions {
    int chunks = 64;
    int threads = 1;
    uint64_t budget_pairs = uint64_t(1) << 36;
    bool budget_override = false;
    // restrict the sweep to an A-index slice (full B range); used by audits
    std::optional<IndexRange> a_slice;
    // skip the n = 1 kernel and run the reference pair-by-pair path
    bool force_generic = false;
};

struct CensusResult {
    std::string q_label;
    int n = 0;
    BigRat shell_classes;     // burnside_sum / (q-1); an integer on full sweeps
    BigInt burnside_sum;      // sum of stabilizer orders over minimal pairs
    BigInt pairs_scanned;
    BigInt minimal_pairs;
    std::map<FamilyClass, BigRat> per_family;  // class counts, sum = shell_classes
    double elapsed_seconds = 0.0;
    std::vector<std::pair<uint32_t, uint64_t>> chunk_digests;  // (chunk, partial sum)
};

// Sizes of the coefficient index spaces at level n.
uint64_t a_space_size(const Field& f, int n);
uint64_t b_space_size(const Field& f, int n);

// Disjoint A-index ranges covering [0, q^{4n+1}) (or the requested slice).
std::vector<IndexRange> partition_space(const Field& f, int n, int chunks,
                                        std::optional<IndexRange> slice = {});

// Full Burnside sweep of the shell at level n.
CensusResult shell_count(const Field& f, int n, const CensusOptions& opts = {});

// Sum of shell counts for levels 0..n.
BigInt cumulative_count(const Field& f, int n, const CensusOptions& opts = {});

// Streams exactly one canonical representative per isomorphism class, in
// ascending (a_index, b_index) order.  An empty filter admits every family.
void for_each_minimal_class(const Field& f, int n,
                            const std::set<FamilyClass>& filter,
                            const CensusOptions& opts,
                            const std::function<void(const WeierstrassModel&)>& fn);

std::vector<WeierstrassModel> enumerate_minimal(
    const Field& f, int n, const std::set<FamilyClass>& filter = {},
    const CensusOptions& opts = {}, size_t limit = SIZE_MAX);

namespace census_detail {
// The n = 1 minimality shortcut used by the sweep kernel, exposed so the
// fast-path/general-path equivalence can be audited pair by pair.
bool minimal_n1_fast(const Poly& A, const Poly& B);
}  // namespace census_detail

}  // namespace ffec
