#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "znwrap/errors.hpp"

namespace znwrap {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);
/// Multiplicative inverse mod prime p, x != 0.
std::uint64_t inverse_mod(std::uint64_t x, std::uint64_t p);
/// Deterministic Miller-Rabin, valid for the full u64 range.
bool is_prime_u64(std::uint64_t n);

/// Z_N with its primality decided once at construction.
struct CyclicGroup {
    std::uint64_t n;
    bool prime;

    explicit CyclicGroup(std::uint64_t modulus);

    friend bool operator==(const CyclicGroup& a, const CyclicGroup& b) {
        return a.n == b.n;
    }
};

/// Immutable subset of Z_N: packed bit vector plus cached cardinality.
/// All set algebra below is word-parallel where it can be.
class GroupSet {
public:
    explicit GroupSet(CyclicGroup g);  // empty set

    static GroupSet from_residues(std::span<const std::uint64_t> xs, std::uint64_t n);
    static GroupSet from_residues(std::initializer_list<std::uint64_t> xs, std::uint64_t n);
    static GroupSet from_words(CyclicGroup g, std::vector<std::uint64_t> words);
    static GroupSet full(CyclicGroup g);
    static GroupSet singleton(std::uint64_t x, std::uint64_t n);

    const CyclicGroup& group() const { return group_; }
    std::uint64_t modulus() const { return group_.n; }
    std::uint64_t size() const { return card_; }
    bool empty() const { return card_ == 0; }
    double density() const { return static_cast<double>(card_) / static_cast<double>(group_.n); }

    bool contains(std::uint64_t x) const {
        return (words_[x >> 6] >> (x & 63)) & 1u;
    }

    /// Ascending residues.
    std::vector<std::uint64_t> residues() const;
    const std::vector<std::uint64_t>& words() const { return words_; }

    friend bool operator==(const GroupSet& a, const GroupSet& b) {
        return a.group_ == b.group_ && a.words_ == b.words_;
    }

private:
    CyclicGroup group_;
    std::vector<std::uint64_t> words_;
    std::uint64_t card_ = 0;
};

/// Exact representation counts of the additive convolution:
/// counts[x] = #{(a, b) in A x B : a + b = x mod N}.
struct ConvolutionTable {
    CyclicGroup group;
    std::vector<std::int64_t> counts;
};

GroupSet complement(const GroupSet& a);
GroupSet intersect(const GroupSet& a, const GroupSet& b);
GroupSet set_union(const GroupSet& a, const GroupSet& b);
GroupSet set_difference(const GroupSet& a, const GroupSet& b);
bool is_subset(const GroupSet& a, const GroupSet& b);

/// {-x : x in A}.
GroupSet negate_set(const GroupSet& a);
/// {x^{-1} : x in A}; prime modulus, 0 not in A.
GroupSet invert_set(const GroupSet& a);
/// {lambda * x : x in A}; gcd(lambda, N) = 1.
GroupSet dilate(const GroupSet& a, std::uint64_t lambda);

/// A + B = {a + b}.  Word-parallel: rotate the larger set once per element
/// of the smaller one.
GroupSet sumset(const GroupSet& a, const GroupSet& b);

/// Convolution counts; naive double loop up to `spectral_crossover`, DFT
/// above it (rounded back to exact integers, validated).
ConvolutionTable convolution_counts(const GroupSet& a, const GroupSet& b,
                                    std::uint64_t spectral_crossover = 512);

/// Integer threshold for "counts >= eps * N": ceil(eps*N), with a snap so
/// an intended integral eps*N is not bumped by float noise.
std::int64_t partial_sumset_threshold(double eps, std::uint64_t n);

/// A +_eps B = {x : (1_A * 1_B)(x) >= eps * N}, threshold as above.
GroupSet partial_sumset(const GroupSet& a, const GroupSet& b, double eps,
                        std::uint64_t spectral_crossover = 512);
/// A -_eps B = partial_sumset(A, -B, eps).
GroupSet partial_difference(const GroupSet& a, const GroupSet& b, double eps,
                            std::uint64_t spectral_crossover = 512);

/// (A + A) disjoint from A.
bool is_sum_free(const GroupSet& a);

/// {x * s : x in A, s in (A+A), s != 0}, plus 0 iff 0 in A+A.
/// Prime modulus, 0 not in A.  Callers test F_p^* coverage on the result.
GroupSet coverage_a_a_plus_a(const GroupSet& a);

/// E = X  intersect  (Y +_{dT/kappa} Z), Z = complement(X -_d Y), kappa = |X|/p.
/// Asserts the counting bound |E| <= |X| / T, which is exact at finite p.
GroupSet exception_set(const GroupSet& x, const GroupSet& y, double delta, double T);

void require_same_group(const GroupSet& a, const GroupSet& b);

}  // namespace znwrap
