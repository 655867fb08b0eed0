#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "znwrap/fourier.hpp"
#include "znwrap/group.hpp"

namespace znwrap {

/// d sampled characters x -> e^{2 pi i r_j x / N} with unimodular weights.
struct CharacterFamily {
    CyclicGroup group;
    std::vector<std::uint64_t> characters;  // residues r_j
    std::vector<cd> coefficients;           // |c_j| = 1

    std::size_t dim() const { return characters.size(); }
};

/// K = ceil(1/eps) equal half-open arcs [2 pi (i-1)/K, 2 pi i/K), 1-based,
/// the first one opening at angle 0.
struct ArcPartition {
    double epsilon = 1.0;
    std::uint64_t arc_count = 1;

    static ArcPartition for_granularity(double eps);
};

/// 1-based arc indices (i_1, ..., i_d); index j records which arc the j-th
/// character sends x to.  Computed in exact integer arithmetic, so boundary
/// angles always belong to the arc they open.
using BlockSignature = std::vector<std::uint64_t>;

BlockSignature block_signature(std::uint64_t x, const CharacterFamily& family,
                               const ArcPartition& arcs);

/// The eps-d-block partition of Z_N induced by a character family: two
/// elements share a block iff every character sends them to the same arc.
/// Only occupied blocks are enumerated (one scan of the group; K^d never
/// materializes).  Elements are grouped by a 128-bit running digest of the
/// arc indices; explicit signatures are reconstructed on demand from each
/// block's minimal representative.
class BlockPartition {
public:
    BlockPartition(CharacterFamily family, ArcPartition arcs);

    const CharacterFamily& family() const { return family_; }
    const ArcPartition& arcs() const { return arcs_; }
    std::uint64_t group_order() const { return family_.group.n; }

    std::uint32_t block_count() const { return static_cast<std::uint32_t>(reps_.size()); }
    std::uint32_t block_of(std::uint64_t x) const { return block_of_[x]; }
    /// Minimal element of block b.
    std::uint64_t representative(std::uint32_t b) const { return reps_[b]; }
    BlockSignature signature(std::uint32_t b) const;
    /// Members of block b, ascending.
    std::vector<std::uint64_t> members(std::uint32_t b) const;

private:
    CharacterFamily family_;
    ArcPartition arcs_;
    std::vector<std::uint32_t> block_of_;
    std::vector<std::uint64_t> reps_;
};

/// Union of blocks of one partition.  complement_wrapper flips the block
/// selection, so complements of wrappers are wrappers by construction.
class Wrapper {
public:
    Wrapper(std::shared_ptr<const BlockPartition> partition, std::vector<char> selected);

    const BlockPartition& partition() const { return *partition_; }
    std::shared_ptr<const BlockPartition> partition_ptr() const { return partition_; }
    const std::vector<char>& selected() const { return selected_; }
    std::uint64_t selected_block_count() const;

    /// The underlying subset of Z_N (cached after the first call).
    const GroupSet& materialize() const;

private:
    std::shared_ptr<const BlockPartition> partition_;
    std::vector<char> selected_;
    mutable std::shared_ptr<const GroupSet> set_;
};

Wrapper complement_wrapper(const Wrapper& w);

struct WienerBounds {
    double exact = 0;           // ||W||_w of the materialized set
    double block_majorant = 0;  // sum of per-block norms (triangle bound)
};

WienerBounds wrapper_wiener_norm(const Wrapper& w);

struct InverseIntersection {
    std::int64_t exact = 0;    // |materialize(W1) ∩ (materialize(W2) \ {0})^{-1}|
    double main_term = 0;      // |W1| |W2| / p
    double error_bound = 0;    // 2 sqrt(p) w1 w2
    double omega1 = 0;         // ||W1||_w
    double omega2 = 0;         // ||W2 \ {0}||_w (the set actually inverted)
    bool zero_removed = false;
};

/// Exact |W1 ∩ W2*| versus the main term; asserts
/// |exact - main| <= 2 sqrt(p) w1 w2 + 1 (the +1 absorbs dropping 0).
InverseIntersection intersect_with_inverse(const Wrapper& w1, const Wrapper& w2);

/// Draw d characters i.i.d. with probability proportional to |hat f|,
/// coefficient c_j = hat f(r_j) / |hat f(r_j)|.
CharacterFamily sample_characters(const SpectralFunction& f, std::size_t d,
                                  std::uint64_t seed);

struct DecomposeConfig {
    double d_cap_factor = 64;   // cap d at factor * (w/d)^2 * log(1/xi)
    double h_inf_factor = 10;   // accept when max residual off Y <= factor * delta
    int max_retries = 8;
    double grid_step = 0;       // 0 -> delta
};

/// f = g + h + k:
///   g  block-constant on the eps-d-block partition, values on the grid;
///   h  the small remainder off the exceptional set (|h| <= h_inf_factor * delta);
///   k  supported exactly on Y, |Y| <= floor(xi N).
struct Decomposition {
    SpectralFunction g, h, k;
    SpectralFunction approximant;  // unrounded sampled (w/d) sum c_j gamma_j
    GroupSet exceptional;          // Y = supp k
    double epsilon = 0, delta = 0, xi = 0;
    double wiener = 0;             // ||f||_w
    double grid = 0;
    double achieved_h_inf = 0;
    std::uint32_t dim = 0;
    int retries = 0;
    CharacterFamily family;
    ArcPartition arcs;
    std::shared_ptr<const BlockPartition> blocks;
};

/// Character-sampling decomposition: doubles d from ceil(log(1/xi)) until
/// the empirical L^p error of the sampled approximant is <= eps = delta/w,
/// then grids g per block (evaluated at the minimal element), takes the
/// floor(xi N) largest residuals as Y, and retries with more characters if
/// the residual ceiling off Y is missed.
Decomposition decompose(const SpectralFunction& f, double delta, double xi,
                        const DecomposeConfig& cfg, std::uint64_t seed);

struct WrapStats {
    double omega = 0;      // ||f||_w
    double epsilon = 0;    // granularity of the underlying decomposition
    double delta = 0;      // wrapping width actually used
    double xi = 0;
    double level_lo = 0, level_hi = 0;  // accepted g-band
    std::uint32_t dim = 0;
    int retries = 0;
    std::uint64_t wrapper_size = 0;
    std::uint64_t exceptional_size = 0;
    bool fallback_coarse = false;  // delta > ||f||_w path
};

struct WrapResult {
    Wrapper wrapper;
    GroupSet exceptional;
    WrapStats stats;
};

/// Wrap the level set L = {x : l1 <= Re f(x) < l2}: off the exceptional set,
/// L is contained in W and W only leaks into the delta-fringes of L.
/// Both inclusions are asserted pointwise on every run.
WrapResult wrap_level_set(const SpectralFunction& f, double l1, double l2,
                          double delta, double xi, std::uint64_t seed,
                          const DecomposeConfig& cfg = {});

/// Wrap {x : Re f(x) < eta} against the barrier {f >= eta + delta};
/// falls back to a coarse wrap at eta + w/2 when delta > w = ||f||_w.
WrapResult wrap_threshold(const SpectralFunction& f, double eta, double delta,
                          double xi, std::uint64_t seed,
                          const DecomposeConfig& cfg = {});

/// Wrap X_eta = complement(A +_eta B).  eta, delta are fractions of N (the
/// partial-sumset normalization); asserts
///   X_eta \ Y  ⊆  W   and   W \ Y  ⊆  complement(A +_{eta+delta} B).
WrapResult wrap_sumset_complement(const GroupSet& a, const GroupSet& b,
                                  double eta, double delta, double xi,
                                  std::uint64_t seed,
                                  const DecomposeConfig& cfg = {});

}  // namespace znwrap
