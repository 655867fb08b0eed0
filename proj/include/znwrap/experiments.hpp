#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "znwrap/group.hpp"
#include "znwrap/report.hpp"
#include "znwrap/wrapper.hpp"

namespace znwrap {

enum class ExtremalKind { eighth, ninth, lambda };

/// Extremal constructions over F_p (strict interval bounds mapped to
/// residue ranges):
///   eighth : A = P ∩ Q*,  P = (0, p/4),  Q = (p/2, p).   Density -> 1/8;
///            (A+A) ∩ A* = ∅ exactly, so 1 is never a product x(a+a').
///   ninth  : A = P ∩ P*,  P = (p/3, 2p/3).  Sum-free and A = A*; -> 1/9.
///   lambda : A = P ∩ P*,  P = (0, lambda p).  |A| ≈ lambda^2 p with
///            |A + A*| ≈ 2 lambda p.
GroupSet construct_extremal(ExtremalKind kind, std::uint64_t p,
                            std::optional<double> lambda = std::nullopt);

const char* extremal_kind_name(ExtremalKind k);

/// |A + B| >= min(p, |A| + |B| - 1); asserted (Cauchy–Davenport).
ExperimentReport check_cauchy_davenport(const GroupSet& a, const GroupSet& b);

/// |A +_eps B| >= min(p, |A| + |B|) - 2 sqrt(eps) p.  Asserted when
/// 1/p^2 <= eps < min(alpha^2, beta^2) (exact in that range); outside the
/// range the sides are only reported.
ExperimentReport check_pollard_partial(const GroupSet& a, const GroupSet& b, double eps);

/// Does A(A+A) cover F_p^*?  Reports the uncovered residues (truncated).
ExperimentReport verify_coverage(const GroupSet& a);

/// |A + A*| against min(2 sqrt(|A| p), p); optional eps adds the partial
/// sumset |A +_eps A*|.
ExperimentReport verify_a_plus_ainv(const GroupSet& a,
                                    std::optional<double> eps = std::nullopt);

enum class ReplayKind { a_a_a, sumfree_selfinv, a_plus_ainv };

struct ReplayParams {
    double delta = 0.02;
    double xi = 0.01;
    double T = 0;  // 0 -> delta^{-0.1} (a_a_a) or alpha^{3/4} eps^{-1/4} (a_plus_ainv)
};

/// Re-run a proof pipeline at a concrete prime: build the partial-sumset
/// complements, exception sets and wrappers of the corresponding argument,
/// assert every structural inclusion pointwise, and report the measured
/// densities (beta, r, s, l, l') next to the inequality sides.  Asymptotic
/// constants are reported, never asserted.
ExperimentReport replay_proof(ReplayKind kind, const GroupSet& a,
                              const ReplayParams& params, std::uint64_t seed);

const char* replay_kind_name(ReplayKind k);

enum class ExhaustiveProblem { max_sumfree_selfinv, min_alpha_coverage };

/// Exact optima by branch-and-bound:
///   max_sumfree_selfinv : largest sum-free A = A* ⊆ F_p^*, searched over
///                         inversion orbits {x, x^{-1}}  (p <= 43);
///   min_alpha_coverage  : largest |A| for which some t in F_p^* escapes
///                         A(A+A); t ranges over one representative per
///                         square class  (p <= 23).
ExperimentReport exhaustive_extremal(std::uint64_t p, ExhaustiveProblem problem);

enum class SearchObjective { max_sumfree_selfinv, max_noncover };

/// Simulated annealing with geometric cooling.  max_sumfree_selfinv flips
/// inversion orbits and keeps sum-freeness as a hard constraint;
/// max_noncover flips single elements with a penalty on covering t = 1.
/// budget = 0 returns the seeded initial feasible set.
ExperimentReport stochastic_search(std::uint64_t p, SearchObjective objective,
                                   std::uint64_t budget, std::uint64_t seed);

}  // namespace znwrap
