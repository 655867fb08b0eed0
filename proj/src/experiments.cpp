#include "znwrap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "znwrap/fourier.hpp"
#include "znwrap/rng.hpp"

namespace znwrap {

namespace {

// Residues strictly between lo and hi (real bounds, 0 < lo < hi <= p).
GroupSet open_interval(double lo, double hi, std::uint64_t p) {
    std::vector<std::uint64_t> xs;
    const std::uint64_t start = static_cast<std::uint64_t>(std::floor(lo)) + 1;
    const double top = std::ceil(hi) - 1;
    for (std::uint64_t x = start; static_cast<double>(x) <= top && x < p; ++x) {
        xs.push_back(x);
    }
    return GroupSet::from_residues(xs, p);
}

GroupSet inverse_closed_intersection(const GroupSet& s) {
    return intersect(s, invert_set(s));
}

std::int64_t i64(std::uint64_t v) { return static_cast<std::int64_t>(v); }

std::vector<std::int64_t> residues_i64(const GroupSet& s, std::size_t cap) {
    std::vector<std::int64_t> out;
    for (std::uint64_t x : s.residues()) {
        if (out.size() == cap) break;
        out.push_back(i64(x));
    }
    return out;
}

// Y* for exceptional sets that may contain 0: inversion ignores it, since
// x* = 0 never happens for x in F_p^*.
GroupSet invert_nonzero(const GroupSet& s) {
    if (!s.contains(0)) return s.empty() ? s : invert_set(s);
    const GroupSet v = set_difference(s, GroupSet::singleton(0, s.modulus()));
    return v.empty() ? v : invert_set(v);
}

void require_prime_set(const GroupSet& a, const char* who) {
    require_arg(a.group().prime, std::string(who) + ": modulus must be prime");
    require_arg(!a.empty(), std::string(who) + ": empty set");
}

}  // namespace

const char* extremal_kind_name(ExtremalKind k) {
    switch (k) {
        case ExtremalKind::eighth: return "eighth";
        case ExtremalKind::ninth: return "ninth";
        case ExtremalKind::lambda: return "lambda";
    }
    return "?";
}

const char* replay_kind_name(ReplayKind k) {
    switch (k) {
        case ReplayKind::a_a_a: return "a_a_a";
        case ReplayKind::sumfree_selfinv: return "sumfree_selfinv";
        case ReplayKind::a_plus_ainv: return "a_plus_ainv";
    }
    return "?";
}

GroupSet construct_extremal(ExtremalKind kind, std::uint64_t p,
                            std::optional<double> lambda) {
    require_arg(is_prime_u64(p) && p >= 3, "construct_extremal: p must be an odd prime");
    const double pd = static_cast<double>(p);
    switch (kind) {
        case ExtremalKind::eighth: {
            const GroupSet pset = open_interval(0, pd / 4, p);
            const GroupSet qset = open_interval(pd / 2, pd, p);
            GroupSet a = qset.empty() ? GroupSet(CyclicGroup(p))
                                      : intersect(pset, invert_set(qset));
            require_theorem(a.empty() || intersect(sumset(a, a), invert_set(a)).empty(),
                            "eighth construction: (A+A) meets A*");
            return a;
        }
        case ExtremalKind::ninth: {
            const GroupSet pset = open_interval(pd / 3, 2 * pd / 3, p);
            GroupSet a = pset.empty() ? GroupSet(CyclicGroup(p))
                                      : inverse_closed_intersection(pset);
            require_theorem(is_sum_free(a) || a.empty(),
                            "ninth construction: A is not sum-free");
            require_theorem(a.empty() || invert_set(a) == a,
                            "ninth construction: A != A*");
            return a;
        }
        case ExtremalKind::lambda: {
            require_arg(lambda.has_value(), "construct_extremal: lambda required");
            const double l = *lambda;
            require_arg(l > 0 && l < 1, "construct_extremal: lambda must lie in (0,1)");
            const GroupSet pset = open_interval(0, l * pd, p);
            GroupSet a = pset.empty() ? GroupSet(CyclicGroup(p))
                                      : inverse_closed_intersection(pset);
            require_theorem(a.empty() || invert_set(a) == a,
                            "lambda construction: A != A*");
            return a;
        }
    }
    throw std::invalid_argument("construct_extremal: unknown kind");
}

ExperimentReport check_cauchy_davenport(const GroupSet& a, const GroupSet& b) {
    require_same_group(a, b);
    require_prime_set(a, "check_cauchy_davenport");
    require_prime_set(b, "check_cauchy_davenport");
    const std::uint64_t p = a.modulus();
    const std::uint64_t lhs = sumset(a, b).size();
    const std::uint64_t rhs = std::min(p, a.size() + b.size() - 1);
    require_theorem(lhs >= rhs, "Cauchy-Davenport bound violated");

    ExperimentReport rep;
    rep.command = "check-cd";
    rep.params["p"] = i64(p);
    rep.params["size_a"] = i64(a.size());
    rep.params["size_b"] = i64(b.size());
    rep.results["sumset_size"] = i64(lhs);
    rep.results["lower_bound"] = i64(rhs);
    rep.results["asserted"] = true;
    return rep;
}

ExperimentReport check_pollard_partial(const GroupSet& a, const GroupSet& b, double eps) {
    require_same_group(a, b);
    require_prime_set(a, "check_pollard_partial");
    require_prime_set(b, "check_pollard_partial");
    require_arg(eps > 0 && eps < 1, "check_pollard_partial: eps must lie in (0,1)");
    const std::uint64_t p = a.modulus();
    const double pd = static_cast<double>(p);
    const double alpha = a.density();
    const double beta = b.density();

    const std::uint64_t lhs = partial_sumset(a, b, eps).size();
    const double rhs =
        static_cast<double>(std::min(p, a.size() + b.size())) - 2 * std::sqrt(eps) * pd;
    const bool in_range =
        eps >= 1.0 / (pd * pd) && eps < std::min(alpha * alpha, beta * beta);
    if (in_range) {
        require_theorem(static_cast<double>(lhs) >= rhs - 1e-9,
                        "Pollard partial-sumset bound violated in its exact range");
    }

    ExperimentReport rep;
    rep.command = "check-pollard";
    rep.params["p"] = i64(p);
    rep.params["eps"] = eps;
    rep.params["size_a"] = i64(a.size());
    rep.params["size_b"] = i64(b.size());
    rep.results["partial_sumset_size"] = i64(lhs);
    rep.results["lower_bound"] = rhs;
    rep.results["threshold"] = partial_sumset_threshold(eps, p);
    rep.results["in_exact_range"] = in_range;
    rep.results["asserted"] = in_range;
    return rep;
}

ExperimentReport verify_coverage(const GroupSet& a) {
    require_prime_set(a, "verify_coverage");
    require_arg(!a.contains(0), "verify_coverage: 0 in A");
    const std::uint64_t p = a.modulus();
    const GroupSet cov = coverage_a_a_plus_a(a);
    GroupSet missing = set_difference(complement(cov), GroupSet::singleton(0, p));

    ExperimentReport rep;
    rep.command = "verify-coverage";
    rep.params["p"] = i64(p);
    rep.params["size_a"] = i64(a.size());
    rep.results["product_size"] = i64(cov.size());
    rep.results["covers_units"] = missing.empty();
    rep.results["uncovered_count"] = i64(missing.size());
    rep.results["uncovered"] = residues_i64(missing, 64);
    return rep;
}

ExperimentReport verify_a_plus_ainv(const GroupSet& a, std::optional<double> eps) {
    require_prime_set(a, "verify_a_plus_ainv");
    require_arg(!a.contains(0), "verify_a_plus_ainv: 0 in A");
    const std::uint64_t p = a.modulus();
    const double pd = static_cast<double>(p);
    const GroupSet astar = invert_set(a);
    const std::uint64_t s = sumset(a, astar).size();
    const double reference = std::min(2 * std::sqrt(static_cast<double>(a.size()) * pd), pd);

    ExperimentReport rep;
    rep.command = "verify-aainv";
    rep.params["p"] = i64(p);
    rep.params["size_a"] = i64(a.size());
    rep.results["sum_size"] = i64(s);
    rep.results["reference"] = reference;
    rep.results["ratio"] = static_cast<double>(s) / reference;
    if (eps) {
        require_arg(*eps > 0 && *eps < 1, "verify_a_plus_ainv: eps must lie in (0,1)");
        rep.params["eps"] = *eps;
        rep.results["partial_sum_size"] = i64(partial_sumset(a, astar, *eps).size());
    }
    return rep;
}

namespace {

void fill_wrap_stats(ExperimentReport& rep, const char* tag, const WrapStats& st) {
    const std::string t(tag);
    rep.results[t + "_dim"] = i64(st.dim);
    rep.results[t + "_retries"] = static_cast<std::int64_t>(st.retries);
    rep.results[t + "_wrapper_size"] = i64(st.wrapper_size);
    rep.results[t + "_exceptional_size"] = i64(st.exceptional_size);
    rep.results[t + "_omega"] = st.omega;
    rep.results[t + "_fallback"] = st.fallback_coarse;
}

ExperimentReport replay_sumfree_selfinv(const GroupSet& a, const ReplayParams& pr,
                                        std::uint64_t seed) {
    const std::uint64_t p = a.modulus();
    const double pd = static_cast<double>(p);
    require_arg(is_sum_free(a), "replay: hypothesis violated: A is not sum-free");
    require_arg(invert_set(a) == a, "replay: hypothesis violated: A != A*");
    const double delta = pr.delta;
    const double xi = pr.xi;

    const GroupSet b = complement(partial_sumset(a, a, delta));
    require_theorem(is_subset(a, b), "replay: A not inside complement(A +_d A)");

    // One wrapper, placed between A and B: eta = delta/2 covers A's zero
    // convolution values, the extra delta/2 of leak stays inside B.
    WrapResult wr = wrap_sumset_complement(a, a, delta / 2, delta / 2, xi, seed);
    const GroupSet& w = wr.wrapper.materialize();
    const GroupSet& y = wr.exceptional;
    require_theorem(is_subset(set_difference(a, y), w), "replay: A \\ Y not covered by W");
    require_theorem(is_subset(set_difference(w, y), b), "replay: W \\ Y leaks past B");

    const GroupSet ystar = invert_nonzero(y);
    const GroupSet core = set_difference(a, set_union(y, ystar));
    const GroupSet winv = intersect(
        w, invert_nonzero(w));
    require_theorem(is_subset(core, winv), "replay: A \\ (Y u Y*) escapes W n W*");

    const InverseIntersection iv = intersect_with_inverse(wr.wrapper, wr.wrapper);
    require_theorem(core.size() <= static_cast<std::uint64_t>(iv.exact),
                    "replay: inverse intersection smaller than its witness set");

    const double alpha = a.density();
    const double beta = b.density();
    ExperimentReport rep;
    rep.command = "replay";
    rep.seed = seed;
    rep.params["kind"] = std::string("sumfree_selfinv");
    rep.params["p"] = i64(p);
    rep.params["delta"] = delta;
    rep.params["xi"] = xi;
    rep.results["alpha"] = alpha;
    rep.results["beta"] = beta;
    rep.results["one_minus_beta"] = 1 - beta;
    rep.results["two_sqrt_alpha"] = 2 * std::sqrt(alpha);
    rep.results["delta_quarter"] = std::pow(delta, 0.25);
    rep.results["l"] = static_cast<double>(iv.exact) / pd;
    rep.results["intersection"] = iv.exact;
    rep.results["intersection_main"] = iv.main_term;
    rep.results["intersection_bound"] = iv.error_bound;
    rep.results["core_density"] = core.density();
    rep.results["core_floor"] = alpha - 2 * xi;
    fill_wrap_stats(rep, "w", wr.stats);
    return rep;
}

ExperimentReport replay_a_a_a(const GroupSet& a, const ReplayParams& pr,
                              std::uint64_t seed) {
    const std::uint64_t p = a.modulus();
    const double pd = static_cast<double>(p);
    const GroupSet astar = invert_set(a);
    require_arg(intersect(sumset(a, a), astar).empty(),
                "replay: hypothesis violated: 1 lies in A(A+A)");
    const double delta = pr.delta;
    const double xi = pr.xi;
    const double T = pr.T > 0 ? pr.T : std::pow(delta, -0.1);
    require_arg(T > 1, "replay: T must be > 1");
    const double alpha = a.density();
    const double delta_r = delta * T / alpha;
    const double delta_s = delta_r * T / alpha;

    const GroupSet b = complement(partial_difference(astar, a, delta));
    require_theorem(is_subset(a, b), "replay: A not inside complement(A* -_d A)");
    require_arg(!b.empty(), "replay: degenerate chain: B is empty");

    const GroupSet e1 = exception_set(astar, a, delta, T);
    const GroupSet r = complement(partial_sumset(a, b, delta_r));
    require_theorem(is_subset(set_difference(astar, e1), r),
                    "replay: A* \\ E1 escapes R");
    require_arg(!r.empty(), "replay: degenerate chain: R is empty");

    const GroupSet nb = negate_set(b);
    const GroupSet e2 = exception_set(a, nb, delta_r, T);
    const GroupSet s = complement(partial_sumset(nb, r, delta_s));
    require_theorem(is_subset(set_difference(a, e2), s), "replay: A \\ E2 escapes S");

    WrapResult wb = wrap_sumset_complement(astar, negate_set(a), delta, delta, xi, seed);
    WrapResult wrp = wrap_sumset_complement(a, b, delta_r, delta_r, xi, seed + 1);
    WrapResult ws = wrap_sumset_complement(nb, r, delta_s, delta_s, xi, seed + 2);

    require_theorem(is_subset(set_difference(a, wb.exceptional), wb.wrapper.materialize()),
                    "replay: A \\ Y_B not covered by W_B");
    require_theorem(
        is_subset(set_difference(astar, set_union(e1, wrp.exceptional)),
                  wrp.wrapper.materialize()),
        "replay: A* \\ (E1 u Y_R) not covered by W_R");
    require_theorem(
        is_subset(set_difference(a, set_union(e2, ws.exceptional)),
                  ws.wrapper.materialize()),
        "replay: A \\ (E2 u Y_S) not covered by W_S");

    GroupSet removed = set_union(wb.exceptional, invert_nonzero(e1));
    removed = set_union(removed, invert_nonzero(wrp.exceptional));
    removed = set_union(removed, e2);
    removed = set_union(removed, ws.exceptional);
    const GroupSet aprime = set_difference(a, removed);

    const GroupSet wr_star = invert_nonzero(wrp.wrapper.materialize());
    require_theorem(is_subset(aprime, intersect(wb.wrapper.materialize(), wr_star)),
                    "replay: A' escapes W_B n W_R*");
    require_theorem(is_subset(aprime, intersect(ws.wrapper.materialize(), wr_star)),
                    "replay: A' escapes W_S n W_R*");

    const InverseIntersection ivb = intersect_with_inverse(wb.wrapper, wrp.wrapper);
    const InverseIntersection ivs = intersect_with_inverse(ws.wrapper, wrp.wrapper);
    require_theorem(aprime.size() <= static_cast<std::uint64_t>(ivb.exact),
                    "replay: |W_B n W_R*| below its witness set");
    require_theorem(aprime.size() <= static_cast<std::uint64_t>(ivs.exact),
                    "replay: |W_S n W_R*| below its witness set");

    const double beta = b.density();
    const double rd = r.density();
    const double sd = s.density();
    // Pollard applied to (-B) +_{delta_s} R gives s <= 1 - beta - r + 2 sqrt(delta_s)
    // whenever delta_s sits in the exact range of the partial bound.
    const bool pollard_range = delta_s >= 1.0 / (pd * pd) &&
                               delta_s < std::min(beta * beta, rd * rd);
    if (pollard_range) {
        require_theorem(sd <= 1 - beta - rd + 2 * std::sqrt(delta_s) + 1e-9,
                        "replay: Pollard consequence for S violated in range");
    }

    ExperimentReport rep;
    rep.command = "replay";
    rep.seed = seed;
    rep.params["kind"] = std::string("a_a_a");
    rep.params["p"] = i64(p);
    rep.params["delta"] = delta;
    rep.params["xi"] = xi;
    rep.params["T"] = T;
    rep.results["alpha"] = alpha;
    rep.results["beta"] = beta;
    rep.results["r"] = rd;
    rep.results["s"] = sd;
    rep.results["delta_r"] = delta_r;
    rep.results["delta_s"] = delta_s;
    rep.results["e1_size"] = i64(e1.size());
    rep.results["e2_size"] = i64(e2.size());
    rep.results["alpha_prime"] = aprime.density();
    rep.results["l"] = static_cast<double>(ivb.exact) / pd;
    rep.results["l_prime"] = static_cast<double>(ivs.exact) / pd;
    rep.results["r_beta"] = rd * beta;
    rep.results["r_s"] = rd * sd;
    rep.results["r_one_minus_r_half"] = rd * (1 - rd) / 2;
    rep.results["pollard_range"] = pollard_range;
    rep.results["pollard_rhs"] = 1 - beta - rd + 2 * std::sqrt(delta_s);
    fill_wrap_stats(rep, "wb", wb.stats);
    fill_wrap_stats(rep, "wr", wrp.stats);
    fill_wrap_stats(rep, "ws", ws.stats);
    return rep;
}

ExperimentReport replay_a_plus_ainv(const GroupSet& a, const ReplayParams& pr,
                                    std::uint64_t seed) {
    const std::uint64_t p = a.modulus();
    const GroupSet astar = invert_set(a);
    const double xi = pr.xi;
    const double alpha = a.density();
    // The argument needs T = alpha^{3/4} eps^{-1/4} > 1, so cap eps at
    // alpha^3 / 2; the requested value is kept in the report.
    const double eps = std::min(pr.delta, 0.5 * alpha * alpha * alpha);
    const double T = pr.T > 0 ? pr.T : std::pow(alpha, 0.75) * std::pow(eps, -0.25);
    require_arg(T > 1, "replay: T must be > 1");
    const double delta_l = eps * T / alpha;
    const double delta_p = delta_l * T / alpha;

    // B may come out empty (near-full A): the chain below degenerates to
    // L = P = G and every inclusion holds trivially, so just proceed.
    const GroupSet b = complement(partial_sumset(a, astar, eps));

    const GroupSet l = complement(partial_difference(b, a, delta_l));
    const GroupSet e1 = exception_set(astar, negate_set(a), eps, T);
    require_theorem(is_subset(set_difference(astar, e1), l), "replay: A* \\ E1 escapes L");

    const GroupSet lstar = complement(partial_difference(b, astar, delta_l));
    const GroupSet e1p = exception_set(a, negate_set(astar), eps, T);
    require_theorem(is_subset(set_difference(a, e1p), lstar),
                    "replay: A \\ E1' escapes L'");

    const GroupSet pp = complement(partial_difference(b, l, delta_p));
    const GroupSet e2 = exception_set(a, b, delta_l, T);
    require_theorem(is_subset(set_difference(a, e2), pp), "replay: A \\ E2 escapes P");

    WrapResult wl = wrap_sumset_complement(b, negate_set(a), delta_l, delta_l, xi, seed);
    WrapResult wlp = wrap_sumset_complement(b, negate_set(astar), delta_l, delta_l, xi,
                                            seed + 1);
    WrapResult wp = wrap_sumset_complement(b, negate_set(l), delta_p, delta_p, xi,
                                           seed + 2);

    require_theorem(
        is_subset(set_difference(astar, set_union(e1, wl.exceptional)),
                  wl.wrapper.materialize()),
        "replay: A* \\ (E1 u Y_L) not covered by W_L");
    require_theorem(
        is_subset(set_difference(a, set_union(e1p, wlp.exceptional)),
                  wlp.wrapper.materialize()),
        "replay: A \\ (E1' u Y_L') not covered by W_L'");
    require_theorem(
        is_subset(set_difference(a, set_union(e2, wp.exceptional)),
                  wp.wrapper.materialize()),
        "replay: A \\ (E2 u Y_P) not covered by W_P");

    const GroupSet wl_star = invert_nonzero(wl.wrapper.materialize());
    const GroupSet drop_main = set_union(
        set_union(invert_nonzero(e1), invert_nonzero(wl.exceptional)),
        set_union(e2, wp.exceptional));
    const GroupSet aprime = set_difference(a, drop_main);
    require_theorem(is_subset(aprime, intersect(wl_star, wp.wrapper.materialize())),
                    "replay: A' escapes W_L* n W_P");

    const GroupSet drop_lem = set_union(
        set_union(invert_nonzero(e1), invert_nonzero(wl.exceptional)),
        set_union(e1p, wlp.exceptional));
    const GroupSet aprime_lem = set_difference(a, drop_lem);
    require_theorem(is_subset(aprime_lem, intersect(wl_star, wlp.wrapper.materialize())),
                    "replay: A' escapes W_L* n W_L'");

    const InverseIntersection iv_main = intersect_with_inverse(wp.wrapper, wl.wrapper);
    const InverseIntersection iv_lem = intersect_with_inverse(wlp.wrapper, wl.wrapper);
    require_theorem(aprime.size() <= static_cast<std::uint64_t>(iv_main.exact),
                    "replay: |W_P n W_L*| below its witness set");
    require_theorem(aprime_lem.size() <= static_cast<std::uint64_t>(iv_lem.exact),
                    "replay: |W_L' n W_L*| below its witness set");

    const double beta = b.density();
    const double ld = l.density();
    const double lpd = lstar.density();
    ExperimentReport rep;
    rep.command = "replay";
    rep.seed = seed;
    rep.params["kind"] = std::string("a_plus_ainv");
    rep.params["p"] = i64(p);
    rep.params["delta"] = pr.delta;
    rep.params["xi"] = xi;
    rep.params["T"] = T;
    rep.results["alpha"] = alpha;
    rep.results["eps_effective"] = eps;
    rep.results["beta"] = beta;
    rep.results["l"] = ld;
    rep.results["l_prime"] = lpd;
    rep.results["p_density"] = pp.density();
    rep.results["delta_l"] = delta_l;
    rep.results["delta_p"] = delta_p;
    rep.results["e1_size"] = i64(e1.size());
    rep.results["e1p_size"] = i64(e1p.size());
    rep.results["e2_size"] = i64(e2.size());
    rep.results["alpha_prime"] = aprime.density();
    rep.results["alpha_prime_lemma"] = aprime_lem.density();
    rep.results["intersection_main"] = iv_main.exact;
    rep.results["intersection_lemma"] = iv_lem.exact;
    rep.results["l_l_prime"] = ld * lpd;
    rep.results["chain_lhs"] = alpha * (1 - 2 / T);
    rep.results["chain_rhs"] = ld * (1 - beta - ld + 2 * std::sqrt(delta_p));
    fill_wrap_stats(rep, "wl", wl.stats);
    fill_wrap_stats(rep, "wlp", wlp.stats);
    fill_wrap_stats(rep, "wp", wp.stats);
    return rep;
}

}  // namespace

ExperimentReport replay_proof(ReplayKind kind, const GroupSet& a,
                              const ReplayParams& params, std::uint64_t seed) {
    require_prime_set(a, "replay_proof");
    require_arg(!a.contains(0), "replay_proof: 0 in A");
    require_arg(params.delta > 0 && params.delta < 1,
                "replay_proof: delta must lie in (0,1)");
    require_arg(params.xi > 0 && params.xi < 1, "replay_proof: xi must lie in (0,1)");
    switch (kind) {
        case ReplayKind::sumfree_selfinv: return replay_sumfree_selfinv(a, params, seed);
        case ReplayKind::a_a_a: return replay_a_a_a(a, params, seed);
        case ReplayKind::a_plus_ainv: return replay_a_plus_ainv(a, params, seed);
    }
    throw std::invalid_argument("replay_proof: unknown kind");
}

namespace {

// Inversion orbits {x, x^{-1}} of F_p^*, ordered by minimal element.
std::vector<std::vector<std::uint64_t>> inversion_orbits(std::uint64_t p) {
    std::vector<std::vector<std::uint64_t>> orbits;
    std::vector<char> seen(p, 0);
    for (std::uint64_t x = 1; x < p; ++x) {
        if (seen[x]) continue;
        const std::uint64_t y = inverse_mod(x, p);
        seen[x] = seen[y] = 1;
        if (x == y) orbits.push_back({x});
        else orbits.push_back({x, y});
    }
    return orbits;
}

struct SumfreeSearch {
    std::uint64_t p;
    const std::vector<std::vector<std::uint64_t>>& orbits;
    std::vector<std::uint64_t> suffix_weight;
    std::vector<std::uint64_t> current;
    std::vector<std::uint64_t> best;
    std::uint64_t nodes = 0;

    bool stays_sum_free(const std::vector<std::uint64_t>& orbit) const {
        // Candidate = current + orbit; reject any a + b = c within it.
        std::vector<char> in(p, 0);
        for (std::uint64_t v : current) in[v] = 1;
        for (std::uint64_t v : orbit) in[v] = 1;
        for (std::uint64_t v : orbit) {
            for (std::uint64_t u : current) {
                std::uint64_t s = u + v;
                if (s >= p) s -= p;
                if (in[s]) return false;
                s = (v >= u) ? v - u : v + p - u;
                if (in[s]) return false;
                s = (u >= v) ? u - v : u + p - v;
                if (in[s]) return false;
            }
            for (std::uint64_t u : orbit) {
                std::uint64_t s = u + v;
                if (s >= p) s -= p;
                if (in[s]) return false;
            }
        }
        return true;
    }

    void run(std::size_t i) {
        ++nodes;
        if (current.size() + suffix_weight[i] <= best.size()) return;
        if (i == orbits.size()) {
            if (current.size() > best.size()) best = current;
            return;
        }
        if (stays_sum_free(orbits[i])) {
            const std::size_t before = current.size();
            current.insert(current.end(), orbits[i].begin(), orbits[i].end());
            run(i + 1);
            current.resize(before);
        }
        run(i + 1);
    }
};

struct CoverageSearch {
    std::uint64_t p;
    std::uint64_t t;
    std::vector<std::uint64_t> inv;  // inverse table
    std::vector<std::uint64_t> current;
    std::vector<std::uint64_t> best;
    std::uint64_t nodes = 0;

    // t stays outside A(A+A) iff (A+A) never meets t A*.
    bool feasible_with(std::uint64_t x) const {
        std::vector<char> in(p, 0), target(p, 0);
        for (std::uint64_t v : current) in[v] = 1;
        in[x] = 1;
        for (std::uint64_t v : current) target[mul_mod(t, inv[v], p)] = 1;
        target[mul_mod(t, inv[x], p)] = 1;
        for (std::uint64_t u = 0; u < p; ++u) {
            if (!in[u]) continue;
            for (std::uint64_t v = u; v < p; ++v) {
                if (!in[v]) continue;
                std::uint64_t s = u + v;
                if (s >= p) s -= p;
                if (target[s]) return false;
            }
        }
        return true;
    }

    void run(std::uint64_t x) {
        ++nodes;
        if (current.size() + (p - x) <= best.size()) return;
        if (x == p) {
            if (current.size() > best.size()) best = current;
            return;
        }
        if (feasible_with(x)) {
            current.push_back(x);
            run(x + 1);
            current.pop_back();
        }
        run(x + 1);
    }
};

std::uint64_t least_nonresidue(std::uint64_t p) {
    for (std::uint64_t q = 2; q < p; ++q) {
        if (pow_mod(q, (p - 1) / 2, p) == p - 1) return q;
    }
    return 1;  // p = 2 or 3 have no nonresidue below p
}

}  // namespace

ExperimentReport exhaustive_extremal(std::uint64_t p, ExhaustiveProblem problem) {
    require_arg(is_prime_u64(p) && p >= 3, "exhaustive_extremal: p must be an odd prime");

    ExperimentReport rep;
    rep.command = "exhaustive";
    rep.params["p"] = i64(p);

    if (problem == ExhaustiveProblem::max_sumfree_selfinv) {
        require_arg(p <= 43, "exhaustive_extremal: max_sumfree_selfinv capped at p = 43");
        const auto orbits = inversion_orbits(p);
        SumfreeSearch search{p, orbits, {}, {}, {}, 0};
        search.suffix_weight.assign(orbits.size() + 1, 0);
        for (std::size_t i = orbits.size(); i-- > 0;) {
            search.suffix_weight[i] = search.suffix_weight[i + 1] + orbits[i].size();
        }
        search.run(0);
        std::sort(search.best.begin(), search.best.end());
        const GroupSet witness = GroupSet::from_residues(search.best, p);
        require_theorem(is_sum_free(witness) || witness.empty(),
                        "exhaustive: witness not sum-free");
        require_theorem(witness.empty() || invert_set(witness) == witness,
                        "exhaustive: witness not inverse-closed");
        rep.params["problem"] = std::string("max_sumfree_selfinv");
        rep.results["optimum"] = i64(witness.size());
        rep.results["witness"] = residues_i64(witness, 64);
        rep.results["orbits"] = i64(orbits.size());
        rep.results["nodes"] = i64(search.nodes);
        return rep;
    }

    require_arg(p <= 23, "exhaustive_extremal: min_alpha_coverage capped at p = 23");
    std::vector<std::uint64_t> inv(p, 0);
    for (std::uint64_t x = 1; x < p; ++x) inv[x] = inverse_mod(x, p);
    // Dilation A -> cA turns the escape target t into c^2 t, so one
    // representative per square class of t suffices.
    std::vector<std::uint64_t> targets{1};
    if (p > 3) targets.push_back(least_nonresidue(p));
    std::vector<std::uint64_t> best;
    std::uint64_t best_t = 1, nodes = 0;
    for (std::uint64_t t : targets) {
        CoverageSearch search{p, t, inv, {}, {}, 0};
        search.run(1);
        nodes += search.nodes;
        if (search.best.size() > best.size()) {
            best = search.best;
            best_t = t;
        }
    }
    std::sort(best.begin(), best.end());
    const GroupSet witness = GroupSet::from_residues(best, p);
    if (!witness.empty()) {
        require_theorem(!coverage_a_a_plus_a(witness).contains(best_t),
                        "exhaustive: witness does not actually miss its target");
    }
    rep.params["problem"] = std::string("min_alpha_coverage");
    rep.results["optimum"] = i64(witness.size());
    rep.results["witness"] = residues_i64(witness, 64);
    rep.results["escaped_target"] = i64(best_t);
    rep.results["nodes"] = i64(nodes);
    return rep;
}

ExperimentReport stochastic_search(std::uint64_t p, SearchObjective objective,
                                   std::uint64_t budget, std::uint64_t seed) {
    require_arg(is_prime_u64(p) && p >= 3, "stochastic_search: p must be an odd prime");
    Rng rng(seed);

    ExperimentReport rep;
    rep.command = "anneal";
    rep.seed = seed;
    rep.params["p"] = i64(p);
    rep.params["budget"] = i64(budget);

    const double t0 = 2.0;
    const double t_end = 0.05;
    const double cooling = budget > 0 ? std::pow(t_end / t0, 1.0 / static_cast<double>(budget)) : 1.0;

    if (objective == SearchObjective::max_sumfree_selfinv) {
        const auto orbits = inversion_orbits(p);
        std::vector<char> in_orbit(orbits.size(), 0);
        std::vector<char> member(p, 0);
        std::uint64_t size = 0;

        auto orbit_feasible = [&](std::size_t i) {
            // Would current + orbit i stay sum-free?  Any violating triple
            // involves an orbit element as a summand (v + u in the set) or
            // as the sum itself (v - u in the set).
            auto in_cand = [&](std::uint64_t z) {
                if (member[z]) return true;
                for (std::uint64_t w : orbits[i]) {
                    if (w == z) return true;
                }
                return false;
            };
            for (std::uint64_t v : orbits[i]) {
                for (std::uint64_t u = 1; u < p; ++u) {
                    if (!in_cand(u)) continue;
                    std::uint64_t s = u + v;
                    if (s >= p) s -= p;
                    if (in_cand(s)) return false;
                    s = (v >= u) ? v - u : v + p - u;
                    if (in_cand(s)) return false;
                }
            }
            return true;
        };
        auto apply = [&](std::size_t i, bool on) {
            in_orbit[i] = on ? 1 : 0;
            for (std::uint64_t v : orbits[i]) member[v] = on ? 1 : 0;
            if (on) size += orbits[i].size();
            else size -= orbits[i].size();
        };

        // Seeded start: the middle-third inverse-closed set, orbit by orbit.
        const GroupSet init = construct_extremal(ExtremalKind::ninth, p);
        for (std::size_t i = 0; i < orbits.size(); ++i) {
            if (init.contains(orbits[i][0]) && orbit_feasible(i)) apply(i, true);
        }

        std::uint64_t best = size;
        std::vector<char> best_member = member;
        double temp = t0;
        std::uint64_t accepted = 0;
        for (std::uint64_t step = 0; step < budget; ++step, temp *= cooling) {
            const std::size_t i = rng.next_below(orbits.size());
            if (in_orbit[i]) {
                const double d = -static_cast<double>(orbits[i].size());
                if (std::exp(d / temp) > rng.next_double()) {
                    apply(i, false);
                    ++accepted;
                }
            } else if (orbit_feasible(i)) {
                apply(i, true);  // uphill, always take it
                ++accepted;
                if (size > best) {
                    best = size;
                    best_member = member;
                }
            }
        }
        std::vector<std::uint64_t> xs;
        for (std::uint64_t x = 1; x < p; ++x) {
            if (best_member[x]) xs.push_back(x);
        }
        const GroupSet witness = GroupSet::from_residues(xs, p);
        require_theorem(is_sum_free(witness) || witness.empty(),
                        "anneal: witness not sum-free");
        require_theorem(witness.empty() || invert_set(witness) == witness,
                        "anneal: witness not inverse-closed");
        rep.params["objective"] = std::string("max_sumfree_selfinv");
        rep.results["best_size"] = i64(best);
        rep.results["witness"] = residues_i64(witness, 64);
        rep.results["accepted"] = i64(accepted);
        return rep;
    }

    // max_noncover: keep 1 outside A(A+A); single-element flips, infeasible
    // states carry a p-weight penalty per witness of coverage.
    std::vector<std::uint64_t> inv(p, 0);
    for (std::uint64_t x = 1; x < p; ++x) inv[x] = inverse_mod(x, p);
    std::vector<char> member(p, 0);

    auto cover_witnesses = [&]() {
        // #{a in A : a^{-1} in A + A}
        std::vector<char> sums(p, 0);
        std::vector<std::uint64_t> xs;
        for (std::uint64_t x = 1; x < p; ++x) {
            if (member[x]) xs.push_back(x);
        }
        for (std::uint64_t u : xs) {
            for (std::uint64_t v : xs) {
                std::uint64_t s = u + v;
                if (s >= p) s -= p;
                sums[s] = 1;
            }
        }
        std::uint64_t c = 0;
        for (std::uint64_t x : xs) {
            if (sums[inv[x]]) ++c;
        }
        return c;
    };
    auto energy = [&](std::uint64_t size, std::uint64_t witnesses) {
        return static_cast<double>(size) -
               static_cast<double>(p) * static_cast<double>(witnesses);
    };

    const GroupSet init = construct_extremal(ExtremalKind::eighth, p);
    std::uint64_t size = init.size();
    for (std::uint64_t x : init.residues()) member[x] = 1;

    std::uint64_t witnesses = cover_witnesses();
    double cur = energy(size, witnesses);
    std::uint64_t best = size;
    std::vector<char> best_member = member;
    require_theorem(witnesses == 0, "anneal: seeded start covers 1");
    double temp = t0;
    std::uint64_t accepted = 0;
    for (std::uint64_t step = 0; step < budget; ++step, temp *= cooling) {
        const std::uint64_t x = 1 + rng.next_below(p - 1);
        member[x] ^= 1;
        const std::uint64_t nsize = size + (member[x] ? 1 : -1);
        const std::uint64_t nwit = cover_witnesses();
        const double cand = energy(nsize, nwit);
        if (cand >= cur || std::exp((cand - cur) / temp) > rng.next_double()) {
            size = nsize;
            witnesses = nwit;
            cur = cand;
            ++accepted;
            if (witnesses == 0 && size > best) {
                best = size;
                best_member = member;
            }
        } else {
            member[x] ^= 1;
        }
    }
    std::vector<std::uint64_t> xs;
    for (std::uint64_t x = 1; x < p; ++x) {
        if (best_member[x]) xs.push_back(x);
    }
    const GroupSet witness = GroupSet::from_residues(xs, p);
    require_theorem(witness.empty() || !coverage_a_a_plus_a(witness).contains(1),
                    "anneal: best set covers 1 after all");
    rep.params["objective"] = std::string("max_noncover");
    rep.results["best_size"] = i64(witness.size());
    rep.results["witness"] = residues_i64(witness, 64);
    rep.results["accepted"] = i64(accepted);
    return rep;
}

}  // namespace znwrap
