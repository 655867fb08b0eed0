// Acceptance sweep: nine end-to-end checks over the whole library, one
// pass/fail line each.  Exits nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "znwrap/experiments.hpp"
#include "znwrap/fourier.hpp"
#include "znwrap/group.hpp"
#include "znwrap/rng.hpp"
#include "znwrap/wrapper.hpp"

using namespace znwrap;

namespace {

constexpr double kTau = 6.283185307179586;

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::int64_t geti(const ExperimentReport& rep, const std::string& key) {
    return std::get<std::int64_t>(rep.results.at(key));
}

double getd(const ExperimentReport& rep, const std::string& key) {
    return std::get<double>(rep.results.at(key));
}

GroupSet random_set(std::uint64_t n, double density, Rng& rng) {
    std::vector<std::uint64_t> xs;
    for (std::uint64_t x = 0; x < n; ++x) {
        if (rng.next_double() < density) xs.push_back(x);
    }
    return GroupSet::from_residues(xs, n);
}

GroupSet random_subset_of_size(std::uint64_t n, std::uint64_t k, Rng& rng) {
    std::vector<std::uint64_t> xs(n);
    std::iota(xs.begin(), xs.end(), 0);
    for (std::uint64_t i = 0; i < k; ++i) {
        std::swap(xs[i], xs[i + rng.next_below(n - i)]);
    }
    xs.resize(k);
    return GroupSet::from_residues(xs, n);
}

std::vector<std::uint64_t> primes_between(std::uint64_t lo, std::uint64_t hi) {
    std::vector<char> composite(hi + 1, 0);
    std::vector<std::uint64_t> out;
    for (std::uint64_t q = 2; q <= hi; ++q) {
        if (composite[q]) continue;
        if (q >= lo) out.push_back(q);
        for (std::uint64_t m = q * q; m <= hi; m += q) composite[m] = 1;
    }
    return out;
}

// Independent oracle: group F_p^* into {x, x^{-1}} orbits, enumerate every
// union of orbits, keep the sum-free ones.
std::uint64_t orbit_enumeration_optimum(std::uint64_t p) {
    std::vector<char> seen(p, 0);
    std::vector<std::vector<std::uint64_t>> orbits;
    for (std::uint64_t x = 1; x < p; ++x) {
        if (seen[x]) continue;
        const std::uint64_t ix = inverse_mod(x, p);
        seen[x] = seen[ix] = 1;
        if (x == ix) orbits.push_back({x});
        else orbits.push_back({x, ix});
    }
    std::uint64_t best = 0;
    for (std::uint64_t m = 0; m < (1ULL << orbits.size()); ++m) {
        std::vector<char> in(p, 0);
        std::uint64_t size = 0;
        for (std::size_t i = 0; i < orbits.size(); ++i) {
            if (!(m >> i & 1)) continue;
            for (std::uint64_t v : orbits[i]) {
                in[v] = 1;
                ++size;
            }
        }
        if (size <= best) continue;
        bool ok = true;
        for (std::uint64_t u = 1; ok && u < p; ++u) {
            if (!in[u]) continue;
            for (std::uint64_t v = u; ok && v < p; ++v) {
                if (in[v] && in[(u + v) % p]) ok = false;
            }
        }
        if (ok) best = size;
    }
    return best;
}

// ---- the nine criteria ---------------------------------------------------

void criterion_weil_sweep() {
    for (std::uint64_t p : {std::uint64_t(101), std::uint64_t(499)}) {
        const KloostermanSweep sw = kloosterman_sweep(p);
        expect(sw.violations == 0,
               "Weil bound violated at p=" + std::to_string(p));
        expect(sw.max_magnitude <= sw.weil_bound + 1e-9,
               "sweep maximum above the bound at p=" + std::to_string(p));
    }
}

void criterion_convolution_agreement() {
    Rng rng(1002);
    for (std::uint64_t n : {std::uint64_t(17), std::uint64_t(101),
                            std::uint64_t(256), std::uint64_t(1009)}) {
        for (int i = 0; i < 1000; ++i) {
            const GroupSet a = random_set(n, rng.next_double(), rng);
            const GroupSet b = random_set(n, rng.next_double(), rng);
            // crossover pins the path: huge -> double loop, 1 -> spectral
            const ConvolutionTable naive = convolution_counts(a, b, ~std::uint64_t(0));
            const ConvolutionTable fast = convolution_counts(a, b, 1);
            expect(naive.counts == fast.counts,
                   "convolution mismatch at N=" + std::to_string(n) + " rep " +
                       std::to_string(i));
        }
    }
}

void criterion_constructions() {
    const double p_top = 10007.0;
    const double tol = 2.0 / std::cbrt(p_top);
    for (std::uint64_t p : primes_between(7, 10007)) {
        const GroupSet eighth = construct_extremal(ExtremalKind::eighth, p);
        if (!eighth.empty()) {
            expect(intersect(sumset(eighth, eighth), invert_set(eighth)).empty(),
                   "(A+A) meets A* for the eighth set at p=" + std::to_string(p));
        }
        const GroupSet ninth = construct_extremal(ExtremalKind::ninth, p);
        expect(is_sum_free(ninth),
               "ninth set not sum-free at p=" + std::to_string(p));
        if (!ninth.empty()) {
            expect(invert_set(ninth) == ninth,
                   "ninth set not self-inverse at p=" + std::to_string(p));
        }
        if (p == 10007) {
            expect(std::abs(eighth.density() - 1.0 / 8) <= tol,
                   "eighth density off at p=10007");
            expect(std::abs(ninth.density() - 1.0 / 9) <= tol,
                   "ninth density off at p=10007");
            expect(!coverage_a_a_plus_a(eighth).contains(1),
                   "1 covered by A(A+A) for the eighth set at p=10007");
        }
    }
}

void criterion_decomposition_contract() {
    const std::uint64_t n = 1009;
    const std::uint64_t k = static_cast<std::uint64_t>(0.3 * n);
    Rng rng(1004);
    for (int run = 0; run < 50; ++run) {
        const GroupSet a = random_subset_of_size(n, k, rng);
        const GroupSet b = random_subset_of_size(n, k, rng);
        const SpectralFunction f =
            SpectralFunction::from_counts(convolution_counts(a, b));
        const double omega = wiener_norm(f);
        const double delta = 0.1 * omega;
        const Decomposition dec = decompose(f, delta, 0.01, DecomposeConfig{}, 2000 + run);

        expect(dec.exceptional.size() <= 10, "exceptional support too large");
        const double ceiling = 10 * delta * (1 + 1e-9);
        const double osc_bound = kTau * dec.epsilon * (1 + 1e-9);
        for (std::uint64_t x = 0; x < n; ++x) {
            if (!dec.exceptional.contains(x)) {
                expect(std::abs(dec.h.values()[x]) <= ceiling, "h escaped its ceiling");
            }
            for (double part : {dec.g.values()[x].real(), dec.g.values()[x].imag()}) {
                const double steps = part / dec.grid;
                expect(std::abs(steps - std::round(steps)) < 1e-9, "g off the grid");
            }
            const std::uint64_t rep = dec.blocks->representative(dec.blocks->block_of(x));
            expect(dec.g.values()[x] == dec.g.values()[rep], "g not block-constant");
            const double osc =
                std::abs(dec.approximant.values()[x] - dec.approximant.values()[rep]);
            expect(osc <= omega * osc_bound, "block oscillation above 2 pi epsilon");
        }
    }
}

void criterion_wrapping_inclusions() {
    const std::uint64_t n = 1009;
    const double eta = 0.01, delta = 0.02, xi = 0.01;
    Rng rng(1005);
    for (int run = 0; run < 50; ++run) {
        const GroupSet a = random_set(n, 0.25, rng);
        const GroupSet b = random_set(n, 0.25, rng);
        const WrapResult res = wrap_sumset_complement(a, b, eta, delta, xi, 3000 + run);
        const GroupSet w = res.wrapper.materialize();
        const GroupSet x_eta = complement(partial_sumset(a, b, eta));
        const GroupSet outer = complement(partial_sumset(a, b, eta + delta));
        expect(is_subset(set_difference(x_eta, res.exceptional), w),
               "X_eta \\ Y not inside the wrapper");
        expect(is_subset(set_difference(w, res.exceptional), outer),
               "wrapper leaks past the outer partial sumset");
        expect(res.exceptional.size() <= static_cast<std::uint64_t>(xi * n),
               "exceptional set too large");
    }
}

void criterion_inverse_intersections() {
    const std::uint64_t p = 1009;
    Rng rng(1006);
    auto make_wrapper = [&] {
        CharacterFamily fam{CyclicGroup(p), {}, {}};
        const std::size_t d = 1 + rng.next_below(3);
        for (std::size_t j = 0; j < d; ++j) {
            fam.characters.push_back(rng.next_below(p));
            const double ang = kTau * rng.next_double();
            fam.coefficients.push_back(cd(std::cos(ang), std::sin(ang)));
        }
        auto part = std::make_shared<const BlockPartition>(
            fam, ArcPartition::for_granularity(0.1 + 0.4 * rng.next_double()));
        std::vector<char> sel(part->block_count(), 0);
        for (auto& s : sel) s = rng.next_bool();
        return Wrapper(part, sel);
    };
    for (int run = 0; run < 100; ++run) {
        const Wrapper w1 = make_wrapper(), w2 = make_wrapper();
        const InverseIntersection iv = intersect_with_inverse(w1, w2);
        const double err = std::abs(static_cast<double>(iv.exact) - iv.main_term);
        expect(err <= 2 * std::sqrt(static_cast<double>(p)) * iv.omega1 * iv.omega2 +
                          1 + 1e-6,
               "inverse-intersection bound violated at run " + std::to_string(run));
    }
}

void criterion_inequality_sweeps() {
    const std::uint64_t p = 1009;
    Rng rng(1007);
    for (int i = 0; i < 10000; ++i) {
        const GroupSet a = random_set(p, 0.05 + 0.9 * rng.next_double(), rng);
        const GroupSet b = random_set(p, 0.05 + 0.9 * rng.next_double(), rng);
        if (a.empty() || b.empty()) continue;
        check_cauchy_davenport(a, b);  // throws on violation
    }
    for (int i = 0; i < 10000; ++i) {
        const GroupSet a = random_set(p, 0.1 + 0.8 * rng.next_double(), rng);
        const GroupSet b = random_set(p, 0.1 + 0.8 * rng.next_double(), rng);
        if (a.empty() || b.empty()) continue;
        const double cap = std::min(a.density(), b.density());
        const double eps = cap * cap * (0.05 + 0.9 * rng.next_double());
        if (eps < 1.0 / (static_cast<double>(p) * static_cast<double>(p))) continue;
        const ExperimentReport rep = check_pollard_partial(a, b, eps);
        expect(std::get<bool>(rep.results.at("asserted")), "Pollard case not asserted");
    }
    for (int i = 0; i < 1000; ++i) {
        const GroupSet x = random_set(101, 0.1 + 0.6 * rng.next_double(), rng);
        const GroupSet y = random_set(101, 0.1 + 0.6 * rng.next_double(), rng);
        if (x.empty()) continue;
        const double delta = 0.02 + 0.28 * rng.next_double();
        const double t = 1.1 + 2.9 * rng.next_double();
        const GroupSet e = exception_set(x, y, delta, t);
        expect(is_subset(e, x), "exception set not inside X");
        expect(static_cast<double>(e.size()) * t <=
                   static_cast<double>(x.size()) * (1 + 1e-9) + 1e-9,
               "|E| above |X|/T");
    }
}

void criterion_exhaustive_optima() {
    for (std::uint64_t p : primes_between(3, 43)) {
        const ExperimentReport rep =
            exhaustive_extremal(p, ExhaustiveProblem::max_sumfree_selfinv);
        const std::int64_t opt = geti(rep, "optimum");
        expect(opt <= static_cast<std::int64_t>((p + 1) / 3),
               "optimum above (p+1)/3 at p=" + std::to_string(p));
        if (p <= 13) {
            expect(opt == static_cast<std::int64_t>(orbit_enumeration_optimum(p)),
                   "exhaustive disagrees with the oracle at p=" + std::to_string(p));
        }
        std::int64_t best = 0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const ExperimentReport run =
                stochastic_search(p, SearchObjective::max_sumfree_selfinv, 20000, seed);
            best = std::max(best, geti(run, "best_size"));
        }
        expect(best == opt,
               "stochastic search missed the optimum at p=" + std::to_string(p));
    }
}

void criterion_replays() {
    const ReplayParams defaults{};
    for (std::uint64_t p : {std::uint64_t(1009), std::uint64_t(2003),
                            std::uint64_t(5003), std::uint64_t(10007)}) {
        const ExperimentReport sf = replay_proof(
            ReplayKind::sumfree_selfinv, construct_extremal(ExtremalKind::ninth, p),
            defaults, 9000 + p);
        const ExperimentReport aa = replay_proof(
            ReplayKind::a_a_a, construct_extremal(ExtremalKind::eighth, p), defaults,
            9001 + p);
        const ExperimentReport ai = replay_proof(
            ReplayKind::a_plus_ainv, construct_extremal(ExtremalKind::lambda, p, 0.4),
            defaults, 9002 + p);
        std::printf("    trend p=%llu sumfree: beta=%.4f l=%.4f\n",
                    static_cast<unsigned long long>(p), getd(sf, "beta"), getd(sf, "l"));
        std::printf("    trend p=%llu a_a_a: beta=%.4f r=%.4f s=%.4f l=%.4f l'=%.4f\n",
                    static_cast<unsigned long long>(p), getd(aa, "beta"), getd(aa, "r"),
                    getd(aa, "s"), getd(aa, "l"), getd(aa, "l_prime"));
        std::printf("    trend p=%llu a_plus_ainv: beta=%.4f l=%.4f l'=%.4f\n",
                    static_cast<unsigned long long>(p), getd(ai, "beta"), getd(ai, "l"),
                    getd(ai, "l_prime"));
        std::fflush(stdout);
    }
}

}  // namespace

int main() {
    struct Criterion {
        const char* label;
        std::function<void()> body;
    };
    const std::vector<Criterion> criteria{
        {"Weil bound sweep over F_p^* x F_p^* at p in {101, 499}", criterion_weil_sweep},
        {"spectral and naive convolutions agree on 1000 random pairs per modulus",
         criterion_convolution_agreement},
        {"extremal constructions hold structurally for all primes 7..10007",
         criterion_constructions},
        {"decomposition contract on 50 seeded convolution profiles at N=1009",
         criterion_decomposition_contract},
        {"partial-sumset complement wrapping inclusions, 50 seeded runs at N=1009",
         criterion_wrapping_inclusions},
        {"inverse-intersection error bound on 100 seeded wrapper pairs in Z_1009",
         criterion_inverse_intersections},
        {"10^4 Cauchy-Davenport + 10^4 Pollard + 10^3 exception-set instances",
         criterion_inequality_sweeps},
        {"exhaustive sum-free self-inverse optima for p <= 43, oracle and search agree",
         criterion_exhaustive_optima},
        {"proof replays pass at p=1009 with trend quantities up to p=10007",
         criterion_replays},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string note;
        bool ok = true;
        try {
            criteria[i].body();
        } catch (const std::exception& e) {
            ok = false;
            note = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %zu. %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].label, secs, note.empty() ? "" : ": ", note.c_str());
        std::fflush(stdout);
        failures += !ok;
    }
    if (failures) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
