#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <vector>

#include "znwrap/errors.hpp"
#include "znwrap/fourier.hpp"
#include "znwrap/group.hpp"
#include "znwrap/rng.hpp"
#include "znwrap/wrapper.hpp"

using namespace znwrap;

namespace {

constexpr double pi = std::numbers::pi;

cd character_value(std::uint64_t r, std::uint64_t x, std::uint64_t n) {
    const double ang = 2.0 * pi * static_cast<double>(mul_mod(r, x, n))
                       / static_cast<double>(n);
    return cd(std::cos(ang), std::sin(ang));
}

GroupSet random_set(std::uint64_t n, double density, Rng& rng) {
    std::vector<std::uint64_t> xs;
    for (std::uint64_t x = 0; x < n; ++x) {
        if (rng.next_double() < density) xs.push_back(x);
    }
    return GroupSet::from_residues(xs, n);
}

CharacterFamily random_family(std::uint64_t n, std::size_t d, Rng& rng) {
    CharacterFamily fam{CyclicGroup(n), {}, {}};
    for (std::size_t j = 0; j < d; ++j) {
        fam.characters.push_back(rng.next_below(n));
        const double ang = 2 * pi * rng.next_double();
        fam.coefficients.push_back(cd(std::cos(ang), std::sin(ang)));
    }
    return fam;
}

}  // namespace

TEST_CASE("arc granularity") {
    CHECK(ArcPartition::for_granularity(1.0).arc_count == 1);
    CHECK(ArcPartition::for_granularity(2.5).arc_count == 1);
    CHECK(ArcPartition::for_granularity(0.25).arc_count == 4);
    CHECK(ArcPartition::for_granularity(1.0 / 3.0).arc_count == 3);
    CHECK(ArcPartition::for_granularity(0.3).arc_count == 4);
}

TEST_CASE("block signatures are exact at arc boundaries") {
    const ArcPartition quarters{0.25, 4};

    // N = 4, r = 1: the four points sit exactly on the four arc openings
    CharacterFamily f4{CyclicGroup(4), {1}, {cd(1.0)}};
    for (std::uint64_t x = 0; x < 4; ++x) {
        CHECK(block_signature(x, f4, quarters) == BlockSignature{x + 1});
    }

    // N = 8, r = 1: angle of x is pi x / 4
    CharacterFamily f8{CyclicGroup(8), {1}, {cd(1.0)}};
    const std::uint64_t expect[8] = {1, 1, 2, 2, 3, 3, 4, 4};
    for (std::uint64_t x = 0; x < 8; ++x) {
        CHECK(block_signature(x, f8, quarters) == BlockSignature{expect[x]});
    }

    // two characters produce one index per character, in order
    CharacterFamily f2{CyclicGroup(8), {1, 2}, {cd(1.0), cd(1.0)}};
    CHECK(block_signature(3, f2, quarters) == BlockSignature{2, 4});  // 3, then 6
}

TEST_CASE("degenerate partitions collapse to one block") {
    // no characters at all
    CharacterFamily none{CyclicGroup(12), {}, {}};
    const BlockPartition p0(none, ArcPartition{1.0, 1});
    CHECK(p0.block_count() == 1);
    CHECK(p0.members(0).size() == 12);

    // the trivial character r = 0
    CharacterFamily zero{CyclicGroup(12), {0}, {cd(1.0)}};
    const BlockPartition pz(zero, ArcPartition{0.25, 4});
    CHECK(pz.block_count() == 1);

    // one arc: every signature is all-ones
    Rng rng(10);
    const BlockPartition p1(random_family(12, 3, rng), ArcPartition{1.0, 1});
    CHECK(p1.block_count() == 1);
}

TEST_CASE("partition covers the group with disjoint blocks") {
    Rng rng(11);
    const std::uint64_t n = 101;
    const CharacterFamily fam = random_family(n, 3, rng);
    const ArcPartition arcs = ArcPartition::for_granularity(0.2);
    const BlockPartition part(fam, arcs);

    std::vector<std::uint64_t> tally(part.block_count(), 0);
    for (std::uint64_t x = 0; x < n; ++x) {
        const std::uint32_t b = part.block_of(x);
        REQUIRE(b < part.block_count());
        tally[b]++;
        // membership is consistent both ways
        const auto mem = part.members(b);
        CHECK(std::binary_search(mem.begin(), mem.end(), x));
        // and the signature grouping is exact
        CHECK(part.signature(b) == block_signature(x, fam, arcs));
    }
    std::uint64_t covered = 0;
    for (std::uint32_t b = 0; b < part.block_count(); ++b) {
        covered += part.members(b).size();
        CHECK(part.members(b).size() == tally[b]);
        CHECK(part.members(b).front() == part.representative(b));
    }
    CHECK(covered == n);

    // independent grouping by explicit signatures gives the same count
    std::map<BlockSignature, int> groups;
    for (std::uint64_t x = 0; x < n; ++x) groups[block_signature(x, fam, arcs)]++;
    CHECK(groups.size() == part.block_count());
}

TEST_CASE("characters oscillate little within a block") {
    Rng rng(12);
    const std::uint64_t n = 257;
    const CharacterFamily fam = random_family(n, 4, rng);
    const ArcPartition arcs = ArcPartition::for_granularity(0.15);
    const BlockPartition part(fam, arcs);
    // same arc of K means angle gap < 2 pi / K, so the chord is < 2 sin(pi/K)
    const double chord = 2 * std::sin(pi / static_cast<double>(arcs.arc_count));
    for (std::uint32_t b = 0; b < part.block_count(); ++b) {
        const std::uint64_t rep = part.representative(b);
        for (std::uint64_t x : part.members(b)) {
            for (std::size_t j = 0; j < fam.dim(); ++j) {
                const cd diff = character_value(fam.characters[j], x, n)
                                - character_value(fam.characters[j], rep, n);
                CHECK(std::abs(diff) <= chord + 1e-9);
            }
        }
    }
}

TEST_CASE("wrappers materialize unions of blocks") {
    Rng rng(13);
    const std::uint64_t n = 101;
    auto part = std::make_shared<const BlockPartition>(random_family(n, 2, rng),
                                                       ArcPartition::for_granularity(0.3));
    std::vector<char> sel(part->block_count(), 0);
    std::uint64_t expect_size = 0;
    for (std::uint32_t b = 0; b < part->block_count(); ++b) {
        if (rng.next_bool()) {
            sel[b] = 1;
            expect_size += part->members(b).size();
        }
    }
    const Wrapper w(part, sel);
    const GroupSet ws = w.materialize();
    CHECK(ws.size() == expect_size);
    for (std::uint64_t x = 0; x < n; ++x) {
        CHECK(ws.contains(x) == static_cast<bool>(sel[part->block_of(x)]));
    }

    const Wrapper cw = complement_wrapper(w);
    CHECK(cw.materialize() == complement(ws));
    CHECK(cw.selected_block_count() + w.selected_block_count() == part->block_count());
    CHECK(complement_wrapper(cw).materialize() == ws);
    // complements share the partition object
    CHECK(cw.partition_ptr().get() == part.get());
}

TEST_CASE("wrapper Wiener norm never exceeds its block majorant") {
    Rng rng(14);
    const std::uint64_t n = 101;
    for (int rep = 0; rep < 10; ++rep) {
        auto part = std::make_shared<const BlockPartition>(
            random_family(n, 1 + rep % 3, rng), ArcPartition::for_granularity(0.25));
        std::vector<char> sel(part->block_count(), 0);
        for (auto& s : sel) s = rng.next_bool();
        const Wrapper w(part, sel);
        const WienerBounds wb = wrapper_wiener_norm(w);
        CHECK(wb.exact <= wb.block_majorant + 1e-6);
        CHECK(wb.exact == doctest::Approx(wiener_norm(w.materialize())).epsilon(1e-9));
    }
}

TEST_CASE("inverse intersections stay near the main term") {
    Rng rng(15);
    const std::uint64_t p = 101;
    for (int rep = 0; rep < 20; ++rep) {
        auto mk = [&] {
            auto part = std::make_shared<const BlockPartition>(
                random_family(p, 1 + rng.next_below(3), rng),
                ArcPartition::for_granularity(0.2 + 0.3 * rng.next_double()));
            std::vector<char> sel(part->block_count(), 0);
            for (auto& s : sel) s = rng.next_bool();
            return Wrapper(part, sel);
        };
        const Wrapper w1 = mk(), w2 = mk();
        const InverseIntersection iv = intersect_with_inverse(w1, w2);

        const GroupSet m2 = set_difference(w2.materialize(), GroupSet::singleton(0, p));
        const std::int64_t direct =
            m2.empty() ? 0
                       : static_cast<std::int64_t>(
                             intersect(w1.materialize(), invert_set(m2)).size());
        CHECK(iv.exact == direct);
        CHECK(std::abs(static_cast<double>(iv.exact) - iv.main_term)
              <= iv.error_bound + 1 + 1e-6);
    }
}

TEST_CASE("character sampling follows the spectral weights") {
    const std::uint64_t n = 17;
    const GroupSet a = GroupSet::from_residues({0, 1, 2, 3, 4, 5}, n);
    const SpectralFunction f = SpectralFunction::indicator(a);
    const double w = wiener_norm(f);
    const auto& spec = f.spectrum();

    const std::size_t draws = 20000;
    const CharacterFamily fam = sample_characters(f, draws, 100);
    REQUIRE(fam.dim() == draws);

    std::vector<double> freq(n, 0);
    for (std::size_t j = 0; j < draws; ++j) {
        REQUIRE(fam.characters[j] < n);
        freq[fam.characters[j]] += 1.0;
        // the coefficient is the coefficient's phase, unimodular
        CHECK(std::abs(std::abs(fam.coefficients[j]) - 1.0) < 1e-9);
        const cd expect = spec[fam.characters[j]] / std::abs(spec[fam.characters[j]]);
        CHECK(std::abs(fam.coefficients[j] - expect) < 1e-9);
    }

    // chi-square against |hat f| / sum |hat f|; all 17 weights are nonzero
    // for this interval; 1% critical value for 16 dof
    double total_weight = 0;
    for (const cd& z : spec) total_weight += std::abs(z);
    double chi2 = 0;
    for (std::uint64_t r = 0; r < n; ++r) {
        const double expect = static_cast<double>(draws) * std::abs(spec[r]) / total_weight;
        REQUIRE(expect > 0);
        chi2 += (freq[r] - expect) * (freq[r] - expect) / expect;
    }
    CHECK(chi2 < 32.0);

    // unbiasedness: w * mean of c_j gamma_j(x) estimates f(x)
    for (std::uint64_t x : {0ULL, 10ULL}) {
        cd acc = 0;
        for (std::size_t j = 0; j < draws; ++j) {
            acc += fam.coefficients[j] * character_value(fam.characters[j], x, n);
        }
        const cd est = w * acc / static_cast<double>(draws);
        const double f_true = a.contains(x) ? 1.0 : 0.0;
        // each term is bounded by w in modulus, so 5 sigma is 5 w / sqrt(M)
        CHECK(std::abs(est - cd(f_true))
              <= 5 * w / std::sqrt(static_cast<double>(draws)));
    }
}

TEST_CASE("sampling a single spectral spike is deterministic") {
    // f = c * gamma_3 on Z_12 has a one-spike spectrum, so every draw must
    // return r = 3 and the spike's phase as its coefficient
    const std::uint64_t n = 12;
    const cd c = std::polar(1.0, 0.9);
    std::vector<cd> vals(n);
    for (std::uint64_t x = 0; x < n; ++x) vals[x] = c * character_value(3, x, n);
    const SpectralFunction f(CyclicGroup(n), vals);
    const CharacterFamily fam = sample_characters(f, 500, 7);
    for (std::size_t j = 0; j < fam.dim(); ++j) {
        CHECK(fam.characters[j] == 3);
        CHECK(std::abs(fam.coefficients[j] - c) < 1e-9);
    }
}

TEST_CASE("sampling respects the r <-> N-r symmetry of a symmetric set") {
    // A = -A makes |hat 1_A(r)| = |hat 1_A(N - r)|, so the two legs of each
    // conjugate pair should be drawn equally often
    const std::uint64_t n = 17;
    const GroupSet a = GroupSet::from_residues({0, 1, 2, 15, 16}, n);
    const SpectralFunction f = SpectralFunction::indicator(a);
    const std::size_t draws = 10000;
    const CharacterFamily fam = sample_characters(f, draws, 23);
    std::vector<double> freq(n, 0);
    for (std::uint64_t r : fam.characters) freq[r] += 1.0;
    // a fair-coin split within each pair; 1% critical value for 8 dof
    double chi2 = 0;
    for (std::uint64_t r = 1; r <= 8; ++r) {
        const double tot = freq[r] + freq[n - r];
        if (tot == 0) continue;
        const double diff = freq[r] - freq[n - r];
        chi2 += diff * diff / tot;
    }
    CHECK(chi2 < 20.09);
}

TEST_CASE("decomposition of a constant function is exact") {
    const SpectralFunction f = SpectralFunction::indicator(GroupSet::full(CyclicGroup(64)));
    const Decomposition dec = decompose(f, 0.25, 0.1, DecomposeConfig{}, 5);
    CHECK(dec.exceptional.empty());
    CHECK(dec.achieved_h_inf == doctest::Approx(0.0).epsilon(1e-12));
    for (std::uint64_t x = 0; x < 64; ++x) {
        CHECK(dec.g.values()[x] == cd(1.0));
        CHECK(std::abs(dec.h.values()[x]) < 1e-12);
        CHECK(dec.k.values()[x] == cd(0.0));
    }
}

TEST_CASE("decomposing the counts of the full sumset is exact") {
    // Z_32 + Z_32 sees every value 32 times; the spectrum is one spike at
    // r = 0, so g swallows everything and the grid rounding lands exactly
    const GroupSet full = GroupSet::full(CyclicGroup(32));
    const SpectralFunction f =
        SpectralFunction::from_counts(convolution_counts(full, full));
    const Decomposition dec = decompose(f, 0.5, 0.1, DecomposeConfig{}, 9);
    CHECK(dec.wiener == doctest::Approx(32.0));
    CHECK(dec.exceptional.empty());
    for (std::uint64_t x = 0; x < 32; ++x) {
        CHECK(dec.g.values()[x] == cd(32.0));
        CHECK(dec.h.values()[x] == cd(0.0));
        CHECK(dec.k.values()[x] == cd(0.0));
    }
}

TEST_CASE("decomposition contract on a random indicator") {
    Rng rng(16);
    const std::uint64_t n = 257;
    const GroupSet a = random_set(n, 0.4, rng);
    const SpectralFunction f = SpectralFunction::indicator(a);
    const double w = wiener_norm(f);
    const double delta = 0.1 * w;
    const double xi = 0.02;
    const Decomposition dec = decompose(f, delta, xi, DecomposeConfig{}, 77);

    CHECK(dec.exceptional.size() <= static_cast<std::uint64_t>(xi * n));
    CHECK(dec.epsilon == doctest::Approx(std::min(1.0, delta / w)));
    CHECK(dec.arcs.arc_count == ArcPartition::for_granularity(dec.epsilon).arc_count);

    const double ceiling = DecomposeConfig{}.h_inf_factor * delta;
    for (std::uint64_t x = 0; x < n; ++x) {
        // the three parts add back to f exactly
        const cd resum = dec.g.values()[x] + dec.h.values()[x] + dec.k.values()[x];
        CHECK(std::abs(resum - f.values()[x]) < 1e-9);
        // k lives on Y only, h is uniformly small elsewhere
        if (dec.exceptional.contains(x)) {
            CHECK(dec.h.values()[x] == cd(0.0));
        } else {
            CHECK(dec.k.values()[x] == cd(0.0));
            CHECK(std::abs(dec.h.values()[x]) <= ceiling * (1 + 1e-9));
        }
        // g is on the grid...
        for (double part : {dec.g.values()[x].real(), dec.g.values()[x].imag()}) {
            const double steps = part / dec.grid;
            CHECK(std::abs(steps - std::round(steps)) < 1e-9);
        }
        // ...and block-constant
        const std::uint32_t b = dec.blocks->block_of(x);
        CHECK(dec.g.values()[x] == dec.g.values()[dec.blocks->representative(b)]);
    }
    CHECK(dec.achieved_h_inf <= ceiling * (1 + 1e-9));
}

TEST_CASE("decomposition reports exhaustion honestly") {
    Rng rng(17);
    const GroupSet a = random_set(101, 0.5, rng);
    const SpectralFunction f = SpectralFunction::indicator(a);
    DecomposeConfig cfg;
    cfg.d_cap_factor = 1e-9;  // caps d at ceil(log 1/xi): far too few samples
    CHECK_THROWS_AS(decompose(f, 1e-4 * wiener_norm(f), 0.01, cfg, 3), retry_exhausted);
}

TEST_CASE("level-set wrap of an indicator pins down the set") {
    Rng rng(18);
    const std::uint64_t n = 101;
    const GroupSet a = random_set(n, 0.35, rng);
    const SpectralFunction f = SpectralFunction::indicator(a);
    // the band [0.5, 1.5) selects exactly A, and even the delta-fringe
    // [0.2, 1.8) contains no other indicator values
    const WrapResult res = wrap_level_set(f, 0.5, 1.5, 0.3, 0.05, 21);
    const GroupSet w = res.wrapper.materialize();
    CHECK(is_subset(set_difference(a, res.exceptional), w));
    CHECK(is_subset(set_difference(w, res.exceptional), a));
    CHECK(res.exceptional.size() <= static_cast<std::uint64_t>(0.05 * n));
    CHECK(res.stats.wrapper_size == w.size());
}

TEST_CASE("threshold wrap of an indicator pins down the complement") {
    Rng rng(19);
    const std::uint64_t n = 101;
    const GroupSet a = random_set(n, 0.35, rng);
    const SpectralFunction f = SpectralFunction::indicator(a);
    const WrapResult res = wrap_threshold(f, 0.5, 0.3, 0.05, 22);
    const GroupSet w = res.wrapper.materialize();
    const GroupSet ac = complement(a);
    CHECK(is_subset(set_difference(ac, res.exceptional), w));
    CHECK(is_subset(set_difference(w, res.exceptional), ac));
}

TEST_CASE("coarse fallback still satisfies both inclusions") {
    Rng rng(20);
    const std::uint64_t n = 101;
    const GroupSet a = random_set(n, 0.3, rng);
    const SpectralFunction f = SpectralFunction::indicator(a);
    const double w = wiener_norm(f);
    // a gap far wider than the Wiener norm forces the coarse path
    const WrapResult res = wrap_threshold(f, 0.5, 10 * w, 0.05, 23);
    CHECK(res.stats.fallback_coarse);
    const GroupSet ws = res.wrapper.materialize();
    CHECK(is_subset(set_difference(complement(a), res.exceptional), ws));
    // the barrier is {f >= 0.5 + 10 w} which nothing reaches, so the
    // second inclusion is trivially available; the wrap may take everything
    CHECK(is_subset(set_difference(ws, res.exceptional),
                    GroupSet::full(CyclicGroup(n))));
}

TEST_CASE("level wrap of a constant keeps all or nothing") {
    const CyclicGroup g(24);
    const SpectralFunction c7(g, std::vector<cd>(24, cd(0.7)));

    // 0.7 sits inside [0.5, 1): the whole group is wrapped, nothing excepted
    const WrapResult in = wrap_level_set(c7, 0.5, 1.0, 0.3, 0.05, 40);
    CHECK(in.wrapper.materialize() == GroupSet::full(g));
    CHECK(in.exceptional.empty());
    CHECK_FALSE(in.stats.fallback_coarse);

    // a far band catches nothing
    const WrapResult out = wrap_level_set(c7, 5.0, 6.0, 0.3, 0.05, 41);
    CHECK(out.wrapper.materialize().empty());
    CHECK(out.exceptional.empty());
}

TEST_CASE("wrapping the zero function takes the trivial partition") {
    const CyclicGroup g(24);
    const SpectralFunction zero = SpectralFunction::indicator(
        GroupSet::from_residues(std::vector<std::uint64_t>{}, 24));

    // every value is 0, inside [-1, 1): one block holding everything
    const WrapResult all = wrap_level_set(zero, -1.0, 1.0, 0.5, 0.05, 42);
    CHECK(all.wrapper.materialize() == GroupSet::full(g));
    CHECK(all.wrapper.partition_ptr()->block_count() == 1);
    CHECK(all.exceptional.empty());

    // ...and nothing when the band misses 0
    const WrapResult none = wrap_level_set(zero, 3.0, 4.0, 0.5, 0.05, 43);
    CHECK(none.wrapper.materialize().empty());

    // below-threshold wrap of the zero function is the whole group
    const WrapResult thr = wrap_threshold(zero, 0.3, 0.4, 0.05, 44);
    CHECK(thr.wrapper.materialize() == GroupSet::full(g));
    CHECK(thr.exceptional.empty());
}

TEST_CASE("threshold wrap selects nothing when everything is above") {
    const GroupSet full = GroupSet::full(CyclicGroup(24));
    const SpectralFunction one = SpectralFunction::indicator(full);
    const WrapResult res = wrap_threshold(one, 0.3, 0.5, 0.05, 45);
    CHECK(res.wrapper.materialize().empty());
    CHECK(res.exceptional.empty());
}

TEST_CASE("all-block wrappers behave like the full group") {
    Rng rng(48);
    const std::uint64_t p = 13;
    auto part = std::make_shared<const BlockPartition>(
        random_family(p, 2, rng), ArcPartition::for_granularity(0.25));
    const Wrapper all(part, std::vector<char>(part->block_count(), 1));
    CHECK(all.materialize() == GroupSet::full(CyclicGroup(p)));
    const WienerBounds wb = wrapper_wiener_norm(all);
    CHECK(wb.exact == doctest::Approx(1.0).epsilon(1e-12));

    // G against G: the inverse image of G \ {0} is G \ {0} again
    const InverseIntersection both = intersect_with_inverse(all, all);
    CHECK(both.exact == 12);
    CHECK(both.main_term == doctest::Approx(13.0));
    CHECK(both.zero_removed);

    // empty right operand: nothing to invert
    const Wrapper none(part, std::vector<char>(part->block_count(), 0));
    const InverseIntersection zero = intersect_with_inverse(all, none);
    CHECK(zero.exact == 0);
    CHECK(zero.main_term == 0.0);
    CHECK_FALSE(zero.zero_removed);
}

TEST_CASE("sumset-complement wrap keeps both inclusions exactly") {
    Rng rng(24);
    const std::uint64_t n = 101;
    for (int rep = 0; rep < 5; ++rep) {
        const GroupSet a = random_set(n, 0.25, rng);
        const GroupSet b = random_set(n, 0.25, rng);
        if (a.empty() || b.empty()) continue;
        const double eta = 0.01, delta = 0.02, xi = 0.01;
        const WrapResult res = wrap_sumset_complement(a, b, eta, delta, xi, 30 + rep);
        const GroupSet w = res.wrapper.materialize();
        const GroupSet x_eta = complement(partial_sumset(a, b, eta));
        const GroupSet x_wide = complement(partial_sumset(a, b, eta + delta));
        CHECK(is_subset(set_difference(x_eta, res.exceptional), w));
        CHECK(is_subset(set_difference(w, res.exceptional), x_wide));
        CHECK(res.exceptional.size() <= static_cast<std::uint64_t>(xi * n));
    }
}

TEST_CASE("sumset-complement wrap handles saturated and point operands") {
    // Z_10 + Z_10 covers every residue ten times over: the complement is
    // empty and the wrap must select nothing
    const GroupSet full = GroupSet::full(CyclicGroup(10));
    const WrapResult sat = wrap_sumset_complement(full, full, 0.3, 0.3, 0.05, 46);
    CHECK(sat.wrapper.materialize().empty());
    CHECK(sat.exceptional.empty());

    // {0} + {0} hits only 0: the other nine residues form the complement
    // and must all be covered, via the coarse path (the count gap dwarfs
    // the Wiener norm of a point mass)
    const GroupSet point = GroupSet::singleton(0, 10);
    const WrapResult pt = wrap_sumset_complement(point, point, 0.05, 0.3, 0.05, 47);
    CHECK(pt.stats.fallback_coarse);
    const GroupSet w = pt.wrapper.materialize();
    const GroupSet x_eta = complement(partial_sumset(point, point, 0.05));
    CHECK(x_eta.size() == 9);
    CHECK(is_subset(set_difference(x_eta, pt.exceptional), w));
}

TEST_CASE("wraps of convolution counts at a working prime") {
    Rng rng(49);
    const std::uint64_t p = 1009;
    const GroupSet a = random_set(p, 0.25, rng);
    const GroupSet b = random_set(p, 0.25, rng);
    const ConvolutionTable conv = convolution_counts(a, b);
    const SpectralFunction f = SpectralFunction::from_counts(conv);

    // a band on the lower shoulder of the count distribution
    const double l1 = 40, l2 = 60, delta = 20, xi = 0.01;
    const WrapResult lev = wrap_level_set(f, l1, l2, delta, xi, 50);
    const GroupSet lw = lev.wrapper.materialize();
    CHECK(lev.exceptional.size() <= static_cast<std::uint64_t>(xi * p));
    CHECK(lev.stats.wrapper_size == lw.size());
    CHECK(lev.stats.dim > 0);
    for (std::uint64_t x = 0; x < p; ++x) {
        if (lev.exceptional.contains(x)) continue;
        const double v = static_cast<double>(conv.counts[x]);
        if (l1 <= v && v < l2) CHECK(lw.contains(x));
        if (lw.contains(x)) CHECK((l1 - delta <= v && v < l2 + delta));
    }

    // below-count threshold wrap on the same function
    const WrapResult thr = wrap_threshold(f, 50.0, 50.0, xi, 51);
    const GroupSet tw = thr.wrapper.materialize();
    for (std::uint64_t x = 0; x < p; ++x) {
        if (thr.exceptional.contains(x)) continue;
        const double v = static_cast<double>(conv.counts[x]);
        if (v < 50.0) CHECK(tw.contains(x));
        if (tw.contains(x)) CHECK(v < 100.0);
    }
}
