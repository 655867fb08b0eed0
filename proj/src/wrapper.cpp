#include "znwrap/wrapper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "znwrap/rng.hpp"

namespace znwrap {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

// e^{+2 pi i k / N} for k in [0, N): the inversion-side kernel.
std::vector<cd> positive_roots(std::uint64_t n) {
    std::vector<cd> roots(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        const double ang = kTau * static_cast<double>(k) / static_cast<double>(n);
        roots[k] = cd(std::cos(ang), std::sin(ang));
    }
    return roots;
}

// 1-based arc index of angle 2 pi k / N among K equal arcs, exact.
inline std::uint32_t arc_of(std::uint64_t k, std::uint64_t arc_count, std::uint64_t n) {
    return static_cast<std::uint32_t>((static_cast<__uint128_t>(k) * arc_count) / n) + 1;
}

std::vector<std::uint32_t> arc_table(std::uint64_t arc_count, std::uint64_t n) {
    std::vector<std::uint32_t> t(n);
    for (std::uint64_t k = 0; k < n; ++k) t[k] = arc_of(k, arc_count, n);
    return t;
}

double round_to_grid(double t, double grid) {
    if (grid <= 0) return t;
    const double q = std::abs(t) / grid;
    // Ties go toward zero, so the rounding is symmetric around it.
    const double steps = std::ceil(q - 0.5);
    return std::copysign(steps * grid, t);
}

cd grid_round(cd v, double grid) {
    return cd(round_to_grid(v.real(), grid), round_to_grid(v.imag(), grid));
}

struct SpectrumSampler {
    const std::vector<cd>* spectrum = nullptr;
    std::vector<double> cumulative;

    explicit SpectrumSampler(const SpectralFunction& f) : spectrum(&f.spectrum()) {
        cumulative.resize(spectrum->size());
        double run = 0;
        for (std::size_t r = 0; r < spectrum->size(); ++r) {
            run += std::abs((*spectrum)[r]);
            cumulative[r] = run;
        }
        require_arg(run > 0, "character sampling: zero function");
    }

    // Index r with probability |hat f(r)| / sum; zero-weight indices are
    // never produced (their cumulative value ties the previous entry and
    // upper_bound skips past flat runs).
    std::uint64_t draw(Rng& rng) const {
        const double u = rng.next_double() * cumulative.back();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        return static_cast<std::uint64_t>(
            std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                     static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
    }

    cd phase(std::uint64_t r) const {
        const cd v = (*spectrum)[r];
        return v / std::abs(v);
    }
};

}  // namespace

ArcPartition ArcPartition::for_granularity(double eps) {
    require_arg(eps > 0, "arc partition: eps must be > 0");
    ArcPartition p;
    p.epsilon = eps;
    // The nudge keeps 1/eps from landing just above an integer when eps is
    // an inexact 1/K (e.g. eps = 1/3).
    p.arc_count = eps >= 1.0
                      ? 1
                      : static_cast<std::uint64_t>(std::ceil(1.0 / eps - 1e-9));
    return p;
}

BlockSignature block_signature(std::uint64_t x, const CharacterFamily& family,
                               const ArcPartition& arcs) {
    const std::uint64_t n = family.group.n;
    require_arg(x < n, "block_signature: element out of range");
    BlockSignature sig(family.dim());
    for (std::size_t j = 0; j < family.dim(); ++j) {
        sig[j] = arc_of(mul_mod(family.characters[j] % n, x, n), arcs.arc_count, n);
    }
    return sig;
}

BlockPartition::BlockPartition(CharacterFamily family, ArcPartition arcs)
    : family_(std::move(family)), arcs_(arcs) {
    require_arg(family_.characters.size() == family_.coefficients.size(),
                "block partition: characters/coefficients mismatch");
    const std::uint64_t n = family_.group.n;
    const std::size_t d = family_.dim();
    block_of_.assign(n, 0);
    if (d == 0) {
        reps_ = {0};
        return;
    }
    const auto arcs_of_k = arc_table(arcs_.arc_count, n);
    // 128-bit running digest of the arc indices per element; collisions
    // would need ~2^64 occupied blocks, far beyond any N here.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> digest(
        n, {0x6a09e667f3bcc908ULL, 0xbb67ae8584caa73bULL});
    for (std::size_t j = 0; j < d; ++j) {
        const std::uint64_t r = family_.characters[j] % n;
        std::uint64_t idx = 0;
        for (std::uint64_t x = 0; x < n; ++x) {
            const std::uint64_t a = arcs_of_k[idx];
            auto& [h1, h2] = digest[x];
            h1 ^= a + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2);
            h2 ^= a + 0xc2b2ae3d27d4eb4fULL + (h2 << 5) + (h2 >> 3);
            idx += r;
            if (idx >= n) idx -= n;
        }
    }
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint32_t> ids;
    for (std::uint64_t x = 0; x < n; ++x) {
        auto [it, inserted] = ids.emplace(digest[x], static_cast<std::uint32_t>(reps_.size()));
        if (inserted) reps_.push_back(x);
        block_of_[x] = it->second;
    }
    // Exact cross-check against the representatives while the instance is
    // small enough to afford a second scan.
    if (static_cast<__uint128_t>(n) * d <= (1ULL << 30)) {
        for (std::size_t j = 0; j < d; ++j) {
            const std::uint64_t r = family_.characters[j] % n;
            std::uint64_t idx = 0;
            for (std::uint64_t x = 0; x < n; ++x) {
                const std::uint64_t rep = reps_[block_of_[x]];
                require_theorem(arcs_of_k[idx] == arcs_of_k[mul_mod(r, rep, n)],
                                "block partition: digest grouping disagrees with signatures");
                idx += r;
                if (idx >= n) idx -= n;
            }
        }
    }
}

BlockSignature BlockPartition::signature(std::uint32_t b) const {
    return block_signature(reps_.at(b), family_, arcs_);
}

std::vector<std::uint64_t> BlockPartition::members(std::uint32_t b) const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = 0; x < block_of_.size(); ++x) {
        if (block_of_[x] == b) out.push_back(x);
    }
    return out;
}

Wrapper::Wrapper(std::shared_ptr<const BlockPartition> partition, std::vector<char> selected)
    : partition_(std::move(partition)), selected_(std::move(selected)) {
    require_arg(partition_ != nullptr, "wrapper: null partition");
    require_arg(selected_.size() == partition_->block_count(),
                "wrapper: selection size != block count");
}

std::uint64_t Wrapper::selected_block_count() const {
    return static_cast<std::uint64_t>(std::count(selected_.begin(), selected_.end(), 1));
}

const GroupSet& Wrapper::materialize() const {
    if (!set_) {
        const std::uint64_t n = partition_->group_order();
        std::vector<std::uint64_t> xs;
        for (std::uint64_t x = 0; x < n; ++x) {
            if (selected_[partition_->block_of(x)]) xs.push_back(x);
        }
        set_ = std::make_shared<const GroupSet>(
            GroupSet::from_residues(xs, n));
    }
    return *set_;
}

Wrapper complement_wrapper(const Wrapper& w) {
    std::vector<char> flipped = w.selected();
    for (auto& s : flipped) s = s ? 0 : 1;
    return Wrapper(w.partition_ptr(), std::move(flipped));
}

WienerBounds wrapper_wiener_norm(const Wrapper& w) {
    WienerBounds out;
    out.exact = wiener_norm(w.materialize());
    const auto& part = w.partition();
    const std::uint64_t n = part.group_order();
    for (std::uint32_t b = 0; b < part.block_count(); ++b) {
        if (!w.selected()[b]) continue;
        out.block_majorant += wiener_norm(GroupSet::from_residues(part.members(b), n));
    }
    require_theorem(out.exact <= out.block_majorant + 1e-6,
                    "wrapper Wiener norm: triangle majorant violated");
    return out;
}

InverseIntersection intersect_with_inverse(const Wrapper& w1, const Wrapper& w2) {
    const GroupSet& s1 = w1.materialize();
    const GroupSet& s2 = w2.materialize();
    require_same_group(s1, s2);
    require_arg(s1.group().prime, "intersect_with_inverse: modulus must be prime");
    const std::uint64_t p = s1.modulus();

    InverseIntersection out;
    out.zero_removed = s2.contains(0);
    const GroupSet v = out.zero_removed
                           ? set_difference(s2, GroupSet::singleton(0, p))
                           : s2;
    out.main_term = static_cast<double>(s1.size()) * static_cast<double>(s2.size()) /
                    static_cast<double>(p);
    out.omega1 = wiener_norm(s1);
    if (!v.empty()) {
        out.omega2 = wiener_norm(v);
        out.exact = static_cast<std::int64_t>(intersect(s1, invert_set(v)).size());
    }
    out.error_bound = 2.0 * std::sqrt(static_cast<double>(p)) * out.omega1 * out.omega2;
    require_theorem(std::abs(static_cast<double>(out.exact) - out.main_term) <=
                        out.error_bound + 1.0 + 1e-6,
                    "intersect_with_inverse: wrapper intersection bound violated");
    return out;
}

CharacterFamily sample_characters(const SpectralFunction& f, std::size_t d,
                                  std::uint64_t seed) {
    require_arg(d >= 1, "sample_characters: d must be >= 1");
    SpectrumSampler sampler(f);
    Rng rng(seed);
    CharacterFamily fam{f.group(), {}, {}};
    fam.characters.reserve(d);
    fam.coefficients.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
        const std::uint64_t r = sampler.draw(rng);
        fam.characters.push_back(r);
        fam.coefficients.push_back(sampler.phase(r));
    }
    return fam;
}

Decomposition decompose(const SpectralFunction& f, double delta, double xi,
                        const DecomposeConfig& cfg, std::uint64_t seed) {
    const std::uint64_t n = f.size();
    const double omega = wiener_norm(f);
    require_arg(omega > 0, "decompose: zero function");
    require_arg(delta > 0 && delta <= omega * (1 + 1e-12),
                "decompose: need 0 < delta <= wiener norm");
    require_arg(xi > 0 && xi < 1, "decompose: need 0 < xi < 1");

    const double grid = cfg.grid_step > 0 ? cfg.grid_step : delta;
    const double eps = std::min(1.0, delta / omega);
    const ArcPartition arcs = ArcPartition::for_granularity(eps);

    const double log_inv_xi = std::log(1.0 / xi);
    const std::size_t d0 = static_cast<std::size_t>(std::max(1.0, std::ceil(log_inv_xi)));
    const int p_gate = static_cast<int>(std::max(3.0, std::ceil(2.0 * log_inv_xi)));
    const std::size_t d_cap = std::max<std::size_t>(
        d0, static_cast<std::size_t>(
                std::ceil(cfg.d_cap_factor * (omega / delta) * (omega / delta) * log_inv_xi)));

    const auto roots = positive_roots(n);
    const auto& fv = f.values();
    SpectrumSampler sampler(f);
    Rng rng(seed);

    std::vector<std::uint64_t> chars;
    std::vector<cd> coeffs;
    std::vector<cd> accum(n, cd(0, 0));

    auto add_characters = [&](std::size_t count) {
        for (std::size_t j = 0; j < count; ++j) {
            const std::uint64_t r = sampler.draw(rng);
            const cd c = sampler.phase(r);
            chars.push_back(r);
            coeffs.push_back(c);
            std::uint64_t idx = 0;
            for (std::uint64_t x = 0; x < n; ++x) {
                accum[x] += c * roots[idx];
                idx += r;
                if (idx >= n) idx -= n;
            }
        }
    };

    auto empirical_lp = [&]() {
        const double d = static_cast<double>(chars.size());
        double sum = 0;
        for (std::uint64_t x = 0; x < n; ++x) {
            const double e = std::abs(accum[x] / d - fv[x] / omega);
            sum += std::pow(e, p_gate);
        }
        return std::pow(sum / static_cast<double>(n), 1.0 / p_gate);
    };

    add_characters(d0);
    while (empirical_lp() > eps && chars.size() < d_cap) {
        add_characters(std::min(chars.size(), d_cap - chars.size()));
    }

    const double h_ceiling = cfg.h_inf_factor * delta * (1 + 1e-12);
    const std::uint64_t y_cap = static_cast<std::uint64_t>(xi * static_cast<double>(n));

    std::shared_ptr<const BlockPartition> blocks;
    std::vector<cd> approx(n), gv(n);
    std::vector<std::uint64_t> support;
    double achieved = 0;
    int retries = 0;

    for (;;) {
        blocks = std::make_shared<const BlockPartition>(
            CharacterFamily{f.group(), chars, coeffs}, arcs);
        const double scale = omega / static_cast<double>(chars.size());
        for (std::uint64_t x = 0; x < n; ++x) approx[x] = scale * accum[x];
        std::vector<cd> block_value(blocks->block_count());
        for (std::uint32_t b = 0; b < blocks->block_count(); ++b) {
            block_value[b] = grid_round(approx[blocks->representative(b)], grid);
        }
        for (std::uint64_t x = 0; x < n; ++x) gv[x] = block_value[blocks->block_of(x)];

        std::vector<double> res(n);
        for (std::uint64_t x = 0; x < n; ++x) res[x] = std::abs(fv[x] - gv[x]);
        std::vector<std::uint64_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        const std::uint64_t top = std::min<std::uint64_t>(y_cap, n);
        std::partial_sort(order.begin(), order.begin() + top, order.end(),
                          [&](std::uint64_t a, std::uint64_t b) {
                              if (res[a] != res[b]) return res[a] > res[b];
                              return a < b;
                          });
        support.clear();
        for (std::uint64_t i = 0; i < top; ++i) {
            // Only residuals that actually exceed the ceiling need exclusion.
            if (res[order[i]] > h_ceiling) support.push_back(order[i]);
        }
        achieved = 0;
        std::vector<char> in_y(n, 0);
        for (std::uint64_t x : support) in_y[x] = 1;
        for (std::uint64_t x = 0; x < n; ++x) {
            if (!in_y[x]) achieved = std::max(achieved, res[x]);
        }
        if (achieved <= h_ceiling) break;

        if (retries == cfg.max_retries) {
            throw retry_exhausted(
                "decompose: residual ceiling missed after retries; "
                "raise the d cap or delta");
        }
        ++retries;
        if (chars.size() < d_cap) {
            add_characters(std::min(chars.size(), d_cap - chars.size()));
        } else {
            // At the cap: resample the whole family from the same stream.
            const std::size_t d = chars.size();
            chars.clear();
            coeffs.clear();
            std::fill(accum.begin(), accum.end(), cd(0, 0));
            add_characters(d);
        }
    }

    std::sort(support.begin(), support.end());
    std::vector<char> in_y(n, 0);
    for (std::uint64_t x : support) in_y[x] = 1;
    std::vector<cd> hv(n), kv(n);
    for (std::uint64_t x = 0; x < n; ++x) {
        const cd rho = fv[x] - gv[x];
        hv[x] = in_y[x] ? cd(0, 0) : rho;
        kv[x] = in_y[x] ? rho : cd(0, 0);
    }

    Decomposition out{
        SpectralFunction(f.group(), std::move(gv)),
        SpectralFunction(f.group(), std::move(hv)),
        SpectralFunction(f.group(), std::move(kv)),
        SpectralFunction(f.group(), std::move(approx)),
        GroupSet::from_residues(support, n),
        eps,
        delta,
        xi,
        omega,
        grid,
        achieved,
        static_cast<std::uint32_t>(chars.size()),
        retries,
        CharacterFamily{f.group(), std::move(chars), std::move(coeffs)},
        arcs,
        blocks};
    return out;
}

namespace {

// Trivial one-block partition carrying no characters; the wrapper over it
// is either the whole group or nothing.
std::shared_ptr<const BlockPartition> trivial_partition(CyclicGroup g) {
    return std::make_shared<const BlockPartition>(
        CharacterFamily{g, {}, {}}, ArcPartition{2.0, 1});
}

void assert_threshold_inclusions(const SpectralFunction& f, const Wrapper& w,
                                 const GroupSet& y, double t1, double t2) {
    const GroupSet& ws = w.materialize();
    for (std::uint64_t x = 0; x < f.size(); ++x) {
        if (y.contains(x)) continue;
        const double v = f.values()[x].real();
        require_theorem(!(v < t1) || ws.contains(x),
                        "wrap: covering inclusion failed");
        require_theorem(!ws.contains(x) || v < t2,
                        "wrap: leakage inclusion failed");
    }
}

// Wrap {Re f < t1} so that the wrapper leaks only into {Re f < t2}.
WrapResult wrap_one_sided(const SpectralFunction& f, double t1, double t2,
                          double xi, std::uint64_t seed, const DecomposeConfig& cfg) {
    require_arg(t2 > t1, "wrap: empty threshold gap");
    const double omega = wiener_norm(f);

    WrapStats stats;
    stats.omega = omega;
    stats.xi = xi;

    if (omega == 0) {
        // f vanishes identically; one block decides everything.
        auto part = trivial_partition(f.group());
        const bool sel = 0.0 < t1 + (t2 - t1) / 2;
        Wrapper w(part, {static_cast<char>(sel ? 1 : 0)});
        GroupSet y{f.group()};
        assert_threshold_inclusions(f, w, y, t1, t2);
        stats.epsilon = part->arcs().epsilon;
        stats.delta = t2 - t1;
        stats.level_lo = -std::numeric_limits<double>::infinity();
        stats.level_hi = t1 + (t2 - t1) / 2;
        stats.wrapper_size = w.materialize().size();
        return WrapResult{std::move(w), std::move(y), stats};
    }

    double t1_used = t1;
    double width = t2 - t1;
    if (width > omega) {
        // ||f||_inf <= ||f||_w < width, so the gap dwarfs the function's
        // range; re-aim at the midpoint with the coarse width.
        t1_used = t1 + omega / 2;
        width = omega / 2;
        stats.fallback_coarse = true;
    }

    DecomposeConfig dc = cfg;
    const double delta_dec = std::min(0.4 * width / cfg.h_inf_factor, omega);
    Decomposition dec = decompose(f, delta_dec, xi, dc, seed);

    const double band_hi = t1_used + width / 2;
    const auto& part = dec.blocks;
    std::vector<char> selected(part->block_count(), 0);
    for (std::uint32_t b = 0; b < part->block_count(); ++b) {
        selected[b] = dec.g.values()[part->representative(b)].real() < band_hi ? 1 : 0;
    }
    Wrapper w(part, std::move(selected));
    assert_threshold_inclusions(f, w, dec.exceptional, t1, t2);

    stats.epsilon = dec.epsilon;
    stats.delta = width;
    stats.level_lo = -std::numeric_limits<double>::infinity();
    stats.level_hi = band_hi;
    stats.dim = dec.dim;
    stats.retries = dec.retries;
    stats.wrapper_size = w.materialize().size();
    stats.exceptional_size = dec.exceptional.size();
    return WrapResult{std::move(w), dec.exceptional, stats};
}

}  // namespace

WrapResult wrap_level_set(const SpectralFunction& f, double l1, double l2,
                          double delta, double xi, std::uint64_t seed,
                          const DecomposeConfig& cfg) {
    require_arg(l1 < l2, "wrap_level_set: need l1 < l2");
    require_arg(delta > 0, "wrap_level_set: delta must be > 0");
    require_arg(xi > 0 && xi < 1, "wrap_level_set: need 0 < xi < 1");
    const double omega = wiener_norm(f);

    WrapStats stats;
    stats.omega = omega;
    stats.delta = delta;
    stats.xi = xi;
    stats.level_lo = l1 - delta / 2;
    stats.level_hi = l2 + delta / 2;

    auto assert_inclusions = [&](const Wrapper& w, const GroupSet& y) {
        const GroupSet& ws = w.materialize();
        for (std::uint64_t x = 0; x < f.size(); ++x) {
            if (y.contains(x)) continue;
            const double v = f.values()[x].real();
            require_theorem(!(l1 <= v && v < l2) || ws.contains(x),
                            "wrap_level_set: covering inclusion failed");
            require_theorem(!ws.contains(x) || (l1 - delta <= v && v < l2 + delta),
                            "wrap_level_set: leakage inclusion failed");
        }
    };

    if (omega == 0) {
        auto part = trivial_partition(f.group());
        const bool sel = stats.level_lo <= 0.0 && 0.0 <= stats.level_hi;
        Wrapper w(part, {static_cast<char>(sel ? 1 : 0)});
        GroupSet y{f.group()};
        assert_inclusions(w, y);
        stats.epsilon = part->arcs().epsilon;
        stats.wrapper_size = w.materialize().size();
        return WrapResult{std::move(w), std::move(y), stats};
    }

    const double delta_dec = std::min(0.4 * delta / cfg.h_inf_factor, omega);
    Decomposition dec = decompose(f, delta_dec, xi, cfg, seed);

    const auto& part = dec.blocks;
    std::vector<char> selected(part->block_count(), 0);
    for (std::uint32_t b = 0; b < part->block_count(); ++b) {
        const double gb = dec.g.values()[part->representative(b)].real();
        selected[b] = (stats.level_lo <= gb && gb <= stats.level_hi) ? 1 : 0;
    }
    Wrapper w(part, std::move(selected));
    assert_inclusions(w, dec.exceptional);

    stats.epsilon = dec.epsilon;
    stats.dim = dec.dim;
    stats.retries = dec.retries;
    stats.wrapper_size = w.materialize().size();
    stats.exceptional_size = dec.exceptional.size();
    return WrapResult{std::move(w), dec.exceptional, stats};
}

WrapResult wrap_threshold(const SpectralFunction& f, double eta, double delta,
                          double xi, std::uint64_t seed, const DecomposeConfig& cfg) {
    require_arg(eta >= 0, "wrap_threshold: eta must be >= 0");
    require_arg(delta > 0, "wrap_threshold: delta must be > 0");
    require_arg(xi > 0 && xi < 1, "wrap_threshold: need 0 < xi < 1");
    return wrap_one_sided(f, eta, eta + delta, xi, seed, cfg);
}

WrapResult wrap_sumset_complement(const GroupSet& a, const GroupSet& b,
                                  double eta, double delta, double xi,
                                  std::uint64_t seed, const DecomposeConfig& cfg) {
    require_same_group(a, b);
    require_arg(eta >= 0, "wrap_sumset_complement: eta must be >= 0");
    require_arg(delta > 0, "wrap_sumset_complement: delta must be > 0");
    require_arg(xi > 0 && xi < 1, "wrap_sumset_complement: need 0 < xi < 1");
    const std::uint64_t n = a.modulus();

    const ConvolutionTable conv = convolution_counts(a, b);
    const SpectralFunction f = SpectralFunction::from_counts(conv);
    const std::int64_t tau1 = eta == 0 ? 0 : partial_sumset_threshold(eta, n);
    const std::int64_t tau2 = partial_sumset_threshold(eta + delta, n);
    require_arg(tau2 >= tau1 + 1,
                "wrap_sumset_complement: delta is below the count resolution of N");

    WrapResult res = wrap_one_sided(f, static_cast<double>(tau1),
                                    static_cast<double>(tau2), xi, seed, cfg);

    // Same facts in set form; the convolution values are exact integers so
    // the float comparisons in the core and these bitset checks agree.
    std::vector<std::uint64_t> low;
    for (std::uint64_t x = 0; x < n; ++x) {
        if (conv.counts[x] < tau1) low.push_back(x);
    }
    const GroupSet x_eta = GroupSet::from_residues(low, n);
    const GroupSet target = complement(partial_sumset(a, b, eta + delta));
    const GroupSet& w = res.wrapper.materialize();
    require_theorem(is_subset(set_difference(x_eta, res.exceptional), w),
                    "wrap_sumset_complement: X_eta \\ Y not covered");
    require_theorem(is_subset(set_difference(w, res.exceptional), target),
                    "wrap_sumset_complement: wrapper leaks past the outer sumset");
    return res;
}

}  // namespace znwrap
