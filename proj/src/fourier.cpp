#include "znwrap/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "znwrap/rng.hpp"

namespace znwrap {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

// In-place iterative radix-2 FFT, length a power of two.
void fft_pow2(std::vector<cd>& a, bool inverse) {
    const std::size_t m = a.size();
    for (std::size_t i = 1, j = 0; i < m; ++i) {
        std::size_t bit = m >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= m; len <<= 1) {
        const double ang = (inverse ? kTau : -kTau) / static_cast<double>(len);
        const cd wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < m; i += len) {
            cd w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cd u = a[i + j];
                const cd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(m);
        for (auto& x : a) x *= inv;
    }
}

struct BluesteinPlan {
    std::uint64_t n = 0;
    std::size_t m = 0;           // power of two >= 2n - 1
    std::vector<cd> chirp;       // chirp[j] = e^{-i pi j^2 / n}, j^2 taken mod 2n
    std::vector<cd> bhat;        // FFT_m of the circularly embedded conjugate chirp
};

std::shared_ptr<const BluesteinPlan> bluestein_plan(std::uint64_t n) {
    static std::mutex mu;
    static std::map<std::uint64_t, std::shared_ptr<const BluesteinPlan>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    auto plan = std::make_shared<BluesteinPlan>();
    plan->n = n;
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;
    plan->m = m;
    plan->chirp.resize(n);
    for (std::uint64_t j = 0; j < n; ++j) {
        // j^2 mod 2n keeps the phase argument small and exact.
        const std::uint64_t q = static_cast<std::uint64_t>(
            (static_cast<__uint128_t>(j) * j) % (2 * n));
        const double ang = -std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
        plan->chirp[j] = cd(std::cos(ang), std::sin(ang));
    }
    std::vector<cd> b(m, cd(0, 0));
    for (std::uint64_t j = 0; j < n; ++j) {
        const cd v = std::conj(plan->chirp[j]);
        b[j] = v;
        if (j != 0) b[m - j] = v;
    }
    fft_pow2(b, false);
    plan->bhat = std::move(b);
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.emplace(n, std::move(plan));
    (void)inserted;
    return it->second;
}

}  // namespace

namespace detail {

std::vector<cd> dft_direct(std::span<const cd> values) {
    const std::uint64_t n = values.size();
    std::vector<cd> roots(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        const double ang = -kTau * static_cast<double>(k) / static_cast<double>(n);
        roots[k] = cd(std::cos(ang), std::sin(ang));
    }
    std::vector<cd> out(n);
    for (std::uint64_t r = 0; r < n; ++r) {
        cd acc(0, 0);
        std::uint64_t idx = 0;
        for (std::uint64_t x = 0; x < n; ++x) {
            acc += values[x] * roots[idx];
            idx += r;
            if (idx >= n) idx -= n;
        }
        out[r] = acc;
    }
    return out;
}

std::vector<cd> dft_bluestein(std::span<const cd> values) {
    const std::uint64_t n = values.size();
    const auto plan = bluestein_plan(n);
    std::vector<cd> a(plan->m, cd(0, 0));
    for (std::uint64_t j = 0; j < n; ++j) a[j] = values[j] * plan->chirp[j];
    fft_pow2(a, false);
    for (std::size_t i = 0; i < plan->m; ++i) a[i] *= plan->bhat[i];
    fft_pow2(a, true);
    std::vector<cd> out(n);
    for (std::uint64_t r = 0; r < n; ++r) out[r] = plan->chirp[r] * a[r];
    return out;
}

}  // namespace detail

std::vector<cd> dft(std::span<const cd> values) {
    require_arg(!values.empty(), "dft: empty input");
    if (values.size() <= 512) return detail::dft_direct(values);
    return detail::dft_bluestein(values);
}

SpectralFunction inverse_dft(std::span<const cd> spectrum, CyclicGroup g) {
    require_arg(spectrum.size() == g.n, "inverse_dft: length mismatch");
    std::vector<cd> tmp(spectrum.begin(), spectrum.end());
    for (auto& v : tmp) v = std::conj(v);
    std::vector<cd> fwd = dft(tmp);
    const double inv = 1.0 / static_cast<double>(g.n);
    for (auto& v : fwd) v = std::conj(v) * inv;
    return SpectralFunction(g, std::move(fwd));
}

SpectralFunction::SpectralFunction(CyclicGroup g, std::vector<cd> values)
    : group_(g), values_(std::move(values)) {
    require_arg(values_.size() == group_.n, "SpectralFunction: length mismatch");
}

SpectralFunction SpectralFunction::indicator(const GroupSet& s) {
    std::vector<cd> v(s.modulus(), cd(0, 0));
    for (std::uint64_t x : s.residues()) v[x] = cd(1, 0);
    return SpectralFunction(s.group(), std::move(v));
}

SpectralFunction SpectralFunction::from_counts(const ConvolutionTable& t) {
    std::vector<cd> v(t.counts.size());
    for (std::size_t i = 0; i < t.counts.size(); ++i) {
        v[i] = cd(static_cast<double>(t.counts[i]), 0);
    }
    return SpectralFunction(t.group, std::move(v));
}

const std::vector<cd>& SpectralFunction::spectrum() const {
    if (!spectrum_) {
        spectrum_ = std::make_shared<const std::vector<cd>>(dft(values_));
    }
    return *spectrum_;
}

SpectralFunction convolve(const SpectralFunction& f, const SpectralFunction& g) {
    require_arg(f.group() == g.group(), "convolve: group mismatch");
    const auto& fh = f.spectrum();
    const auto& gh = g.spectrum();
    std::vector<cd> prod(fh.size());
    for (std::size_t i = 0; i < fh.size(); ++i) prod[i] = fh[i] * gh[i];
    return inverse_dft(prod, f.group());
}

double wiener_norm(const SpectralFunction& f) {
    const auto& sp = f.spectrum();
    double sum = 0;
    for (const cd& v : sp) sum += std::abs(v);
    return sum / static_cast<double>(f.size());
}

double wiener_norm(const GroupSet& s) {
    return wiener_norm(SpectralFunction::indicator(s));
}

namespace {

std::vector<std::uint64_t> inverse_table(std::uint64_t p) {
    std::vector<std::uint64_t> inv(p, 0);
    if (p > 1) inv[1] = 1;
    for (std::uint64_t z = 2; z < p; ++z) {
        inv[z] = p - mul_mod(p / z, inv[p % z], p);
    }
    return inv;
}

std::vector<cd> root_table(std::uint64_t p) {
    std::vector<cd> roots(p);
    for (std::uint64_t k = 0; k < p; ++k) {
        const double ang = kTau * static_cast<double>(k) / static_cast<double>(p);
        roots[k] = cd(std::cos(ang), std::sin(ang));
    }
    return roots;
}

cd kloosterman_raw(std::uint64_t a, std::uint64_t b, std::uint64_t p,
                   const std::vector<cd>& roots, const std::vector<std::uint64_t>& inv) {
    cd acc(0, 0);
    for (std::uint64_t z = 1; z < p; ++z) {
        const std::uint64_t idx = (a * z + b * inv[z]) % p;
        acc += roots[idx];
    }
    return acc;
}

}  // namespace

KloostermanValue kloosterman_sum(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    require_arg(is_prime_u64(p), "kloosterman: p must be prime");
    a %= p;
    b %= p;
    require_arg(a != 0 || b != 0, "kloosterman: (a, b) must not both vanish");
    const auto inv = inverse_table(p);
    const auto roots = root_table(p);
    KloostermanValue out;
    out.p = p;
    out.a = a;
    out.b = b;
    out.value = kloosterman_raw(a, b, p, roots, inv);
    out.magnitude = std::abs(out.value);
    out.weil_bound = 2.0 * std::sqrt(static_cast<double>(p));
    require_theorem(out.magnitude <= out.weil_bound + 1e-6,
                    "kloosterman: Weil bound violated");
    return out;
}

KloostermanSweep kloosterman_sweep(std::uint64_t p) {
    require_arg(is_prime_u64(p), "kloosterman: p must be prime");
    require_arg(p >= 3, "kloosterman: sweep needs p >= 3");
    const auto inv = inverse_table(p);
    const auto roots = root_table(p);
    KloostermanSweep out;
    out.p = p;
    out.weil_bound = 2.0 * std::sqrt(static_cast<double>(p));
    for (std::uint64_t a = 1; a < p; ++a) {
        for (std::uint64_t b = 1; b < p; ++b) {
            const double mag = std::abs(kloosterman_raw(a, b, p, roots, inv));
            if (mag > out.max_magnitude) {
                out.max_magnitude = mag;
                out.arg_a = a;
                out.arg_b = b;
            }
            if (mag > out.weil_bound + 1e-6) ++out.violations;
        }
    }
    require_theorem(out.violations == 0, "kloosterman: Weil bound violated in sweep");
    return out;
}

InverseSpectralBound max_nontrivial_coeff_of_inverse(const GroupSet& x) {
    require_arg(x.group().prime, "inverse spectrum: modulus must be prime");
    require_arg(!x.contains(0), "inverse spectrum: X must avoid 0");
    require_arg(!x.empty(), "inverse spectrum: X must be non-empty");
    const std::uint64_t p = x.modulus();
    const auto& sp = dft(SpectralFunction::indicator(invert_set(x)));
    InverseSpectralBound out;
    for (std::uint64_t r = 1; r < p; ++r) {
        out.max_coeff = std::max(out.max_coeff, std::abs(sp[r]));
    }
    out.bound = 2.0 * std::sqrt(static_cast<double>(p)) * wiener_norm(x);
    require_theorem(out.max_coeff <= out.bound + 1e-6,
                    "inverse spectrum: 2 sqrt(p) ||X||_w bound violated");
    return out;
}

GroupSet arc_preimage(std::uint64_t r, Arc arc, std::uint64_t n) {
    CyclicGroup g(n);
    double len = arc.theta2 - arc.theta1;
    require_arg(len >= 0 && len <= kTau + 1e-9, "arc: need 0 <= theta2 - theta1 <= 2 pi");
    len = std::min(len, kTau);
    std::vector<std::uint64_t> xs;
    for (std::uint64_t x = 0; x < n; ++x) {
        const std::uint64_t k = mul_mod(r % n, x, n);
        const double angle = kTau * static_cast<double>(k) / static_cast<double>(n);
        double d = std::fmod(angle - arc.theta1, kTau);
        if (d < 0) d += kTau;
        if (d < len) xs.push_back(x);
    }
    return GroupSet::from_residues(xs, n);
}

double arc_preimage_wiener(std::uint64_t r, Arc arc, std::uint64_t n) {
    return wiener_norm(arc_preimage(r, arc, n));
}

double estimate_w(std::uint64_t n, std::uint64_t samples, std::uint64_t seed) {
    require_arg(n >= 2, "estimate_w: n must be >= 2");
    double best = 0;
    // Deterministic dyadic arcs of the base character; the quarter-circle
    // preimage is the interval whose Wiener norm already grows like log N.
    for (std::uint64_t k = 2; k <= std::min<std::uint64_t>(64, n); k <<= 1) {
        for (std::uint64_t j = 0; j < k; ++j) {
            const Arc arc{kTau * static_cast<double>(j) / static_cast<double>(k),
                          kTau * static_cast<double>(j + 1) / static_cast<double>(k)};
            best = std::max(best, arc_preimage_wiener(1, arc, n));
        }
    }
    Rng rng(seed);
    for (std::uint64_t i = 0; i < samples; ++i) {
        const std::uint64_t r = 1 + rng.next_below(n - 1);
        const double t1 = rng.next_double() * kTau;
        const double len = rng.next_double() * kTau;
        best = std::max(best, arc_preimage_wiener(r, Arc{t1, t1 + len}, n));
    }
    return best;
}

}  // namespace znwrap
