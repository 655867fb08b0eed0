#include "znwrap/group.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "znwrap/fourier.hpp"

namespace znwrap {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mul_mod(r, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return r;
}

std::uint64_t inverse_mod(std::uint64_t x, std::uint64_t p) {
    require_arg(x % p != 0, "inverse_mod: 0 has no inverse");
    return pow_mod(x % p, p - 2, p);
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = std::countr_zero(d);
    d >>= s;
    // Deterministic witness set for the full 64-bit range.
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

CyclicGroup::CyclicGroup(std::uint64_t modulus) : n(modulus), prime(is_prime_u64(modulus)) {
    require_arg(modulus >= 2, "CyclicGroup: modulus must be >= 2");
}

namespace {

std::uint64_t word_count(std::uint64_t n) { return (n + 63) >> 6; }

void mask_tail(std::vector<std::uint64_t>& words, std::uint64_t n) {
    const unsigned tail = static_cast<unsigned>(n & 63);
    if (tail) words.back() &= (std::uint64_t(1) << tail) - 1;
}

std::uint64_t popcount_words(const std::vector<std::uint64_t>& words) {
    std::uint64_t c = 0;
    for (std::uint64_t w : words) c += std::popcount(w);
    return c;
}

// Read up to 64 bits starting at `pos` (bounds respected by callers).
inline std::uint64_t read_bits(const std::uint64_t* w, std::uint64_t nwords,
                               std::uint64_t pos, unsigned cnt) {
    const std::uint64_t word = pos >> 6;
    const unsigned off = static_cast<unsigned>(pos & 63);
    std::uint64_t v = w[word] >> off;
    if (off != 0 && word + 1 < nwords) v |= w[word + 1] << (64 - off);
    if (cnt < 64) v &= (std::uint64_t(1) << cnt) - 1;
    return v;
}

inline void or_bits(std::uint64_t* w, std::uint64_t pos, unsigned cnt, std::uint64_t v) {
    const std::uint64_t word = pos >> 6;
    const unsigned off = static_cast<unsigned>(pos & 63);
    if (cnt < 64) v &= (std::uint64_t(1) << cnt) - 1;
    w[word] |= v << off;
    if (off != 0 && off + cnt > 64) w[word + 1] |= v >> (64 - off);
}

// dst |= rotate_left(src, s) on the n-bit ring.
void or_rotated(std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src,
                std::uint64_t n, std::uint64_t s) {
    if (s == 0) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] |= src[i];
        return;
    }
    auto or_range = [&](std::uint64_t sfrom, std::uint64_t len, std::uint64_t dfrom) {
        for (std::uint64_t i = 0; i < len; i += 64) {
            const unsigned c = static_cast<unsigned>(std::min<std::uint64_t>(64, len - i));
            or_bits(dst.data(), dfrom + i, c, read_bits(src.data(), src.size(), sfrom + i, c));
        }
    };
    or_range(0, n - s, s);   // bits [0, n-s) land at [s, n)
    or_range(n - s, s, 0);   // wraparound
}

}  // namespace

GroupSet::GroupSet(CyclicGroup g) : group_(g), words_(word_count(g.n), 0) {}

GroupSet GroupSet::from_residues(std::span<const std::uint64_t> xs, std::uint64_t n) {
    GroupSet s{CyclicGroup(n)};
    for (std::uint64_t x : xs) {
        require_arg(x < n, "GroupSet: residue out of range");
        s.words_[x >> 6] |= std::uint64_t(1) << (x & 63);
    }
    s.card_ = popcount_words(s.words_);
    return s;
}

GroupSet GroupSet::from_residues(std::initializer_list<std::uint64_t> xs, std::uint64_t n) {
    return from_residues(std::span<const std::uint64_t>(xs.begin(), xs.size()), n);
}

GroupSet GroupSet::from_words(CyclicGroup g, std::vector<std::uint64_t> words) {
    require_arg(words.size() == word_count(g.n), "GroupSet: bad word count");
    GroupSet s{g};
    s.words_ = std::move(words);
    mask_tail(s.words_, g.n);
    s.card_ = popcount_words(s.words_);
    return s;
}

GroupSet GroupSet::full(CyclicGroup g) {
    GroupSet s{g};
    std::fill(s.words_.begin(), s.words_.end(), ~std::uint64_t(0));
    mask_tail(s.words_, g.n);
    s.card_ = g.n;
    return s;
}

GroupSet GroupSet::singleton(std::uint64_t x, std::uint64_t n) {
    return from_residues({x}, n);
}

std::vector<std::uint64_t> GroupSet::residues() const {
    std::vector<std::uint64_t> out;
    out.reserve(card_);
    for (std::size_t i = 0; i < words_.size(); ++i) {
        std::uint64_t w = words_[i];
        while (w) {
            out.push_back((i << 6) + std::countr_zero(w));
            w &= w - 1;
        }
    }
    return out;
}

void require_same_group(const GroupSet& a, const GroupSet& b) {
    require_arg(a.group() == b.group(), "sets live in different groups");
}

GroupSet complement(const GroupSet& a) {
    std::vector<std::uint64_t> w = a.words();
    for (auto& x : w) x = ~x;
    return GroupSet::from_words(a.group(), std::move(w));
}

GroupSet intersect(const GroupSet& a, const GroupSet& b) {
    require_same_group(a, b);
    std::vector<std::uint64_t> w = a.words();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] &= b.words()[i];
    return GroupSet::from_words(a.group(), std::move(w));
}

GroupSet set_union(const GroupSet& a, const GroupSet& b) {
    require_same_group(a, b);
    std::vector<std::uint64_t> w = a.words();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] |= b.words()[i];
    return GroupSet::from_words(a.group(), std::move(w));
}

GroupSet set_difference(const GroupSet& a, const GroupSet& b) {
    require_same_group(a, b);
    std::vector<std::uint64_t> w = a.words();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] &= ~b.words()[i];
    return GroupSet::from_words(a.group(), std::move(w));
}

bool is_subset(const GroupSet& a, const GroupSet& b) {
    require_same_group(a, b);
    for (std::size_t i = 0; i < a.words().size(); ++i) {
        if (a.words()[i] & ~b.words()[i]) return false;
    }
    return true;
}

GroupSet negate_set(const GroupSet& a) {
    const std::uint64_t n = a.modulus();
    GroupSet out{a.group()};
    std::vector<std::uint64_t> w(word_count(n), 0);
    for (std::uint64_t x : a.residues()) {
        const std::uint64_t y = x == 0 ? 0 : n - x;
        w[y >> 6] |= std::uint64_t(1) << (y & 63);
    }
    return GroupSet::from_words(a.group(), std::move(w));
}

GroupSet invert_set(const GroupSet& a) {
    require_arg(a.group().prime, "invert_set: modulus must be prime");
    require_arg(!a.contains(0), "invert_set: 0 has no inverse");
    const std::uint64_t p = a.modulus();
    std::vector<std::uint64_t> w(word_count(p), 0);
    for (std::uint64_t x : a.residues()) {
        const std::uint64_t y = inverse_mod(x, p);
        w[y >> 6] |= std::uint64_t(1) << (y & 63);
    }
    return GroupSet::from_words(a.group(), std::move(w));
}

GroupSet dilate(const GroupSet& a, std::uint64_t lambda) {
    const std::uint64_t n = a.modulus();
    lambda %= n;
    require_arg(std::gcd(lambda, n) == 1, "dilate: lambda must be coprime to N");
    std::vector<std::uint64_t> w(word_count(n), 0);
    for (std::uint64_t x : a.residues()) {
        const std::uint64_t y = mul_mod(lambda, x, n);
        w[y >> 6] |= std::uint64_t(1) << (y & 63);
    }
    return GroupSet::from_words(a.group(), std::move(w));
}

GroupSet sumset(const GroupSet& a, const GroupSet& b) {
    require_same_group(a, b);
    const std::uint64_t n = a.modulus();
    if (a.empty() || b.empty()) return GroupSet{a.group()};
    const GroupSet& small = a.size() <= b.size() ? a : b;
    const GroupSet& large = a.size() <= b.size() ? b : a;
    std::vector<std::uint64_t> out(word_count(n), 0);
    for (std::uint64_t s : small.residues()) or_rotated(out, large.words(), n, s);
    return GroupSet::from_words(a.group(), std::move(out));
}

namespace {

ConvolutionTable convolution_naive(const GroupSet& a, const GroupSet& b) {
    const std::uint64_t n = a.modulus();
    ConvolutionTable t{a.group(), std::vector<std::int64_t>(n, 0)};
    const auto bs = b.residues();
    for (std::uint64_t x : a.residues()) {
        for (std::uint64_t y : bs) {
            std::uint64_t s = x + y;
            if (s >= n) s -= n;
            ++t.counts[s];
        }
    }
    return t;
}

}  // namespace

ConvolutionTable convolution_counts(const GroupSet& a, const GroupSet& b,
                                    std::uint64_t spectral_crossover) {
    require_same_group(a, b);
    const std::uint64_t n = a.modulus();
    if (n <= spectral_crossover) return convolution_naive(a, b);

    const SpectralFunction conv =
        convolve(SpectralFunction::indicator(a), SpectralFunction::indicator(b));
    ConvolutionTable t{a.group(), std::vector<std::int64_t>(n, 0)};
    bool clean = true;
    for (std::uint64_t x = 0; x < n && clean; ++x) {
        const cd v = conv.values()[x];
        const double r = std::round(v.real());
        if (std::abs(v.real() - r) > 0.25 || std::abs(v.imag()) > 0.25 || r < 0) clean = false;
        t.counts[x] = static_cast<std::int64_t>(r);
    }
    if (clean) {
        const std::int64_t total = std::accumulate(t.counts.begin(), t.counts.end(), std::int64_t(0));
        clean = total == static_cast<std::int64_t>(a.size() * b.size());
    }
    // The fast path must agree with the exact count; if rounding is ever in
    // doubt, pay for the double loop instead of guessing.
    if (!clean) return convolution_naive(a, b);
    return t;
}

std::int64_t partial_sumset_threshold(double eps, std::uint64_t n) {
    require_arg(eps > 0, "partial sumset: eps must be > 0");
    const double t = eps * static_cast<double>(n);
    const double nearest = std::round(t);
    if (std::abs(t - nearest) <= 1e-9 * std::max(1.0, std::abs(t))) {
        // eps > 0 forces counts >= 1 no matter how small eps*N is; only the
        // snap can land on 0 and it must not widen the set.
        return std::max<std::int64_t>(1, std::llround(nearest));
    }
    return static_cast<std::int64_t>(std::ceil(t));
}

GroupSet partial_sumset(const GroupSet& a, const GroupSet& b, double eps,
                        std::uint64_t spectral_crossover) {
    require_same_group(a, b);
    const std::uint64_t n = a.modulus();
    const std::int64_t tau = partial_sumset_threshold(eps, n);
    const ConvolutionTable t = convolution_counts(a, b, spectral_crossover);
    std::vector<std::uint64_t> w(word_count(n), 0);
    for (std::uint64_t x = 0; x < n; ++x) {
        if (t.counts[x] >= tau) w[x >> 6] |= std::uint64_t(1) << (x & 63);
    }
    return GroupSet::from_words(a.group(), std::move(w));
}

GroupSet partial_difference(const GroupSet& a, const GroupSet& b, double eps,
                            std::uint64_t spectral_crossover) {
    return partial_sumset(a, negate_set(b), eps, spectral_crossover);
}

bool is_sum_free(const GroupSet& a) {
    return intersect(sumset(a, a), a).empty();
}

GroupSet coverage_a_a_plus_a(const GroupSet& a) {
    require_arg(a.group().prime, "coverage: modulus must be prime");
    require_arg(!a.contains(0), "coverage: A must avoid 0");
    const std::uint64_t p = a.modulus();
    const GroupSet s = sumset(a, a);
    std::vector<std::uint64_t> w(word_count(p), 0);
    const auto sums = s.residues();
    for (std::uint64_t x : a.residues()) {
        for (std::uint64_t t : sums) {
            if (t == 0) continue;
            const std::uint64_t v = mul_mod(x, t, p);
            w[v >> 6] |= std::uint64_t(1) << (v & 63);
        }
    }
    if (s.contains(0)) w[0] |= 1;
    return GroupSet::from_words(a.group(), std::move(w));
}

GroupSet exception_set(const GroupSet& x, const GroupSet& y, double delta, double T) {
    require_same_group(x, y);
    require_arg(T > 1, "exception_set: T must be > 1");
    require_arg(delta > 0 && delta < 1, "exception_set: delta must lie in (0, 1)");
    require_arg(!x.empty(), "exception_set: X must be non-empty");
    const double kappa = x.density();
    const GroupSet z = complement(partial_difference(x, y, delta));
    const GroupSet e = intersect(x, partial_sumset(y, z, delta * T / kappa));
    // |E| (dT/kappa) p <= #solutions x - y = z <= |Z| d p <= d p^2, so
    // |E| <= |X| / T with the ceiling thresholds included.
    require_theorem(static_cast<double>(e.size()) * T <=
                        static_cast<double>(x.size()) * (1 + 1e-9) + 1e-9,
                    "exception_set: |E| <= |X|/T failed");
    return e;
}

}  // namespace znwrap
