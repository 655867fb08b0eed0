#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "znwrap/group.hpp"

namespace znwrap {

using cd = std::complex<double>;

/// f : Z_N -> C with a lazily cached spectrum.
///
/// The cache is single-assignment: it is filled on the first spectrum()
/// call and shared by copies afterwards.  Populate it before handing the
/// object to concurrent readers (or accept a redundant recomputation).
class SpectralFunction {
public:
    SpectralFunction(CyclicGroup g, std::vector<cd> values);

    static SpectralFunction indicator(const GroupSet& s);
    static SpectralFunction from_counts(const ConvolutionTable& t);

    const CyclicGroup& group() const { return group_; }
    std::uint64_t size() const { return group_.n; }
    const std::vector<cd>& values() const { return values_; }

    /// hat f(r) = sum_x f(x) e^{-2 pi i r x / N}; computed once, cached.
    const std::vector<cd>& spectrum() const;

private:
    CyclicGroup group_;
    std::vector<cd> values_;
    mutable std::shared_ptr<const std::vector<cd>> spectrum_;
};

/// Forward transform of an arbitrary-length vector.  Direct O(N^2)
/// summation up to N = 512, Bluestein chirp-z above (prime N included).
std::vector<cd> dft(std::span<const cd> values);
inline const std::vector<cd>& dft(const SpectralFunction& f) { return f.spectrum(); }

/// Exact inverse: values(x) = (1/N) sum_r F(r) e^{+2 pi i r x / N}.
SpectralFunction inverse_dft(std::span<const cd> spectrum, CyclicGroup g);

namespace detail {
std::vector<cd> dft_direct(std::span<const cd> values);
std::vector<cd> dft_bluestein(std::span<const cd> values);
}  // namespace detail

/// (f * g)(x) = sum_{a+b=x} f(a) g(b), via the spectral product.
SpectralFunction convolve(const SpectralFunction& f, const SpectralFunction& g);

/// ||f||_w = (1/N) sum_r |hat f(r)|.
double wiener_norm(const SpectralFunction& f);
double wiener_norm(const GroupSet& s);

struct KloostermanValue {
    std::uint64_t p = 0, a = 0, b = 0;
    cd value;
    double magnitude = 0;
    double weil_bound = 0;
};

/// S(a, b; p) = sum_{z != 0} e_p(a z + b z^{-1}), direct summation.
/// Asserts the Weil bound |S| <= 2 sqrt(p).
KloostermanValue kloosterman_sum(std::uint64_t a, std::uint64_t b, std::uint64_t p);

struct KloostermanSweep {
    std::uint64_t p = 0;
    double max_magnitude = 0;
    double weil_bound = 0;
    std::uint64_t arg_a = 0, arg_b = 0;  // where the max is attained
    std::uint64_t violations = 0;        // always 0; counted before asserting
};

/// All (a, b) in F_p^* x F_p^*; shares one root/inverse table.
KloostermanSweep kloosterman_sweep(std::uint64_t p);

struct InverseSpectralBound {
    double max_coeff = 0;  // max_{r != 0} |hat{1_{X*}}(r)|
    double bound = 0;      // 2 sqrt(p) ||X||_w
};

/// Spectral flatness of the inverse set X* = {x^{-1}};
/// asserts max_coeff <= bound (Weil / triangle inequality).
InverseSpectralBound max_nontrivial_coeff_of_inverse(const GroupSet& x);

/// Half-open arc [theta1, theta2) on the unit circle, 0 <= theta2-theta1 <= 2pi.
struct Arc {
    double theta1 = 0;
    double theta2 = 0;
};

/// {x : angle of e^{2 pi i r x / N} lies in the arc}.
GroupSet arc_preimage(std::uint64_t r, Arc arc, std::uint64_t n);
double arc_preimage_wiener(std::uint64_t r, Arc arc, std::uint64_t n);

/// Lower estimate of w(Z_N) = sup over characters and arcs of the Wiener
/// norm of the arc preimage: deterministic dyadic sweep at r = 1 plus
/// `samples` random (r, arc) draws.  Monotone in `samples` for fixed seed.
double estimate_w(std::uint64_t n, std::uint64_t samples, std::uint64_t seed);

}  // namespace znwrap
