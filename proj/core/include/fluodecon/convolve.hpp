#pragma once

#include "fluodecon/image.hpp"

namespace fluodecon {

/// How pixels outside the lattice are synthesized during convolution.
enum class BoundaryPolicy {
    Reflect,    // mirror across the edge: f(-1) = f(0), f(-2) = f(1)
    Replicate,  // clamp to the edge pixel
    ZeroPad,    // treat outside as 0
};

/// 180-degree rotation of the kernel: out(u, v) = in(W-1-u, H-1-v).
/// This is the adjoint of convolution, and an involution.
Psf flip_psf(const Psf& psf);

/// Direct spatial convolution, out(s) = sum_u H(u) f(s - u), with the given
/// boundary extension. Output has the input's dimensions. This is the oracle
/// implementation the FFT path is checked against.
Image convolve_direct(const Image& image, const Psf& psf,
                      BoundaryPolicy boundary = BoundaryPolicy::Reflect);

/// FFT-backed convolution: boundary-extends the image, runs padded linear
/// convolution at the next FFT-friendly size, crops, and clamps negative
/// round-off to zero. Matches convolve_direct to ~1e-12 relative.
Image convolve_fft(const Image& image, const Psf& psf,
                   BoundaryPolicy boundary = BoundaryPolicy::Reflect);

namespace detail {

/// Maps a possibly out-of-range index into [0, n) per policy; -1 means "no
/// source pixel" (ZeroPad outside).
int extend_index(int i, int n, BoundaryPolicy boundary);

/// Smallest size >= n whose prime factors are all in {2, 3, 5, 7}.
int next_fast_size(int n);

}  // namespace detail

}  // namespace fluodecon
