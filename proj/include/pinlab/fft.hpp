#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pinlab {

// Real <-> half-complex transforms of length n backed by cached FFTW plans.
// forward: out has n/2+1 entries, unnormalized.
// inverse: divides by n so inverse(forward(x)) == x.
void rfft(std::span<const double> in, std::span<std::complex<double>> out);
void irfft(std::span<const std::complex<double>> in, std::span<double> out);

std::vector<std::complex<double>> rfft(std::span<const double> in);
std::vector<double> irfft(std::span<const std::complex<double>> in, std::size_t n);

}  // namespace pinlab
