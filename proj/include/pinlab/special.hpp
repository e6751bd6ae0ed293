#pragma once

namespace pinlab {

double riemann_zeta(double s);
// sum_{k>=0} (q+k)^{-s}, s > 1, q > 0
double hurwitz_zeta(double s, double q);

// Normalization of the singular-integral form of (-Delta)^s in one dimension:
// 4^s Gamma(1/2+s) / (sqrt(pi) |Gamma(-s)|).
double frac_laplacian_constant(double s);

// splitmix64 finalizer; used to derive independent seeds from one master seed
unsigned long long mix_seed(unsigned long long seed, unsigned long long stream);

}  // namespace pinlab
