#include "pinlab/special.hpp"

#include <cmath>
#include <numbers>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include "pinlab/error.hpp"

namespace pinlab {

namespace {
struct GslQuiet {
    GslQuiet() { gsl_set_error_handler_off(); }
} const gsl_quiet;
}  // namespace

double riemann_zeta(double s)
{
    gsl_sf_result r;
    if (gsl_sf_zeta_e(s, &r) != GSL_SUCCESS)
        throw NumericError("riemann_zeta failed");
    return r.val;
}

double hurwitz_zeta(double s, double q)
{
    gsl_sf_result r;
    if (gsl_sf_hzeta_e(s, q, &r) != GSL_SUCCESS)
        throw NumericError("hurwitz_zeta failed");
    return r.val;
}

double frac_laplacian_constant(double s)
{
    if (s == 1.0)
        return 0.0;  // local operator; the integral form is not used
    const double g_half = std::tgamma(0.5 + s);
    const double g_neg = std::tgamma(-s);
    return std::pow(4.0, s) * g_half / (std::sqrt(std::numbers::pi) * std::fabs(g_neg));
}

unsigned long long mix_seed(unsigned long long seed, unsigned long long stream)
{
    unsigned long long z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace pinlab
