#include "pinlab/fft.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace pinlab {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

struct FftwBuffer {
    explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
        if (!ptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    void* ptr;
};

class PlanCache {
public:
    // Plans are created on fftw_malloc'd buffers, so any buffer from
    // fftw_malloc has compatible alignment for the new-array execute calls.
    const PlanPair& get(std::size_t n) {
        std::lock_guard lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        FftwBuffer r(sizeof(double) * n);
        FftwBuffer c(sizeof(fftw_complex) * (n / 2 + 1));
        PlanPair p;
        const int ni = static_cast<int>(n);
        p.fwd = fftw_plan_dft_r2c_1d(ni, static_cast<double*>(r.ptr),
                                     static_cast<fftw_complex*>(c.ptr), FFTW_ESTIMATE);
        p.inv = fftw_plan_dft_c2r_1d(ni, static_cast<fftw_complex*>(c.ptr),
                                     static_cast<double*>(r.ptr), FFTW_ESTIMATE);
        return plans_.emplace(n, p).first->second;
    }

private:
    std::mutex mutex_;
    std::map<std::size_t, PlanPair> plans_;
};

PlanCache& cache()
{
    static PlanCache c;
    return c;
}

}  // namespace

void rfft(std::span<const double> in, std::span<std::complex<double>> out)
{
    const std::size_t n = in.size();
    if (out.size() != n / 2 + 1) throw std::invalid_argument("rfft: output size");
    const PlanPair& p = cache().get(n);
    FftwBuffer r(sizeof(double) * n);
    FftwBuffer c(sizeof(fftw_complex) * (n / 2 + 1));
    auto* rp = static_cast<double*>(r.ptr);
    std::copy(in.begin(), in.end(), rp);
    fftw_execute_dft_r2c(p.fwd, rp, static_cast<fftw_complex*>(c.ptr));
    auto* cp = reinterpret_cast<std::complex<double>*>(c.ptr);
    std::copy(cp, cp + out.size(), out.begin());
}

void irfft(std::span<const std::complex<double>> in, std::span<double> out)
{
    const std::size_t n = out.size();
    if (in.size() != n / 2 + 1) throw std::invalid_argument("irfft: input size");
    const PlanPair& p = cache().get(n);
    FftwBuffer r(sizeof(double) * n);
    FftwBuffer c(sizeof(fftw_complex) * (n / 2 + 1));
    auto* cp = reinterpret_cast<std::complex<double>*>(c.ptr);
    std::copy(in.begin(), in.end(), cp);
    // c2r destroys its input, which is our private copy
    fftw_execute_dft_c2r(p.inv, static_cast<fftw_complex*>(c.ptr), static_cast<double*>(r.ptr));
    const double scale = 1.0 / static_cast<double>(n);
    auto* rp = static_cast<double*>(r.ptr);
    for (std::size_t i = 0; i < n; ++i) out[i] = rp[i] * scale;
}

std::vector<std::complex<double>> rfft(std::span<const double> in)
{
    std::vector<std::complex<double>> out(in.size() / 2 + 1);
    rfft(in, out);
    return out;
}

std::vector<double> irfft(std::span<const std::complex<double>> in, std::size_t n)
{
    std::vector<double> out(n);
    irfft(in, out);
    return out;
}

}  // namespace pinlab
