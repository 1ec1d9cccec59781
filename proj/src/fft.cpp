#include "lpslab/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace lpslab {
namespace {

struct Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

// Planning is not thread-safe in FFTW; execution through the new-array
// interface is, provided buffers share the planning alignment (fftw_malloc).
std::mutex plan_mutex;

const Plans& plans_for(const Grid& grid) {
    static std::map<std::pair<int, int>, Plans> cache;
    std::lock_guard lock(plan_mutex);
    auto key = std::make_pair(grid.dim(), grid.log2_points());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const int n = static_cast<int>(grid.points_per_axis());
    double* in = fftw_alloc_real(grid.size());
    fftw_complex* out = fftw_alloc_complex(half_spectrum_size(grid));
    Plans p;
    if (grid.dim() == 1) {
        p.r2c = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
        p.c2r = fftw_plan_dft_c2r_1d(n, out, in, FFTW_ESTIMATE);
    } else {
        p.r2c = fftw_plan_dft_r2c_2d(n, n, in, out, FFTW_ESTIMATE);
        p.c2r = fftw_plan_dft_c2r_2d(n, n, out, in, FFTW_ESTIMATE);
    }
    fftw_free(in);
    fftw_free(out);
    if (!p.r2c || !p.c2r) throw std::runtime_error("FFTW planning failed");
    return cache.emplace(key, p).first->second;
}

struct RealBuffer {
    explicit RealBuffer(std::size_t n) : p(fftw_alloc_real(n)) {}
    ~RealBuffer() { fftw_free(p); }
    RealBuffer(const RealBuffer&) = delete;
    RealBuffer& operator=(const RealBuffer&) = delete;
    double* p;
};

struct ComplexBuffer {
    explicit ComplexBuffer(std::size_t n) : p(fftw_alloc_complex(n)) {}
    ~ComplexBuffer() { fftw_free(p); }
    ComplexBuffer(const ComplexBuffer&) = delete;
    ComplexBuffer& operator=(const ComplexBuffer&) = delete;
    fftw_complex* p;
};

} // namespace

std::size_t half_spectrum_size(const Grid& grid) {
    const std::size_t n = grid.points_per_axis();
    return grid.dim() == 1 ? n / 2 + 1 : n * (n / 2 + 1);
}

Spectrum forward(const GridFunction& f) {
    const Grid& g = f.grid();
    const Plans& p = plans_for(g);
    RealBuffer in(g.size());
    ComplexBuffer out(half_spectrum_size(g));
    std::memcpy(in.p, f.values().data(), g.size() * sizeof(double));
    fftw_execute_dft_r2c(p.r2c, in.p, out.p);
    Spectrum s{g, std::vector<std::complex<double>>(half_spectrum_size(g))};
    std::memcpy(static_cast<void*>(s.data.data()), out.p, s.data.size() * sizeof(fftw_complex));
    return s;
}

GridFunction inverse(const Spectrum& s) {
    const Grid& g = s.grid;
    const Plans& p = plans_for(g);
    ComplexBuffer in(s.data.size());
    RealBuffer out(g.size());
    std::memcpy(static_cast<void*>(in.p), s.data.data(), s.data.size() * sizeof(fftw_complex));
    fftw_execute_dft_c2r(p.c2r, in.p, out.p);
    const double scale = 1.0 / static_cast<double>(g.size());
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = out.p[i] * scale;
    return GridFunction(g, std::move(v));
}

GridFunction convolve_spectrum(const Spectrum& kernel, const GridFunction& f) {
    if (!(kernel.grid == f.grid())) throw std::invalid_argument("convolve_spectrum: grid mismatch");
    Spectrum fs = forward(f);
    const double w = f.grid().cell_volume();
    for (std::size_t i = 0; i < fs.data.size(); ++i) fs.data[i] *= kernel.data[i] * w;
    return inverse(fs);
}

} // namespace lpslab
