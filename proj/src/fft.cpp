#include "fgpe/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

#if defined(FGPE_FFTW_THREADS)
#include <atomic>
#endif

namespace fgpe::fft {

namespace {

enum class Kind { c2c_fwd, c2c_bwd, r2c, c2r };

struct Key {
    int rank;
    std::array<int, 3> n;
    Kind kind;
    bool operator<(const Key& o) const {
        if (rank != o.rank) return rank < o.rank;
        if (n != o.n) return n < o.n;
        return kind < o.kind;
    }
};

struct Entry {
    fftw_plan plan = nullptr;
    void* in = nullptr;
    void* out = nullptr;
    std::size_t in_elems = 0, out_elems = 0;
};

std::mutex g_mutex;
std::map<Key, Entry>& cache() {
    static std::map<Key, Entry> c;
    return c;
}
int g_threads = 1;

std::size_t total(int rank, const std::array<int, 3>& n) {
    std::size_t s = 1;
    for (int a = 0; a < rank; ++a) s *= static_cast<std::size_t>(n[a]);
    return s;
}

Entry& planned(int rank, const std::array<int, 3>& n, Kind kind) {
    auto [it, inserted] = cache().try_emplace(Key{rank, n, kind});
    Entry& e = it->second;
    if (!inserted) return e;

    const std::size_t nc = total(rank, n);
    const std::size_t nh = half_complex_size(rank, n);
#if defined(FGPE_FFTW_THREADS)
    fftw_plan_with_nthreads(g_threads);
#endif
    switch (kind) {
        case Kind::c2c_fwd:
        case Kind::c2c_bwd: {
            e.in_elems = e.out_elems = nc;
            e.in = fftw_malloc(nc * sizeof(fftw_complex));
            e.out = fftw_malloc(nc * sizeof(fftw_complex));
            e.plan = fftw_plan_dft(rank, n.data(),
                                   static_cast<fftw_complex*>(e.in),
                                   static_cast<fftw_complex*>(e.out),
                                   kind == Kind::c2c_fwd ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE);
            break;
        }
        case Kind::r2c: {
            e.in_elems = nc;
            e.out_elems = nh;
            e.in = fftw_malloc(nc * sizeof(double));
            e.out = fftw_malloc(nh * sizeof(fftw_complex));
            e.plan = fftw_plan_dft_r2c(rank, n.data(), static_cast<double*>(e.in),
                                       static_cast<fftw_complex*>(e.out), FFTW_ESTIMATE);
            break;
        }
        case Kind::c2r: {
            e.in_elems = nh;
            e.out_elems = nc;
            e.in = fftw_malloc(nh * sizeof(fftw_complex));
            e.out = fftw_malloc(nc * sizeof(double));
            e.plan = fftw_plan_dft_c2r(rank, n.data(), static_cast<fftw_complex*>(e.in),
                                       static_cast<double*>(e.out), FFTW_ESTIMATE);
            break;
        }
    }
    if (!e.plan) throw std::runtime_error("fft: plan creation failed");
    return e;
}

void run(int rank, const std::array<int, 3>& n, Kind kind, const void* in,
         void* out, std::size_t in_bytes_per, std::size_t out_bytes_per) {
    std::lock_guard<std::mutex> lock(g_mutex);
    Entry& e = planned(rank, n, kind);
    std::memcpy(e.in, in, e.in_elems * in_bytes_per);
    fftw_execute(e.plan);
    std::memcpy(out, e.out, e.out_elems * out_bytes_per);
}

} // namespace

std::size_t complex_size(int rank, const std::array<int, 3>& n) {
    return total(rank, n);
}

std::size_t half_complex_size(int rank, const std::array<int, 3>& n) {
    std::size_t s = 1;
    for (int a = 0; a < rank - 1; ++a) s *= static_cast<std::size_t>(n[a]);
    return s * (static_cast<std::size_t>(n[rank - 1]) / 2 + 1);
}

void forward(int rank, const std::array<int, 3>& n, const cplx* in, cplx* out) {
    run(rank, n, Kind::c2c_fwd, in, out, sizeof(cplx), sizeof(cplx));
}

void inverse(int rank, const std::array<int, 3>& n, const cplx* in, cplx* out) {
    run(rank, n, Kind::c2c_bwd, in, out, sizeof(cplx), sizeof(cplx));
}

void forward_r2c(int rank, const std::array<int, 3>& n, const double* in, cplx* out) {
    run(rank, n, Kind::r2c, in, out, sizeof(double), sizeof(cplx));
}

void inverse_c2r(int rank, const std::array<int, 3>& n, const cplx* in, double* out) {
    run(rank, n, Kind::c2r, in, out, sizeof(cplx), sizeof(double));
}

void set_threads(int n_threads) {
    std::lock_guard<std::mutex> lock(g_mutex);
#if defined(FGPE_FFTW_THREADS)
    static std::atomic<bool> initialized{false};
    if (!initialized.exchange(true)) fftw_init_threads();
    g_threads = n_threads > 0 ? n_threads : 1;
#else
    (void)n_threads;
    g_threads = 1;
#endif
}

} // namespace fgpe::fft
