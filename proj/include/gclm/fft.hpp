#pragma once

// Thin FFTW wrapper: cached plans per size, new-array execution.

#include <fftw3.h>

#include <complex>
#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <span>
#include <vector>

namespace gclm {

using cplx = std::complex<double>;

template <class T, std::size_t Align = 64>
struct AlignedAllocator {
  using value_type = T;
  template <class U>
  struct rebind {
    using other = AlignedAllocator<U, Align>;
  };
  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U, Align>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{Align}));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{Align}); }

  template <class U>
  bool operator==(const AlignedAllocator<U, Align>&) const noexcept { return true; }
};

template <class T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

namespace detail {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~PlanPair() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

// FFTW_ESTIMATE keeps plan selection deterministic, so repeated runs are bit-identical.
inline const PlanPair& plans_for(std::size_t n) {
  static std::mutex mtx;
  static std::map<std::size_t, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(mtx);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<PlanPair>();
    AlignedVector<cplx> a(n), b(n);
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const int ni = static_cast<int>(n);
    slot->fwd = fftw_plan_dft_1d(ni, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE);
    slot->bwd = fftw_plan_dft_1d(ni, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  return *slot;
}

inline bool plan_aligned(const fftw_complex* p) {
  return fftw_alignment_of(reinterpret_cast<double*>(const_cast<fftw_complex*>(p))) == 0;
}

inline void execute(fftw_plan plan, std::span<const cplx> in, std::span<cplx> out) {
  auto* pi = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
  auto* po = reinterpret_cast<fftw_complex*>(out.data());
  if (pi != po && plan_aligned(pi) && plan_aligned(po)) {
    fftw_execute_dft(plan, pi, po);
    return;
  }
  AlignedVector<cplx> a(in.begin(), in.end()), b(out.size());
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(a.data()),
                   reinterpret_cast<fftw_complex*>(b.data()));
  std::copy(b.begin(), b.end(), out.begin());
}

}  // namespace detail

// out_m = sum_j in_j exp(-2 pi i j m / n), unnormalized.
inline void fft_forward(std::span<const cplx> in, std::span<cplx> out) {
  detail::execute(detail::plans_for(in.size()).fwd, in, out);
}

// out_j = sum_m in_m exp(+2 pi i j m / n), unnormalized.
inline void fft_backward(std::span<const cplx> in, std::span<cplx> out) {
  detail::execute(detail::plans_for(in.size()).bwd, in, out);
}

}  // namespace gclm
