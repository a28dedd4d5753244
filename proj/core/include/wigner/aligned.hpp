#pragma once

#include <cstddef>
#include <new>
#include <vector>

namespace wigner {

namespace detail {
void* aligned_alloc_bytes(std::size_t bytes);
void aligned_free(void* p) noexcept;
}  // namespace detail

// Allocator backed by fftw_malloc so that every buffer handed to the
// transforms has the SIMD alignment the plans were created with.
template <typename T>
struct FftwAllocator {
  using value_type = T;

  FftwAllocator() noexcept = default;
  template <typename U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    void* p = detail::aligned_alloc_bytes(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { detail::aligned_free(p); }

  template <typename U>
  bool operator==(const FftwAllocator<U>&) const noexcept {
    return true;
  }
};

template <typename T>
using AlignedVector = std::vector<T, FftwAllocator<T>>;

}  // namespace wigner
