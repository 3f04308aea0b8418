// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstddef>
#include <new>
#include <vector>

namespace starm {

// Process-wide accounting of bytes held by tracked buffers. Every tensor,
// factor block, and kernel scratch area in the library is a `Buffer`, so the
// counters below see all large allocations (LAPACK workspaces included, since
// they are queried and allocated here rather than inside LAPACKE).
namespace memory {

std::size_t current_bytes() noexcept;
std::size_t peak_bytes() noexcept;

namespace detail {
void on_allocate(std::size_t bytes) noexcept;
void on_deallocate(std::size_t bytes) noexcept;
std::size_t exchange_peak(std::size_t value) noexcept;
void raise_peak(std::size_t value) noexcept;
}  // namespace detail

}  // namespace memory

template <class T>
struct TrackedAllocator {
    using value_type = T;

    TrackedAllocator() noexcept = default;
    template <class U>
    TrackedAllocator(const TrackedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        auto* p = static_cast<T*>(::operator new(n * sizeof(T)));
        memory::detail::on_allocate(n * sizeof(T));
        return p;
    }

    void deallocate(T* p, std::size_t n) noexcept {
        memory::detail::on_deallocate(n * sizeof(T));
        ::operator delete(p);
    }

    template <class U>
    bool operator==(const TrackedAllocator<U>&) const noexcept { return true; }
};

using Buffer = std::vector<double, TrackedAllocator<double>>;

/// Measures the peak number of tracked bytes allocated while the probe is
/// alive, relative to what was already live when it was created.
///
/// Probes nest. Concurrent library calls from other threads are counted too,
/// so measurements are only meaningful when one operation runs at a time.
class MemoryProbe {
public:
    MemoryProbe() noexcept
        : baseline_(memory::current_bytes()),
          saved_peak_(memory::detail::exchange_peak(baseline_)) {}

    ~MemoryProbe() { memory::detail::raise_peak(saved_peak_); }

    MemoryProbe(const MemoryProbe&) = delete;
    MemoryProbe& operator=(const MemoryProbe&) = delete;

    /// Peak transient bytes observed so far.
    std::size_t peak_bytes() const noexcept {
        const auto peak = memory::peak_bytes();
        return peak > baseline_ ? peak - baseline_ : 0;
    }

private:
    std::size_t baseline_;
    std::size_t saved_peak_;
};

}  // namespace starm
