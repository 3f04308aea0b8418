// SPDX-License-Identifier: Apache-2.0
#include "starm/memory.hpp"

namespace starm::memory {

namespace {
std::atomic<std::size_t> g_current{0};
std::atomic<std::size_t> g_peak{0};
}  // namespace

std::size_t current_bytes() noexcept { return g_current.load(std::memory_order_relaxed); }
std::size_t peak_bytes() noexcept { return g_peak.load(std::memory_order_relaxed); }

namespace detail {

void raise_peak(std::size_t value) noexcept {
    auto peak = g_peak.load(std::memory_order_relaxed);
    while (value > peak && !g_peak.compare_exchange_weak(peak, value, std::memory_order_relaxed)) {
    }
}

void on_allocate(std::size_t bytes) noexcept {
    const auto now = g_current.fetch_add(bytes, std::memory_order_relaxed) + bytes;
    raise_peak(now);
}

void on_deallocate(std::size_t bytes) noexcept {
    g_current.fetch_sub(bytes, std::memory_order_relaxed);
}

std::size_t exchange_peak(std::size_t value) noexcept {
    return g_peak.exchange(value, std::memory_order_relaxed);
}

}  // namespace detail
}  // namespace starm::memory
