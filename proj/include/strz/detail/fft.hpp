#pragma once

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

#include "strz/grid.hpp"

namespace strz::detail {

//----------------------------------------------------------------------------
// In-place 2-d DFT in FFTW's native index order.  Plans are memoized per
// (rows, cols, sign) together with an owned aligned buffer; callers keep
// ordinary std::vector storage and never worry about FFTW alignment rules.
// FFTW_ESTIMATE keeps planning deterministic.
//----------------------------------------------------------------------------
inline void fft_exec(int n0, int n1, int sign, cd* data) {
    struct Entry {
        fftw_plan plan;
        fftw_complex* buf;
    };
    static std::map<std::tuple<int, int, int>, Entry> cache;
    static std::mutex mtx;

    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find({n0, n1, sign});
    if (it == cache.end()) {
        Entry e;
        e.buf = fftw_alloc_complex(static_cast<std::size_t>(n0) * n1);
        if (!e.buf) throw std::runtime_error("fft_exec: allocation failed");
        e.plan = fftw_plan_dft_2d(n0, n1, e.buf, e.buf, sign, FFTW_ESTIMATE);
        if (!e.plan) throw std::runtime_error("fft_exec: planning failed");
        it = cache.emplace(std::make_tuple(n0, n1, sign), e).first;
    }
    const std::size_t bytes = sizeof(fftw_complex) * static_cast<std::size_t>(n0) * n1;
    std::memcpy(it->second.buf, data, bytes);
    fftw_execute(it->second.plan);
    std::memcpy(data, it->second.buf, bytes);
}

}  // namespace strz::detail
