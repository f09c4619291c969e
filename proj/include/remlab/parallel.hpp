#pragma once
// Deterministic seed-parallel reduction: contiguous seed blocks per worker,
// per-worker partial states merged in worker order, so results are identical
// for any worker count.
#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace remlab {

template <class State, class PerSeed>
State run_seeds(int n_seeds, int workers, PerSeed per_seed) {
    workers = std::max(1, std::min(workers, n_seeds));
    if (workers == 1) {
        State st;
        for (int s = 0; s < n_seeds; ++s) per_seed(static_cast<uint64_t>(s), st);
        return st;
    }
    std::vector<State> parts(workers);
    std::vector<std::thread> ths;
    const int chunk = (n_seeds + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int lo = w * chunk, hi = std::min(n_seeds, lo + chunk);
        ths.emplace_back([&, w, lo, hi] {
            for (int s = lo; s < hi; ++s) per_seed(static_cast<uint64_t>(s), parts[w]);
        });
    }
    for (auto& th : ths) th.join();
    State st = std::move(parts[0]);
    for (int w = 1; w < workers; ++w) st.merge(parts[w]);
    return st;
}

} // namespace remlab
