// Copyright 2026 The tapreid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TAPREID_CORE_PARALLEL_H_
#define TAPREID_CORE_PARALLEL_H_

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace tapreid {

// 0 means "use the hardware concurrency".
inline int ResolveThreadCount(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Calls fn(begin, end) over contiguous blocks covering [0, n). Callers write
// results into per-index slots, so output never depends on the block split.
template <typename Fn>
void ParallelForRange(size_t n, int threads, Fn&& fn) {
  size_t workers = std::min<size_t>(ResolveThreadCount(threads), n);
  if (workers <= 1) {
    if (n > 0) fn(size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  size_t block = (n + workers - 1) / workers;
  for (size_t w = 0; w < workers; ++w) {
    size_t begin = w * block;
    size_t end = std::min(n, begin + block);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (std::thread& t : pool) t.join();
}

template <typename Fn>
void ParallelFor(size_t n, int threads, Fn&& fn) {
  ParallelForRange(n, threads, [&fn](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) fn(i);
  });
}

}  // namespace tapreid

#endif  // TAPREID_CORE_PARALLEL_H_
