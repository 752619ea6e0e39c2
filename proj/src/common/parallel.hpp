// Copyright 2026 The Rerend Authors
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

#pragma once

#include <cstddef>
#include <functional>

namespace rerend {

/// Global worker cap. 0 falls back to the RRND_THREADS environment
/// variable, then to hardware concurrency.
void set_thread_limit(int n);
int thread_limit();

/// Runs body(begin, end) over [0, n) split into fixed chunks of `chunk`
/// items. Chunk boundaries do not depend on the worker count, so callers
/// that reduce per-chunk results in chunk order get thread-count
/// independent answers. The first exception thrown by a worker is
/// rethrown on the calling thread.
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t chunk_index, std::size_t begin,
                                              std::size_t end)>& body);

}  // namespace rerend
