// src/common.cpp

// Copyright 2026  The sct authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "sct/common.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>

namespace sct {

namespace {

std::atomic<int> g_num_threads{0};

int ResolveThreads() {
  int n = g_num_threads.load();
  if (n > 0) return n;
  const char *env = std::getenv("SCT_THREADS");
  if (env != nullptr) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

void SetNumThreads(int n) { g_num_threads.store(n < 0 ? 0 : n); }

int GetNumThreads() { return ResolveThreads(); }

void ParallelFor(size_t n, const std::function<void(size_t)> &fn) {
  if (n == 0) return;
  size_t workers = static_cast<size_t>(ResolveThreads());
  if (workers > n) workers = n;
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  size_t chunk = (n + workers - 1) / workers;
  for (size_t w = 0; w < workers; ++w) {
    size_t lo = w * chunk;
    size_t hi = lo + chunk > n ? n : lo + chunk;
    pool.emplace_back([&, w, lo, hi]() {
      try {
        for (size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string VersionString() { return "sct 1.0.0"; }

}  // namespace sct
