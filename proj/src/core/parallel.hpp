// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace cifs {

/// Worker bound for parallel loops; 0 restores the default (hardware concurrency).
void set_thread_count(int n);
int thread_count();

/// Run body(i) for i in [0, n). Each index must write only its own output
/// slot; the first exception (lowest index) is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cifs
