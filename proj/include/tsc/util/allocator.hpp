#pragma once

namespace tsc {

// Keeps glibc from serving the network's per-step temporaries (a few hundred
// KB each) with fresh mmap calls, which otherwise dominates train_step time.
// Call once at program start; a no-op on other C libraries.
void tune_allocator();

}  // namespace tsc
