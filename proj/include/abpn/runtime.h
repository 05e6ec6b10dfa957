/* Copyright 2026 The ABPN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef ABPN_RUNTIME_H_
#define ABPN_RUNTIME_H_

namespace abpn {

// Raises glibc's mmap and trim thresholds to 1 GiB so the large, short-lived
// activation buffers of training and inference are recycled from the heap
// instead of being mapped and unmapped on every op. No-op elsewhere.
void tune_allocator();

}  // namespace abpn

#endif  // ABPN_RUNTIME_H_
