// Copyright 2026 The tgrl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TGRL_INTERVAL_H_
#define TGRL_INTERVAL_H_

namespace tgrl {

// Boundary pair on the normalized [0, 1] timeline. start > end is
// representable; the environment punishes it rather than forbidding it.
struct Interval {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  bool operator==(const Interval&) const = default;
};

}  // namespace tgrl

#endif  // TGRL_INTERVAL_H_
