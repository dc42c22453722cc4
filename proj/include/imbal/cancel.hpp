/*
 * Copyright 2026 The imbal Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef IMBAL_CANCEL_HPP_
#define IMBAL_CANCEL_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <memory>
#include <vector>

#include "imbal/error.hpp"

namespace imbal {

using SteadyClock = std::chrono::steady_clock;

// Cooperative cancellation handle. Long-running loops call Check(), which
// throws Cancelled once the deadline has passed or Stop() was requested from
// another thread. Copies share the stop flag.
class CancelToken {
 public:
  CancelToken()
      : flag_(std::make_shared<std::atomic<bool>>(false)),
        deadline_(SteadyClock::time_point::max()) {}

  explicit CancelToken(SteadyClock::time_point deadline)
      : flag_(std::make_shared<std::atomic<bool>>(false)), deadline_(deadline) {}

  // A token that never fires.
  static const CancelToken& None() {
    static const CancelToken token;
    return token;
  }

  // A token with its own stop flag and deadline that also fires when this
  // token (or any token it is linked to) is stopped. The earlier of the two
  // deadlines applies.
  CancelToken Linked(SteadyClock::time_point deadline) const {
    CancelToken child(std::min(deadline, deadline_));
    child.parents_ = parents_;
    child.parents_.push_back(flag_);
    return child;
  }

  void Stop() const { flag_->store(true, std::memory_order_relaxed); }

  bool Expired() const {
    if (flag_->load(std::memory_order_relaxed)) return true;
    for (const auto& p : parents_) {
      if (p->load(std::memory_order_relaxed)) return true;
    }
    return deadline_ != SteadyClock::time_point::max() && SteadyClock::now() >= deadline_;
  }

  void Check() const {
    if (Expired()) throw Cancelled();
  }

  SteadyClock::time_point deadline() const { return deadline_; }

 private:
  std::shared_ptr<std::atomic<bool>> flag_;
  std::vector<std::shared_ptr<std::atomic<bool>>> parents_;
  SteadyClock::time_point deadline_;
};

}  // namespace imbal

#endif  // IMBAL_CANCEL_HPP_
