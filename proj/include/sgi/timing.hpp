#pragma once

#include <array>
#include <chrono>
#include <string_view>

namespace sgi {

enum class Phase { transforms, potential, observables, momentum };
inline constexpr std::array<Phase, 4> kPhases{Phase::transforms, Phase::potential,
                                              Phase::observables, Phase::momentum};
std::string_view phase_name(Phase p);

class PhaseTimer {
 public:
  double seconds(Phase p) const { return seconds_[int(p)]; }
  double total() const;
  void add(Phase p, double s) { seconds_[int(p)] += s; }
  void merge(const PhaseTimer& other);

  class Scope {
   public:
    Scope(PhaseTimer& t, Phase p) : timer_(t), phase_(p), start_(std::chrono::steady_clock::now()) {}
    ~Scope() {
      timer_.add(phase_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
    }

   private:
    PhaseTimer& timer_;
    Phase phase_;
    std::chrono::steady_clock::time_point start_;
  };

 private:
  std::array<double, 4> seconds_{};
};

}  // namespace sgi
