#pragma once

#include <Eigen/Core>
#include <memory>

#include "sgi/grid.hpp"

namespace sgi {

// Sets the OpenMP team size and the thread count used for new FFT plans.
void set_worker_count(int workers);
int worker_count();

// In-place complex DFT over a grid's active axes.  The raw transforms are
// unnormalized; forward()/inverse() apply 1/sqrt(N) each (unitary).
class SpectralTransform {
 public:
  explicit SpectralTransform(const Grid& grid);
  ~SpectralTransform();
  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  void forward_raw(Eigen::ArrayXcd& data) const;
  void inverse_raw(Eigen::ArrayXcd& data) const;
  void forward(Eigen::ArrayXcd& data) const;
  void inverse(Eigen::ArrayXcd& data) const;

  std::size_t size() const { return size_; }
  long executed() const { return executed_; }

 private:
  struct Plans;
  std::unique_ptr<Plans> plans_;
  std::size_t size_;
  mutable long executed_ = 0;
  void execute(Eigen::ArrayXcd& data, bool forward) const;
};

}  // namespace sgi
