#include "sgi/fft.hpp"

#include <fftw3.h>
#include <omp.h>

#include <cmath>
#include <mutex>

#include "sgi/errors.hpp"

namespace sgi {
namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int g_workers = 1;

void init_threads_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { fftw_init_threads(); });
}

}  // namespace

void set_worker_count(int workers) {
  if (workers < 1) throw ConfigError("worker count must be at least 1");
  g_workers = workers;
  omp_set_num_threads(workers);
}

int worker_count() { return g_workers; }

struct SpectralTransform::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  fftw_plan forward_unaligned = nullptr;
  fftw_plan backward_unaligned = nullptr;
  int alignment = 0;
  int rank = 1;
  int n[3] = {1, 1, 1};

  fftw_plan make(int sign, unsigned flags) {
    fftw_complex* scratch = fftw_alloc_complex(std::size_t(n[0]) * n[1] * n[2]);
    fftw_plan p = rank == 1 ? fftw_plan_dft_1d(n[2], scratch, scratch, sign, flags)
                            : fftw_plan_dft_3d(n[0], n[1], n[2], scratch, scratch, sign, flags);
    if (alignment == 0 && !(flags & FFTW_UNALIGNED)) alignment = fftw_alignment_of(&scratch[0][0]);
    fftw_free(scratch);
    if (!p) throw NumericalFailure("FFT planning failed");
    return p;
  }

  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (fftw_plan p : {forward, backward, forward_unaligned, backward_unaligned})
      if (p) fftw_destroy_plan(p);
  }
};

SpectralTransform::SpectralTransform(const Grid& grid)
    : plans_(std::make_unique<Plans>()), size_(grid.size()) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  init_threads_once();
  fftw_plan_with_nthreads(g_workers);
  plans_->rank = grid.dims() == 1 ? 1 : 3;
  for (int a = 0; a < 3; ++a) plans_->n[a] = grid.points(a);
  // FFTW_ESTIMATE keeps plans (and therefore rounding) independent of timing.
  plans_->forward = plans_->make(FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->backward = plans_->make(FFTW_BACKWARD, FFTW_ESTIMATE);
}

SpectralTransform::~SpectralTransform() = default;

void SpectralTransform::execute(Eigen::ArrayXcd& data, bool forward) const {
  if (std::size_t(data.size()) != size_) throw GridMismatchError("FFT size does not match data");
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan = forward ? plans_->forward : plans_->backward;
  if (fftw_alignment_of(&ptr[0][0]) != plans_->alignment) {
    fftw_plan& fallback = forward ? plans_->forward_unaligned : plans_->backward_unaligned;
    if (!fallback) {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_plan_with_nthreads(g_workers);
      fallback = plans_->make(forward ? FFTW_FORWARD : FFTW_BACKWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    plan = fallback;
  }
  fftw_execute_dft(plan, ptr, ptr);
  ++executed_;
}

void SpectralTransform::forward_raw(Eigen::ArrayXcd& data) const { execute(data, true); }
void SpectralTransform::inverse_raw(Eigen::ArrayXcd& data) const { execute(data, false); }

void SpectralTransform::forward(Eigen::ArrayXcd& data) const {
  execute(data, true);
  data *= 1.0 / std::sqrt(double(size_));
}

void SpectralTransform::inverse(Eigen::ArrayXcd& data) const {
  execute(data, false);
  data *= 1.0 / std::sqrt(double(size_));
}

}  // namespace sgi
