#include "dstft/fft.hpp"

#include <fftw3.h>

#include <functional>
#include <mutex>
#include <numeric>
#include <utility>

#include "dstft/error.hpp"

namespace dstft {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftBuffer::FftBuffer(std::size_t size)
    : data_(reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * size))),
      size_(size) {
  if (size != 0 && !data_) throw std::bad_alloc();
  fill_zero();
}

void FftBuffer::fill_zero() noexcept {
  for (std::size_t i = 0; i < size_; ++i) data_[i] = {0.0, 0.0};
}

void FftBuffer::Free::operator()(std::complex<double>* p) const noexcept { fftw_free(p); }

FftPlan::FftPlan(std::vector<std::size_t> dims, Direction direction) : dims_(std::move(dims)) {
  if (dims_.empty()) throw Error(Errc::invalid_argument, "FFT needs at least one dimension");
  size_ = std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
  std::vector<int> n(dims_.begin(), dims_.end());
  FftBuffer scratch(size_);
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft(static_cast<int>(n.size()), n.data(),
                        reinterpret_cast<fftw_complex*>(scratch.data()),
                        reinterpret_cast<fftw_complex*>(scratch.data()),
                        direction == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                        FFTW_ESTIMATE);
  if (!plan_) throw Error(Errc::invalid_argument, "FFTW failed to create a plan");
}

FftPlan::~FftPlan() {
  if (plan_) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
}

FftPlan::FftPlan(FftPlan&& other) noexcept
    : plan_(std::exchange(other.plan_, nullptr)), dims_(std::move(other.dims_)), size_(other.size_) {}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
  if (this != &other) {
    if (plan_) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
    plan_ = std::exchange(other.plan_, nullptr);
    dims_ = std::move(other.dims_);
    size_ = other.size_;
  }
  return *this;
}

void FftPlan::execute(FftBuffer& buffer) const {
  if (buffer.size() != size_) throw Error(Errc::dimension_mismatch, "FFT buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(buffer.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_), p, p);
}

}  // namespace dstft
