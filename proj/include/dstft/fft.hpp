#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace dstft {

/// SIMD-aligned complex buffer suitable for FFT execution.
class FftBuffer {
 public:
  FftBuffer() = default;
  explicit FftBuffer(std::size_t size);

  std::complex<double>* data() noexcept { return data_.get(); }
  const std::complex<double>* data() const noexcept { return data_.get(); }
  std::size_t size() const noexcept { return size_; }
  std::span<std::complex<double>> span() noexcept { return {data_.get(), size_}; }
  std::complex<double>& operator[](std::size_t i) noexcept { return data_[i]; }
  const std::complex<double>& operator[](std::size_t i) const noexcept { return data_[i]; }
  void fill_zero() noexcept;

 private:
  struct Free {
    void operator()(std::complex<double>* p) const noexcept;
  };
  std::unique_ptr<std::complex<double>[], Free> data_;
  std::size_t size_ = 0;
};

/// In-place unnormalized multi-dimensional DFT over row-major data,
///   out[k] = sum_j in[j] * exp(sign * 2 pi i j.k / N).
///
/// Plans are created once under a global lock; `execute` is re-entrant and
/// deterministic for a given plan and buffer.
class FftPlan {
 public:
  enum class Direction { forward = -1, backward = +1 };

  FftPlan(std::vector<std::size_t> dims, Direction direction);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;

  std::size_t size() const noexcept { return size_; }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }

  /// Buffer must come from FftBuffer and hold size() elements.
  void execute(FftBuffer& buffer) const;

 private:
  void* plan_ = nullptr;
  std::vector<std::size_t> dims_;
  std::size_t size_ = 0;
};

}  // namespace dstft
