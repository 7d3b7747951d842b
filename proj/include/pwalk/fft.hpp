#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "pwalk/errors.hpp"

namespace pwalk {

enum class DftSign : int { kMinus = FFTW_FORWARD, kPlus = FFTW_BACKWARD };

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class DftPlan {
 public:
  DftPlan(const std::vector<int>& dims, std::complex<double>* data, DftSign sign) {
    std::lock_guard lock(fftw_planner_mutex());
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    plan_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, static_cast<int>(sign),
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) throw Error(Errc::kResourceLimit, "FFTW could not create a plan");
  }
  DftPlan(const DftPlan&) = delete;
  DftPlan& operator=(const DftPlan&) = delete;
  ~DftPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

}  // namespace detail

/// Unnormalized in-place multidimensional DFT:
/// out[k] = sum_j in[j] exp(s * 2 pi i <j, k> / M), s = +1 for kPlus.
inline void dft_inplace(std::vector<std::complex<double>>& data, const std::vector<int>& dims, DftSign sign) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  if (n != data.size()) throw Error(Errc::kInvalidArgument, "DFT buffer size does not match dims");
  detail::DftPlan plan(dims, data.data(), sign);
  plan.execute();
}

}  // namespace pwalk
