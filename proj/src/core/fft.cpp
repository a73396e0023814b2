#include "paprlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace paprlab::fft {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // The planner only inspects these buffers; FFTW_ESTIMATE does not touch them.
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(std::span<const cplx> in, std::span<cplx> out, int sign) {
  if (in.size() != out.size()) throw InputShapeError("fft: input and output lengths differ");
  if (in.empty()) return;
  fftw_plan plan = cache().get(in.size(), sign);
  auto* src = const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data()));
  if (in.data() == out.data()) {
    thread_local std::vector<cplx> scratch;
    scratch.assign(in.begin(), in.end());
    src = reinterpret_cast<fftw_complex*>(scratch.data());
  }
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void forward(std::span<const cplx> in, std::span<cplx> out) { run(in, out, FFTW_FORWARD); }
void inverse(std::span<const cplx> in, std::span<cplx> out) { run(in, out, FFTW_BACKWARD); }

}  // namespace paprlab::fft
