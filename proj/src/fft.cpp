#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "snls/error.hpp"

namespace snls::fft {
namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dim, int extent, Direction dir) {
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    const auto key = std::make_tuple(dim, extent, sign);
    std::lock_guard lock(mutex);
    if (auto it = plans.find(key); it != plans.end()) return it->second;

    std::size_t total = 1;
    std::vector<int> dims(dim, extent);
    for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(extent);
    std::vector<std::complex<double>> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft(dim, dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw InvalidInput("fftw plan creation failed");
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void transform_cube(std::span<std::complex<double>> data, int dim, int extent, Direction dir) {
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(extent);
  require(data.size() == total, "fft: buffer size does not match grid");
  fftw_plan plan = cache().get(dim, extent, dir);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

void transform_1d(std::span<std::complex<double>> data, Direction dir) {
  transform_cube(data, 1, static_cast<int>(data.size()), dir);
}

std::size_t friendly_size(std::size_t minimum) {
  for (std::size_t n = std::max<std::size_t>(minimum, 1);; ++n) {
    std::size_t m = n;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (m % p == 0) m /= p;
    if (m == 1) return n;
  }
}

}  // namespace snls::fft
