#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

#include "caloric/error.hpp"
#include "caloric/spectral/spectral.hpp"

namespace caloric::spectral {

namespace {

template <class T>
struct FftwDeleter {
  void operator()(T* p) const noexcept { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
  auto* raw = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (raw == nullptr) throw Error("spectral", "fftw_malloc failed");
  return FftwBuffer<T>(raw);
}

// Plans are created once per grid size under a lock (the FFTW planner is not
// thread-safe) and executed through the new-array interface on per-call
// buffers, which is safe to do concurrently. FFTW_ESTIMATE keeps the chosen
// algorithm, and hence every rounding, identical from run to run.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  ~PlanPair() {
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (inverse != nullptr) fftw_destroy_plan(inverse);
  }
};

const PlanPair& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    const std::size_t reals = static_cast<std::size_t>(n) * n;
    const std::size_t modes = static_cast<std::size_t>(n) * (n / 2 + 1);
    auto in = fftw_buffer<double>(reals);
    auto out = fftw_buffer<fftw_complex>(modes);
    auto pair = std::make_unique<PlanPair>();
    pair->forward = fftw_plan_dft_r2c_2d(n, n, in.get(), out.get(), FFTW_ESTIMATE);
    pair->inverse = fftw_plan_dft_c2r_2d(n, n, out.get(), in.get(), FFTW_ESTIMATE);
    if (pair->forward == nullptr || pair->inverse == nullptr) {
      throw Error("spectral", "FFTW planning failed");
    }
    slot = std::move(pair);
  }
  return *slot;
}

}  // namespace

Spectrum dft_forward(const ScalarField& f) {
  const Grid2& grid = f.grid();
  if (f.size() != grid.point_count()) throw Error("spectral", "field dimensions do not match grid");
  const auto& plans = plans_for(grid.n());
  auto in = fftw_buffer<double>(grid.point_count());
  auto out = fftw_buffer<fftw_complex>(grid.mode_count());
  std::copy(f.values().begin(), f.values().end(), in.get());
  fftw_execute_dft_r2c(plans.forward, in.get(), out.get());
  Spectrum spectrum(grid);
  std::memcpy(static_cast<void*>(spectrum.coeffs().data()), out.get(), sizeof(fftw_complex) * grid.mode_count());
  return spectrum;
}

ScalarField dft_inverse(const Spectrum& spectrum) {
  const Grid2& grid = spectrum.grid();
  const auto& plans = plans_for(grid.n());
  auto in = fftw_buffer<fftw_complex>(grid.mode_count());
  auto out = fftw_buffer<double>(grid.point_count());
  std::memcpy(in.get(), spectrum.coeffs().data(), sizeof(fftw_complex) * grid.mode_count());
  fftw_execute_dft_c2r(plans.inverse, in.get(), out.get());
  const double scale = 1.0 / static_cast<double>(grid.point_count());
  std::vector<double> values(grid.point_count());
  for (std::size_t p = 0; p < values.size(); ++p) values[p] = out[p] * scale;
  return ScalarField(grid, std::move(values));
}

}  // namespace caloric::spectral
