#include "wgqed/fft.h"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace wgqed::fft {

namespace {

// FFTW's planner is not thread-safe.
std::mutex &planner_mutex()
{
    static std::mutex m;
    return m;
}

class Plan {
public:
    Plan(std::vector<cplx> &data, Direction direction)
    {
        auto *buf = reinterpret_cast<fftw_complex *>(data.data());
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf,
                                 direction == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
        if (plan_ == nullptr) {
            throw std::runtime_error("fftw planning failed");
        }
    }
    ~Plan()
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    Plan(const Plan &) = delete;
    Plan &operator=(const Plan &) = delete;

    void execute() { fftw_execute(plan_); }

private:
    fftw_plan plan_ = nullptr;
};

} // namespace

void transform(std::vector<cplx> &data, Direction direction)
{
    if (data.empty()) {
        return;
    }
    Plan plan(data, direction);
    plan.execute();
}

const char *backend_version()
{
    return fftw_version;
}

} // namespace wgqed::fft
