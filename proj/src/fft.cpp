#include "glrr/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include <fftw3.h>

namespace glrr::fft
{

namespace
{

// Plans are created once per (length, direction) and shared; planning is
// serialized, execution through fftw_execute_dft is reentrant.
class PlanCache
{
public:
    ~PlanCache()
    {
        for (auto& [key, plan] : m_plans)
        {
            fftw_destroy_plan(plan);
        }
    }

    fftw_plan get(int n, int sign)
    {
        std::lock_guard<std::mutex> lock(m_mutex);
        const auto key = std::make_pair(n, sign);
        auto it        = m_plans.find(key);
        if (it != m_plans.end())
        {
            return it->second;
        }
        fftw_complex* in  = fftw_alloc_complex(static_cast<std::size_t>(n));
        fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n));
        fftw_plan plan    = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        m_plans.emplace(key, plan);
        return plan;
    }

private:
    std::mutex m_mutex;
    std::map<std::pair<int, int>, fftw_plan> m_plans;
};

PlanCache& cache()
{
    static PlanCache instance;
    return instance;
}

ComplexMatrix transform(const ComplexMatrix& x, int sign)
{
    const Index n = x.rows();
    ComplexMatrix y(n, x.cols());
    if (n == 0)
    {
        return y;
    }
    fftw_plan plan     = cache().get(static_cast<int>(n), sign);
    ComplexMatrix work = x;
    for (Index c = 0; c < x.cols(); ++c)
    {
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(work.col(c).data()),
                         reinterpret_cast<fftw_complex*>(y.col(c).data()));
    }
    y /= std::sqrt(static_cast<double>(n));
    return y;
}

} // namespace

ComplexMatrix forward(const ComplexMatrix& x)
{
    return transform(x, FFTW_FORWARD);
}

ComplexMatrix inverse(const ComplexMatrix& y)
{
    return transform(y, FFTW_BACKWARD);
}

} // namespace glrr::fft
