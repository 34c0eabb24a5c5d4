// Timing comparison of the OpenMP kernels against their serial references:
// spectrum grid evaluation, batched closed-form/quadrature verification and
// one multi-start optimization point.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "springcool/optimizer.hpp"
#include "springcool/oracle.hpp"
#include "springcool/random_suite.hpp"
#include "springcool/spectra.hpp"

using namespace springcool;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

SystemParams benchmark_system() {
    SystemParams sys;
    sys.osc = {1.0, 1e6, 1e8};
    sys.readout = {10.0, 0.5, 1.0471975511965976, 0.8, 1e3};
    sys.fb = {5.0, 500.0, 1e3};
    return sys;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (compiled without OpenMP)\n");
#endif

    {
        const SystemParams sys = benchmark_system();
        std::vector<double> omegas;
        for (int i = 0; i < 200000; ++i) {
            omegas.push_back(0.01 * std::pow(10.0, 5.0 * i / 199999.0));
        }
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = spectrum_grid_serial(sys, omegas);
        const double t_serial = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        const auto parallel = spectrum_grid(sys, omegas);
        const double t_parallel = ms_since(t0);
        double checksum = 0.0;
        for (std::size_t i = 0; i < serial.size(); ++i) checksum += serial[i].s_total - parallel[i].s_total;
        std::printf("spectrum_grid   200k points   serial %8.1f ms   parallel %8.1f ms   diff %g\n",
                    t_serial, t_parallel, checksum);
    }

    {
        const auto suite = random_stable_suite(7, 48);
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = verify_batch_serial(suite, 1e-9);
        const double t_serial = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        const auto parallel = verify_batch(suite, 1e-9);
        const double t_parallel = ms_since(t0);
        double checksum = 0.0;
        for (std::size_t i = 0; i < serial.size(); ++i) checksum += serial[i].rel_x - parallel[i].rel_x;
        std::printf("verify_batch    48 configs    serial %8.1f ms   parallel %8.1f ms   diff %g\n",
                    t_serial, t_parallel, checksum);
    }

    {
        OptimizationProblem prob;
        prob.plant.osc = {1.0, 1e6, 1e8};
        prob.plant.eta = 0.8;
        prob.cq_sql = 1.0;
        prob.budget = 20000;
        prob.seed = 3;
        auto t0 = std::chrono::steady_clock::now();
        const OptimumPoint opt = optimize_purity(prob);
        const double t_par = ms_since(t0);
        std::printf("optimize_purity 20k evals     parallel starts %8.1f ms   purity %.6f\n", t_par,
                    opt.result.purity);
    }
    return 0;
}
