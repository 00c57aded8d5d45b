// Compares the OpenMP subset-lattice kernels against their serial twins, and
// the parallel seed sweep against the serial one. Prints one row per kernel
// with both timings and the speedup.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nadid/kernels.hpp"
#include "nadid/replicate.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::vector<double> random_monotone_table(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> values(std::size_t{1} << n);
    for (auto& v : values) v = unif(rng);
    // Running max over the lattice makes the table monotone.
    for (int bit = 0; bit < n; ++bit) {
        const std::size_t step = std::size_t{1} << bit;
        for (std::size_t mask = 0; mask < values.size(); ++mask) {
            if (mask & step) values[mask] = std::max(values[mask], values[mask ^ step]);
        }
    }
    values.front() = 0.0;
    values.back() = 1.0;
    return values;
}

struct Timing {
    double serial = 0.0;
    double parallel = 0.0;
};

void report(const char* name, const Timing& t) {
    std::printf("%-22s serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n", name,
                t.serial * 1e3, t.parallel * 1e3, t.serial / t.parallel);
}

}  // namespace

int main() {
    constexpr int n = 20;
    constexpr int reps = 5;
    std::mt19937_64 rng(12345);
    const std::vector<double> table = random_monotone_table(n, rng);
    std::vector<double> f(n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (auto& v : f) v = unif(rng);

#ifdef _OPENMP
    std::printf("threads: %d, lattice: 2^%d subsets, %d repetitions per timing\n",
                omp_get_max_threads(), n, reps);
#else
    std::printf("OpenMP disabled; lattice: 2^%d subsets, %d repetitions per timing\n", n, reps);
#endif

    {
        Timing t;
        std::vector<double> work = table;
        auto start = clock_type::now();
        for (int r = 0; r < reps; ++r) {
            work = table;
            nadid::kernels::serial::mobius_inplace(work, n);
        }
        t.serial = seconds_since(start) / reps;
        start = clock_type::now();
        for (int r = 0; r < reps; ++r) {
            work = table;
            nadid::kernels::mobius_inplace(work, n);
        }
        t.parallel = seconds_since(start) / reps;
        report("mobius_inplace", t);
    }
    {
        Timing t;
        std::vector<double> work = table;
        nadid::kernels::serial::mobius_inplace(work, n);
        std::vector<double> coeffs = work;
        auto start = clock_type::now();
        for (int r = 0; r < reps; ++r) {
            work = coeffs;
            nadid::kernels::serial::zeta_inplace(work, n);
        }
        t.serial = seconds_since(start) / reps;
        start = clock_type::now();
        for (int r = 0; r < reps; ++r) {
            work = coeffs;
            nadid::kernels::zeta_inplace(work, n);
        }
        t.parallel = seconds_since(start) / reps;
        report("zeta_inplace", t);
    }
    {
        Timing t;
        auto start = clock_type::now();
        for (int r = 0; r < reps; ++r) {
            (void)nadid::kernels::serial::first_monotonicity_violation(table, n, 1e-12);
        }
        t.serial = seconds_since(start) / reps;
        start = clock_type::now();
        for (int r = 0; r < reps; ++r) {
            (void)nadid::kernels::first_monotonicity_violation(table, n, 1e-12);
        }
        t.parallel = seconds_since(start) / reps;
        report("monotonicity_scan", t);
    }
    {
        Timing t;
        auto start = clock_type::now();
        for (int r = 0; r < reps; ++r) {
            (void)nadid::kernels::serial::shapley(table, n);
        }
        t.serial = seconds_since(start) / reps;
        start = clock_type::now();
        for (int r = 0; r < reps; ++r) {
            (void)nadid::kernels::shapley(table, n);
        }
        t.parallel = seconds_since(start) / reps;
        report("shapley", t);
    }
    {
        Timing t;
        auto start = clock_type::now();
        for (int r = 0; r < reps; ++r) {
            (void)nadid::kernels::serial::sugeno_enumerate(f, table, n);
        }
        t.serial = seconds_since(start) / reps;
        start = clock_type::now();
        for (int r = 0; r < reps; ++r) {
            (void)nadid::kernels::sugeno_enumerate(f, table, n);
        }
        t.parallel = seconds_since(start) / reps;
        report("sugeno_enumerate", t);
    }
    {
        Timing t;
        nadid::SimConfig config;
        const auto spec = nadid::CapacitySpec::make_sigmoid(5.0, 0.5, nadid::Anchor::raw);
        auto start = clock_type::now();
        (void)nadid::serial_ref::replicate(config, 64, 1, spec, nadid::NadidMode::listing);
        t.serial = seconds_since(start);
        start = clock_type::now();
        (void)nadid::replicate(config, 64, 1, spec, nadid::NadidMode::listing);
        t.parallel = seconds_since(start);
        report("replicate_64_seeds", t);
    }
    return 0;
}
