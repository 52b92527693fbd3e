// Benchmark: serial reference loop vs the OpenMP sampling path on the
// curved fixtures. The two must agree bit-for-bit; this target reports the
// wall-clock ratio.

#include "mlh/runner.hpp"

#include <chrono>
#include <cstring>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace mlh;

namespace {

double timed_run(const Manifest& m, bool parallel, int samples, ordered_json& out) {
    RunOptions opts;
    opts.parallel = parallel;
    opts.samples = samples;
    auto t0 = std::chrono::steady_clock::now();
    RunReport rep = run(m, opts);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    out = report_to_json(rep, /*include_timing=*/false);
    if (rep.exit_code != 0) {
        std::cerr << "benchmark run failed with exit code " << rep.exit_code << "\n";
        std::exit(1);
    }
    return ms;
}

} // namespace

int main(int argc, char** argv) {
    int samples = 4000;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--samples") && i + 1 < argc) samples = std::atoi(argv[++i]);
    }

#ifdef _OPENMP
    std::cout << "OpenMP threads: " << omp_get_max_threads() << "\n";
#else
    std::cout << "built without OpenMP: parallel path falls back to serial\n";
#endif
    std::cout << "samples per run: " << samples << "\n\n";

    for (const auto& f : fixtures()) {
        if (f.manifest.exact_backend) continue; // benchmark the sampling loop only
        ordered_json serial_out, parallel_out;
        double ts = timed_run(f.manifest, false, samples, serial_out);
        double tp = timed_run(f.manifest, true, samples, parallel_out);
        bool identical = serial_out == parallel_out;
        std::cout << f.name << ":\n"
                  << "  serial    " << ts << " ms\n"
                  << "  parallel  " << tp << " ms\n"
                  << "  speedup   " << (tp > 0 ? ts / tp : 0.0) << "x\n"
                  << "  reports identical: " << (identical ? "yes" : "NO") << "\n";
        if (!identical) return 1;
    }
    return 0;
}
