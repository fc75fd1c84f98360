// Compares the serial reference path loop against the OpenMP kernels on a
// representative positivity audit and a weak-error run.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cir/experiments.hpp"

namespace {

template <typename F>
double time_seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    const cir::CirParams p(2.0, 1.0, 1.0, 4.0);
    const cir::GridSpec g(1.0, 1000);
    const auto sd = cir::SchemeSpec::semi_discrete(1.0);
    const auto exact = cir::SchemeSpec::of(cir::SchemeKind::ExactSim);
    const int n_paths = 20000;

#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled\n");
#endif

    for (const auto& [name, spec] : {std::pair{"sd a=1", sd}, std::pair{"exact", exact}}) {
        cir::PositivityAudit serial_audit, parallel_audit;
        const double ts = time_seconds([&] {
            serial_audit = cir::positivity_audit(p, g, spec, n_paths, 7,
                                                 cir::McExecution::Serial);
        });
        const double tp = time_seconds([&] {
            parallel_audit = cir::positivity_audit(p, g, spec, n_paths, 7,
                                                   cir::McExecution::Parallel);
        });
        const bool same = serial_audit.n_negative_nodes == parallel_audit.n_negative_nodes &&
                          serial_audit.min_value == parallel_audit.min_value;
        std::printf("%-8s serial %.3fs  parallel %.3fs  speedup %.2fx  identical %s\n", name,
                    ts, tp, ts / tp, same ? "yes" : "NO");
    }
    return 0;
}
