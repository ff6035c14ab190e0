// Compares the serial reference matmul against the OpenMP kernel and checks
// that both produce bit-identical output.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "groupsleuth/tensor.hpp"

using namespace groupsleuth;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm-up
    auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    std::mt19937 rng{12345};
    std::printf("%8s %8s %12s %12s %8s %6s\n", "m", "n", "serial(ms)", "openmp(ms)", "speedup",
                "equal");
    for (std::size_t size : {64, 128, 256, 512}) {
        Tensor2 a(size, size), b(size, size);
        a.randn(rng, 1.f);
        b.randn(rng, 1.f);
        Tensor2 cs, cp;
        int reps = size <= 128 ? 20 : 5;
        double ts = time_ms([&] { matmul_serial(a, b, cs); }, reps);
        double tp = time_ms([&] { matmul(a, b, cp); }, reps);
        bool equal = cs.data == cp.data;
        std::printf("%8zu %8zu %12.3f %12.3f %7.2fx %6s\n", size, size, ts, tp, ts / tp,
                    equal ? "yes" : "NO");
        if (!equal) return 1;
    }
    return 0;
}
