#include "ckam/util.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace ckam {

ScalarMax maximize_on_grid(const std::function<double(double)>& f,
                           double lo, double hi, int n_grid, int n_golden) {
    if (!(hi > lo) || n_grid < 3)
        throw std::invalid_argument("maximize_on_grid: bad bracket or grid");
    const double step = (hi - lo) / (n_grid - 1);
    int best_i = 0;
    double best_v = -HUGE_VAL;
    std::vector<double> vals(static_cast<size_t>(n_grid));
    for (int i = 0; i < n_grid; ++i) {
        const double x = lo + i * step;
        vals[static_cast<size_t>(i)] = f(x);
        if (vals[static_cast<size_t>(i)] > best_v) {
            best_v = vals[static_cast<size_t>(i)];
            best_i = i;
        }
    }
    if (best_i == 0 || best_i == n_grid - 1)
        throw std::domain_error(
            "maximize_on_grid: maximizer on box boundary; enlarge the search box");

    ScalarMax best{lo + best_i * step, best_v};
    // Golden-section shrink of [a, b] around the incumbent.
    const double inv_phi = 0.6180339887498949;
    double a = lo + (best_i - 1) * step;
    double b = lo + (best_i + 1) * step;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    auto consider = [&best](double x, double v) {
        if (v > best.value) best = {x, v};
    };
    consider(x1, f1);
    consider(x2, f2);
    for (int it = 0; it < n_golden; ++it) {
        if (f1 >= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
            consider(x1, f1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
            consider(x2, f2);
        }
    }
    return best;
}

int worker_cap() {
    if (const char* env = std::getenv("CONTACT_WEAKKAM_THREADS")) {
        long n = 0;
        if (parse_long(env, n) && n >= 1) return static_cast<int>(n);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    const int workers = std::min(n, worker_cap());
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto body = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc{} && ptr == e;
}

bool parse_long(const std::string& s, long& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [ptr, ec] = std::from_chars(b, e, out, 10);
    return ec == std::errc{} && ptr == e;
}

} // namespace ckam
