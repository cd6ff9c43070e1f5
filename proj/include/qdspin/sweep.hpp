#pragma once

// Parameter sweeps over the drive strength and the enhanced decay rate,
// with CSV serialization. Sweeps evaluate the steady-state fidelity and the
// initialization time on a rectangular grid; execution may be parallel but
// the result order and every serialized byte are independent of the thread
// count.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dynamics.hpp"
#include "model.hpp"

namespace qdspin::sweep {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A sweep that failed at one grid point, with the offending coordinates.
class SweepPointError : public std::runtime_error {
public:
    SweepPointError(double omega_ghz, double gamma_ghz, const std::string& what)
        : std::runtime_error("sweep point omega=" + std::to_string(omega_ghz) +
                             " GHz, gamma15=" + std::to_string(gamma_ghz) + " GHz failed: " + what),
          omega_ghz_(omega_ghz), gamma_ghz_(gamma_ghz) {}

    double omega_ghz() const { return omega_ghz_; }
    double gamma_ghz() const { return gamma_ghz_; }

private:
    double omega_ghz_;
    double gamma_ghz_;
};

enum class Spacing { linear, logarithmic };

// One sweep axis in GHz. count == 1 pins the axis at min_ghz.
struct AxisSpec {
    double min_ghz = 0.0;
    double max_ghz = 0.0;
    std::size_t count = 0;
    Spacing spacing = Spacing::linear;

    std::vector<double> values() const {
        validate();
        std::vector<double> v(count);
        v.front() = min_ghz;
        if (count == 1) return v;
        v.back() = max_ghz;
        if (spacing == Spacing::linear) {
            const double step = (max_ghz - min_ghz) / static_cast<double>(count - 1);
            for (std::size_t i = 1; i + 1 < count; ++i)
                v[i] = min_ghz + step * static_cast<double>(i);
        } else {
            const double la = std::log(min_ghz);
            const double lb = std::log(max_ghz);
            for (std::size_t i = 1; i + 1 < count; ++i)
                v[i] = std::exp(la + (lb - la) * static_cast<double>(i) /
                                         static_cast<double>(count - 1));
        }
        return v;
    }

    void validate() const {
        if (count == 0) {
            throw std::invalid_argument("AxisSpec: count must be at least 1");
        }
        if (!std::isfinite(min_ghz) || !std::isfinite(max_ghz)) {
            throw std::invalid_argument("AxisSpec: bounds must be finite");
        }
        if (min_ghz > max_ghz) {
            throw std::invalid_argument("AxisSpec: min must not exceed max");
        }
        if (spacing == Spacing::logarithmic && !(min_ghz > 0.0)) {
            throw std::invalid_argument("AxisSpec: logarithmic spacing needs positive bounds");
        }
    }
};

// Default grid of the reference study: drive strength 0.01 to 5 GHz on 60
// log-spaced points, enhanced decay 5 to 20 GHz on 31 linear points.
inline AxisSpec default_omega_axis() { return {0.01, 5.0, 60, Spacing::logarithmic}; }
inline AxisSpec default_gamma_axis() { return {5.0, 20.0, 31, Spacing::linear}; }

// fixed_rates supplies every channel the grid does not vary (its omega_ghz
// and gamma15_ghz fields are overwritten per point).
struct SweepGrid {
    AxisSpec omega_axis = default_omega_axis();
    AxisSpec gamma_axis = default_gamma_axis();
    model::RateSet fixed_rates{};
};

// One grid point. t_init_ns and speed_ghz are present iff the threshold is
// reachable at that point.
struct SweepRecord {
    double omega_ghz = 0.0;
    double gamma_ghz = 0.0;
    double fidelity = 0.0;
    std::optional<double> t_init_ns;
    std::optional<double> speed_ghz;
    bool reachable = false;
};

namespace detail {

inline SweepRecord evaluate_point(double omega_ghz, double gamma_ghz,
                                  const model::RateSet& fixed_rates) {
    model::RateSet r = fixed_rates;
    r.omega_ghz = omega_ghz;
    r.gamma15_ghz = gamma_ghz;

    const model::Liouvillian liou = model::build_liouvillian(r);
    const model::DensityMatrix steady = dynamics::steady_state(liou);

    SweepRecord rec;
    rec.omega_ghz = omega_ghz;
    rec.gamma_ghz = gamma_ghz;
    rec.fidelity = std::clamp(steady.population(model::Level::spin_up), 0.0, 1.0);

    const dynamics::InitTimeResult it = dynamics::detail::init_time_with_steady(
        liou, steady, r, dynamics::default_threshold, 1e-4);
    rec.reachable = it.reachable();
    if (it.reachable()) {
        rec.t_init_ns = it.time_ns();
        rec.speed_ghz = dynamics::speed_from_time(it.time_ns());
    }
    return rec;
}

} // namespace detail

// Evaluate the grid, gamma-major (the gamma axis varies slowest). The
// record at index gi * omega_count + oi belongs to gamma value gi and omega
// value oi. thread_count 0 means one worker per hardware thread; results
// are identical for every thread count. A failing point aborts the sweep
// with SweepPointError for the lowest-index failing record.
inline std::vector<SweepRecord> run_sweep(const SweepGrid& grid, unsigned thread_count = 0) {
    model::validate(grid.fixed_rates);
    const std::vector<double> omegas = grid.omega_axis.values();
    const std::vector<double> gammas = grid.gamma_axis.values();
    const std::size_t total = omegas.size() * gammas.size();

    std::vector<SweepRecord> records(total);
    auto coords = [&](std::size_t idx) {
        return std::pair<double, double>{omegas[idx % omegas.size()], gammas[idx / omegas.size()]};
    };

    unsigned workers = thread_count != 0 ? thread_count
                                         : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));

    std::size_t failed_idx = total;
    std::exception_ptr failure;

    if (workers <= 1) {
        for (std::size_t idx = 0; idx < total; ++idx) {
            const auto [o, g] = coords(idx);
            try {
                records[idx] = detail::evaluate_point(o, g, grid.fixed_rates);
            } catch (...) {
                failed_idx = idx;
                failure = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex failure_mutex;
        auto work = [&] {
            for (;;) {
                const std::size_t idx = next.fetch_add(1);
                if (idx >= total) return;
                const auto [o, g] = coords(idx);
                try {
                    records[idx] = detail::evaluate_point(o, g, grid.fixed_rates);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (idx < failed_idx) {
                        failed_idx = idx;
                        failure = std::current_exception();
                    }
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    if (failure) {
        const auto [o, g] = coords(failed_idx);
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            throw SweepPointError(o, g, e.what());
        }
    }
    return records;
}

// Best points of a sweep: the maximum-fidelity record, and the minimum
// initialization time over the reachable records (absent if none are
// reachable). Ties break toward smaller omega, then smaller gamma.
struct Extrema {
    SweepRecord max_fidelity;
    std::optional<SweepRecord> min_time;
};

inline Extrema find_extrema(std::span<const SweepRecord> records) {
    if (records.empty()) {
        throw std::invalid_argument("find_extrema: no records");
    }
    auto tie_earlier = [](const SweepRecord& a, const SweepRecord& b) {
        // true when a precedes b in the tie order
        if (a.omega_ghz != b.omega_ghz) return a.omega_ghz < b.omega_ghz;
        return a.gamma_ghz < b.gamma_ghz;
    };

    Extrema out{records.front(), std::nullopt};
    for (const SweepRecord& r : records) {
        if (r.fidelity > out.max_fidelity.fidelity ||
            (r.fidelity == out.max_fidelity.fidelity && tie_earlier(r, out.max_fidelity))) {
            out.max_fidelity = r;
        }
        if (!r.reachable) continue;
        if (!out.min_time || *r.t_init_ns < *out.min_time->t_init_ns ||
            (*r.t_init_ns == *out.min_time->t_init_ns && tie_earlier(r, *out.min_time))) {
            out.min_time = r;
        }
    }
    return out;
}

namespace detail {

inline std::string format_g9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace detail

// CSV serialization: header line, then one row per record in input order.
// Numbers carry 9 significant digits; absent fields are empty; reachable is
// 1 or 0; lines end with a bare newline. Returns the number of bytes
// written.
inline std::size_t write_csv(std::span<const SweepRecord> records, std::ostream& os) {
    std::string out = "omega_ghz,gamma_ghz,fidelity,t_init_ns,speed_ghz,reachable\n";
    for (const SweepRecord& r : records) {
        out += detail::format_g9(r.omega_ghz);
        out += ',';
        out += detail::format_g9(r.gamma_ghz);
        out += ',';
        out += detail::format_g9(r.fidelity);
        out += ',';
        if (r.t_init_ns) out += detail::format_g9(*r.t_init_ns);
        out += ',';
        if (r.speed_ghz) out += detail::format_g9(*r.speed_ghz);
        out += ',';
        out += r.reachable ? '1' : '0';
        out += '\n';
    }
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!os) {
        throw IoError("write_csv: stream write failed");
    }
    return out.size();
}

inline std::size_t write_csv(std::span<const SweepRecord> records,
                             const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("write_csv: cannot open " + path.string() + " for writing");
    }
    const std::size_t n = write_csv(records, f);
    f.flush();
    if (!f) {
        throw IoError("write_csv: write to " + path.string() + " failed");
    }
    return n;
}

} // namespace qdspin::sweep
