#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace wsc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Validation failures (bad inputs, dimension mismatches). CLI exit code 1.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failures (rank deficiency, divergence, domain errors). CLI exit code 2.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline int log_level() {
    static const int level = [] {
        const char* env = std::getenv("WSC_LOG");
        if (!env) return 1;
        const std::string s(env);
        if (s == "debug") return 3;
        if (s == "info") return 2;
        if (s == "warn") return 1;
        if (s == "error") return 0;
        return 1;
    }();
    return level;
}

}  // namespace detail

inline void log_msg(int level, const std::string& msg) {
    static const char* tags[] = {"error", "warn", "info", "debug"};
    if (level <= detail::log_level())
        std::fprintf(stderr, "[wsc:%s] %s\n", tags[level], msg.c_str());
}

inline void log_warn(const std::string& msg) { log_msg(1, msg); }
inline void log_info(const std::string& msg) { log_msg(2, msg); }
inline void log_debug(const std::string& msg) { log_msg(3, msg); }

// splitmix64 finalizer. Also the documented stream-mixing function: the
// stream for trial t of seed s is keyed by mix64(s ^ mix64(GOLDEN * (t+1))).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based generator: output i of a stream is mix64(key + i*GOLDEN),
// so sequences are reproducible independent of call interleaving and
// per-trial streams never overlap for distinct trial indices.
class Rng {
public:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix64(seed ^ mix64(kGolden * (stream + 1)))), counter_(0) {}

    static Rng for_trial(std::uint64_t seed, std::uint64_t trial_index) {
        return Rng(seed, trial_index);
    }

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

    // uniform in [0, 1), 53-bit resolution
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // inverse-CDF draw from a finite distribution; the last positive bucket
    // absorbs rounding residue so the draw is always in range
    int next_index(const Vec& probs) {
        const double u = next_double();
        double acc = 0.0;
        int last_positive = -1;
        for (int i = 0; i < probs.size(); ++i) {
            if (probs[i] <= 0.0) continue;
            last_positive = i;
            acc += probs[i];
            if (u < acc) return i;
        }
        if (last_positive < 0) throw NumericError("Rng::next_index: all-zero distribution");
        return last_positive;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

}  // namespace wsc
