#include "csma/capture.hpp"

namespace csma {

double conditional_capture(int s, double b, double noise_ratio) {
    if (s < 1) throw Error("need at least one requester");
    if (b <= 1.0) throw InvalidCaptureRatio("conditional_capture needs b > 1");
    return std::pow(1.0 / (1.0 + b), s - 1) * std::exp(-b * noise_ratio);
}

GrantVector grant_probabilities(const RequestVector& p,
                                const SystemParams& params) {
    const int n = static_cast<int>(p.size());
    const double alpha = params.alpha();
    const double cf = params.capture_factor();
    GrantVector g = GrantVector::Zero(n);

    if (n > 64) {
        // log-space to avoid underflow of long products
        Vector lf = (1.0 - alpha * p).log();
        double total = lf.sum();
        for (int i = 0; i < n; ++i) {
            if (p[i] == 0.0) continue;
            g[i] = cf * p[i] * std::exp(total - lf[i]);
        }
        return g;
    }

    // prefix/suffix products of (1 - alpha p_j) give each "all but i" product
    Vector factor = 1.0 - alpha * p;
    Vector prefix = Vector::Ones(n + 1), suffix = Vector::Ones(n + 1);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] * factor[i];
    for (int i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] * factor[i];
    for (int i = 0; i < n; ++i) g[i] = cf * p[i] * prefix[i] * suffix[i + 1];
    return g;
}

GrantVector grant_oracle_enum(const RequestVector& p,
                              const SystemParams& params) {
    const int n = static_cast<int>(p.size());
    if (n > 20) throw TooManyNodes("enumeration oracle limited to n <= 20");
    GrantVector g = GrantVector::Zero(n);
    const std::uint64_t subsets = 1ull << n;
    for (std::uint64_t mask = 1; mask < subsets; ++mask) {
        double prob = 1.0;
        int s = 0;
        for (int j = 0; j < n; ++j) {
            if (mask & (1ull << j)) {
                prob *= p[j];
                ++s;
            } else {
                prob *= 1.0 - p[j];
            }
        }
        if (prob == 0.0) continue;
        double cap = conditional_capture(s, params.b, params.noise_ratio);
        for (int i = 0; i < n; ++i)
            if (mask & (1ull << i)) g[i] += prob * cap;
    }
    return g;
}

}  // namespace csma
