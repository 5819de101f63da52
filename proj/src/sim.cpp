#include "csma/sim.hpp"

#include <atomic>
#include <thread>

namespace csma {

namespace {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

inline double to_unit(std::uint64_t x) {
    // (0,1): never returns 0, safe under log
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

struct Tally {
    std::vector<double> grants, packets, tx_slots;
    std::int64_t handshakes = 0;
    std::int64_t counted_slots = 0;
};

}  // namespace

PhaseRng::PhaseRng(std::uint64_t seed, std::uint64_t replication,
                   std::uint64_t phase)
    : base(mix(mix(seed, replication), phase)) {}

double PhaseRng::uniform(std::uint64_t node, std::uint64_t stream) const {
    return to_unit(mix(mix(base, node), stream));
}

double PhaseRng::exponential(std::uint64_t node, std::uint64_t stream) const {
    return -std::log(uniform(node, stream));
}

std::optional<int> capture_trial(const std::vector<bool>& request_mask,
                                 const SystemParams& params,
                                 const PhaseRng& rng) {
    const int n = static_cast<int>(request_mask.size());
    std::vector<double> h(n, 0.0);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        if (request_mask[i]) {
            h[i] = rng.exponential(i, 1);
            total += h[i];
        }
    }
    std::optional<int> winner;
    for (int i = 0; i < n; ++i) {
        if (!request_mask[i]) continue;
        double interference = params.noise_ratio + (total - h[i]);
        bool captured = (interference == 0.0)
                            ? true
                            : (h[i] / interference > params.b);
        if (captured) {
            if (winner)
                throw MultipleWinners("two requesters above the capture ratio");
            winner = i;
        }
    }
    return winner;
}

static Tally run_replication(const SystemParams& params,
                             const std::vector<NodeProfile>& profiles,
                             const RequestVector& p, const SimConfig& cfg,
                             int rep) {
    const int n = params.n;
    Tally t;
    t.grants.assign(n, 0.0);
    t.packets.assign(n, 0.0);
    t.tx_slots.assign(n, 0.0);

    std::vector<bool> mask(n);
    std::int64_t slot = 0;
    std::uint64_t phase = 0;
    while (true) {
        PhaseRng rng{cfg.seed, static_cast<std::uint64_t>(rep), phase};
        mask.assign(n, false);
        for (int i = 0; i < n; ++i)
            mask[i] = rng.uniform(i, 0) < p[i];
        std::optional<int> winner = capture_trial(mask, params, rng);

        // cycle length known up front; drop partial final cycles
        std::int64_t cycle = params.t0;
        if (winner) cycle += profiles[*winner].period;
        if (slot + cycle > cfg.slots) break;

        ++t.handshakes;
        for (int i = 0; i < n; ++i)
            if (mask[i]) t.tx_slots[i] += params.rts_len;
        if (winner) {
            int w = *winner;
            t.grants[w] += 1.0;
            t.tx_slots[w] += profiles[w].period;
            double ps = profiles[w].frame_success(profiles[w].period);
            if (rng.uniform(w, 2) < ps) t.packets[w] += profiles[w].period;
        }
        slot += cycle;
        ++phase;
    }
    t.counted_slots = slot;
    return t;
}

SimReport simulate(const SystemParams& params,
                   const std::vector<NodeProfile>& profiles,
                   const RequestVector& p, const SimConfig& cfg) {
    if (cfg.slots < params.t0) throw Error("horizon shorter than one handshake");
    if (cfg.replications < 1) throw Error("need at least one replication");
    const int n = params.n;
    const int reps = cfg.replications;

    std::vector<Tally> tallies(reps);
    unsigned workers =
        std::min<unsigned>(std::thread::hardware_concurrency(), reps);
    if (workers <= 1) {
        for (int r = 0; r < reps; ++r)
            tallies[r] = run_replication(params, profiles, p, cfg, r);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int r = next.fetch_add(1); r < reps;
                     r = next.fetch_add(1))
                    tallies[r] = run_replication(params, profiles, p, cfg, r);
            });
        }
        for (auto& th : pool) th.join();
    }

    // per-replication rates, then mean and standard error across reps
    Eigen::ArrayXXd g(reps, n), r(reps, n), s(reps, n);
    std::int64_t handshakes = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const Tally& t = tallies[rep];
        handshakes += t.handshakes;
        for (int i = 0; i < n; ++i) {
            g(rep, i) = t.handshakes ? t.grants[i] / t.handshakes : 0.0;
            r(rep, i) = t.counted_slots ? t.packets[i] / t.counted_slots : 0.0;
            s(rep, i) = t.counted_slots ? t.tx_slots[i] / t.counted_slots : 0.0;
        }
    }

    auto summarize = [&](const Eigen::ArrayXXd& m, Vector& mean, Vector& se) {
        mean = m.colwise().mean().transpose();
        se = Vector::Zero(n);
        if (reps > 1) {
            for (int i = 0; i < n; ++i) {
                double var = (m.col(i) - mean[i]).square().sum() / (reps - 1);
                se[i] = std::sqrt(var / reps);
            }
        }
    };

    SimReport rep;
    summarize(g, rep.grants, rep.grants_stderr);
    summarize(r, rep.throughput, rep.throughput_stderr);
    summarize(s, rep.power, rep.power_stderr);
    rep.handshakes = handshakes;
    return rep;
}

}  // namespace csma
