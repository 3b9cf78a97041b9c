#include "greenxva/mc_oracle.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "greenxva/cds1d.hpp"
#include "greenxva/error.hpp"

namespace greenxva::mc {

namespace {

enum Quantity { kSurvY, kSurvXY, kSurvAll, kCva, kDva, kQuantities };

constexpr std::int64_t kChunk = 1024;

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
    }
    void merge(const Moments& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
};

McEstimate finish(const Moments& m, std::int64_t n) {
    McEstimate e;
    e.n_effective = n;
    e.mean = m.sum / static_cast<double>(n);
    const double var = std::max(m.sum_sq / static_cast<double>(n) - e.mean * e.mean, 0.0) *
                       static_cast<double>(n) / static_cast<double>(std::max<std::int64_t>(n - 1, 1));
    e.std_error = std::sqrt(var / static_cast<double>(n));
    return e;
}

struct Engine {
    int dims = 3;
    std::array<double, 3> x0{};
    std::array<std::array<double, 3>, 3> chol{};  // lower triangular
    int steps = 0;
    double dt = 0.0;
    int levels = 1;
    const model::CdsTerms* terms = nullptr;  // null: survival only

    [[nodiscard]] int stride(int level) const { return 1 << (levels - 1 - level); }

    // One path from the normals z (steps x dims) with the given sign.
    // out[level * kQuantities + q].
    void path(const std::vector<double>& z, double sign, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        std::array<double, 3> x = x0;
        std::vector<std::array<double, 3>> prev(static_cast<std::size_t>(levels), x0);
        std::vector<std::array<bool, 3>> dead(static_cast<std::size_t>(levels), {false, false, false});
        std::vector<int> first(static_cast<std::size_t>(levels), -1);
        const double sq = std::sqrt(dt);
        for (int k = 1; k <= steps; ++k) {
            const double* zk = z.data() + static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(dims);
            for (int i = 0; i < dims; ++i) {
                double w = 0.0;
                for (int j = 0; j <= i; ++j) w += chol[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * zk[j];
                x[static_cast<std::size_t>(i)] += sign * sq * w;
            }
            for (int l = 0; l < levels; ++l) {
                if (k % stride(l) != 0) continue;
                const auto li = static_cast<std::size_t>(l);
                int hit = -1;
                double frac = 2.0;
                for (int i = 0; i < dims; ++i) {
                    const auto ii = static_cast<std::size_t>(i);
                    if (dead[li][ii] || x[ii] > 0.0) continue;
                    dead[li][ii] = true;
                    const double f = prev[li][ii] / (prev[li][ii] - x[ii]);
                    if (f < frac) {
                        frac = f;
                        hit = i;
                    }
                }
                prev[li] = x;
                if (hit < 0 || first[li] >= 0) continue;
                first[li] = hit;
                if (!terms || hit == 1) continue;
                const double t = k * dt;
                const double v = cds1d::cds_value_1d(terms->maturity - t, std::max(x[1], 0.0), terms->coupon,
                                                     terms->rate, terms->recovery_rn);
                const double df = std::exp(-terms->rate * t);
                double* o = out.data() + li * kQuantities;
                if (hit == 0) o[kCva] = (1.0 - terms->recovery_ps) * df * std::max(v, 0.0);
                if (hit == 2) o[kDva] = (1.0 - terms->recovery_pb) * df * std::max(-v, 0.0);
            }
        }
        for (int l = 0; l < levels; ++l) {
            const auto& d = dead[static_cast<std::size_t>(l)];
            double* o = out.data() + static_cast<std::size_t>(l) * kQuantities;
            o[kSurvY] = d[1] ? 0.0 : 1.0;
            o[kSurvXY] = (d[0] || d[1]) ? 0.0 : 1.0;
            o[kSurvAll] = (d[0] || d[1] || d[2]) ? 0.0 : 1.0;
        }
    }
};

// Moments per level and quantity, then the extrapolated quantities.
struct Accumulator {
    std::vector<Moments> m;
    explicit Accumulator(int levels) : m(static_cast<std::size_t>((levels + 1) * kQuantities)) {}
};

Accumulator run(const Engine& e, const McConfig& cfg) {
    const std::int64_t units = cfg.antithetic ? (cfg.n_paths + 1) / 2 : cfg.n_paths;
    const std::int64_t chunks = (units + kChunk - 1) / kChunk;
    std::vector<Accumulator> parts(static_cast<std::size_t>(chunks), Accumulator(e.levels));
    std::atomic<std::int64_t> next{0};
    const double root2 = std::sqrt(2.0);

    auto worker = [&]() {
        const std::size_t nz = static_cast<std::size_t>(e.steps) * static_cast<std::size_t>(e.dims);
        std::vector<double> z(nz);
        const std::size_t nq = static_cast<std::size_t>(e.levels) * kQuantities;
        std::vector<double> a(nq), b(nq), s(nq);
        for (std::int64_t c = next++; c < chunks; c = next++) {
            std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                              static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> normal;
            auto& acc = parts[static_cast<std::size_t>(c)];
            const std::int64_t end = std::min(units, (c + 1) * kChunk);
            for (std::int64_t u = c * kChunk; u < end; ++u) {
                for (auto& v : z) v = normal(rng);
                e.path(z, 1.0, a);
                if (cfg.antithetic) {
                    e.path(z, -1.0, b);
                    for (std::size_t i = 0; i < nq; ++i) s[i] = 0.5 * (a[i] + b[i]);
                } else {
                    s = a;
                }
                for (std::size_t i = 0; i < nq; ++i) acc.m[i].add(s[i]);
                const std::size_t fine = static_cast<std::size_t>(e.levels - 1) * kQuantities;
                const std::size_t coarse = e.levels > 1 ? fine - kQuantities : fine;
                for (std::size_t q = 0; q < kQuantities; ++q) {
                    const double x = e.levels > 1 ? (root2 * s[fine + q] - s[coarse + q]) / (root2 - 1.0) : s[fine + q];
                    acc.m[nq + q].add(x);
                }
            }
        }
    };
    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = static_cast<int>(std::clamp<std::int64_t>(threads, 1, chunks));
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Accumulator total(e.levels);
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < total.m.size(); ++i) total.m[i].merge(p.m[i]);
    }
    return total;
}

std::array<std::array<double, 3>, 3> cholesky3(int dims, const model::CorrelationTriple& rho) {
    std::array<std::array<double, 3>, 3> c{};
    if (dims == 1) {
        c[0][0] = 1.0;
    } else if (dims == 2) {
        c[0][0] = 1.0;
        c[1][0] = rho.rho_xy;
        c[1][1] = std::sqrt(1.0 - rho.rho_xy * rho.rho_xy);
    } else {
        c[0][0] = 1.0;
        c[1][0] = rho.rho_xy;
        c[1][1] = std::sqrt(1.0 - rho.rho_xy * rho.rho_xy);
        c[2][0] = rho.rho_xz;
        c[2][1] = (rho.rho_yz - rho.rho_xy * rho.rho_xz) / c[1][1];
        c[2][2] = std::sqrt(std::max(1.0 - c[2][0] * c[2][0] - c[2][1] * c[2][1], 0.0));
    }
    return c;
}

std::int64_t units_of(const McConfig& cfg) { return cfg.antithetic ? (cfg.n_paths + 1) / 2 : cfg.n_paths; }

void check_drivers(std::span<const double> x0s) {
    for (double x : x0s) {
        if (!(x > 0.0)) throw ConfigError("mc: starting distances must be positive");
    }
}

}  // namespace

void validate_config(const McConfig& cfg, double horizon) {
    if (cfg.n_paths < 10000) throw ConfigError("mc: n_paths must be at least 1e4");
    if (!(horizon > 0.0)) throw ConfigError("mc: horizon must be positive");
    if (!(cfg.dt > 0.0) || cfg.dt > horizon / 50.0 * (1.0 + 1e-12)) {
        throw ConfigError("mc: dt must lie in (0, horizon / 50]");
    }
    if (cfg.threads < 0) throw ConfigError("mc: threads must be nonnegative");
}

McEstimate simulate_survival(int dims, std::span<const double> x0s, const model::CorrelationTriple& rho,
                             double tau, const McConfig& cfg) {
    validate_config(cfg, tau);
    if (dims < 1 || dims > 3) throw ConfigError("mc: dims must be 1, 2 or 3");
    if (static_cast<int>(x0s.size()) != dims) throw ConfigError("mc: one starting distance per dimension");
    check_drivers(x0s);
    if (dims == 2) model::validate_pair_correlation(rho.rho_xy);
    if (dims == 3) (void)model::validate_correlation(rho);

    Engine e;
    e.dims = dims;
    std::copy(x0s.begin(), x0s.end(), e.x0.begin());
    e.chol = cholesky3(dims, rho);
    e.steps = static_cast<int>(std::ceil(tau / cfg.dt - 1e-9));
    e.dt = tau / e.steps;
    const auto acc = run(e, cfg);
    return finish(acc.m[kSurvAll], units_of(cfg));
}

CvaDva simulate_cva_dva(const cds3d::Drivers& drivers, const model::CorrelationTriple& rho,
                        const model::CdsTerms& terms, const McConfig& cfg) {
    validate_config(cfg, terms.maturity);
    const std::array<double, 3> x0{drivers.x0, drivers.y0, drivers.z0};
    check_drivers(x0);
    (void)model::validate_correlation(rho);

    Engine e;
    e.x0 = x0;
    e.chol = cholesky3(3, rho);
    e.steps = static_cast<int>(std::ceil(terms.maturity / cfg.dt - 1e-9));
    e.dt = terms.maturity / e.steps;
    e.terms = &terms;
    const auto acc = run(e, cfg);
    return {finish(acc.m[kCva], units_of(cfg)), finish(acc.m[kDva], units_of(cfg))};
}

MultiLevelResult simulate_levels(const cds3d::Drivers& drivers, const model::CorrelationTriple& rho,
                                 const model::CdsTerms& terms, const McConfig& cfg, int coarse_steps,
                                 int levels) {
    if (coarse_steps < 50) throw ConfigError("mc: at least 50 steps on the coarsest level");
    if (levels < 1 || levels > 10) throw ConfigError("mc: levels must be in [1, 10]");
    McConfig c = cfg;
    c.dt = terms.maturity / coarse_steps;
    validate_config(c, terms.maturity);
    const std::array<double, 3> x0{drivers.x0, drivers.y0, drivers.z0};
    check_drivers(x0);
    (void)model::validate_correlation(rho);

    Engine e;
    e.x0 = x0;
    e.chol = cholesky3(3, rho);
    e.levels = levels;
    e.steps = coarse_steps << (levels - 1);
    e.dt = terms.maturity / e.steps;
    e.terms = &terms;
    const auto acc = run(e, c);
    const std::int64_t n = units_of(c);

    MultiLevelResult out;
    for (int l = 0; l < levels; ++l) out.dt.push_back(terms.maturity / (coarse_steps << l));
    auto fill = [&](LevelEstimates& le, int q) {
        for (int l = 0; l < levels; ++l) {
            le.levels.push_back(finish(acc.m[static_cast<std::size_t>(l * kQuantities + q)], n));
        }
        le.extrapolated = finish(acc.m[static_cast<std::size_t>(levels * kQuantities + q)], n);
    };
    fill(out.survival_y, kSurvY);
    fill(out.survival_xy, kSurvXY);
    fill(out.survival_xyz, kSurvAll);
    fill(out.cva, kCva);
    fill(out.dva, kDva);
    return out;
}

}  // namespace greenxva::mc
